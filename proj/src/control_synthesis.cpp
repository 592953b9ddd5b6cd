#include "hso/control_synthesis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <sstream>

#include "hso/random.hpp"

namespace hso {
namespace {

void check_dims(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                const MatrixXd& r) {
  const auto n = a.rows();
  const auto m = b.cols();
  if (a.cols() != n || b.rows() != n || q.rows() != n || q.cols() != n ||
      r.rows() != m || r.cols() != m) {
    throw DimensionMismatch("Riccati data: inconsistent A, B, Q, R sizes");
  }
}

/// B R^-1 B^T, throwing if R is not positive definite.
MatrixXd input_weighting(const MatrixXd& b, const MatrixXd& r) {
  Eigen::LLT<MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("R is not symmetric positive definite");
  }
  return b * llt.solve(b.transpose());
}

}  // namespace

double riccati_residual(const MatrixXd& a, const MatrixXd& b,
                        const MatrixXd& q, const MatrixXd& r,
                        const MatrixXd& s) {
  check_dims(a, b, q, r);
  const MatrixXd brb = input_weighting(b, r);
  return (a.transpose() * s + s * a - s * brb * s + q).norm();
}

CareSolution solve_care(const MatrixXd& a, const MatrixXd& b,
                        const MatrixXd& q, const MatrixXd& r,
                        const CareOptions& options) {
  check_dims(a, b, q, r);
  const MatrixXd brb = input_weighting(b, r);
  const auto n = a.rows();

  // Vectorized in column-major order so the generic RK4 step applies.
  auto field = [&](double, const VectorXd& p) -> VectorXd {
    const Eigen::Map<const MatrixXd> pm(p.data(), n, n);
    MatrixXd dp = a.transpose() * pm + pm * a - pm * brb * pm + q;
    return Eigen::Map<const VectorXd>(dp.data(), n * n);
  };

  VectorXd p = VectorXd::Zero(n * n);
  double t = 0.0;
  long steps = 0;
  double rate = field(t, p).norm();
  while (rate > options.tol) {
    if (t >= options.t_max) {
      std::ostringstream os;
      os << "solve_care: no convergence by t=" << t
         << " (||dP/dt||_F=" << rate << ")";
      throw SynthesisFailure(rate, os.str());
    }
    p = rk4_step(field, t, p, options.step);
    Eigen::Map<MatrixXd> pm(p.data(), n, n);
    pm = (0.5 * (pm + pm.transpose())).eval();
    t += options.step;
    ++steps;
    rate = field(t, p).norm();
  }

  CareSolution out;
  out.S = Eigen::Map<const MatrixXd>(p.data(), n, n);
  out.residual_norm = rate;
  out.time_to_converge = t;
  out.steps = steps;
  return out;
}

ExpertPolicy lqr_gain(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                      const MatrixXd& r, const CareOptions& options,
                      const StabilityCheckOptions& stability) {
  const CareSolution care = solve_care(a, b, q, r, options);

  ExpertPolicy policy;
  policy.S = care.S;
  policy.Q = q;
  policy.R = r;
  policy.K = -r.llt().solve(b.transpose() * care.S);
  policy.riccati_residual = care.residual_norm;

  const MatrixXd closed = a + b * policy.K;
  SplitMix64 rng(stability.seed);
  VectorXd x0(a.rows());
  for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) = rng.uniform(-1.0, 1.0);
  VectorXd x = x0;
  auto field = [&](double, const VectorXd& y) -> VectorXd {
    return closed * y;
  };
  const long n_steps =
      static_cast<long>(std::ceil(stability.horizon / stability.step));
  for (long k = 0; k < n_steps; ++k) {
    x = rk4_step(field, k * stability.step, x, stability.step);
  }
  const double final_norm = x.norm();
  policy.decay_factor = final_norm > 0.0
                            ? x0.norm() / final_norm
                            : std::numeric_limits<double>::infinity();
  if (policy.decay_factor < stability.min_decay) {
    std::ostringstream os;
    os << "lqr_gain: closed loop decayed only by a factor of "
       << policy.decay_factor << " over " << stability.horizon << " s";
    throw SynthesisFailure(care.residual_norm, os.str());
  }
  return policy;
}

MatrixXd observer_gain(const MatrixXd& a, const MatrixXd& c,
                       const std::vector<double>& poles) {
  const auto n = a.rows();
  if (a.cols() != n) throw DimensionMismatch("observer_gain: A not square");
  if (static_cast<Eigen::Index>(poles.size()) != n) {
    throw DimensionMismatch("observer_gain: need one pole per state");
  }
  for (double p : poles) {
    if (!(p < 0.0) || !std::isfinite(p)) {
      throw InvalidArgument("observer_gain: poles must be real and negative");
    }
  }
  if (c.rows() != n || c.cols() != n) {
    throw UnsupportedConfiguration(
        "observer_gain: pole placement needs a square, invertible C; "
        "supply observer.K3 directly in the config");
  }
  Eigen::FullPivLU<MatrixXd> lu(c);
  if (!lu.isInvertible()) {
    throw UnsupportedConfiguration(
        "observer_gain: C is singular; supply observer.K3 directly in the "
        "config");
  }
  const VectorXd lambda = Eigen::Map<const VectorXd>(poles.data(), n);
  const MatrixXd shifted = a - MatrixXd(lambda.asDiagonal());
  return shifted * lu.inverse();
}

}  // namespace hso
