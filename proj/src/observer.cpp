#include "hso/observer.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>

namespace hso {
namespace {

// Relative eigenvalue floor below which an unregularized normal matrix is
// reported as singular.
constexpr double kSingularFloor = 1e-13;

}  // namespace

VectorXd delta(const MatrixXd& sigma_hat, const VectorXd& sigma_u,
               const VectorXd& w) {
  if (sigma_hat.rows() != sigma_u.size() || sigma_hat.cols() != w.size()) {
    throw DimensionMismatch("delta: Sigma, Sigma_u and w disagree");
  }
  return sigma_u - sigma_hat * w;
}

WeightUpdateLaw::WeightUpdateLaw(const MatrixXd& sigma_hat,
                                 const VectorXd& sigma_u, double k4,
                                 double eps)
    : active_(true),
      sigma_hat_(sigma_hat),
      sigma_u_(sigma_u),
      k4_(k4),
      eps_(eps) {
  if (sigma_hat.rows() != sigma_u.size()) {
    throw DimensionMismatch("WeightUpdateLaw: Sigma and Sigma_u disagree");
  }
  if (!(k4 > 0.0)) throw InvalidArgument("WeightUpdateLaw: k4 must be > 0");
  if (eps < 0.0) throw InvalidArgument("WeightUpdateLaw: eps must be >= 0");

  const MatrixXd gram = sigma_hat.transpose() * sigma_hat;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram);
  eigvecs_ = es.eigenvectors();
  eigvals_ = es.eigenvalues().cwiseMax(0.0);
  const double top = eigvals_.size() ? eigvals_.maxCoeff() : 0.0;
  if (eps == 0.0 && (eigvals_.size() == 0 || top == 0.0 ||
                     eigvals_.minCoeff() <= kSingularFloor * top)) {
    throw SingularityError(
        "WeightUpdateLaw: Sigma^T Sigma is singular and eps = 0");
  }
  const VectorXd inv = (eigvals_.array() + eps).inverse().matrix();
  const VectorXd ratio = eigvals_.cwiseProduct(inv);
  contraction_ = k4 * eigvecs_ * ratio.asDiagonal() * eigvecs_.transpose();
  target_ = k4 * eigvecs_ *
            (inv.asDiagonal() *
             (eigvecs_.transpose() * (sigma_hat.transpose() * sigma_u)));
}

WeightUpdateLaw::WeightUpdateLaw(const HistoryStack& stack, double k4)
    : WeightUpdateLaw(stack.sigma_hat(), stack.sigma_u(), k4,
                      stack.settings().epsilon) {}

VectorXd WeightUpdateLaw::rate(const VectorXd& w) const {
  if (!active_) return VectorXd::Zero(w.size());
  return target_ - contraction_ * w;
}

VectorXd WeightUpdateLaw::delta(const VectorXd& w) const {
  return hso::delta(sigma_hat_, sigma_u_, w);
}

double WeightUpdateLaw::vdot(const VectorXd& d) const {
  if (!active_) return 0.0;
  const VectorXd y = eigvecs_.transpose() * (sigma_hat_.transpose() * d);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double den = eigvals_(i) + eps_;
    if (den > 0.0) acc += y(i) * y(i) / den;
  }
  return -k4_ * acc;
}

double vdot_check(const MatrixXd& sigma_hat, const VectorXd& d, double k4,
                  double eps) {
  if (sigma_hat.rows() != d.size()) {
    throw DimensionMismatch("vdot_check: Sigma and Delta disagree");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sigma_hat.transpose() *
                                             sigma_hat);
  const VectorXd y =
      es.eigenvectors().transpose() * (sigma_hat.transpose() * d);
  const VectorXd lam = es.eigenvalues().cwiseMax(0.0);
  const double top = lam.size() ? lam.maxCoeff() : 0.0;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double den = lam(i) + eps;
    // Components on a numerically null eigenvector carry only roundoff when
    // eps = 0; the pseudo-inverse drops them.
    if (den > kSingularFloor * top) acc += y(i) * y(i) / den;
  }
  return -k4 * acc;
}

ObserverDerivative observer_derivative(const VectorXd& x_hat,
                                       const VectorXd& w, const VectorXd& y,
                                       const VectorXd& u, const LtiSystem& sys,
                                       const MatrixXd& k3,
                                       const WeightUpdateLaw& law) {
  ObserverDerivative d;
  d.x_hat_dot = sys.A * x_hat + sys.B * u + k3 * (y - sys.C * x_hat);
  d.w_dot = law.rate(w);
  return d;
}

ObserverState observer_step(const ObserverState& state, const VectorXd& y,
                            const VectorXd& u, const WeightUpdateLaw& law,
                            const LtiSystem& sys, const GainConfig& gains,
                            double h) {
  const Eigen::Index n = state.x_hat.size();
  const Eigen::Index p = state.w.size();
  if (y.size() != sys.outputs() || u.size() != sys.inputs() ||
      n != sys.states() || gains.K3.rows() != n ||
      gains.K3.cols() != sys.outputs()) {
    throw DimensionMismatch("observer_step: dimensions disagree");
  }
  VectorXd z(n + p);
  z << state.x_hat, state.w;
  auto field = [&](double, const VectorXd& s) -> VectorXd {
    const ObserverDerivative d = observer_derivative(
        s.head(n), s.tail(p), y, u, sys, gains.K3, law);
    VectorXd out(n + p);
    out << d.x_hat_dot, d.w_dot;
    return out;
  };
  const VectorXd next = rk4_step(field, state.t, z, h);
  return {next.head(n), next.tail(p), state.t + h};
}

EquivalenceReport certify_equivalence(const WeightVector& w,
                                      const HistoryStack& stack,
                                      const LtiSystem& sys,
                                      const MatrixXd& k_expert,
                                      double equivalence_tol, double hjb_tol) {
  EquivalenceReport rep;
  rep.solution = extract_solution(w, sys.B);
  const ExtractedSolution& s = rep.solution;
  rep.equivalence_tol = equivalence_tol;
  rep.hjb_tol = hjb_tol;

  const MatrixXd r_inv_bt = s.R.fullPivLu().solve(sys.B.transpose());
  const MatrixXd hjb = sys.A.transpose() * s.S + s.S * sys.A -
                       s.S * sys.B * r_inv_bt * s.S + s.Q;
  rep.full_hjb_residual = hjb.norm();
  rep.gain_error = (s.K - k_expert).norm();

  const auto& entries = stack.entries();
  rep.pointwise_hjb_residuals.resize(static_cast<Eigen::Index>(entries.size()));
  rep.max_scaled_residual = 0.0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const VectorXd& x = entries[i].x_hat;
    const double r = x.dot(hjb * x);
    rep.pointwise_hjb_residuals(static_cast<Eigen::Index>(i)) = r;
    rep.max_scaled_residual =
        std::max(rep.max_scaled_residual, std::abs(r) / (1.0 + x.squaredNorm()));
  }
  rep.equivalent = rep.max_scaled_residual <= hjb_tol &&
                   rep.gain_error <= equivalence_tol;
  return rep;
}

}  // namespace hso
