#pragma once

#include <Eigen/Core>
#include <cmath>
#include <sstream>

#include "hso/errors.hpp"

namespace hso {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Singular values below rank_tol * sigma_max are treated as zero.
inline constexpr double kDefaultRankTol = 1e-8;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

/// Classical fourth-order Runge-Kutta step of y' = f(t, y).
///
/// `f` must be callable as f(double, const VectorXd&) and return something
/// assignable to the plain type of `y`. Throws IntegrationFault if any stage
/// evaluation is non-finite.
template <typename Field, typename Derived>
typename Derived::PlainObject rk4_step(Field&& f, double t,
                                       const Eigen::MatrixBase<Derived>& y,
                                       double h) {
  using Plain = typename Derived::PlainObject;
  if (!(h > 0.0)) {
    throw InvalidArgument("rk4_step: step must be positive");
  }
  auto checked = [t](Plain k, int stage) {
    if (!all_finite(k)) {
      std::ostringstream os;
      os << "rk4_step: non-finite vector field at stage " << stage
         << " of step starting at t=" << t;
      throw IntegrationFault(t, os.str());
    }
    return k;
  };
  const Plain y0 = y;
  const Plain k1 = checked(f(t, y0), 1);
  const Plain k2 = checked(f(t + 0.5 * h, Plain(y0 + 0.5 * h * k1)), 2);
  const Plain k3 = checked(f(t + 0.5 * h, Plain(y0 + 0.5 * h * k2)), 3);
  const Plain k4 = checked(f(t + h, Plain(y0 + h * k3)), 4);
  return y0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// All min(rows, cols) singular values, descending.
VectorXd singular_values(const MatrixXd& m);

/// (sigma_max^2 + eps) / (sigma_min^2 + eps), the condition number of
/// M^T M + eps I.
double regularized_condition(const MatrixXd& m, double eps);

/// Same quantity computed from the Gram matrix G = M^T M directly.
/// Tiny negative eigenvalues from roundoff are clamped to zero.
double regularized_condition_from_gram(const MatrixXd& gram, double eps);

/// Number of singular values strictly above rank_tol * sigma_max.
Eigen::Index numerical_rank(const MatrixXd& m,
                            double rank_tol = kDefaultRankTol);

/// Orthonormal basis of range(M), one column per retained singular value.
MatrixXd range_basis(const MatrixXd& m, double rank_tol = kDefaultRankTol);

/// Orthonormal basis of null(M) (right singular vectors that were dropped).
MatrixXd null_space_basis(const MatrixXd& m,
                          double rank_tol = kDefaultRankTol);

/// || v - P_range(M) v ||_2.
double range_projection_residual(const MatrixXd& m, const VectorXd& v,
                                 double rank_tol = kDefaultRankTol);

}  // namespace hso
