#pragma once

// Quadratic bases for x^T S x, x^T Q x, u^T R u and R u.
//
// A symmetric k x k matrix is stored as its upper triangle, pairs (i, j)
// with i <= j in row-major order. Weights carry the raw matrix entries; the
// factor 2 on off-diagonal monomials lives in the basis, so that
//   w^T sigma(x) = x^T unvec(w) x   and   sigma_R2(u) vec(R) = R u.

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "hso/numerics.hpp"

namespace hso {

/// Length of the upper-triangle vectorization of a k x k matrix.
constexpr Eigen::Index tri_size(Eigen::Index k) { return k * (k + 1) / 2; }

/// Sizes of the stacked basis for an n-state, m-input problem.
struct BasisLayout {
  Eigen::Index n = 0;
  Eigen::Index m = 0;

  BasisLayout() = default;
  BasisLayout(Eigen::Index states, Eigen::Index inputs);

  Eigen::Index p_s() const { return tri_size(n); }
  Eigen::Index p_q() const { return tri_size(n); }
  Eigen::Index p_r() const { return tri_size(m); }
  /// Number of estimated weights: P_S + P_Q + M - 1 (r1 is fixed).
  Eigen::Index reduced_size() const { return p_s() + p_q() + p_r() - 1; }
  /// Column of R_11 in the unreduced regressor.
  Eigen::Index r1_column() const { return p_s() + p_q(); }
  /// Rows contributed by one history-stack entry.
  Eigen::Index rows_per_entry() const { return 1 + m; }
};

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sym_vec(
    const Eigen::MatrixBase<Derived>& s, double sym_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = s.rows();
  if (s.cols() != k) throw DimensionMismatch("sym_vec: matrix not square");
  const double scale = std::max(1.0, double(s.cwiseAbs().maxCoeff()));
  if (double((s - s.transpose()).cwiseAbs().maxCoeff()) > sym_tol * scale) {
    throw InvalidArgument("sym_vec: matrix is not symmetric");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(tri_size(k));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) w(idx++) = s(i, j);
  }
  return w;
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
sym_unvec(const Eigen::MatrixBase<Derived>& w, Eigen::Index k) {
  using Scalar = typename Derived::Scalar;
  if (w.size() != tri_size(k)) {
    throw DimensionMismatch("sym_unvec: length is not k(k+1)/2");
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s(k, k);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      s(i, j) = w(idx);
      s(j, i) = w(idx);
      ++idx;
    }
  }
  return s;
}

/// Quadratic monomials: x_i^2 on the diagonal, 2 x_i x_j off it. Serves as
/// sigma_S, sigma_Q (over x) and sigma_R1 (over u).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> sigma_quadratic(
    const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(tri_size(k));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    out(idx++) = x(i) * x(i);
    for (Eigen::Index j = i + 1; j < k; ++j) out(idx++) = Scalar(2) * x(i) * x(j);
  }
  return out;
}

template <typename Derived>
auto sigma_S(const Eigen::MatrixBase<Derived>& x) {
  return sigma_quadratic(x);
}
template <typename Derived>
auto sigma_Q(const Eigen::MatrixBase<Derived>& x) {
  return sigma_quadratic(x);
}
template <typename Derived>
auto sigma_R1(const Eigen::MatrixBase<Derived>& u) {
  return sigma_quadratic(u);
}

/// Jacobian of sigma_S, P_S x n.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
grad_sigma_S(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = x.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(tri_size(k),
                                                                  k);
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    g(idx++, i) = Scalar(2) * x(i);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      g(idx, i) = Scalar(2) * x(j);
      g(idx, j) = Scalar(2) * x(i);
      ++idx;
    }
  }
  return g;
}

/// m x M matrix with sigma_R2(u) * sym_vec(R) = R u.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
sigma_R2(const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index k = u.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(k,
                                                                  tri_size(k));
  Eigen::Index idx = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    out(i, idx++) = u(i);
    for (Eigen::Index j = i + 1; j < k; ++j) {
      out(i, idx) = u(j);
      out(j, idx) = u(i);
      ++idx;
    }
  }
  return out;
}

/// Estimated weights [w_S; w_Q; w_R_minus] with the fixed R_11 value r1.
struct WeightVector {
  VectorXd w_S;
  VectorXd w_Q;
  VectorXd w_R_minus;
  double r1 = 1.0;

  static WeightVector zeros(const BasisLayout& layout, double r1);
  /// Splits a stacked reduced vector of length layout.reduced_size().
  static WeightVector from_reduced(const BasisLayout& layout,
                                   const VectorXd& reduced, double r1);
  VectorXd reduced() const;
};

/// Weights of the expert cost scaled by c = r1 / R_11, the member of the
/// scaling family (cS, cQ, cR) that is consistent with the fixed r1.
WeightVector expert_weights(const BasisLayout& layout, const MatrixXd& s,
                            const MatrixXd& q, const MatrixXd& r, double r1);

/// Rows of the stacked inverse Bellman / control residual equation for one
/// sample (x_hat, u), with the r1 column moved into the constant term.
///   [delta; Delta_u] = regressor * w_reduced - sigma_u
struct RegressorBlock {
  /// (1 + m) x (P_S + P_Q + M - 1): row 0 is sigma_delta, rows 1..m are
  /// sigma_Delta_u.
  MatrixXd regressor;
  /// [-u_1^2 r1; -2 u_1 r1; 0_{m-1}].
  VectorXd sigma_u;

  auto sigma_delta() const { return regressor.topRows(1); }
  auto sigma_Delta_u() const { return regressor.bottomRows(regressor.rows() - 1); }
};

RegressorBlock build_regressor_block(const VectorXd& x_hat, const VectorXd& u,
                                     const MatrixXd& a, const MatrixXd& b,
                                     double r1);

/// Matrices implied by a weight vector and the feedback gain they induce.
struct ExtractedSolution {
  MatrixXd S;
  MatrixXd Q;
  MatrixXd R;
  MatrixXd K;
};

/// Throws ExtractionError if R-hat is singular.
ExtractedSolution extract_solution(const WeightVector& w, const MatrixXd& b);

}  // namespace hso
