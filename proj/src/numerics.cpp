#include "hso/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>

namespace hso {
namespace {

void require_finite(const MatrixXd& m, const char* where) {
  if (!all_finite(m)) {
    throw InvalidArgument(std::string(where) + ": non-finite input");
  }
}

Eigen::Index retained_count(const VectorXd& sv, double rank_tol) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cut = rank_tol * sv(0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  return r;
}

}  // namespace

VectorXd singular_values(const MatrixXd& m) {
  require_finite(m, "singular_values");
  if (m.size() == 0) return VectorXd();
  Eigen::BDCSVD<MatrixXd> svd(m);
  return svd.singularValues();
}

double regularized_condition(const MatrixXd& m, double eps) {
  if (eps < 0.0) throw InvalidArgument("regularized_condition: eps < 0");
  const VectorXd sv = singular_values(m);
  if (sv.size() == 0) throw DimensionMismatch("regularized_condition: empty");
  const double hi = sv(0) * sv(0) + eps;
  const double lo = sv(sv.size() - 1) * sv(sv.size() - 1) + eps;
  if (lo == 0.0) {
    throw SingularityError(
        "regularized_condition: smallest singular value is zero and eps = 0");
  }
  return hi / lo;
}

double regularized_condition_from_gram(const MatrixXd& gram, double eps) {
  if (eps < 0.0) throw InvalidArgument("regularized_condition: eps < 0");
  if (gram.rows() != gram.cols() || gram.size() == 0) {
    throw DimensionMismatch("regularized_condition_from_gram: not square");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const VectorXd& ev = es.eigenvalues();
  const double hi = std::max(ev(ev.size() - 1), 0.0) + eps;
  const double lo = std::max(ev(0), 0.0) + eps;
  if (lo == 0.0) {
    throw SingularityError(
        "regularized_condition: Gram matrix is singular and eps = 0");
  }
  return hi / lo;
}

Eigen::Index numerical_rank(const MatrixXd& m, double rank_tol) {
  return retained_count(singular_values(m), rank_tol);
}

MatrixXd range_basis(const MatrixXd& m, double rank_tol) {
  require_finite(m, "range_basis");
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
  const Eigen::Index r = retained_count(svd.singularValues(), rank_tol);
  return svd.matrixU().leftCols(r);
}

MatrixXd null_space_basis(const MatrixXd& m, double rank_tol) {
  require_finite(m, "null_space_basis");
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeFullV);
  const Eigen::Index r = retained_count(svd.singularValues(), rank_tol);
  return svd.matrixV().rightCols(m.cols() - r);
}

double range_projection_residual(const MatrixXd& m, const VectorXd& v,
                                 double rank_tol) {
  if (v.size() != m.rows()) {
    throw DimensionMismatch(
        "range_projection_residual: vector length must equal row count");
  }
  if (!(rank_tol > 0.0)) {
    throw InvalidArgument("range_projection_residual: rank_tol must be > 0");
  }
  const MatrixXd u = range_basis(m, rank_tol);
  const VectorXd residual = v - u * (u.transpose() * v);
  return residual.norm();
}

}  // namespace hso
