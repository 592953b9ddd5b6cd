#include "hso/parameterization.hpp"

#include <Eigen/LU>

namespace hso {

BasisLayout::BasisLayout(Eigen::Index states, Eigen::Index inputs)
    : n(states), m(inputs) {
  if (n <= 0 || m <= 0) {
    throw InvalidArgument("BasisLayout: dimensions must be positive");
  }
}

WeightVector WeightVector::zeros(const BasisLayout& layout, double r1) {
  return from_reduced(layout, VectorXd::Zero(layout.reduced_size()), r1);
}

WeightVector WeightVector::from_reduced(const BasisLayout& layout,
                                        const VectorXd& reduced, double r1) {
  if (reduced.size() != layout.reduced_size()) {
    throw DimensionMismatch("WeightVector: reduced length mismatch");
  }
  WeightVector w;
  w.w_S = reduced.segment(0, layout.p_s());
  w.w_Q = reduced.segment(layout.p_s(), layout.p_q());
  w.w_R_minus = reduced.tail(layout.p_r() - 1);
  w.r1 = r1;
  return w;
}

VectorXd WeightVector::reduced() const {
  VectorXd out(w_S.size() + w_Q.size() + w_R_minus.size());
  out << w_S, w_Q, w_R_minus;
  return out;
}

WeightVector expert_weights(const BasisLayout& layout, const MatrixXd& s,
                            const MatrixXd& q, const MatrixXd& r, double r1) {
  if (!(r1 > 0.0) || !(r(0, 0) > 0.0)) {
    throw InvalidArgument("expert_weights: r1 and R_11 must be positive");
  }
  const double c = r1 / r(0, 0);
  WeightVector w;
  w.w_S = c * sym_vec(s, 1e-8);
  w.w_Q = c * sym_vec(q);
  const VectorXd wr = c * sym_vec(r);
  w.w_R_minus = wr.tail(layout.p_r() - 1);
  w.r1 = r1;
  return w;
}

RegressorBlock build_regressor_block(const VectorXd& x_hat, const VectorXd& u,
                                     const MatrixXd& a, const MatrixXd& b,
                                     double r1) {
  const Eigen::Index n = x_hat.size();
  const Eigen::Index m = u.size();
  if (a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != m) {
    throw DimensionMismatch("build_regressor_block: A, B, x, u disagree");
  }
  if (!(r1 > 0.0)) throw InvalidArgument("build_regressor_block: r1 <= 0");
  const BasisLayout layout(n, m);

  const MatrixXd grad_t = grad_sigma_S(x_hat).transpose();  // n x P_S
  MatrixXd full = MatrixXd::Zero(1 + m, layout.reduced_size() + 1);
  full.block(0, 0, 1, layout.p_s()) = (a * x_hat + b * u).transpose() * grad_t;
  full.block(0, layout.p_s(), 1, layout.p_q()) = sigma_Q(x_hat).transpose();
  full.block(0, layout.r1_column(), 1, layout.p_r()) = sigma_R1(u).transpose();
  full.block(1, 0, m, layout.p_s()) = b.transpose() * grad_t;
  full.block(1, layout.r1_column(), m, layout.p_r()) = 2.0 * sigma_R2(u);

  const Eigen::Index rc = layout.r1_column();
  const Eigen::Index tail = full.cols() - rc - 1;
  RegressorBlock block;
  block.regressor.resize(1 + m, layout.reduced_size());
  block.regressor << full.leftCols(rc), full.rightCols(tail);
  block.sigma_u = -r1 * full.col(rc);
  return block;
}

ExtractedSolution extract_solution(const WeightVector& w, const MatrixXd& b) {
  const Eigen::Index n = b.rows();
  const Eigen::Index m = b.cols();
  if (w.w_S.size() != tri_size(n) || w.w_Q.size() != tri_size(n) ||
      w.w_R_minus.size() != tri_size(m) - 1) {
    throw DimensionMismatch("extract_solution: weights do not match B");
  }
  ExtractedSolution out;
  out.S = sym_unvec(w.w_S, n);
  out.Q = sym_unvec(w.w_Q, n);
  VectorXd wr(tri_size(m));
  wr << w.r1, w.w_R_minus;
  out.R = sym_unvec(wr, m);
  Eigen::FullPivLU<MatrixXd> lu(out.R);
  if (!lu.isInvertible()) {
    throw ExtractionError("extract_solution: R-hat is singular");
  }
  out.K = -lu.solve(b.transpose() * out.S);
  return out;
}

}  // namespace hso
