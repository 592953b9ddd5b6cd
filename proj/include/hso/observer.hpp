#pragma once

// Regularized history stack observer.
//
//   x_hat' = A x_hat + B u + K3 (y - C x_hat)
//   w'     = k4 (Sigma^T Sigma + eps I)^-1 Sigma^T (Sigma_u - Sigma w)
//
// Sigma and Sigma_u come from the active stack H1 and are held constant
// between swaps. Along solutions, Delta = Sigma_u - Sigma w obeys
//   Delta' = -k4 Sigma (Sigma^T Sigma + eps I)^-1 Sigma^T Delta,
// so ||Delta|| never increases while H1 is fixed.

#include <Eigen/Core>

#include "hso/control_synthesis.hpp"
#include "hso/history_stack.hpp"
#include "hso/parameterization.hpp"

namespace hso {

struct ObserverState {
  VectorXd x_hat;
  /// Reduced weights [w_S; w_Q; w_R_minus].
  VectorXd w;
  double t = 0.0;
};

struct GainConfig {
  MatrixXd K3;
  double k4 = 1.0;
  double epsilon = 0.0;
};

/// Sigma_u - Sigma w.
VectorXd delta(const MatrixXd& sigma_hat, const VectorXd& sigma_u,
               const VectorXd& w);

/// The weight half of the update law for one fixed stack, precomputed from
/// an eigendecomposition of Sigma^T Sigma. A default-constructed law (no
/// stack installed yet) yields w' = 0.
class WeightUpdateLaw {
 public:
  WeightUpdateLaw() = default;
  /// Throws SingularityError when eps = 0 and Sigma^T Sigma is singular.
  WeightUpdateLaw(const MatrixXd& sigma_hat, const VectorXd& sigma_u,
                  double k4, double eps);
  WeightUpdateLaw(const HistoryStack& stack, double k4);

  bool active() const { return active_; }
  const MatrixXd& sigma_hat() const { return sigma_hat_; }
  const VectorXd& sigma_u() const { return sigma_u_; }
  double k4() const { return k4_; }
  double epsilon() const { return eps_; }

  /// w' at the given weights.
  VectorXd rate(const VectorXd& w) const;
  VectorXd delta(const VectorXd& w) const;
  /// -k4 Delta^T Sigma (Sigma^T Sigma + eps I)^-1 Sigma^T Delta.
  double vdot(const VectorXd& delta) const;

 private:
  bool active_ = false;
  MatrixXd sigma_hat_;
  VectorXd sigma_u_;
  double k4_ = 0.0;
  double eps_ = 0.0;
  MatrixXd contraction_;  // k4 (G + eps I)^-1 G
  VectorXd target_;       // k4 (G + eps I)^-1 Sigma^T Sigma_u
  MatrixXd eigvecs_;
  VectorXd eigvals_;
};

/// Orbital derivative of V = |Delta|^2 / 2 for the given stack and gains.
double vdot_check(const MatrixXd& sigma_hat, const VectorXd& delta, double k4,
                  double eps);

struct ObserverDerivative {
  VectorXd x_hat_dot;
  VectorXd w_dot;
};

ObserverDerivative observer_derivative(const VectorXd& x_hat,
                                       const VectorXd& w, const VectorXd& y,
                                       const VectorXd& u, const LtiSystem& sys,
                                       const MatrixXd& k3,
                                       const WeightUpdateLaw& law);

/// One RK4 step of the coupled observer with y and u held over the step.
ObserverState observer_step(const ObserverState& state, const VectorXd& y,
                            const VectorXd& u, const WeightUpdateLaw& law,
                            const LtiSystem& sys, const GainConfig& gains,
                            double h);

struct EquivalenceReport {
  /// x_i^T (A^T S + S A - S B R^-1 B^T S + Q) x_i for each stack entry.
  VectorXd pointwise_hjb_residuals;
  /// max_i |residual_i| / (1 + |x_i|^2).
  double max_scaled_residual = 0.0;
  /// ||K_hat - K_EP||_F.
  double gain_error = 0.0;
  /// Frobenius norm of the full Riccati residual (diagnostic only).
  double full_hjb_residual = 0.0;
  double equivalence_tol = 0.0;
  double hjb_tol = 0.0;
  bool equivalent = false;
  ExtractedSolution solution;
};

/// Checks whether the weights form an equivalent solution on the stack data:
/// every scaled pointwise HJB residual is at most hjb_tol and the induced
/// gain is within equivalence_tol of K_EP. Throws ExtractionError when
/// R-hat is singular.
EquivalenceReport certify_equivalence(const WeightVector& w,
                                      const HistoryStack& stack,
                                      const LtiSystem& sys,
                                      const MatrixXd& k_expert,
                                      double equivalence_tol,
                                      double hjb_tol = 1e-3);

}  // namespace hso
