#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "hso/numerics.hpp"

namespace hso {

/// x' = A x + B u, y = C x.
struct LtiSystem {
  MatrixXd A;
  MatrixXd B;
  MatrixXd C;

  Eigen::Index states() const { return A.rows(); }
  Eigen::Index inputs() const { return B.cols(); }
  Eigen::Index outputs() const { return C.rows(); }
};

struct CareOptions {
  /// Stop once ||dP/dt||_F <= tol.
  double tol = 1e-10;
  double t_max = 1000.0;
  double step = 1e-3;
};

/// Fixed point of the differential Riccati equation, i.e. the stabilizing
/// solution of A^T S + S A - S B R^-1 B^T S + Q = 0.
struct CareSolution {
  MatrixXd S;
  double residual_norm = 0.0;
  double time_to_converge = 0.0;
  long steps = 0;
};

/// Expert LQR policy u = K x with K = -R^-1 B^T S.
struct ExpertPolicy {
  MatrixXd K;
  MatrixXd S;
  MatrixXd Q;
  MatrixXd R;
  double riccati_residual = 0.0;
  /// ||x(0)|| / ||x(horizon)|| from the empirical closed-loop check.
  double decay_factor = 0.0;
};

struct StabilityCheckOptions {
  double horizon = 20.0;
  double step = 1e-3;
  double min_decay = 10.0;
  std::uint64_t seed = 0x5EEDULL;
};

/// ||A^T S + S A - S B R^-1 B^T S + Q||_F.
double riccati_residual(const MatrixXd& a, const MatrixXd& b,
                        const MatrixXd& q, const MatrixXd& r,
                        const MatrixXd& s);

/// Integrates dP/dt = A^T P + P A - P B R^-1 B^T P + Q from P(0) = 0 with
/// RK4 until the derivative vanishes. Throws SynthesisFailure if t_max is
/// reached first and SingularityError if R is not positive definite.
CareSolution solve_care(const MatrixXd& a, const MatrixXd& b,
                        const MatrixXd& q, const MatrixXd& r,
                        const CareOptions& options = {});

/// Solves the CARE, forms K = -R^-1 B^T S, and simulates the closed loop
/// from a seeded random state to confirm it decays by at least
/// `stability.min_decay` over `stability.horizon`.
ExpertPolicy lqr_gain(const MatrixXd& a, const MatrixXd& b, const MatrixXd& q,
                      const MatrixXd& r, const CareOptions& options = {},
                      const StabilityCheckOptions& stability = {});

/// Luenberger gain K3 = (A - diag(poles)) C^-1 so that A - K3 C is exactly
/// diag(poles). Only square invertible C is supported.
MatrixXd observer_gain(const MatrixXd& a, const MatrixXd& c,
                       const std::vector<double>& poles);

}  // namespace hso
