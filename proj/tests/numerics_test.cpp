#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "hso/numerics.hpp"
#include "hso/random.hpp"

namespace hso {
namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Rk4Step, ZeroFieldKeepsState) {
  auto f = [](double, const VectorXd& y) -> VectorXd { return VectorXd::Zero(y.size()); };
  EXPECT_DOUBLE_EQ(rk4_step(f, 0.0, vec({5.0}), 0.1)(0), 5.0);
}

TEST(Rk4Step, ConstantField) {
  auto f = [](double, const VectorXd& y) -> VectorXd { return VectorXd::Ones(y.size()); };
  EXPECT_NEAR(rk4_step(f, 0.0, vec({0.0}), 0.1)(0), 0.1, 1e-15);
}

TEST(Rk4Step, LinearDecayMatchesTruncatedTaylor) {
  auto f = [](double, const VectorXd& y) -> VectorXd { return -y; };
  const double h = 0.1;
  const double oracle = 1.0 - h + h * h / 2.0 - h * h * h / 6.0 + h * h * h * h / 24.0;
  const double got = rk4_step(f, 0.0, vec({1.0}), h)(0);
  EXPECT_NEAR(got, oracle, 1e-15);
  EXPECT_NEAR(got, 0.9048375, 1e-7);
}

TEST(Rk4Step, TimeDependentFieldIsExactForCubics) {
  // y' = 3 t^2 integrates exactly under Simpson weights.
  auto f = [](double t, const VectorXd& y) -> VectorXd {
    return VectorXd::Constant(y.size(), 3.0 * t * t);
  };
  EXPECT_NEAR(rk4_step(f, 1.0, vec({0.0}), 0.5)(0), 1.5 * 1.5 * 1.5 - 1.0, 1e-14);
}

TEST(Rk4Step, NonFiniteFieldRaisesWithTime) {
  auto f = [](double, const VectorXd& y) -> VectorXd {
    return VectorXd::Constant(y.size(), std::numeric_limits<double>::quiet_NaN());
  };
  try {
    rk4_step(f, 2.5, vec({1.0}), 0.1);
    FAIL() << "expected IntegrationFault";
  } catch (const IntegrationFault& e) {
    EXPECT_DOUBLE_EQ(e.time(), 2.5);
  }
}

TEST(Rk4Step, RejectsNonPositiveStep) {
  auto f = [](double, const VectorXd& y) -> VectorXd { return y; };
  EXPECT_THROW(rk4_step(f, 0.0, vec({1.0}), 0.0), InvalidArgument);
  EXPECT_THROW(rk4_step(f, 0.0, vec({1.0}), -1e-3), InvalidArgument);
}

TEST(SingularValues, Examples) {
  EXPECT_TRUE(singular_values(MatrixXd::Identity(2, 2)).isApprox(vec({1, 1})));
  MatrixXd d = MatrixXd::Zero(2, 2);
  d(0, 0) = 3.0;
  EXPECT_NEAR(singular_values(d)(0), 3.0, 1e-15);
  EXPECT_NEAR(singular_values(d)(1), 0.0, 1e-15);
  MatrixXd m(2, 2);
  m << 0, 2, 0, 0;
  EXPECT_NEAR(singular_values(m)(0), 2.0, 1e-15);
  EXPECT_NEAR(singular_values(m)(1), 0.0, 1e-15);
}

TEST(SingularValues, MatchGramEigenvalues) {
  SplitMix64 rng(7);
  MatrixXd m(5, 3);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(-1, 1);
  const VectorXd s = singular_values(m);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.transpose() * m);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(s(i) * s(i), es.eigenvalues()(2 - i), 1e-12);
  }
}

TEST(RegularizedCondition, Examples) {
  EXPECT_DOUBLE_EQ(regularized_condition(MatrixXd::Identity(2, 2), 0.0), 1.0);
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 1.0;
  EXPECT_NEAR(regularized_condition(m, 0.0), 4.0, 1e-12);
  m(1, 1) = 0.0;
  EXPECT_NEAR(regularized_condition(m, 0.002), 4.002 / 0.002, 1e-9);
}

TEST(RegularizedCondition, SingularWithoutRegularizationThrows) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m(0, 0) = 1.0;
  EXPECT_THROW(regularized_condition(m, 0.0), SingularityError);
}

TEST(RegularizedCondition, GramRouteAgrees) {
  SplitMix64 rng(11);
  MatrixXd m(6, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(-2, 2);
  const double a = regularized_condition(m, 1e-3);
  const double b = regularized_condition_from_gram(m.transpose() * m, 1e-3);
  EXPECT_NEAR(a, b, 1e-9 * a);
}

TEST(RegularizedCondition, NonIncreasingInEpsilon) {
  MatrixXd m(3, 2);
  m << 1, 0, 0, 1e-3, 1, 1;
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.0, 1e-6, 1e-3, 1e-1, 1.0}) {
    const double c = regularized_condition(m, eps);
    EXPECT_LE(c, prev);
    EXPECT_GE(c, 1.0);
    prev = c;
  }
}

TEST(RangeProjection, Examples) {
  MatrixXd m = MatrixXd::Zero(3, 2);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  EXPECT_NEAR(range_projection_residual(m, vec({0, 0, 1})), 1.0, 1e-12);
  EXPECT_LE(range_projection_residual(m, m * vec({0.3, -2.0})), 1e-10);
  MatrixXd e1 = MatrixXd::Zero(2, 1);
  e1(0, 0) = 1.0;
  EXPECT_NEAR(range_projection_residual(e1, vec({1, 1})), 1.0, 1e-12);
}

TEST(RangeProjection, ZeroMatrixLeavesVector) {
  EXPECT_NEAR(range_projection_residual(MatrixXd::Zero(3, 2), vec({3, 4, 0})), 5.0, 1e-12);
}

TEST(RankAndBases, RankDeficientMatrix) {
  MatrixXd m(3, 3);
  m << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  EXPECT_EQ(numerical_rank(m), 2);
  const MatrixXd r = range_basis(m);
  const MatrixXd z = null_space_basis(m);
  ASSERT_EQ(r.cols(), 2);
  ASSERT_EQ(z.cols(), 1);
  EXPECT_TRUE((r.transpose() * r).isIdentity(1e-12));
  EXPECT_LE((m * z).norm(), 1e-12);
  // Every column of m lies in the range basis.
  EXPECT_LE((m - r * (r.transpose() * m)).norm(), 1e-12);
}

TEST(SplitMix64, ReferenceSequence) {
  // Published reference outputs for seed 0 and seed 1234567.
  SplitMix64 a(0);
  EXPECT_EQ(a.next(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(a.next(), 0x6E789E6AA1B965F4ULL);
  SplitMix64 b(1234567);
  EXPECT_EQ(b.next(), 6457827717110365317ULL);
  EXPECT_EQ(b.next(), 3203168211198807973ULL);
}

TEST(SplitMix64, UniformRange) {
  SplitMix64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(0.001, 0.1);
    EXPECT_GE(u, 0.001);
    EXPECT_LT(u, 0.1);
  }
}

}  // namespace
}  // namespace hso
