#include <gtest/gtest.h>

#include <cmath>

#include "hso/simulation.hpp"

namespace hso {
namespace {

SimulationOptions options(double horizon, double h = 1e-3) {
  SimulationOptions o;
  o.horizon = horizon;
  o.step = h;
  o.track_informativity = true;
  return o;
}

TEST(SimulateExpert, ZeroDataStaysZero) {
  Scenario s = academic_scenario();
  s.x0.setZero();
  s.excitation.count = 0;
  bool nonzero = false;
  SimulationHooks hooks;
  hooks.on_step = [&](const StepRecord& r) {
    nonzero = nonzero || !r.x->isZero(0.0) || !r.x_hat->isZero(0.0) || !r.w->isZero(0.0);
  };
  const SimulationResult res = simulate_expert(s, options(5.0), hooks);
  EXPECT_FALSE(nonzero);
  EXPECT_EQ(res.schedule.swap_count, 0);
  EXPECT_FALSE(res.first_fi_time.has_value());
  ASSERT_FALSE(res.h2.empty());
  const InformativityReport r = informativity_report(res.h2);
  EXPECT_TRUE(r.degenerate);
  EXPECT_FALSE(r.span_ok);
}

TEST(SimulateExpert, RejectsStepThatDoesNotDivideDataPeriod) {
  EXPECT_THROW(simulate_expert(academic_scenario(), options(1.0, 0.03)), InvalidArgument);
  EXPECT_THROW(simulate_expert(academic_scenario(), options(-1.0)), InvalidArgument);
}

TEST(SimulateExpert, PlantFollowsExpertPlusExcitation) {
  Scenario s = academic_scenario();
  const Excitation d(s.excitation, 3);
  SimulationHooks hooks;
  double worst = 0.0;
  VectorXd k_row;
  const ExpertPolicy p = lqr_gain(s.sys.A, s.sys.B, s.expert_cost.Q, s.expert_cost.R);
  hooks.on_step = [&](const StepRecord& r) {
    worst = std::max(worst, (*r.u_applied - (p.K * *r.x + d(r.t))).norm());
    worst = std::max(worst, (*r.u - p.K * *r.x).norm());
  };
  simulate_expert(s, options(1.0), hooks);
  EXPECT_LE(worst, 1e-9);
}

TEST(SimulateExpert, AppliedInputRecordingMode) {
  Scenario s = academic_scenario();
  s.excitation.recorded_input = RecordedInput::kAppliedInput;
  double worst = 0.0;
  SimulationHooks hooks;
  hooks.on_step = [&](const StepRecord& r) { worst = std::max(worst, (*r.u - *r.u_applied).norm()); };
  const SimulationResult res = simulate_expert(s, options(1.0), hooks);
  EXPECT_EQ(worst, 0.0);
  for (const auto& e : res.h2.entries()) EXPECT_EQ(e.u.size(), 3);
}

class AcademicRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result_ = new SimulationResult;
    segments_ = new std::vector<std::vector<double>>;
    SimulationHooks hooks;
    hooks.on_step = [](const StepRecord& r) {
      if (r.delta->size() == 0) return;
      if (r.swapped || segments_->empty()) segments_->emplace_back();
      segments_->back().push_back(r.delta->norm());
      worst_vdot_ = std::max(worst_vdot_, r.law->vdot(*r.delta) -
                                              1e-12 * r.delta->squaredNorm());
    };
    hooks.on_swap = [](const StepRecord& r) {
      ready_at_swap_ = ready_at_swap_ && r.h1->is_ready();
    };
    *result_ = simulate_expert(academic_scenario(), options(50.0), hooks);
  }
  static void TearDownTestSuite() {
    delete result_;
    delete segments_;
  }
  static SimulationResult* result_;
  static std::vector<std::vector<double>>* segments_;
  static double worst_vdot_;
  static bool ready_at_swap_;
};
SimulationResult* AcademicRun::result_ = nullptr;
std::vector<std::vector<double>>* AcademicRun::segments_ = nullptr;
double AcademicRun::worst_vdot_ = -1.0;
bool AcademicRun::ready_at_swap_ = true;

TEST_F(AcademicRun, SwapsRespectPurgePeriodAndReadiness) {
  ASSERT_GE(result_->swap_times.size(), 1u);
  EXPECT_GE(result_->swap_times.front(), 2.0);
  for (std::size_t i = 1; i < result_->swap_times.size(); ++i) {
    EXPECT_GE(result_->swap_times[i] - result_->swap_times[i - 1], 2.0 - 1e-9);
  }
  EXPECT_TRUE(ready_at_swap_);
  EXPECT_LE(result_->h1.condition(), 1e8);
}

TEST_F(AcademicRun, DeltaNonIncreasingWithinSegments) {
  ASSERT_EQ(segments_->size(), result_->swap_times.size());
  for (const auto& seg : *segments_) {
    for (std::size_t i = 1; i < seg.size(); ++i) EXPECT_LE(seg[i], seg[i - 1] + 1e-9);
  }
  EXPECT_LE(worst_vdot_, 0.0);
}

TEST_F(AcademicRun, InformativeBeforeFirstSwapPlusPurgePeriod) {
  ASSERT_TRUE(result_->first_fi_time.has_value());
  EXPECT_LE(*result_->first_fi_time, result_->swap_times.front() + 2.0);
}

TEST_F(AcademicRun, GainErrorShrinks) {
  const BasisLayout layout(3, 3);
  const ExtractedSolution sol = extract_solution(
      WeightVector::from_reduced(layout, result_->final_state.w, 1.0), academic_scenario().sys.B);
  EXPECT_LE((sol.K - result_->expert.K).norm(), 0.05 * result_->expert.K.norm());
}

TEST(SimulateExpert, Deterministic) {
  const SimulationResult a = simulate_expert(academic_scenario(), options(8.0));
  const SimulationResult b = simulate_expert(academic_scenario(), options(8.0));
  EXPECT_EQ(a.final_state.w, b.final_state.w);
  EXPECT_EQ(a.final_x, b.final_x);
  EXPECT_EQ(a.swap_times, b.swap_times);
}

TEST(SimulateExpert, OrPolicySwapsAtLeastAsOften) {
  Scenario s = academic_scenario();
  const SimulationResult and_run = simulate_expert(s, options(15.0));
  s.schedule.purge_policy = PurgePolicy::kOr;
  const SimulationResult or_run = simulate_expert(s, options(15.0));
  EXPECT_GE(or_run.schedule.swap_count, and_run.schedule.swap_count);
}

}  // namespace
}  // namespace hso
