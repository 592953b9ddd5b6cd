#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "hso/numerics.hpp"
#include "hso/parameterization.hpp"

namespace hso {

struct StackEntry {
  double t = 0.0;
  VectorXd x_hat;
  VectorXd u;
};

/// Plant data needed to turn an entry into regressor rows.
struct RegressorModel {
  MatrixXd A;
  MatrixXd B;
  double r1 = 1.0;
};

struct StackSettings {
  Eigen::Index capacity = 0;
  double epsilon = 0.0;
  /// Upper bound on cond(Sigma^T Sigma + eps I) for the stack to be ready.
  double cond_threshold = 1e8;
};

enum class AddOutcome { kAppended, kReplaced, kRejected };

struct AddDecision {
  AddOutcome outcome = AddOutcome::kRejected;
  /// Slot written, or -1 when rejected.
  Eigen::Index slot = -1;
};

/// Fixed-capacity buffer of (x_hat, u) samples. The entries are the source of
/// truth; the regressor Sigma-hat and constants Sigma_u are assembled from
/// them on demand. The Gram matrix Sigma^T Sigma and its regularized
/// condition number are cached and recomputed whenever an entry changes.
class HistoryStack {
 public:
  HistoryStack() = default;
  HistoryStack(std::shared_ptr<const RegressorModel> model,
               StackSettings settings);

  const BasisLayout& layout() const { return layout_; }
  const StackSettings& settings() const { return settings_; }
  const RegressorModel& model() const { return *model_; }

  Eigen::Index size() const { return static_cast<Eigen::Index>(entries_.size()); }
  Eigen::Index capacity() const { return settings_.capacity; }
  bool empty() const { return entries_.empty(); }
  bool full() const { return size() == capacity(); }
  const std::vector<StackEntry>& entries() const { return entries_; }

  /// N(m+1) x (P_S + P_Q + M - 1), blocks in entry order.
  MatrixXd sigma_hat() const;
  /// Length N(m+1).
  VectorXd sigma_u() const;
  const MatrixXd& gram() const { return gram_; }
  /// cond(Sigma^T Sigma + eps I); +inf when eps = 0 and Sigma is rank
  /// deficient, or when the stack is empty.
  double condition() const { return condition_; }

  /// Appends when there is room. When full, tries every single-slot
  /// replacement and commits the one with the smallest regularized
  /// condition number if it is strictly below the current value; ties go to
  /// the lowest slot.
  AddDecision try_add(const StackEntry& candidate);

  /// Full, Sigma-hat nonzero, and condition() <= cond_threshold.
  bool is_ready() const;

  void clear();

  /// One row per entry: t, x_hat..., u...
  void write_csv(std::ostream& os) const;

 private:
  RegressorBlock block_for(const StackEntry& e) const;
  void refresh();

  std::shared_ptr<const RegressorModel> model_;
  StackSettings settings_;
  BasisLayout layout_;
  std::vector<StackEntry> entries_;
  std::vector<RegressorBlock> blocks_;
  MatrixXd gram_;
  double condition_ = 0.0;
};

/// cond(G + eps I) that never throws: +inf for a singular unregularized G.
double gram_condition(const MatrixXd& gram, double eps);

enum class PurgePolicy {
  /// Swap when H2 is ready and purge_period has elapsed since the last swap.
  kAnd,
  /// Swap when H2 is full and either it is ready or the period has elapsed.
  kOr,
};

struct SwapSchedule {
  double purge_period = 0.0;
  PurgePolicy policy = PurgePolicy::kAnd;
  double last_swap = 0.0;
  int swap_count = 0;
};

enum class SwapReason { kSwapped, kNotFull, kNotReady, kTooSoon };

const char* to_string(SwapReason r);

/// Installs H2 as the active stack H1 and empties H2 when the schedule
/// allows it; otherwise leaves both untouched and reports why.
SwapReason swap_and_purge(HistoryStack& h1, HistoryStack& h2, double now,
                          SwapSchedule& schedule);

struct InformativityReport {
  Eigen::Index span_rank = 0;
  bool span_ok = false;
  double sigma_u_residual = 0.0;
  double sigma_u_norm = 0.0;
  /// Sigma_u is identically zero (no u_1 excitation in the data).
  bool degenerate = false;
  bool fi_ok = false;
};

/// Checks that the stored states span R^n and that Sigma_u lies in
/// range(Sigma-hat) to within fi_tol * ||Sigma_u||.
InformativityReport informativity_report(const HistoryStack& stack,
                                         double fi_tol = 1e-6,
                                         double rank_tol = kDefaultRankTol);

}  // namespace hso
