#include "hso/history_stack.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

namespace hso {

double gram_condition(const MatrixXd& gram, double eps) {
  if (gram.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const VectorXd& ev = es.eigenvalues();
  const double hi = std::max(ev(ev.size() - 1), 0.0) + eps;
  const double lo = std::max(ev(0), 0.0) + eps;
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

HistoryStack::HistoryStack(std::shared_ptr<const RegressorModel> model,
                           StackSettings settings)
    : model_(std::move(model)), settings_(settings) {
  if (!model_) throw InvalidArgument("HistoryStack: null model");
  if (settings_.capacity <= 0) {
    throw InvalidArgument("HistoryStack: capacity must be positive");
  }
  if (settings_.epsilon < 0.0) {
    throw InvalidArgument("HistoryStack: epsilon must be >= 0");
  }
  layout_ = BasisLayout(model_->A.rows(), model_->B.cols());
  entries_.reserve(settings_.capacity);
  blocks_.reserve(settings_.capacity);
  refresh();
}

RegressorBlock HistoryStack::block_for(const StackEntry& e) const {
  if (!all_finite(e.x_hat) || !all_finite(e.u) || !std::isfinite(e.t)) {
    throw InvalidArgument("HistoryStack: non-finite entry");
  }
  return build_regressor_block(e.x_hat, e.u, model_->A, model_->B, model_->r1);
}

void HistoryStack::refresh() {
  const Eigen::Index p = layout_.reduced_size();
  gram_ = MatrixXd::Zero(p, p);
  for (const auto& b : blocks_) {
    gram_.noalias() += b.regressor.transpose() * b.regressor;
  }
  condition_ = empty() ? std::numeric_limits<double>::infinity()
                       : gram_condition(gram_, settings_.epsilon);
}

MatrixXd HistoryStack::sigma_hat() const {
  const Eigen::Index rows = layout_.rows_per_entry();
  MatrixXd out(rows * size(), layout_.reduced_size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    out.middleRows(i * rows, rows) = blocks_[i].regressor;
  }
  return out;
}

VectorXd HistoryStack::sigma_u() const {
  const Eigen::Index rows = layout_.rows_per_entry();
  VectorXd out(rows * size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    out.segment(i * rows, rows) = blocks_[i].sigma_u;
  }
  return out;
}

AddDecision HistoryStack::try_add(const StackEntry& candidate) {
  RegressorBlock cand = block_for(candidate);
  if (!full()) {
    entries_.push_back(candidate);
    blocks_.push_back(std::move(cand));
    refresh();
    return {AddOutcome::kAppended, size() - 1};
  }

  const MatrixXd cand_gram = cand.regressor.transpose() * cand.regressor;
  double best = condition_;
  Eigen::Index best_slot = -1;
  MatrixXd trial(gram_.rows(), gram_.cols());
  for (Eigen::Index j = 0; j < size(); ++j) {
    const MatrixXd& bj = blocks_[j].regressor;
    trial = gram_ + cand_gram;
    trial.noalias() -= bj.transpose() * bj;
    const double c = gram_condition(trial, settings_.epsilon);
    if (c < best) {
      best = c;
      best_slot = j;
    }
  }
  if (best_slot < 0) return {AddOutcome::kRejected, -1};
  entries_[best_slot] = candidate;
  blocks_[best_slot] = std::move(cand);
  refresh();
  return {AddOutcome::kReplaced, best_slot};
}

bool HistoryStack::is_ready() const {
  if (!full()) return false;
  const bool nonzero = std::any_of(blocks_.begin(), blocks_.end(),
                                   [](const RegressorBlock& b) {
                                     return !b.regressor.isZero(0.0);
                                   });
  return nonzero && condition_ <= settings_.cond_threshold;
}

void HistoryStack::clear() {
  entries_.clear();
  blocks_.clear();
  refresh();
}

void HistoryStack::write_csv(std::ostream& os) const {
  os << "t";
  for (Eigen::Index i = 0; i < layout_.n; ++i) os << ",x_hat_" << i;
  for (Eigen::Index i = 0; i < layout_.m; ++i) os << ",u_" << i;
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9g", v);
    os << buf;
  };
  for (const auto& e : entries_) {
    put(e.t);
    for (Eigen::Index i = 0; i < e.x_hat.size(); ++i) {
      os << ',';
      put(e.x_hat(i));
    }
    for (Eigen::Index i = 0; i < e.u.size(); ++i) {
      os << ',';
      put(e.u(i));
    }
    os << '\n';
  }
}

const char* to_string(SwapReason r) {
  switch (r) {
    case SwapReason::kSwapped:
      return "swapped";
    case SwapReason::kNotFull:
      return "not-full";
    case SwapReason::kNotReady:
      return "not-ready";
    case SwapReason::kTooSoon:
      return "too-soon";
  }
  return "unknown";
}

SwapReason swap_and_purge(HistoryStack& h1, HistoryStack& h2, double now,
                          SwapSchedule& schedule) {
  if (!h2.full()) return SwapReason::kNotFull;
  const bool ready = h2.is_ready();
  const bool elapsed = now - schedule.last_swap >= schedule.purge_period;
  switch (schedule.policy) {
    case PurgePolicy::kAnd:
      if (!ready) return SwapReason::kNotReady;
      if (!elapsed) return SwapReason::kTooSoon;
      break;
    case PurgePolicy::kOr:
      if (!ready && !elapsed) return SwapReason::kNotReady;
      if (h2.sigma_hat().isZero(0.0)) return SwapReason::kNotReady;
      break;
  }
  h1 = h2;
  h2.clear();
  schedule.last_swap = now;
  ++schedule.swap_count;
  return SwapReason::kSwapped;
}

InformativityReport informativity_report(const HistoryStack& stack,
                                         double fi_tol, double rank_tol) {
  if (stack.empty()) {
    throw InvalidArgument("informativity_report: stack is empty");
  }
  const Eigen::Index n = stack.layout().n;
  MatrixXd states(n, stack.size());
  for (Eigen::Index i = 0; i < stack.size(); ++i) {
    states.col(i) = stack.entries()[i].x_hat;
  }
  InformativityReport rep;
  rep.span_rank = numerical_rank(states, rank_tol);
  rep.span_ok = rep.span_rank == n;
  const VectorXd su = stack.sigma_u();
  rep.sigma_u_norm = su.norm();
  rep.degenerate = rep.sigma_u_norm == 0.0;
  rep.sigma_u_residual =
      rep.degenerate ? 0.0
                     : range_projection_residual(stack.sigma_hat(), su, rank_tol);
  rep.fi_ok = rep.span_ok && rep.sigma_u_residual <= fi_tol * rep.sigma_u_norm;
  return rep;
}

}  // namespace hso
