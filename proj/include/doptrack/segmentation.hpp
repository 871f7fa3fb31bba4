#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "doptrack/error.hpp"
#include "doptrack/rls.hpp"

namespace doptrack {

using Index = Eigen::Index;

struct NoModel {};

/// A candidate segment start with a live fit over [start, n].
template <typename Model = NoModel>
struct SegmentHypothesis {
  Index start = 0;
  /// Bellman prefix cost E(start - 1), frozen when the candidate is admitted.
  double prefix_cost = 0.0;
  RlsState<double> rls;
  Model model{};

  double lse() const { return rls.lse; }
  /// Cost of the best segmentation that ends with this candidate, minus C.
  double path_cost() const { return prefix_cost + rls.lse; }
};

/// Bounded set of live candidates plus the running Bellman solution.
/// Hypotheses are kept in admission order (ascending start).
template <typename Model = NoModel>
struct SegmentationState {
  std::vector<SegmentHypothesis<Model>> hypotheses;
  double cost = 0.0;  // E(n) of the last Bellman step; 0 before any step
  Index best_start = 0;
  Index prev_best_start = 0;

  std::size_t filled() const { return hypotheses.size(); }
};

struct BellmanResult {
  double cost;
  Index best_start;
};

/// E(n) = min over live candidates of e(start, n) + C + E(start - 1).
/// Ties go to the earliest start.
template <typename Model>
BellmanResult bellman_step(SegmentationState<Model>& state, double penalty) {
  if (state.hypotheses.empty()) throw ConfigError("bellman_step needs a live hypothesis");
  double best = std::numeric_limits<double>::infinity();
  Index best_start = 0;
  for (const auto& h : state.hypotheses) {
    const double total = h.rls.lse + penalty + h.prefix_cost;
    if (total < best) {
      best = total;
      best_start = h.start;
    }
  }
  state.prev_best_start = state.best_start;
  state.best_start = best_start;
  state.cost = best;
  return {best, best_start};
}

template <typename Model>
void admit_hypothesis(SegmentationState<Model>& state, Index start, RlsState<double> seed,
                      Model model = {}) {
  state.hypotheses.push_back(
      SegmentHypothesis<Model>{start, state.cost, std::move(seed), std::move(model)});
}

/// When the memory holds n_best + n_recent candidates, drop the one with the
/// largest path cost among those outside the n_recent most recent.
/// Returns true if something was evicted.
template <typename Model>
bool evict_if_full(SegmentationState<Model>& state, std::size_t n_best, std::size_t n_recent) {
  auto& hs = state.hypotheses;
  if (hs.size() < n_best + n_recent || hs.size() <= n_recent) return false;
  const auto older_end = hs.end() - static_cast<std::ptrdiff_t>(n_recent);
  // max_element keeps the first of equal maxima, i.e. the oldest.
  auto worst = std::max_element(hs.begin(), older_end, [](const auto& a, const auto& b) {
    return a.path_cost() < b.path_cost();
  });
  hs.erase(worst);
  return true;
}

struct BatchSegmentation {
  /// Inclusive [a, b] pairs in order.
  std::vector<std::pair<Index, Index>> segments;
  double cost = 0.0;
  /// prefix_costs[b] = optimal cost of samples 0..b.
  Eigen::VectorXd prefix_costs;
};

/// Exact O(N^2) segmented least squares minimizing |P| C + sum e(p).
/// `fitter(a, b)` returns the fit error of samples a..b inclusive.
/// Ties go to the earliest start, matching bellman_step.
inline BatchSegmentation batch_sls(Index count, double penalty,
                                   const std::function<double(Index, Index)>& fitter) {
  if (count < 2) throw ConfigError("batch_sls needs at least two observations");
  Eigen::VectorXd cost(count);
  std::vector<Index> arg(count, 0);
  for (Index b = 0; b < count; ++b) {
    double best = std::numeric_limits<double>::infinity();
    for (Index a = 0; a <= b; ++a) {
      const double prefix = a == 0 ? 0.0 : cost[a - 1];
      const double total = fitter(a, b) + penalty + prefix;
      if (total < best) {
        best = total;
        arg[b] = a;
      }
    }
    cost[b] = best;
  }

  BatchSegmentation out;
  out.cost = cost[count - 1];
  out.prefix_costs = cost;
  for (Index b = count - 1; b >= 0;) {
    const Index a = arg[b];
    out.segments.emplace_back(a, b);
    b = a - 1;
  }
  std::reverse(out.segments.begin(), out.segments.end());
  return out;
}

}  // namespace doptrack
