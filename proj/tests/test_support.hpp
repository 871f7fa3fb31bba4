#pragma once

// Independent oracles and fixtures shared by the unit and acceptance suites.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "doptrack/doppler_tracker.hpp"
#include "doptrack/rls.hpp"
#include "doptrack/segmentation.hpp"
#include "doptrack/signal_model.hpp"

namespace doptrack::testing {

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(abs_floor, rel * std::max(std::abs(a), std::abs(b)));
}

/// Dense ridge-regularized solve, the reference for the recursion.
/// Rows of `rows` are the regression rows; returns (estimate, objective).
template <typename Derived, typename Targets>
auto solve_direct(const Eigen::MatrixBase<Derived>& rows, const Eigen::MatrixBase<Targets>& targets,
                  typename Derived::Scalar ridge) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index dim = rows.cols();
  // Augment with sqrt(ridge) I and use a QR factorization.
  Matrix aug(rows.rows() + dim, dim);
  aug.topRows(rows.rows()) = rows;
  aug.bottomRows(dim) = std::sqrt(ridge) * Matrix::Identity(dim, dim);
  Vector rhs = Vector::Zero(rows.rows() + dim);
  rhs.head(rows.rows()) = targets;
  Vector x = aug.colPivHouseholderQr().solve(rhs);
  const Scalar objective = (rhs - aug * x).squaredNorm();
  return std::pair<Vector, Scalar>{std::move(x), objective};
}


/// Least-squares error of the line y = c0 + c1 x through points a..b,
/// with the same ridge convention as the RLS engine.
inline double line_fit_error(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Index a, Index b,
                             double ridge) {
  const Index len = b - a + 1;
  Eigen::MatrixXd rows(len, 2);
  rows.col(0).setOnes();
  rows.col(1) = x.segment(a, len);
  return solve_direct(rows, y.segment(a, len), ridge).second;
}

/// Minimum of |P| C + sum e(p) over every segmentation of 0..n-1, by
/// enumerating all 2^(n-1) breakpoint subsets.
inline double brute_force_sls(Index n, double penalty,
                              const std::function<double(Index, Index)>& fitter) {
  double best = std::numeric_limits<double>::infinity();
  const unsigned long subsets = 1ul << (n - 1);
  for (unsigned long mask = 0; mask < subsets; ++mask) {
    double cost = 0.0;
    Index a = 0;
    for (Index i = 1; i <= n; ++i) {
      const bool cut = i == n || (mask >> (i - 1)) & 1ul;
      if (!cut) continue;
      cost += penalty + fitter(a, i - 1);
      a = i;
    }
    best = std::min(best, cost);
  }
  return best;
}

struct OnlineLineRun {
  std::vector<double> costs;      // E(n) per sample
  std::vector<Index> boundaries;  // a*_n at each detected jump >= M
};

/// Online segmentation of y(x) into lines: one RLS line fit per candidate.
inline OnlineLineRun run_online_lines(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                      double penalty, Index threshold, std::size_t n_best,
                                      std::size_t n_recent, double ridge) {
  SegmentationState<> state;
  OnlineLineRun out;
  for (Index n = 0; n < x.size(); ++n) {
    evict_if_full(state, n_best, n_recent);
    admit_hypothesis(state, n, rls_init<double>(2, ridge));
    const Eigen::Vector2d row(1.0, x[n]);
    for (auto& h : state.hypotheses) rls_update(h.rls, row, y[n]);
    const auto step = bellman_step(state, penalty);
    out.costs.push_back(step.cost);
    if (step.best_start - state.prev_best_start >= threshold) out.boundaries.push_back(step.best_start);
  }
  return out;
}

/// Piecewise-linear data with breaks at the given indices plus Gaussian noise.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> piecewise_lines(
    Index n, const std::vector<Index>& breaks, const std::vector<double>& slopes, double noise,
    unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd x(n), y(n);
  double level = 0.0;
  std::size_t piece = 0;
  for (Index i = 0; i < n; ++i) {
    if (piece < breaks.size() && i == breaks[piece]) {
      ++piece;
      level += 0.5;  // step so neighbouring pieces do not share endpoints
    }
    x[i] = static_cast<double>(i) / static_cast<double>(n);
    level += slopes[piece] / static_cast<double>(n);
    y[i] = level + noise * gauss(rng);
  }
  return {x, y};
}

/// Central finite difference of r_hat(n, d) with respect to d_l.
inline double prediction_fd(const TransmitSignal& sig, const Eigen::VectorXd& gains,
                            Eigen::VectorXd d, const Eigen::VectorXd& tau, Index a, Index n,
                            double T, Index l, double step) {
  const auto predict = [&](const Eigen::VectorXd& dd) {
    double acc = 0.0;
    for (Index k = 0; k < gains.size(); ++k)
      acc += gains[k] * sig.passband(dd[k] * static_cast<double>(n - a) * T + tau[k]);
    return acc;
  };
  d[l] += step;
  const double plus = predict(d);
  d[l] -= 2.0 * step;
  const double minus = predict(d);
  return (plus - minus) / (2.0 * step);
}

/// Reference signal: 20 kHz QPSK, 30 kHz carrier.
inline TransmitSignal test_signal(std::size_t symbols = 4000, std::uint64_t seed = 7,
                                  double amplitude = 1.0) {
  return TransmitSignal(generate_symbols(symbols, seed), PulseShape::for_symbol_rate(20e3), 30e3,
                        amplitude);
}

}  // namespace doptrack::testing
