#pragma once

#include <Eigen/Dense>
#include <vector>

#include "doptrack/signal_model.hpp"

namespace doptrack {

using Index = Eigen::Index;

/// Valid-mode sliding inner products: out[k] = sum_j tmpl[j] window[j + k],
/// k = 0 .. window.size() - tmpl.size().
Eigen::VectorXd crosscorr(const Eigen::Ref<const Eigen::VectorXd>& window,
                          const Eigen::Ref<const Eigen::VectorXd>& tmpl);

/// Vertex of the parabola through (-1, y_minus), (0, y_0), (1, y_plus),
/// clamped to [-0.5, 0.5]. Zero curvature gives 0.
double subsample_interp(double y_minus, double y_0, double y_plus);

struct PeakTrackState {
  Eigen::VectorXd prev_delays;   // seconds, one per path
  double template_len = 3e-3;    // seconds
  Index search_halfwidth = 20;   // samples
  double sample_period = 1.0 / 200e3;
};

struct PeakTrackStep {
  Eigen::VectorXd delays;
  /// Per path: true when no local maximum was found and the delay was held.
  std::vector<bool> held;
};

/// Nearest-local-maximum tracking on a correlation sequence whose element i
/// corresponds to lag (i + lag_offset) samples.
PeakTrackStep track_step(PeakTrackState& state, const Eigen::Ref<const Eigen::VectorXd>& corr,
                         Index lag_offset = 0);

struct BaselineConfig {
  double template_len = 3e-3;
  Index search_halfwidth = 20;
  Index hop = 10;
};

struct BaselineIteration {
  Index template_start = 0;
  Eigen::VectorXd delays;
  std::vector<bool> held;
};

struct BaselineRun {
  std::vector<BaselineIteration> iterations;
  /// Delay estimate attributed to each received sample (rows) per path,
  /// held between iterations.
  Eigen::MatrixXd sample_delays;
};

/// Slides 3 ms transmit templates along the signal, correlates each with the
/// received stream and tracks one peak per path. The estimate of an
/// iteration is attributed to the received sample where the template center
/// arrives along that path.
BaselineRun run_peak_tracker(const TransmitSignal& sig, const Eigen::VectorXd& received,
                             const Eigen::VectorXd& initial_delays, double sample_rate,
                             const BaselineConfig& config);

}  // namespace doptrack
