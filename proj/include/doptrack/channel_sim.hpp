#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string_view>

#include "doptrack/signal_model.hpp"

namespace doptrack {

/// Flat-bottom waveguide with stationary transmitter and receiver depths.
struct Geometry {
  double bottom_depth = 1.8;
  double tx_depth = 0.46;
  double rx_depth = 0.46;
  double horizontal_range = 1.45;
  double sound_speed = 1500.0;
};

/// Horizontal receiver oscillation and vertical surface heave.
/// Amplitudes are half of peak-to-peak.
struct MotionSpec {
  double rx_osc_freq = 0.6;
  double rx_osc_amp = 0.125;
  double rx_osc_phase = 0.0;
  double surface_freq = 0.6;
  double surface_amp = 0.165;
  double surface_phase = 0.0;
};

enum class Path { direct = 0, surface = 1, bottom = 2 };
inline constexpr std::array<Path, 3> kAllPaths{Path::direct, Path::surface, Path::bottom};
inline constexpr int kNumRays = 3;

std::string_view path_name(Path path);

struct ChannelScene {
  Geometry geometry;
  MotionSpec motion;
  Eigen::Vector3d gains{1.0, -0.8, 0.5};  // direct, surface, bottom
  double noise_std = 0.0;
  double sample_rate = 200e3;

  double sample_period() const { return 1.0 / sample_rate; }
  /// Throws ConfigError when any geometric or motion invariant fails.
  void validate() const;
  /// Adds the sampling check against a concrete transmit signal.
  void validate(const TransmitSignal& sig) const;
};

double path_length(const ChannelScene& scene, Path path, double t);
/// dL/dt from the analytic motion derivatives.
double path_length_rate(const ChannelScene& scene, Path path, double t);

/// Emission time of the sample received at t, geometry frozen at t:
/// alpha(t) = t - L(t)/c.
double warp_at(const ChannelScene& scene, Path path, double t);
inline double warp(const ChannelScene& scene, Path path, Eigen::Index n) {
  return warp_at(scene, path, static_cast<double>(n) * scene.sample_period());
}

/// d alpha / dt = 1 - (dL/dt)/c.
double ground_truth_doppler(const ChannelScene& scene, Path path, double t);

/// Per-sample ground truth; rows are samples, columns are paths.
struct GroundTruth {
  Eigen::MatrixX3d alpha;
  Eigen::MatrixX3d doppler;
};

struct Reception {
  Eigen::VectorXd samples;
  GroundTruth truth;
};

/// r[n] = sum_l h_l s(alpha_l(n)) + w[n], w i.i.d. N(0, noise_std^2).
Reception synthesize(const ChannelScene& scene, const TransmitSignal& sig, Eigen::Index n_samples,
                     std::uint64_t noise_seed);

/// Mean of s(nT)^2 over [0, duration): used to place noise for a target SNR.
double mean_signal_power(const TransmitSignal& sig, double sample_rate, double duration);

}  // namespace doptrack
