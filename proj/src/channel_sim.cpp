#include "doptrack/channel_sim.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doptrack/error.hpp"

namespace doptrack {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Kinematics {
  double x, x_rate;          // horizontal separation
  double eta, eta_rate;      // surface elevation
};

Kinematics kinematics(const ChannelScene& scene, double t) {
  const auto& m = scene.motion;
  const double w_rx = kTwoPi * m.rx_osc_freq;
  const double w_s = kTwoPi * m.surface_freq;
  return {scene.geometry.horizontal_range + m.rx_osc_amp * std::sin(w_rx * t + m.rx_osc_phase),
          m.rx_osc_amp * w_rx * std::cos(w_rx * t + m.rx_osc_phase),
          m.surface_amp * std::sin(w_s * t + m.surface_phase),
          m.surface_amp * w_s * std::cos(w_s * t + m.surface_phase)};
}

// Vertical leg of the (image) path and its rate.
std::pair<double, double> vertical_leg(const ChannelScene& scene, Path path, const Kinematics& k) {
  const auto& g = scene.geometry;
  switch (path) {
    case Path::direct:
      return {g.tx_depth - g.rx_depth, 0.0};
    case Path::surface:
      return {g.tx_depth + g.rx_depth + 2.0 * k.eta, 2.0 * k.eta_rate};
    case Path::bottom:
      return {2.0 * g.bottom_depth - g.tx_depth - g.rx_depth, 0.0};
  }
  return {0.0, 0.0};
}

}  // namespace

std::string_view path_name(Path path) {
  switch (path) {
    case Path::direct: return "direct";
    case Path::surface: return "surface";
    case Path::bottom: return "bottom";
  }
  return "unknown";
}

void ChannelScene::validate() const {
  const auto& g = geometry;
  if (!(g.bottom_depth > 0.0)) throw ConfigError("bottom_depth must be positive");
  if (!(g.tx_depth > 0.0 && g.tx_depth < g.bottom_depth))
    throw ConfigError("tx_depth must lie strictly between surface and bottom");
  if (!(g.rx_depth > 0.0 && g.rx_depth < g.bottom_depth))
    throw ConfigError("rx_depth must lie strictly between surface and bottom");
  if (!(g.horizontal_range > 0.0)) throw ConfigError("horizontal_range must be positive");
  if (!(g.sound_speed > 0.0)) throw ConfigError("sound_speed must be positive");
  const auto& m = motion;
  if (!(m.rx_osc_amp >= 0.0) || !(m.surface_amp >= 0.0))
    throw ConfigError("motion amplitudes must be non-negative");
  if (!(m.rx_osc_freq >= 0.0) || !(m.surface_freq >= 0.0))
    throw ConfigError("motion frequencies must be non-negative");
  if (!(m.surface_amp < std::min(g.tx_depth, g.rx_depth)))
    throw ConfigError("surface_amp must stay below both terminal depths");
  if (!(m.rx_osc_amp < g.horizontal_range))
    throw ConfigError("rx_osc_amp must be smaller than horizontal_range");
  if (!gains.allFinite()) throw ConfigError("gains must be finite");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be non-negative");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
}

void ChannelScene::validate(const TransmitSignal& sig) const {
  validate();
  if (!(sample_rate > 2.0 * (sig.carrier_freq() + sig.bandwidth())))
    throw ConfigError("sample_rate must exceed twice the carrier plus signal bandwidth");
}

double path_length(const ChannelScene& scene, Path path, double t) {
  const auto k = kinematics(scene, t);
  const auto [v, v_rate] = vertical_leg(scene, path, k);
  return std::hypot(k.x, v);
}

double path_length_rate(const ChannelScene& scene, Path path, double t) {
  const auto k = kinematics(scene, t);
  const auto [v, v_rate] = vertical_leg(scene, path, k);
  return (k.x * k.x_rate + v * v_rate) / std::hypot(k.x, v);
}

double warp_at(const ChannelScene& scene, Path path, double t) {
  return t - path_length(scene, path, t) / scene.geometry.sound_speed;
}

double ground_truth_doppler(const ChannelScene& scene, Path path, double t) {
  return 1.0 - path_length_rate(scene, path, t) / scene.geometry.sound_speed;
}

Reception synthesize(const ChannelScene& scene, const TransmitSignal& sig, Eigen::Index n_samples,
                     std::uint64_t noise_seed) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  scene.validate();

  Reception out;
  out.samples = Eigen::VectorXd::Zero(n_samples);
  out.truth.alpha.resize(n_samples, 3);
  out.truth.doppler.resize(n_samples, 3);

  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double period = scene.sample_period();

  for (Eigen::Index n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) * period;
    double r = 0.0;
    for (Path p : kAllPaths) {
      const int l = static_cast<int>(p);
      const double alpha = warp_at(scene, p, t);
      out.truth.alpha(n, l) = alpha;
      out.truth.doppler(n, l) = ground_truth_doppler(scene, p, t);
      if (scene.gains[l] != 0.0) r += scene.gains[l] * sig.passband(alpha);
    }
    const double w = noise(rng);
    out.samples[n] = r + scene.noise_std * w;
  }
  return out;
}

double mean_signal_power(const TransmitSignal& sig, double sample_rate, double duration) {
  const auto count = static_cast<Eigen::Index>(std::ceil(duration * sample_rate));
  if (count < 1) return 0.0;
  double acc = 0.0;
  for (Eigen::Index n = 0; n < count; ++n) {
    const double s = sig.passband(static_cast<double>(n) / sample_rate);
    acc += s * s;
  }
  return acc / static_cast<double>(count);
}

}  // namespace doptrack
