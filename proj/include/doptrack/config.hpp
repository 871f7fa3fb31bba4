#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "doptrack/channel_sim.hpp"
#include "doptrack/doppler_tracker.hpp"
#include "doptrack/peak_tracker.hpp"
#include "doptrack/signal_model.hpp"

namespace doptrack {

/// Flat INI text: `[section]` headers, `key = value` lines, `#`/`;` comments.
/// Keys are stored as "section.key".
class IniDocument {
 public:
  static IniDocument parse(const std::string& text);
  static IniDocument load(const std::filesystem::path& file);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

struct SignalParams {
  double symbol_rate = 20e3;
  double carrier_freq = 30e3;
  /// Sets the scale of squared-error costs against which the segment
  /// penalty is measured.
  double amplitude = 0.1;
  double pulse_std_symbols = 0.25;
  int truncation_symbols = 4;
};

/// Everything one simulate/track/baseline run needs.
struct RunConfig {
  SignalParams signal;
  ChannelScene scene;          // noise_std resolved by resolve_noise()
  double snr_db = 20.0;        // relative to direct-path signal power
  std::optional<double> noise_std;
  TrackerConfig tracker;       // gains/delays/period filled per run
  BaselineConfig baseline;
  double duration = 0.5;
  std::uint64_t symbol_seed = 7;
  std::uint64_t noise_seed = 11;
  Index error_window = 1000;

  Index n_samples() const;
  void validate() const;
};

/// Reference-scenario defaults.
RunConfig default_config();
RunConfig parse_config(const IniDocument& doc);
RunConfig load_config(const std::filesystem::path& file);
/// Round-trippable INI text for `cfg`.
std::string to_ini(const RunConfig& cfg);

TransmitSignal build_signal(const RunConfig& cfg);
/// Scene with noise_std set from the explicit override or the SNR target.
ChannelScene resolve_scene(const RunConfig& cfg, const TransmitSignal& sig);
/// Tracker config with gains, initial delays and sample period filled in.
TrackerConfig resolve_tracker(const RunConfig& cfg, const Eigen::VectorXd& initial_delays);

}  // namespace doptrack
