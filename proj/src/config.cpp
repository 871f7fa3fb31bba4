#include "doptrack/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "doptrack/error.hpp"
#include "doptrack/io.hpp"

namespace doptrack {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out))
    throw ConfigError("'" + key + "': expected a number, got '" + value + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("'" + key + "': expected an integer, got '" + value + "'");
  return out;
}

Eigen::Vector3d to_vec3(const std::string& key, const std::string& value) {
  Eigen::Vector3d out;
  std::stringstream ss(value);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) throw ConfigError("'" + key + "': expected three comma-separated values");
    out[i++] = to_double(key, trim(item));
  }
  if (i != 3) throw ConfigError("'" + key + "': expected three comma-separated values");
  return out;
}

}  // namespace

IniDocument IniDocument::parse(const std::string& text) {
  IniDocument doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": bad section");
      section = trim(body.substr(1, body.size() - 2));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    doc.entries_[section.empty() ? key : section + "." + key] = trim(body.substr(eq + 1));
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::optional<std::string> IniDocument::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Index RunConfig::n_samples() const {
  return static_cast<Index>(std::llround(duration * scene.sample_rate));
}

void RunConfig::validate() const {
  if (!(signal.symbol_rate > 0.0)) throw ConfigError("signal.symbol_rate must be positive");
  if (!(signal.pulse_std_symbols > 0.0)) throw ConfigError("signal.pulse_std_symbols must be positive");
  if (!(duration > 0.0)) throw ConfigError("run.duration must be positive");
  if (noise_std && !(*noise_std >= 0.0)) throw ConfigError("channel.noise_std must be >= 0");
  scene.validate();
  TrackerConfig probe = tracker;
  probe.gains = scene.gains;
  probe.initial_delays = Eigen::VectorXd::Zero(scene.gains.size());
  probe.sample_period = scene.sample_period();
  probe.validate();
  if (n_samples() < tracker.detection_threshold + 2)
    throw ConfigError("run.duration too short for the detection threshold");
  if (error_window < 1) throw ConfigError("evaluation.error_window must be >= 1");
  if (baseline.hop < 1 || baseline.search_halfwidth < 1 || !(baseline.template_len > 0.0))
    throw ConfigError("baseline parameters must be positive");
}

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const IniDocument& doc) {
  RunConfig cfg = default_config();
  std::set<std::string> seen;

  const auto number = [&](const std::string& key, auto& field) {
    if (auto v = doc.get(key)) {
      seen.insert(key);
      using Field = std::remove_reference_t<decltype(field)>;
      if constexpr (std::is_floating_point_v<Field>)
        field = to_double(key, *v);
      else {
        const auto raw = to_integer(key, *v);
        if (raw < 0) throw ConfigError("'" + key + "' must be non-negative");
        field = static_cast<Field>(raw);
      }
    }
  };

  number("signal.symbol_rate", cfg.signal.symbol_rate);
  number("signal.carrier_freq", cfg.signal.carrier_freq);
  number("signal.amplitude", cfg.signal.amplitude);
  number("signal.pulse_std_symbols", cfg.signal.pulse_std_symbols);
  number("signal.truncation_symbols", cfg.signal.truncation_symbols);

  auto& g = cfg.scene.geometry;
  auto& m = cfg.scene.motion;
  number("channel.sample_rate", cfg.scene.sample_rate);
  number("channel.bottom_depth", g.bottom_depth);
  number("channel.tx_depth", g.tx_depth);
  number("channel.rx_depth", g.rx_depth);
  number("channel.horizontal_range", g.horizontal_range);
  number("channel.sound_speed", g.sound_speed);
  number("channel.rx_osc_freq", m.rx_osc_freq);
  number("channel.rx_osc_amp", m.rx_osc_amp);
  number("channel.rx_osc_phase", m.rx_osc_phase);
  number("channel.surface_freq", m.surface_freq);
  number("channel.surface_amp", m.surface_amp);
  number("channel.surface_phase", m.surface_phase);
  if (auto v = doc.get("channel.gains")) {
    seen.insert("channel.gains");
    cfg.scene.gains = to_vec3("channel.gains", *v);
  }
  number("channel.snr_db", cfg.snr_db);
  if (auto v = doc.get("channel.noise_std")) {
    seen.insert("channel.noise_std");
    cfg.noise_std = to_double("channel.noise_std", *v);
  }

  auto& t = cfg.tracker;
  number("tracker.penalty", t.penalty);
  number("tracker.detection_threshold", t.detection_threshold);
  number("tracker.memory_best", t.memory_best);
  number("tracker.memory_recent", t.memory_recent);
  number("tracker.epsilon", t.epsilon);
  number("tracker.ridge", t.ridge);

  number("baseline.template_len", cfg.baseline.template_len);
  number("baseline.search_halfwidth", cfg.baseline.search_halfwidth);
  number("baseline.hop", cfg.baseline.hop);

  number("run.duration", cfg.duration);
  number("run.symbol_seed", cfg.symbol_seed);
  number("run.noise_seed", cfg.noise_seed);
  number("evaluation.error_window", cfg.error_window);

  for (const auto& [key, value] : doc.entries())
    if (!seen.count(key)) throw ConfigError("unknown config key '" + key + "'");

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file) {
  return parse_config(IniDocument::load(file));
}

std::string to_ini(const RunConfig& cfg) {
  std::ostringstream out;
  const auto kv = [&](const char* key, double v) { out << key << " = " << format_double(v) << '\n'; };
  const auto ki = [&](const char* key, long long v) { out << key << " = " << v << '\n'; };
  const auto& g = cfg.scene.geometry;
  const auto& m = cfg.scene.motion;
  out << "[signal]\n";
  kv("symbol_rate", cfg.signal.symbol_rate);
  kv("carrier_freq", cfg.signal.carrier_freq);
  kv("amplitude", cfg.signal.amplitude);
  kv("pulse_std_symbols", cfg.signal.pulse_std_symbols);
  ki("truncation_symbols", cfg.signal.truncation_symbols);
  out << "\n[channel]\n";
  kv("sample_rate", cfg.scene.sample_rate);
  kv("bottom_depth", g.bottom_depth);
  kv("tx_depth", g.tx_depth);
  kv("rx_depth", g.rx_depth);
  kv("horizontal_range", g.horizontal_range);
  kv("sound_speed", g.sound_speed);
  kv("rx_osc_freq", m.rx_osc_freq);
  kv("rx_osc_amp", m.rx_osc_amp);
  kv("rx_osc_phase", m.rx_osc_phase);
  kv("surface_freq", m.surface_freq);
  kv("surface_amp", m.surface_amp);
  kv("surface_phase", m.surface_phase);
  out << "gains = " << format_double(cfg.scene.gains[0]) << ", "
      << format_double(cfg.scene.gains[1]) << ", " << format_double(cfg.scene.gains[2]) << '\n';
  kv("snr_db", cfg.snr_db);
  if (cfg.noise_std) kv("noise_std", *cfg.noise_std);
  out << "\n[tracker]\n";
  kv("penalty", cfg.tracker.penalty);
  ki("detection_threshold", cfg.tracker.detection_threshold);
  ki("memory_best", static_cast<long long>(cfg.tracker.memory_best));
  ki("memory_recent", static_cast<long long>(cfg.tracker.memory_recent));
  kv("epsilon", cfg.tracker.epsilon);
  kv("ridge", cfg.tracker.ridge);
  out << "\n[baseline]\n";
  kv("template_len", cfg.baseline.template_len);
  ki("search_halfwidth", cfg.baseline.search_halfwidth);
  ki("hop", cfg.baseline.hop);
  out << "\n[run]\n";
  kv("duration", cfg.duration);
  ki("symbol_seed", static_cast<long long>(cfg.symbol_seed));
  ki("noise_seed", static_cast<long long>(cfg.noise_seed));
  out << "\n[evaluation]\n";
  ki("error_window", cfg.error_window);
  return out.str();
}

TransmitSignal build_signal(const RunConfig& cfg) {
  PulseShape pulse = PulseShape::for_symbol_rate(cfg.signal.symbol_rate);
  pulse.gaussian_std = cfg.signal.pulse_std_symbols * pulse.symbol_period;
  pulse.truncation_halfwidth = cfg.signal.truncation_symbols;
  const auto count =
      static_cast<std::size_t>(std::ceil(cfg.duration * cfg.signal.symbol_rate)) + 1;
  return TransmitSignal(generate_symbols(count, cfg.symbol_seed), pulse, cfg.signal.carrier_freq,
                        cfg.signal.amplitude);
}

ChannelScene resolve_scene(const RunConfig& cfg, const TransmitSignal& sig) {
  ChannelScene scene = cfg.scene;
  if (cfg.noise_std) {
    scene.noise_std = *cfg.noise_std;
  } else {
    const double power = scene.gains[0] * scene.gains[0] *
                         mean_signal_power(sig, scene.sample_rate, cfg.duration);
    scene.noise_std = std::sqrt(power * std::pow(10.0, -cfg.snr_db / 10.0));
  }
  scene.validate(sig);
  return scene;
}

TrackerConfig resolve_tracker(const RunConfig& cfg, const Eigen::VectorXd& initial_delays) {
  TrackerConfig t = cfg.tracker;
  t.gains = cfg.scene.gains;
  t.initial_delays = initial_delays;
  t.sample_period = cfg.scene.sample_period();
  t.validate();
  return t;
}

}  // namespace doptrack
