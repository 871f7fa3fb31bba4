#include "doptrack/harness.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "doptrack/error.hpp"
#include "doptrack/io.hpp"
#include "json.hpp"

namespace doptrack {
namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kReceivedHeader{"n", "r"};
const std::vector<std::string> kTruthHeader{"n", "path", "alpha_s", "doppler"};
const std::vector<std::string> kSegmentsHeader{"segment", "path", "a", "b", "d", "tau_s", "lse"};
const std::vector<std::string> kErrorsHeader{"n", "path", "abs_err_s"};
const std::vector<std::string> kDelaysHeader{"n", "path", "delay_seconds", "flag"};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json error_summary(const RunConfig& cfg, const ErrorTrace& errors) {
  const Index warmup = 2 * cfg.tracker.detection_threshold;
  const double T = cfg.scene.sample_period();
  json out;
  out["warmup_samples"] = warmup;
  out["sample_interval_s"] = T;
  out["max_abs_err_s"] = vector_json(errors.max_from(0));
  out["max_abs_err_after_warmup_s"] = vector_json(errors.max_from(warmup));
  const Eigen::VectorXi misses = errors.misses_from(warmup, T);
  out["samples_over_one_interval"] = json::array();
  for (Index l = 0; l < misses.size(); ++l) out["samples_over_one_interval"].push_back(misses[l]);
  const Eigen::VectorXi half = errors.misses_from(warmup, 0.5 * T);
  out["samples_over_half_interval"] = json::array();
  for (Index l = 0; l < half.size(); ++l) out["samples_over_half_interval"].push_back(half[l]);
  return out;
}

void write_block_means(const fs::path& file, const ErrorTrace& trace, Index window) {
  CsvWriter csv(file, {"block_start", "path", "mean_abs_err_s"});
  const Eigen::MatrixXd means = trace.block_mean(window);
  for (Index k = 0; k < means.rows(); ++k)
    for (Index l = 0; l < means.cols(); ++l) {
      csv.cell(static_cast<long long>(k * window)).cell(static_cast<long long>(l)).cell(means(k, l));
      csv.end_row();
    }
}

}  // namespace

Eigen::MatrixXd ErrorTrace::block_mean(Index window) const {
  if (window < 1) throw ConfigError("averaging window must be >= 1");
  const Index blocks = (abs_err.rows() + window - 1) / window;
  Eigen::MatrixXd out(blocks, abs_err.cols());
  for (Index k = 0; k < blocks; ++k) {
    const Index len = std::min(window, abs_err.rows() - k * window);
    out.row(k) = abs_err.middleRows(k * window, len).colwise().mean();
  }
  return out;
}

Eigen::VectorXd ErrorTrace::max_from(Index from) const {
  if (from >= abs_err.rows()) return Eigen::VectorXd::Zero(abs_err.cols());
  return abs_err.bottomRows(abs_err.rows() - from).colwise().maxCoeff().transpose();
}

Eigen::VectorXi ErrorTrace::misses_from(Index from, double threshold) const {
  Eigen::VectorXi out = Eigen::VectorXi::Zero(abs_err.cols());
  for (Index n = std::max<Index>(from, 0); n < abs_err.rows(); ++n)
    for (Index l = 0; l < abs_err.cols(); ++l)
      if (abs_err(n, l) > threshold) ++out[l];
  return out;
}

ErrorTrace timing_errors(const Eigen::MatrixXd& alpha_hat, const Eigen::MatrixXd& alpha) {
  if (alpha_hat.rows() != alpha.rows() || alpha_hat.cols() != alpha.cols())
    throw ConfigError("estimate and truth shapes differ");
  return ErrorTrace{(alpha_hat - alpha).cwiseAbs()};
}

SimulationData simulate(const RunConfig& cfg) {
  cfg.validate();
  const TransmitSignal sig = build_signal(cfg);
  const ChannelScene scene = resolve_scene(cfg, sig);
  Reception rx = synthesize(scene, sig, cfg.n_samples(), cfg.noise_seed);
  return SimulationData{std::move(rx.samples), std::move(rx.truth.alpha),
                        std::move(rx.truth.doppler)};
}

void write_simulation(const fs::path& dir, const SimulationData& sim) {
  ensure_dir(dir);
  {
    CsvWriter csv(dir / "received.csv", kReceivedHeader);
    for (Index n = 0; n < sim.received.size(); ++n) {
      csv.cell(static_cast<long long>(n)).cell(sim.received[n]);
      csv.end_row();
    }
  }
  CsvWriter csv(dir / "truth.csv", kTruthHeader);
  for (Index n = 0; n < sim.alpha.rows(); ++n)
    for (Index l = 0; l < sim.alpha.cols(); ++l) {
      csv.cell(static_cast<long long>(n)).cell(static_cast<long long>(l));
      csv.cell(sim.alpha(n, l)).cell(sim.doppler(n, l));
      csv.end_row();
    }
}

SimulationData read_simulation(const fs::path& dir) {
  const auto received = read_numeric_csv(dir / "received.csv", kReceivedHeader);
  const auto truth = read_numeric_csv(dir / "truth.csv", kTruthHeader);
  const auto n_samples = static_cast<Index>(received.size());
  if (n_samples == 0) throw IoError("received.csv has no samples");
  if (static_cast<Index>(truth.size()) != 3 * n_samples)
    throw IoError("truth.csv must have three rows per received sample");

  SimulationData sim;
  sim.received.resize(n_samples);
  for (Index n = 0; n < n_samples; ++n) {
    if (received[n][0] != static_cast<double>(n)) throw IoError("received.csv: n out of sequence");
    sim.received[n] = received[n][1];
  }
  sim.alpha.resize(n_samples, 3);
  sim.doppler.resize(n_samples, 3);
  for (const auto& row : truth) {
    const auto n = static_cast<Index>(row[0]);
    const auto l = static_cast<Index>(row[1]);
    if (n < 0 || n >= n_samples || l < 0 || l > 2) throw IoError("truth.csv: index out of range");
    sim.alpha(n, l) = row[2];
    sim.doppler(n, l) = row[3];
  }
  return sim;
}

TrackerRun run_tracker(const RunConfig& cfg, const SimulationData& sim) {
  cfg.validate();
  const TransmitSignal sig = build_signal(cfg);
  const Eigen::VectorXd initial = sim.alpha.row(0).transpose();
  DopplerTracker tracker(resolve_tracker(cfg, initial), sig);
  for (Index n = 0; n < sim.received.size(); ++n) tracker.process_sample(sim.received[n]);
  TrackerRun run;
  run.final_cost = tracker.segmentation().cost;
  tracker.finish();
  run.segments = tracker.segments();
  run.diverged = tracker.diverged();

  const double T = cfg.scene.sample_period();
  run.alpha_hat.resize(sim.alpha.rows(), sim.alpha.cols());
  for (const auto& seg : run.segments)
    for (Index n = seg.a; n <= seg.b; ++n)
      run.alpha_hat.row(n) =
          (seg.d * (static_cast<double>(n - seg.a) * T) + seg.tau).transpose();
  run.errors = timing_errors(run.alpha_hat, sim.alpha);
  return run;
}

void write_errors(const fs::path& file, const ErrorTrace& trace) {
  CsvWriter csv(file, kErrorsHeader);
  for (Index n = 0; n < trace.abs_err.rows(); ++n)
    for (Index l = 0; l < trace.abs_err.cols(); ++l) {
      csv.cell(static_cast<long long>(n)).cell(static_cast<long long>(l)).cell(trace.abs_err(n, l));
      csv.end_row();
    }
}

ErrorTrace read_errors(const fs::path& file) {
  const auto rows = read_numeric_csv(file, kErrorsHeader);
  Index n_max = -1, l_max = -1;
  for (const auto& r : rows) {
    n_max = std::max(n_max, static_cast<Index>(r[0]));
    l_max = std::max(l_max, static_cast<Index>(r[1]));
  }
  if (n_max < 0) throw IoError(file.string() + ": no error rows");
  if (static_cast<Index>(rows.size()) != (n_max + 1) * (l_max + 1))
    throw IoError(file.string() + ": expected one row per sample and path");
  ErrorTrace trace{Eigen::MatrixXd::Zero(n_max + 1, l_max + 1)};
  for (const auto& r : rows) {
    if (r[0] < 0 || r[1] < 0) throw IoError(file.string() + ": negative index");
    trace.abs_err(static_cast<Index>(r[0]), static_cast<Index>(r[1])) = r[2];
  }
  return trace;
}

void write_tracker_outputs(const fs::path& dir, const RunConfig& cfg, const TrackerRun& run) {
  ensure_dir(dir);
  {
    CsvWriter csv(dir / "segments.csv", kSegmentsHeader);
    for (std::size_t i = 0; i < run.segments.size(); ++i) {
      const auto& s = run.segments[i];
      for (Index l = 0; l < s.d.size(); ++l) {
        csv.cell(static_cast<long long>(i)).cell(static_cast<long long>(l));
        csv.cell(static_cast<long long>(s.a)).cell(static_cast<long long>(s.b));
        csv.cell(s.d[l]).cell(s.tau[l]).cell(s.lse);
        csv.end_row();
      }
    }
  }
  write_errors(dir / "errors.csv", run.errors);
  write_block_means(dir / "errors_avg.csv", run.errors, cfg.error_window);

  json summary;
  summary["method"] = "osrls";
  summary["config"] = to_ini(cfg);
  summary["samples"] = run.errors.abs_err.rows();
  summary["segment_count"] = run.segments.size();
  summary["final_cost"] = run.final_cost;
  summary["final_segment_lse"] = run.segments.empty() ? 0.0 : run.segments.back().lse;
  summary["diverged"] = run.diverged;
  summary["errors"] = error_summary(cfg, run.errors);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

BaselineResult run_baseline(const RunConfig& cfg, const SimulationData& sim) {
  cfg.validate();
  const TransmitSignal sig = build_signal(cfg);
  const double T = cfg.scene.sample_period();
  const Index n_samples = sim.received.size();
  const auto tmpl_len = static_cast<Index>(std::llround(cfg.baseline.template_len * cfg.scene.sample_rate));

  Eigen::VectorXd initial(sim.alpha.cols());
  for (Index l = 0; l < sim.alpha.cols(); ++l) {
    const double delay0 = -sim.alpha(0, l);
    Index m = tmpl_len / 2 + static_cast<Index>(std::llround(delay0 / T));
    m = std::clamp<Index>(m, 0, n_samples - 1);
    initial[l] = static_cast<double>(m) * T - sim.alpha(m, l);
  }

  BaselineResult res;
  res.run = run_peak_tracker(sig, sim.received, initial, cfg.scene.sample_rate, cfg.baseline);
  res.alpha_hat.resize(n_samples, sim.alpha.cols());
  for (Index m = 0; m < n_samples; ++m)
    res.alpha_hat.row(m) =
        (static_cast<double>(m) * T - res.run.sample_delays.row(m).array()).matrix();
  res.errors = timing_errors(res.alpha_hat, sim.alpha);
  return res;
}

void write_baseline_outputs(const fs::path& dir, const RunConfig& cfg, const BaselineResult& res) {
  ensure_dir(dir);
  Index held_count = 0;
  {
    CsvWriter csv(dir / "delays.csv", kDelaysHeader);
    for (const auto& it : res.run.iterations)
      for (Index l = 0; l < it.delays.size(); ++l) {
        csv.cell(static_cast<long long>(it.template_start)).cell(static_cast<long long>(l));
        csv.cell(it.delays[l]).cell(static_cast<long long>(it.held[l] ? 1 : 0));
        csv.end_row();
        if (it.held[l]) ++held_count;
      }
  }
  write_errors(dir / "errors.csv", res.errors);
  write_block_means(dir / "errors_avg.csv", res.errors, cfg.error_window);

  json summary;
  summary["method"] = "peak_tracking";
  summary["config"] = to_ini(cfg);
  summary["samples"] = res.errors.abs_err.rows();
  summary["iterations"] = res.run.iterations.size();
  summary["held_peaks"] = held_count;
  summary["errors"] = error_summary(cfg, res.errors);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
}

CompareReport compare(const ErrorTrace& a, const ErrorTrace& b, double threshold) {
  if (a.abs_err.rows() != b.abs_err.rows() || a.abs_err.cols() != b.abs_err.cols())
    throw ConfigError("error traces differ in shape");
  CompareReport report;
  report.threshold = threshold;
  const Eigen::VectorXi miss_a = a.misses_from(0, threshold);
  const Eigen::VectorXi miss_b = b.misses_from(0, threshold);
  for (Index l = 0; l < a.abs_err.cols(); ++l) {
    PathComparison p;
    p.max_a = a.abs_err.col(l).maxCoeff();
    p.max_b = b.abs_err.col(l).maxCoeff();
    p.mean_a = a.abs_err.col(l).mean();
    p.mean_b = b.abs_err.col(l).mean();
    p.misses_a = miss_a[l];
    p.misses_b = miss_b[l];
    report.paths.push_back(p);
  }
  return report;
}

std::string format_report(const CompareReport& report) {
  std::ostringstream out;
  out << "threshold " << format_double(report.threshold) << " s\n";
  out << std::left << std::setw(6) << "path" << std::right << std::setw(14) << "max_a"
      << std::setw(14) << "max_b" << std::setw(14) << "mean_a" << std::setw(14) << "mean_b"
      << std::setw(10) << "miss_a" << std::setw(10) << "miss_b" << '\n';
  out << std::scientific << std::setprecision(4);
  for (std::size_t l = 0; l < report.paths.size(); ++l) {
    const auto& p = report.paths[l];
    out << std::left << std::setw(6) << l << std::right << std::setw(14) << p.max_a
        << std::setw(14) << p.max_b << std::setw(14) << p.mean_a << std::setw(14) << p.mean_b
        << std::setw(10) << p.misses_a << std::setw(10) << p.misses_b << '\n';
  }
  return out.str();
}

void write_compare_csv(const fs::path& file, const ErrorTrace& a, const ErrorTrace& b,
                       Index window) {
  if (a.abs_err.rows() != b.abs_err.rows() || a.abs_err.cols() != b.abs_err.cols())
    throw ConfigError("error traces differ in shape");
  const Eigen::MatrixXd ma = a.block_mean(window);
  const Eigen::MatrixXd mb = b.block_mean(window);
  CsvWriter csv(file, {"block_start", "path", "source", "mean_abs_err_s"});
  for (Index k = 0; k < ma.rows(); ++k)
    for (Index l = 0; l < ma.cols(); ++l) {
      csv.cell(static_cast<long long>(k * window)).cell(static_cast<long long>(l))
          .cell(std::string("a")).cell(ma(k, l));
      csv.end_row();
      csv.cell(static_cast<long long>(k * window)).cell(static_cast<long long>(l))
          .cell(std::string("b")).cell(mb(k, l));
      csv.end_row();
    }
}

CompareReport run_demo(const fs::path& root, const RunConfig& cfg) {
  const SimulationData sim = simulate(cfg);
  write_simulation(root / "sim", sim);
  write_text(root / "config.ini", to_ini(cfg));
  const TrackerRun tracked = run_tracker(cfg, sim);
  write_tracker_outputs(root / "osrls", cfg, tracked);
  const BaselineResult base = run_baseline(cfg, sim);
  write_baseline_outputs(root / "baseline", cfg, base);
  write_compare_csv(root / "compare.csv", tracked.errors, base.errors, cfg.error_window);
  const CompareReport report = compare(tracked.errors, base.errors, cfg.scene.sample_period());
  write_text(root / "compare.txt", format_report(report));
  return report;
}

}  // namespace doptrack
