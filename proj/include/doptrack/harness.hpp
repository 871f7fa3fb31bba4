#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

#include "doptrack/config.hpp"
#include "doptrack/doppler_tracker.hpp"
#include "doptrack/peak_tracker.hpp"

namespace doptrack {

namespace fs = std::filesystem;

struct SimulationData {
  Eigen::VectorXd received;
  Eigen::MatrixX3d alpha;
  Eigen::MatrixX3d doppler;
};

/// Per-sample |alpha_hat - alpha| in seconds; rows are samples, columns paths.
struct ErrorTrace {
  Eigen::MatrixXd abs_err;

  /// Mean over consecutive blocks of `window` samples (last block may be short).
  Eigen::MatrixXd block_mean(Index window) const;
  /// Per-path maximum over samples [from, end).
  Eigen::VectorXd max_from(Index from) const;
  /// Per-path count of samples in [from, end) with error above `threshold`.
  Eigen::VectorXi misses_from(Index from, double threshold) const;
};

ErrorTrace timing_errors(const Eigen::MatrixXd& alpha_hat, const Eigen::MatrixXd& alpha);

SimulationData simulate(const RunConfig& cfg);
void write_simulation(const fs::path& dir, const SimulationData& sim);
SimulationData read_simulation(const fs::path& dir);

struct TrackerRun {
  std::vector<DopplerSegment> segments;
  Eigen::MatrixXd alpha_hat;
  ErrorTrace errors;
  double final_cost = 0.0;
  bool diverged = false;
};

/// Streams the received samples through the tracker. Gains come from the
/// config; initial delays are the true alpha_l(0).
TrackerRun run_tracker(const RunConfig& cfg, const SimulationData& sim);
void write_tracker_outputs(const fs::path& dir, const RunConfig& cfg, const TrackerRun& run);

struct BaselineResult {
  BaselineRun run;
  Eigen::MatrixXd alpha_hat;
  ErrorTrace errors;
};

/// Initial delays are the true delays at the first template center.
BaselineResult run_baseline(const RunConfig& cfg, const SimulationData& sim);
void write_baseline_outputs(const fs::path& dir, const RunConfig& cfg, const BaselineResult& res);

void write_errors(const fs::path& file, const ErrorTrace& trace);
ErrorTrace read_errors(const fs::path& file);

struct PathComparison {
  double max_a = 0.0, max_b = 0.0;
  double mean_a = 0.0, mean_b = 0.0;
  Index misses_a = 0, misses_b = 0;
};

struct CompareReport {
  double threshold = 0.0;
  std::vector<PathComparison> paths;
};

/// Per-path max/mean error and counts of samples above `threshold`.
CompareReport compare(const ErrorTrace& a, const ErrorTrace& b, double threshold);
std::string format_report(const CompareReport& report);
/// Plot-ready long format: block_start,path,source,mean_abs_err_s.
void write_compare_csv(const fs::path& file, const ErrorTrace& a, const ErrorTrace& b,
                       Index window);

/// simulate + track + baseline + compare under `root`.
CompareReport run_demo(const fs::path& root, const RunConfig& cfg);

}  // namespace doptrack
