// Command-line front end: simulate, track, baseline, compare, demo.

#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "doptrack/error.hpp"
#include "doptrack/harness.hpp"
#include "doptrack/io.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kIo = 2, kDivergence = 3 };

doptrack::RunConfig config_or_default(const std::string& path) {
  return path.empty() ? doptrack::default_config() : doptrack::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace doptrack;

  CLI::App app{"Multipath Doppler tracking with online segmented recursive least squares"};
  app.require_subcommand(1);

  std::string config_path, in_dir, out_dir, a_dir, b_dir, out_file;
  double demo_duration = 0.05;

  auto* sim = app.add_subcommand("simulate", "synthesize received.csv and truth.csv");
  sim->add_option("--config", config_path, "run configuration (INI)");
  sim->add_option("--out", out_dir, "output directory")->required();

  auto* track = app.add_subcommand("track", "run the OSRLS tracker on a simulation");
  track->add_option("--config", config_path, "run configuration (INI)");
  track->add_option("--in", in_dir, "simulation directory")->required();
  track->add_option("--out", out_dir, "output directory")->required();

  auto* base = app.add_subcommand("baseline", "run the peak-tracking baseline on a simulation");
  base->add_option("--config", config_path, "run configuration (INI)");
  base->add_option("--in", in_dir, "simulation directory")->required();
  base->add_option("--out", out_dir, "output directory")->required();

  auto* cmp = app.add_subcommand("compare", "compare two errors.csv traces");
  cmp->add_option("--a", a_dir, "first result directory")->required();
  cmp->add_option("--b", b_dir, "second result directory")->required();
  cmp->add_option("--out", out_file, "long-format CSV output")->required();
  cmp->add_option("--config", config_path, "run configuration (sample rate, window)");

  auto* demo = app.add_subcommand("demo", "full scenario at reduced duration");
  demo->add_option("--out", out_dir, "output directory")->default_val("demo_out");
  demo->add_option("--duration", demo_duration, "seconds of signal")->default_val(0.05);
  demo->add_option("--config", config_path, "run configuration (INI)");

  auto* dump = app.add_subcommand("dump-signal", "write sampled s(nT) to CSV");
  dump->add_option("--config", config_path, "run configuration (INI)");
  dump->add_option("--out", out_file, "CSV file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; bad usage counts as a config error
    return app.exit(e) == 0 ? kOk : kConfig;
  }

  try {
    RunConfig cfg = config_or_default(config_path);

    if (*sim) {
      write_simulation(out_dir, simulate(cfg));
      write_text(fs::path(out_dir) / "config.ini", to_ini(cfg));
    } else if (*track) {
      const TrackerRun run = run_tracker(cfg, read_simulation(in_dir));
      write_tracker_outputs(out_dir, cfg, run);
      const auto max_err = run.errors.max_from(2 * cfg.tracker.detection_threshold);
      std::cout << "segments " << run.segments.size() << ", max |timing error| per path:";
      for (Eigen::Index l = 0; l < max_err.size(); ++l) std::cout << ' ' << max_err[l];
      std::cout << " s\n";
      if (run.diverged) {
        std::cerr << "tracker hit the Doppler plausibility clamp\n";
        return kDivergence;
      }
    } else if (*base) {
      const BaselineResult res = run_baseline(cfg, read_simulation(in_dir));
      write_baseline_outputs(out_dir, cfg, res);
    } else if (*cmp) {
      const ErrorTrace a = read_errors(fs::path(a_dir) / "errors.csv");
      const ErrorTrace b = read_errors(fs::path(b_dir) / "errors.csv");
      const CompareReport report = compare(a, b, cfg.scene.sample_period());
      write_compare_csv(out_file, a, b, cfg.error_window);
      std::cout << format_report(report);
    } else if (*demo) {
      cfg.duration = demo_duration;
      cfg.validate();
      const CompareReport report = run_demo(out_dir, cfg);
      std::cout << "a = osrls, b = peak tracking\n" << format_report(report);
    } else if (*dump) {
      const TransmitSignal sig = build_signal(cfg);
      CsvWriter csv(out_file, {"n", "t_seconds", "value"});
      const double T = cfg.scene.sample_period();
      for (Eigen::Index n = 0; n < cfg.n_samples(); ++n) {
        const double t = static_cast<double>(n) * T;
        csv.cell(static_cast<long long>(n)).cell(t).cell(sig.passband(t));
        csv.end_row();
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kDivergence;
  }
  return kOk;
}
