#include "doptrack/peak_tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "doptrack/error.hpp"

namespace doptrack {

Eigen::VectorXd crosscorr(const Eigen::Ref<const Eigen::VectorXd>& window,
                          const Eigen::Ref<const Eigen::VectorXd>& tmpl) {
  if (tmpl.size() < 1) throw ConfigError("template must not be empty");
  if (window.size() < tmpl.size()) throw ConfigError("correlation window shorter than template");
  const Index lags = window.size() - tmpl.size() + 1;
  Eigen::VectorXd out(lags);
  for (Index k = 0; k < lags; ++k) out[k] = window.segment(k, tmpl.size()).dot(tmpl);
  return out;
}

double subsample_interp(double y_minus, double y_0, double y_plus) {
  const double curvature = y_minus - 2.0 * y_0 + y_plus;
  if (curvature == 0.0) return 0.0;
  const double offset = (y_minus - y_plus) / (2.0 * curvature);
  return std::clamp(offset, -0.5, 0.5);
}

PeakTrackStep track_step(PeakTrackState& state, const Eigen::Ref<const Eigen::VectorXd>& corr,
                         Index lag_offset) {
  if (corr.size() < 1) throw ConfigError("correlation sequence is empty");
  const Index paths = state.prev_delays.size();
  const double T = state.sample_period;
  PeakTrackStep out;
  out.delays = state.prev_delays;
  out.held.assign(paths, false);

  for (Index l = 0; l < paths; ++l) {
    const double prev = state.prev_delays[l] / T - static_cast<double>(lag_offset);
    const auto center = static_cast<Index>(std::llround(prev));
    const Index lo = std::max<Index>(1, center - state.search_halfwidth);
    const Index hi = std::min<Index>(corr.size() - 2, center + state.search_halfwidth);

    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index i = lo; i <= hi; ++i) {
      if (!(corr[i] > corr[i - 1] && corr[i] >= corr[i + 1])) continue;
      const double dist = std::abs(static_cast<double>(i) - prev);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best < 0) {
      out.held[l] = true;
      continue;
    }
    double peak = static_cast<double>(best) +
                  subsample_interp(corr[best - 1], corr[best], corr[best + 1]);
    const double h = static_cast<double>(state.search_halfwidth);
    peak = std::clamp(peak, prev - h, prev + h);
    out.delays[l] = (peak + static_cast<double>(lag_offset)) * T;
  }
  state.prev_delays = out.delays;
  return out;
}

BaselineRun run_peak_tracker(const TransmitSignal& sig, const Eigen::VectorXd& received,
                             const Eigen::VectorXd& initial_delays, double sample_rate,
                             const BaselineConfig& config) {
  if (!(config.template_len > 0.0)) throw ConfigError("template_len must be positive");
  if (config.search_halfwidth < 1) throw ConfigError("search_halfwidth must be >= 1");
  if (config.hop < 1) throw ConfigError("hop must be >= 1");
  const double T = 1.0 / sample_rate;
  const Index n_samples = received.size();
  const Index paths = initial_delays.size();
  const auto tmpl_len = static_cast<Index>(std::llround(config.template_len * sample_rate));
  if (tmpl_len < 3) throw ConfigError("template shorter than three samples");

  // The transmit grid is sampled once; templates are slices of it.
  Eigen::VectorXd transmit(n_samples);
  for (Index m = 0; m < n_samples; ++m) transmit[m] = sig.passband(static_cast<double>(m) * T);

  PeakTrackState state{initial_delays, config.template_len, config.search_halfwidth, T};
  BaselineRun run;
  run.sample_delays = Eigen::MatrixXd::Constant(n_samples, paths,
                                                std::numeric_limits<double>::quiet_NaN());

  const Index margin = config.search_halfwidth + 2;
  for (Index start = 0;; start += config.hop) {
    const double lo_delay = state.prev_delays.minCoeff() / T;
    const double hi_delay = state.prev_delays.maxCoeff() / T;
    const Index lag_lo = std::max<Index>(0, static_cast<Index>(std::floor(lo_delay)) - margin);
    const Index lag_hi = static_cast<Index>(std::ceil(hi_delay)) + margin;
    if (start + lag_hi + tmpl_len > n_samples || start + tmpl_len > n_samples) break;

    const auto tmpl = transmit.segment(start, tmpl_len);
    const auto window = received.segment(start + lag_lo, lag_hi - lag_lo + tmpl_len);
    const Eigen::VectorXd corr = crosscorr(window, tmpl);
    auto step = track_step(state, corr, lag_lo);

    for (Index l = 0; l < paths; ++l) {
      const auto m = start + tmpl_len / 2 + static_cast<Index>(std::llround(step.delays[l] / T));
      if (m >= 0 && m < n_samples) run.sample_delays(m, l) = step.delays[l];
    }
    run.iterations.push_back({start, std::move(step.delays), std::move(step.held)});
  }

  for (Index l = 0; l < paths; ++l) {
    double held = initial_delays[l];
    for (Index m = 0; m < n_samples; ++m) {
      if (std::isnan(run.sample_delays(m, l)))
        run.sample_delays(m, l) = held;
      else
        held = run.sample_delays(m, l);
    }
  }
  return run;
}

}  // namespace doptrack
