#include "doptrack/doppler_tracker.hpp"

#include <algorithm>
#include <cmath>

#include "doptrack/error.hpp"

namespace doptrack {

void TrackerConfig::validate() const {
  if (!(penalty > 0.0)) throw ConfigError("penalty C must be positive");
  if (detection_threshold < 1) throw ConfigError("detection threshold M must be >= 1");
  if (memory_best < 1 || memory_recent < 1) throw ConfigError("memory sizes must be >= 1");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(ridge > 0.0)) throw ConfigError("ridge must be positive");
  if (!(doppler_min < 1.0 && 1.0 < doppler_max)) throw ConfigError("Doppler clamp must bracket 1");
  if (gains.size() < 1) throw ConfigError("at least one path is required");
  if (gains.size() != initial_delays.size())
    throw ConfigError("gains and initial_delays must have the same length");
  if (!gains.allFinite() || !initial_delays.allFinite())
    throw ConfigError("gains and initial delays must be finite");
  if (!(sample_period > 0.0)) throw ConfigError("sample_period must be positive");
}

void perturbed_rows_into(LinearizationStack& out, const TransmitSignal& sig,
                         const Eigen::VectorXd& gains, const Eigen::VectorXd& d_ref,
                         const Eigen::VectorXd& tau, Index a, Index n, double sample_period,
                         double epsilon) {
  const Index paths = gains.size();
  out.rows.resize(paths + 1, paths);
  out.offsets.resize(paths + 1);
  out.predictions.resize(paths + 1);

  const double lever = static_cast<double>(n - a) * sample_period;
  double base_prediction = 0.0;
  for (Index l = 0; l < paths; ++l) {
    const double h = gains[l];
    if (h == 0.0) {
      out.rows(0, l) = 0.0;
      continue;
    }
    const auto [s, ds] = sig.passband_with_derivative(d_ref[l] * lever + tau[l]);
    base_prediction += h * s;
    out.rows(0, l) = h * lever * ds;
  }
  out.predictions[0] = base_prediction;
  out.offsets[0] = -base_prediction;

  for (Index l = 0; l < paths; ++l) {
    const Index k = l + 1;
    out.rows.row(k) = out.rows.row(0);
    const double h = gains[l];
    if (h == 0.0 || lever == 0.0) {
      out.predictions[k] = base_prediction;
      out.offsets[k] = -base_prediction + out.rows(k, l) * epsilon;
      continue;
    }
    const double base_arg = d_ref[l] * lever + tau[l];
    const double pert_arg = (d_ref[l] + epsilon) * lever + tau[l];
    const double s_base = sig.passband(base_arg);
    const auto [s_pert, ds_pert] = sig.passband_with_derivative(pert_arg);
    out.rows(k, l) = h * lever * ds_pert;
    out.predictions[k] = base_prediction - h * s_base + h * s_pert;
    out.offsets[k] = -out.predictions[k] + out.rows(k, l) * epsilon;
  }
}

LinearizationStack perturbed_rows(const TransmitSignal& sig, const Eigen::VectorXd& gains,
                                  const Eigen::VectorXd& d_ref, const Eigen::VectorXd& tau,
                                  Index a, Index n, double sample_period, double epsilon) {
  LinearizationStack out;
  perturbed_rows_into(out, sig, gains, d_ref, tau, a, n, sample_period, epsilon);
  return out;
}

Linearization predict_and_gradient(const TransmitSignal& sig, const Eigen::VectorXd& gains,
                                   const Eigen::VectorXd& d_ref, const Eigen::VectorXd& tau,
                                   Index a, Index n, double sample_period) {
  const double lever = static_cast<double>(n - a) * sample_period;
  Linearization out;
  out.gradient = Eigen::VectorXd::Zero(gains.size());
  for (Index l = 0; l < gains.size(); ++l) {
    const auto [s, ds] = sig.passband_with_derivative(d_ref[l] * lever + tau[l]);
    out.prediction += gains[l] * s;
    out.gradient[l] = gains[l] * lever * ds;
  }
  return out;
}

Eigen::VectorXd update_delays(const Eigen::VectorXd& d_prev, const Eigen::VectorXd& tau_prev,
                              Index a_prev, Index b_prev, double sample_period) {
  const double span = static_cast<double>(b_prev - a_prev) * sample_period;
  return tau_prev + d_prev * span;
}

double reconstruct_timing(const std::vector<DopplerSegment>& segments, Index path, Index n,
                          double sample_period) {
  auto it = std::upper_bound(segments.begin(), segments.end(), n,
                             [](Index value, const DopplerSegment& s) { return value < s.a; });
  if (it == segments.begin()) throw ConfigError("sample index precedes every segment");
  const auto& seg = *std::prev(it);
  if (n > seg.b) throw ConfigError("sample index not covered by any segment");
  return seg.d[path] * static_cast<double>(n - seg.a) * sample_period + seg.tau[path];
}

DopplerTracker::DopplerTracker(TrackerConfig config, TransmitSignal signal)
    : config_(std::move(config)), signal_(std::move(signal)) {
  config_.validate();
  const Index paths = config_.num_paths();
  d_ref_ = Eigen::VectorXd::Ones(paths);
  seg_tau_ = config_.initial_delays;
  current_ = rls_init<double>(paths, config_.ridge);
}

Eigen::VectorXd DopplerTracker::clamp_doppler(Eigen::VectorXd d) {
  for (Index l = 0; l < d.size(); ++l) {
    if (!(d[l] > config_.doppler_min && d[l] < config_.doppler_max) || !std::isfinite(d[l])) {
      diverged_ = true;
      d[l] = std::isfinite(d[l]) ? std::clamp(d[l], config_.doppler_min, config_.doppler_max) : 1.0;
    }
  }
  return d;
}

Eigen::VectorXd DopplerTracker::current_doppler() const {
  Eigen::VectorXd d = d_ref_ + current_.estimate;
  for (Index l = 0; l < d.size(); ++l)
    d[l] = std::clamp(d[l], config_.doppler_min, config_.doppler_max);
  return d;
}

void DopplerTracker::absorb(RlsState<double>& rls, const WarpModel& model, Index start,
                            double r_n) {
  perturbed_rows_into(stack_, signal_, config_.gains, model.d_ref, model.tau, start, n_,
                      config_.sample_period, config_.epsilon);
  for (Index k = 0; k < stack_.rows.rows(); ++k)
    rls_update(rls, stack_.rows.row(k).transpose(), r_n + stack_.offsets[k]);
}

std::optional<DopplerSegment> DopplerTracker::process_sample(double r_n) {
  if (finished_) throw ConfigError("tracker already finished");
  if (!std::isfinite(r_n)) throw NumericalError("non-finite received sample");
  const double T = config_.sample_period;

  evict_if_full(segmentation_, config_.memory_best, config_.memory_recent);

  // Candidate starting at this sample, linearized at the open segment's
  // current estimate of Doppler and timing.
  WarpModel fresh;
  fresh.d_ref = d_ref_;
  fresh.tau = seg_tau_ + current_doppler() * (static_cast<double>(n_ - seg_start_) * T);
  admit_hypothesis(segmentation_, n_, rls_init<double>(config_.num_paths(), config_.ridge),
                   std::move(fresh));

  for (auto& h : segmentation_.hypotheses) absorb(h.rls, h.model, h.start, r_n);
  absorb(current_, WarpModel{d_ref_, seg_tau_}, seg_start_, r_n);

  const auto [cost, best_start] = bellman_step(segmentation_, config_.penalty);
  const Index jump = best_start - segmentation_.prev_best_start;

  std::optional<DopplerSegment> closed;
  if (n_ >= config_.detection_threshold && jump >= config_.detection_threshold &&
      best_start >= seg_start_ + 2) {
    const auto winner = std::find_if(segmentation_.hypotheses.begin(),
                                     segmentation_.hypotheses.end(),
                                     [&](const auto& h) { return h.start == best_start; });

    DopplerSegment seg;
    seg.a = seg_start_;
    seg.b = best_start - 1;
    seg.d = clamp_doppler(d_ref_ + current_.estimate);
    seg.tau = seg_tau_;
    seg.lse = current_.lse;
    segments_.push_back(seg);
    closed = seg;

    seg_tau_ = update_delays(seg.d, seg.tau, seg.a, best_start, T);
    seg_start_ = best_start;
    // Continue from the winner's fit, re-expressed around the new reference.
    current_ = clone_for_reset(winner->rls);
    current_.estimate += winner->model.d_ref - seg.d;
    d_ref_ = seg.d;
  }

  ++n_;
  return closed;
}

std::optional<DopplerSegment> DopplerTracker::finish() {
  if (finished_) return std::nullopt;
  finished_ = true;
  if (n_ <= seg_start_) return std::nullopt;
  DopplerSegment seg;
  seg.a = seg_start_;
  seg.b = n_ - 1;
  seg.d = clamp_doppler(d_ref_ + current_.estimate);
  seg.tau = seg_tau_;
  seg.lse = current_.lse;
  segments_.push_back(seg);
  return seg;
}

}  // namespace doptrack
