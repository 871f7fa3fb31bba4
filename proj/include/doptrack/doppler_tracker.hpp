#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "doptrack/rls.hpp"
#include "doptrack/segmentation.hpp"
#include "doptrack/signal_model.hpp"

namespace doptrack {

struct TrackerConfig {
  double penalty = 0.01;            // C, cost per segment
  Index detection_threshold = 50;   // M, samples
  std::size_t memory_best = 10;     // N_s
  std::size_t memory_recent = 20;   // N_r
  double epsilon = 1e-6;            // Doppler perturbation
  double ridge = 1e-4;              // RLS initialization
  double doppler_min = 0.5;
  double doppler_max = 1.5;
  Eigen::VectorXd gains;            // h_l, known
  Eigen::VectorXd initial_delays;   // tau_{l,0} = alpha_l(0), seconds
  double sample_period = 1.0 / 200e3;

  Index num_paths() const { return gains.size(); }
  void validate() const;
};

/// One closed piece of the piecewise-linear warp:
/// alpha_l(n) = d_l (n - a) T + tau_l for a <= n <= b.
struct DopplerSegment {
  Index a = 0;
  Index b = 0;
  Eigen::VectorXd d;
  Eigen::VectorXd tau;
  double lse = 0.0;
};

/// r_hat(n) = sum_l h_l s(d_l (n - a) T + tau_l) and its gradient in d.
struct Linearization {
  double prediction = 0.0;
  Eigen::VectorXd gradient;
};

Linearization predict_and_gradient(const TransmitSignal& sig, const Eigen::VectorXd& gains,
                                   const Eigen::VectorXd& d_ref, const Eigen::VectorXd& tau,
                                   Index a, Index n, double sample_period);

/// The L+1 linearizations for one sample. Row 0 expands around d_ref, row l
/// around d_ref + eps e_l. For every row the regression target for the
/// unknown delta-d is r[n] + offsets[k].
struct LinearizationStack {
  Eigen::MatrixXd rows;          // (L+1) x L
  Eigen::VectorXd offsets;       // -prediction_k + rows.row(k) . eps_k
  Eigen::VectorXd predictions;   // r_hat at the k-th expansion point
};

LinearizationStack perturbed_rows(const TransmitSignal& sig, const Eigen::VectorXd& gains,
                                  const Eigen::VectorXd& d_ref, const Eigen::VectorXd& tau,
                                  Index a, Index n, double sample_period, double epsilon);

/// In-place variant for the per-sample loop; `out` is resized as needed.
void perturbed_rows_into(LinearizationStack& out, const TransmitSignal& sig,
                         const Eigen::VectorXd& gains, const Eigen::VectorXd& d_ref,
                         const Eigen::VectorXd& tau, Index a, Index n, double sample_period,
                         double epsilon);

/// tau_new = tau_prev + d_prev (b - a) T, with b the first sample of the
/// next segment.
Eigen::VectorXd update_delays(const Eigen::VectorXd& d_prev, const Eigen::VectorXd& tau_prev,
                              Index a_prev, Index b_prev, double sample_period);

/// alpha_hat_l(n) from the segment containing n. Throws if n is not covered.
double reconstruct_timing(const std::vector<DopplerSegment>& segments, Index path, Index n,
                          double sample_period);

/// Linearization point carried by each candidate segment start.
struct WarpModel {
  Eigen::VectorXd d_ref;
  Eigen::VectorXd tau;  // timing at the candidate start
};

/// Sequential multipath Doppler tracker: perturbed linearization of the
/// warped-signal prediction, a bounded set of RLS-fitted candidate segment
/// starts, and Bellman-driven segment detection.
///
/// Feed samples in order with process_sample(); each call returns the
/// segment it closed, if any. finish() closes the open segment.
class DopplerTracker {
 public:
  DopplerTracker(TrackerConfig config, TransmitSignal signal);

  std::optional<DopplerSegment> process_sample(double r_n);
  std::optional<DopplerSegment> finish();

  const TrackerConfig& config() const { return config_; }
  const std::vector<DopplerSegment>& segments() const { return segments_; }
  const SegmentationState<WarpModel>& segmentation() const { return segmentation_; }
  Index sample_index() const { return n_; }
  Index segment_start() const { return seg_start_; }
  const Eigen::VectorXd& reference_doppler() const { return d_ref_; }
  const Eigen::VectorXd& segment_delays() const { return seg_tau_; }
  /// Running delta-d of the open segment.
  const Eigen::VectorXd& delta_doppler() const { return current_.estimate; }
  /// d_ref + delta-d, clamped to the plausibility range.
  Eigen::VectorXd current_doppler() const;
  /// True once an emitted segment's Doppler hit the plausibility clamp.
  bool diverged() const { return diverged_; }

 private:
  /// Clamps an emitted Doppler vector and records divergence.
  Eigen::VectorXd clamp_doppler(Eigen::VectorXd d);
  void absorb(RlsState<double>& rls, const WarpModel& model, Index start, double r_n);

  TrackerConfig config_;
  TransmitSignal signal_;
  Index n_ = 0;
  Index seg_start_ = 0;
  Eigen::VectorXd d_ref_;
  Eigen::VectorXd seg_tau_;
  RlsState<double> current_;
  SegmentationState<WarpModel> segmentation_;
  std::vector<DopplerSegment> segments_;
  LinearizationStack stack_;
  bool diverged_ = false;
  bool finished_ = false;
};

}  // namespace doptrack
