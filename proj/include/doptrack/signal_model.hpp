#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

namespace doptrack {

using Complex = std::complex<double>;

/// Gaussian pulse. Treated as zero farther than `truncation_halfwidth`
/// symbol periods from its center.
struct PulseShape {
  double symbol_period = 1.0 / 20e3;
  double gaussian_std = 0.25 / 20e3;
  int truncation_halfwidth = 4;

  /// Default pulse for a symbol rate: std = 0.25 symbol, 4-symbol truncation.
  static PulseShape for_symbol_rate(double symbol_rate);

  void validate() const;
  double truncation_window() const { return truncation_halfwidth * symbol_period; }
};

/// QPSK points (+-1 +-j)/sqrt(2), drawn from a 64-bit Mersenne twister.
std::vector<Complex> generate_symbols(std::size_t count, std::uint64_t seed);

/// Known transmitted waveform
///   s(t) = A Re{ b(t) exp(j 2 pi f_c t) },  b(t) = sum_k c_k g(t - k Ts)
/// evaluated analytically at arbitrary real times. Immutable after
/// construction, so evaluation is safe from any number of threads.
class TransmitSignal {
 public:
  TransmitSignal(std::vector<Complex> symbols, PulseShape pulse, double carrier_freq,
                 double amplitude = 1.0);

  const std::vector<Complex>& symbols() const { return symbols_; }
  const PulseShape& pulse() const { return pulse_; }
  double carrier_freq() const { return carrier_freq_; }
  double amplitude() const { return amplitude_; }
  double duration() const { return symbols_.size() * pulse_.symbol_period; }

  /// One-sided bandwidth used for the sampling-rate check: 3 sigma of the
  /// Gaussian pulse spectrum.
  double bandwidth() const;

  Complex baseband(double t) const;
  double passband(double t) const;
  double passband_derivative(double t) const;
  /// (s(t), ds/dt) with one pass over the contributing pulses.
  std::pair<double, double> passband_with_derivative(double t) const;

 private:
  /// b(t) and db/dt.
  std::pair<Complex, Complex> baseband_with_derivative(double t) const;

  std::vector<Complex> symbols_;
  PulseShape pulse_;
  double carrier_freq_;
  double amplitude_;
  double inv_two_var_;
};

inline Complex eval_baseband(const TransmitSignal& sig, double t) { return sig.baseband(t); }
inline double eval_passband(const TransmitSignal& sig, double t) { return sig.passband(t); }
inline double eval_passband_derivative(const TransmitSignal& sig, double t) {
  return sig.passband_derivative(t);
}

}  // namespace doptrack
