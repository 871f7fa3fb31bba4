#include "doptrack/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "doptrack/error.hpp"

namespace doptrack {

PulseShape PulseShape::for_symbol_rate(double symbol_rate) {
  if (!(symbol_rate > 0.0)) throw ConfigError("symbol rate must be positive");
  const double period = 1.0 / symbol_rate;
  return PulseShape{period, 0.25 * period, 4};
}

void PulseShape::validate() const {
  if (!(symbol_period > 0.0)) throw ConfigError("symbol_period must be positive");
  if (!(gaussian_std > 0.0)) throw ConfigError("gaussian_std must be positive");
  if (truncation_halfwidth < 1) throw ConfigError("truncation_halfwidth must be >= 1");
  const double edge = truncation_window() / gaussian_std;
  if (std::exp(-0.5 * edge * edge) >= 1e-6)
    throw ConfigError("pulse truncation leaves more than 1e-6 of the peak; widen the window");
}

std::vector<Complex> generate_symbols(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw ConfigError("cannot generate an empty symbol sequence");
  const double r = 1.0 / std::numbers::sqrt2;
  std::mt19937_64 rng(seed);
  std::vector<Complex> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto bits = rng();
    out.emplace_back((bits & 1u) ? r : -r, (bits & 2u) ? r : -r);
  }
  return out;
}

TransmitSignal::TransmitSignal(std::vector<Complex> symbols, PulseShape pulse, double carrier_freq,
                               double amplitude)
    : symbols_(std::move(symbols)),
      pulse_(pulse),
      carrier_freq_(carrier_freq),
      amplitude_(amplitude),
      inv_two_var_(0.0) {
  if (symbols_.empty()) throw ConfigError("transmit signal needs at least one symbol");
  pulse_.validate();
  if (!(carrier_freq_ >= 0.0)) throw ConfigError("carrier frequency must be non-negative");
  if (!std::isfinite(amplitude_)) throw ConfigError("amplitude must be finite");
  inv_two_var_ = 0.5 / (pulse_.gaussian_std * pulse_.gaussian_std);
}

double TransmitSignal::bandwidth() const {
  return 3.0 / (2.0 * std::numbers::pi * pulse_.gaussian_std);
}

std::pair<Complex, Complex> TransmitSignal::baseband_with_derivative(double t) const {
  const double ts = pulse_.symbol_period;
  const double window = pulse_.truncation_window();
  const auto last = static_cast<long>(symbols_.size()) - 1;
  const long k_lo = std::max<long>(0, static_cast<long>(std::ceil((t - window) / ts)));
  const long k_hi = std::min<long>(last, static_cast<long>(std::floor((t + window) / ts)));

  Complex value{0.0, 0.0};
  Complex slope{0.0, 0.0};
  for (long k = k_lo; k <= k_hi; ++k) {
    const double u = t - static_cast<double>(k) * ts;
    if (std::abs(u) > window) continue;
    const double g = std::exp(-u * u * inv_two_var_);
    value += symbols_[k] * g;
    slope += symbols_[k] * (-2.0 * inv_two_var_ * u * g);
  }
  return {value, slope};
}

Complex TransmitSignal::baseband(double t) const { return baseband_with_derivative(t).first; }

double TransmitSignal::passband(double t) const { return passband_with_derivative(t).first; }

double TransmitSignal::passband_derivative(double t) const {
  return passband_with_derivative(t).second;
}

std::pair<double, double> TransmitSignal::passband_with_derivative(double t) const {
  const auto [b, db] = baseband_with_derivative(t);
  if (b == Complex{} && db == Complex{}) return {0.0, 0.0};
  const double omega = 2.0 * std::numbers::pi * carrier_freq_;
  const Complex carrier = std::polar(1.0, omega * t);
  const double value = amplitude_ * (b * carrier).real();
  const double deriv = amplitude_ * ((db + Complex{0.0, omega} * b) * carrier).real();
  return {value, deriv};
}

}  // namespace doptrack
