#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "doptrack/error.hpp"
#include "doptrack/signal_model.hpp"
#include "test_support.hpp"

using namespace doptrack;

TEST_CASE("generate_symbols draws from the QPSK constellation") {
  const double r = 1.0 / std::numbers::sqrt2;
  for (const auto& c : generate_symbols(4, 7)) {
    CHECK(std::abs(std::abs(c.real()) - r) == doctest::Approx(0.0));
    CHECK(std::abs(std::abs(c.imag()) - r) == doctest::Approx(0.0));
    CHECK(std::abs(c) == doctest::Approx(1.0));
  }
}

TEST_CASE("generate_symbols is deterministic per seed") {
  CHECK(generate_symbols(1000, 7) == generate_symbols(1000, 7));
  CHECK(generate_symbols(1000, 7) != generate_symbols(1000, 8));
  CHECK_THROWS_AS(generate_symbols(0, 7), ConfigError);
}

TEST_CASE("baseband of a single symbol is the Gaussian pulse") {
  const PulseShape pulse = PulseShape::for_symbol_rate(20e3);
  const TransmitSignal sig({Complex{1.0, 0.0}}, pulse, 30e3);
  CHECK(sig.baseband(0.0).real() == doctest::Approx(1.0));
  CHECK(sig.baseband(0.0).imag() == doctest::Approx(0.0));
  CHECK(sig.baseband(pulse.gaussian_std).real() == doctest::Approx(0.60653066).epsilon(1e-8));
  CHECK(sig.baseband(pulse.truncation_window() * 1.01) == Complex{});
  CHECK(sig.passband(-1.0) == 0.0);
  CHECK(sig.passband(1.0) == 0.0);
}

TEST_CASE("passband at isolated symbol centers is the carrier") {
  // Narrow pulses so neighbouring symbols contribute < 1e-12 at the centers.
  PulseShape pulse = PulseShape::for_symbol_rate(20e3);
  pulse.gaussian_std = 0.05 * pulse.symbol_period;
  const TransmitSignal sig(std::vector<Complex>(50, Complex{1.0, 0.0}), pulse, 30e3);
  for (int k = 0; k < 50; ++k) {
    const double t = k * pulse.symbol_period;
    CHECK(sig.passband(t) == doctest::Approx(std::cos(2.0 * std::numbers::pi * 30e3 * t)).epsilon(1e-9));
  }
  // Carrier extremum and even envelope at t = 0.
  CHECK(sig.passband_derivative(0.0) == doctest::Approx(0.0));
}

TEST_CASE("analytic derivative matches central finite differences") {
  const TransmitSignal sig = doptrack::testing::test_signal(400);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> when(0.0, sig.duration());
  const double h = 1e-9;
  for (int i = 0; i < 1000; ++i) {
    const double t = when(rng);
    const double analytic = sig.passband_derivative(t);
    const double fd = (sig.passband(t + h) - sig.passband(t - h)) / (2.0 * h);
    CHECK(std::abs(analytic - fd) / std::max(1.0, std::abs(analytic)) < 1e-4);
  }
}

TEST_CASE("passband is linear in amplitude") {
  const auto symbols = generate_symbols(200, 11);
  const PulseShape pulse = PulseShape::for_symbol_rate(20e3);
  const TransmitSignal a(symbols, pulse, 30e3, 0.7);
  const TransmitSignal b(symbols, pulse, 30e3, 1.4);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> when(-1e-4, a.duration() + 1e-4);
  for (int i = 0; i < 200; ++i) {
    const double t = when(rng);
    CHECK(b.passband(t) == doctest::Approx(2.0 * a.passband(t)).epsilon(1e-12));
    CHECK(b.passband_derivative(t) == doctest::Approx(2.0 * a.passband_derivative(t)).epsilon(1e-12));
  }
}

TEST_CASE("signal construction rejects bad parameters") {
  const PulseShape ok = PulseShape::for_symbol_rate(20e3);
  CHECK_THROWS_AS(TransmitSignal({}, ok, 30e3), ConfigError);
  PulseShape short_window = ok;
  short_window.truncation_halfwidth = 1;
  short_window.gaussian_std = ok.symbol_period;  // edge at exp(-1/2)
  CHECK_THROWS_AS(short_window.validate(), ConfigError);
  PulseShape negative = ok;
  negative.gaussian_std = -1.0;
  CHECK_THROWS_AS(negative.validate(), ConfigError);
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.gaussian_std == doctest::Approx(0.25 / 20e3));
  CHECK(ok.truncation_halfwidth == 4);
}
