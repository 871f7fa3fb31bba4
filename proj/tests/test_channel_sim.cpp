#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "doptrack/channel_sim.hpp"
#include "doptrack/error.hpp"
#include "test_support.hpp"

using namespace doptrack;

namespace {

ChannelScene static_scene() {
  ChannelScene scene;
  scene.motion.rx_osc_amp = 0.0;
  scene.motion.surface_amp = 0.0;
  return scene;
}

}  // namespace

TEST_CASE("path lengths by the image method at the mean geometry") {
  const ChannelScene scene;  // phases 0: x(0) = 1.45 m, eta(0) = 0
  CHECK(path_length(scene, Path::direct, 0.0) == doctest::Approx(1.45).epsilon(1e-12));
  CHECK(path_length(scene, Path::surface, 0.0) == doctest::Approx(1.71724).epsilon(1e-5));
  CHECK(path_length(scene, Path::bottom, 0.0) == doctest::Approx(3.04712).epsilon(1e-5));
}

TEST_CASE("direct-path delay at the mean geometry") {
  const ChannelScene scene;
  CHECK(-warp(scene, Path::direct, 0) == doctest::Approx(0.96667e-3).epsilon(1e-5));
}

TEST_CASE("static scene has identity Doppler and a constant delay") {
  const ChannelScene scene = static_scene();
  const double T = scene.sample_period();
  for (Path p : kAllPaths) {
    const double l0 = path_length(scene, p, 0.0);
    for (Index n : {0, 1, 1000, 99999}) {
      CHECK(ground_truth_doppler(scene, p, n * T) == 1.0);
      CHECK(warp(scene, p, n) == doctest::Approx(n * T - l0 / 1500.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("direct-path Doppler stays within the receiver speed bound") {
  const ChannelScene scene;
  const double v_max = 2.0 * std::numbers::pi * 0.6 * 0.125;
  const double bound = v_max / 1500.0;
  CHECK(bound == doctest::Approx(3.14159e-4).epsilon(1e-5));
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double t = i * 1e-3;
    worst = std::max(worst, std::abs(ground_truth_doppler(scene, Path::direct, t) - 1.0));
  }
  CHECK(worst <= bound * (1.0 + 1e-12));
  CHECK(worst > 0.99 * bound);  // attained at the oscillation zero crossings
}

TEST_CASE("analytic Doppler matches finite differences of the warp") {
  const ChannelScene scene;
  const double h = 1e-4;
  for (Path p : kAllPaths)
    for (int i = 0; i < 200; ++i) {
      const double t = 0.0123 + i * 7.3e-3;
      const double fd = (warp_at(scene, p, t + h) - warp_at(scene, p, t - h)) / (2.0 * h);
      CHECK(std::abs(fd - ground_truth_doppler(scene, p, t)) < 1e-9);
    }
}

TEST_CASE("single static path reproduces the delayed signal exactly") {
  ChannelScene scene = static_scene();
  scene.gains = Eigen::Vector3d(1.0, 0.0, 0.0);
  const auto sig = doptrack::testing::test_signal(200);
  const auto rx = synthesize(scene, sig, 2000, 1);
  const double l0 = path_length(scene, Path::direct, 0.0);
  for (Index n = 0; n < 2000; ++n)
    CHECK(rx.samples[n] == sig.passband(n * scene.sample_period() - l0 / 1500.0));
}

TEST_CASE("zero gains and zero noise give silence") {
  ChannelScene scene;
  scene.gains.setZero();
  const auto sig = doptrack::testing::test_signal(200);
  CHECK(synthesize(scene, sig, 1000, 3).samples.isZero(0.0));
}

TEST_CASE("reference scenario: monotone warps, bounded energy, reproducible noise") {
  ChannelScene scene;
  const auto sig = doptrack::testing::test_signal(10001);
  const Index n = 100000;
  const auto clean = synthesize(scene, sig, n, 4);
  for (int l = 0; l < 3; ++l) {
    const Eigen::VectorXd steps =
        clean.truth.alpha.col(l).tail(n - 1) - clean.truth.alpha.col(l).head(n - 1);
    CHECK(steps.minCoeff() > 0.0);
  }
  double s_max = 0.0;
  // |s(t)| <= A |b(t)|; the envelope is smooth on a quarter-sample grid.
  for (Index i = 0; i < 4 * n; ++i)
    s_max = std::max(s_max, std::abs(sig.baseband(0.25 * i * scene.sample_period() - 2e-3)));
  const double bound = scene.gains.cwiseAbs().sum() * s_max * 1.01;
  CAPTURE(s_max);
  CHECK(clean.samples.cwiseAbs().maxCoeff() <= bound);

  scene.noise_std = 0.05;
  const auto a = synthesize(scene, sig, 5000, 99);
  const auto b = synthesize(scene, sig, 5000, 99);
  const auto c = synthesize(scene, sig, 5000, 100);
  CHECK(a.samples == b.samples);
  CHECK(a.samples != c.samples);
}

TEST_CASE("scene validation") {
  ChannelScene scene;
  CHECK_NOTHROW(scene.validate());
  scene.geometry.tx_depth = 2.0;
  CHECK_THROWS_AS(scene.validate(), ConfigError);
  scene = ChannelScene{};
  scene.motion.surface_amp = 0.5;  // would cross the 0.46 m terminals
  CHECK_THROWS_AS(scene.validate(), ConfigError);
  scene = ChannelScene{};
  scene.sample_rate = 100e3;
  CHECK_THROWS_AS(scene.validate(doptrack::testing::test_signal(10)), ConfigError);
  CHECK_THROWS_AS(synthesize(ChannelScene{}, doptrack::testing::test_signal(10), 0, 1), ConfigError);
}
