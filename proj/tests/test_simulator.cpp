#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "spikecam/pipeline.hpp"
#include "spikecam/simulator.hpp"

using namespace spikecam;

namespace {

SceneSequence constant_scene(std::size_t h, std::size_t w, std::size_t n, double y) {
  SceneSequence s;
  s.frames.assign(n, Image(h, w, y));
  return s;
}

std::vector<std::uint32_t> per_pixel_counts(const SpikeStream& s) {
  std::vector<std::uint32_t> counts(s.pixels(), 0);
  for (std::size_t t = 0; t < s.length(); ++t)
    for (std::size_t p = 0; p < s.pixels(); ++p) counts[p] += s.spike(t, p) ? 1 : 0;
  return counts;
}

}  // namespace

TEST_CASE("quarter-threshold current fires every fourth tick") {
  const auto s = simulate_stream(constant_scene(1, 1, 8, 1.0), SimConfig::noiseless());
  const std::vector<bool> expected = {0, 0, 0, 1, 0, 0, 0, 1};
  for (std::size_t t = 0; t < 8; ++t) CHECK(s.spike(t, 0) == expected[t]);
}

TEST_CASE("dark scene without dark current is silent") {
  const auto s = simulate_stream(constant_scene(6, 5, 50, 0.0), SimConfig::noiseless());
  CHECK(s.total_spikes() == 0);
}

TEST_CASE("noiseless simulator equals the prefix-sum oracle") {
  // Intensities k / 1024 with gain 1/4 give currents that are exact multiples
  // of 1/4096, so the oracle can run in integers.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t h = 1 + rng() % 6, w = 1 + rng() % 6, n = 50 + rng() % 200;
    SceneSequence scene;
    std::vector<std::vector<std::int64_t>> currents(n, std::vector<std::int64_t>(h * w));
    for (std::size_t t = 0; t < n; ++t) {
      Image f(h, w);
      for (std::size_t p = 0; p < h * w; ++p) {
        const auto k = static_cast<std::int64_t>(rng() % 1025);
        f[p] = static_cast<double>(k) / 1024.0;
        currents[t][p] = k;
      }
      scene.frames.push_back(std::move(f));
    }
    const auto s = simulate_stream(scene, SimConfig::noiseless());
    const auto expected = oracle::prefix_sum_spikes(currents, 4096);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t p = 0; p < h * w; ++p) REQUIRE(s.spike(t, p) == (expected[t][p] == 1));
  }
}

TEST_CASE("rate law for constant intensities") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto cfg = SimConfig::noiseless();
  for (int trial = 0; trial < 50; ++trial) {
    const double y = u(rng);
    const std::size_t n = 1000;
    const auto s = simulate_stream(constant_scene(2, 3, n, y), cfg);
    const double expected = std::floor(static_cast<double>(n) * cfg.gain * y / cfg.threshold);
    for (auto c : per_pixel_counts(s)) REQUIRE(std::abs(static_cast<double>(c) - expected) <= 1.0);
  }
}

TEST_CASE("overshoot emits one spike per tick and keeps the remainder") {
  SimConfig cfg = SimConfig::noiseless();
  cfg.gain = 2.5;
  SceneSequence scene = constant_scene(1, 1, 4, 1.0);
  SpikeStreamBuilder b(1, 1, 4);
  SensorState sensor(cfg, Image(1, 1, 0.0));
  for (std::size_t n = 0; n < 4; ++n) {
    sensor.step(scene.frames[n], n, b);
    CHECK(sensor.accumulator()[0] >= 0.0);
    CHECK(sensor.accumulator()[0] < cfg.threshold);
  }
  const auto s = std::move(b).build();
  CHECK(s.total_spikes() == 4);
  // 2.5 mod 1 = 0.5 after the first tick; 0.5 + 2.5 = 3.0 -> 0.0 after the second.
  CHECK(sensor.accumulator()[0] == doctest::Approx(0.0));
}

TEST_CASE("apply_darkening") {
  const auto scene = constant_scene(3, 3, 4, 0.8);
  CHECK(apply_darkening(scene, 1.0).frames == scene.frames);
  for (const auto& f : apply_darkening(scene, 0.5).frames)
    for (double v : f.data) CHECK(v == doctest::Approx(0.4).epsilon(1e-15));
  CHECK_THROWS_AS(apply_darkening(scene, 0.0), ArgumentError);
  CHECK_THROWS_AS(apply_darkening(scene, 1.01), ArgumentError);
  CHECK_THROWS_AS(apply_darkening(scene, -0.3), ArgumentError);
}

TEST_CASE("darkening never increases spike counts") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    SceneSequence scene;
    for (int t = 0; t < 300; ++t) scene.frames.push_back(oracle::random_image(rng, 4, 4));
    const double factor = 0.01 + 0.99 * u(rng);
    const auto bright = per_pixel_counts(simulate_stream(scene, SimConfig::noiseless()));
    const auto dark = per_pixel_counts(simulate_stream(apply_darkening(scene, factor), SimConfig::noiseless()));
    for (std::size_t p = 0; p < bright.size(); ++p) REQUIRE(dark[p] <= bright[p]);
  }
}

TEST_CASE("sample_dark_current") {
  SimConfig cfg;
  cfg.dark_mean = 0.003;
  cfg.dark_fpn_sigma = 0.0;
  for (double v : sample_dark_current(cfg, 4, 5).data) CHECK(v == 0.003);

  cfg.dark_mean = 0.0;
  for (double v : sample_dark_current(cfg, 4, 5).data) CHECK(v == 0.0);

  cfg.dark_mean = 0.001;
  cfg.dark_fpn_sigma = 0.002;
  cfg.seed = 17;
  const auto a = sample_dark_current(cfg, 16, 16);
  CHECK(a == sample_dark_current(cfg, 16, 16));
  for (double v : a.data) CHECK(v >= 0.0);
  cfg.seed = 18;
  CHECK(a != sample_dark_current(cfg, 16, 16));
}

TEST_CASE("simulation is deterministic under seed with every noise source on") {
  std::mt19937_64 rng(8);
  SceneSequence scene;
  for (int t = 0; t < 100; ++t) scene.frames.push_back(oracle::random_image(rng, 8, 8));
  SimConfig cfg;
  cfg.shot_noise = true;
  cfg.dark_fpn_sigma = 0.001;
  cfg.seed = 1;
  const auto a = simulate_stream(scene, cfg);
  CHECK(a == simulate_stream(scene, cfg));
  cfg.seed = 2;
  CHECK(a != simulate_stream(scene, cfg));
}

TEST_CASE("config validation") {
  SimConfig cfg;
  cfg.threshold = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.gain = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dark_mean = -1e-3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.dark_fpn_sigma = -1e-3;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.readout_period = 2;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  const SimConfig defaults;
  CHECK(defaults.gain == defaults.threshold / 4);
  CHECK(defaults.dark_mean == defaults.threshold / 2500);
}

TEST_CASE("scene validation") {
  SceneSequence empty;
  CHECK_THROWS_AS(simulate_stream(empty, SimConfig::noiseless()), ArgumentError);
  auto bad = constant_scene(2, 2, 3, 0.5);
  bad.frames[1][0] = 1.5;
  CHECK_THROWS_AS(simulate_stream(bad, SimConfig::noiseless()), ArgumentError);
}

TEST_CASE("full-scale dataset config produces 400x250x1000 streams") {
  const auto cfg = DatasetConfig::load(SPIKECAM_SOURCE_DIR "/configs/lowlight_full.cfg");
  CHECK(cfg.scenes == 100);
  CHECK(cfg.height == 400);
  CHECK(cfg.width == 250);
  CHECK(cfg.effective_length() == 1000);
  CHECK(cfg.window_len == 41);
  CHECK(cfg.num_windows == 21);
  CHECK(cfg.darkening == "random");
}
