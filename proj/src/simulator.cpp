#include "spikecam/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spikecam/rng.hpp"

namespace spikecam {

namespace {

constexpr std::uint64_t kDarkStream = 1;
constexpr std::uint64_t kShotStream = 2;

}  // namespace

void SimConfig::validate() const {
  if (!(threshold > 0) || !std::isfinite(threshold)) throw ConfigError("threshold must be > 0");
  if (!(gain > 0) || !std::isfinite(gain)) throw ConfigError("gain must be > 0");
  if (readout_period != 1) throw ConfigError("readout_period must be 1 tick");
  if (!(dark_mean >= 0) || !std::isfinite(dark_mean)) throw ConfigError("dark_mean must be >= 0");
  if (!(dark_fpn_sigma >= 0) || !std::isfinite(dark_fpn_sigma)) {
    throw ConfigError("dark_fpn_sigma must be >= 0");
  }
  if (shot_noise && !(shot_quanta > 0)) throw ConfigError("shot_quanta must be > 0");
}

SimConfig SimConfig::noiseless(double threshold) {
  SimConfig cfg;
  cfg.threshold = threshold;
  cfg.gain = threshold / 4.0;
  cfg.dark_mean = 0.0;
  cfg.dark_fpn_sigma = 0.0;
  cfg.shot_noise = false;
  return cfg;
}

void SceneSequence::validate() const {
  if (frames.empty()) throw ArgumentError("scene has no frames");
  const auto h = frames.front().height;
  const auto w = frames.front().width;
  if (h == 0 || w == 0) throw ArgumentError("scene frames must be non-empty");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& f = frames[i];
    if (f.height != h || f.width != w || f.data.size() != h * w) {
      throw ArgumentError("scene frame " + std::to_string(i) + " has inconsistent shape");
    }
    for (double v : f.data) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ArgumentError("scene frame " + std::to_string(i) + " has intensity outside [0, 1]");
      }
    }
  }
  if (origin_tick < 0) throw ArgumentError("scene origin tick must be non-negative");
}

Image sample_dark_current(const SimConfig& cfg, std::size_t height, std::size_t width) {
  cfg.validate();
  Image dark(height, width, cfg.dark_mean);
  if (cfg.dark_fpn_sigma == 0.0) return dark;
  for (std::size_t p = 0; p < dark.size(); ++p) {
    SplitMix64 rng(derive_seed(cfg.seed, kDarkStream, p));
    dark[p] = std::max(0.0, rng.normal(cfg.dark_mean, cfg.dark_fpn_sigma));
  }
  return dark;
}

SpikeStream simulate_stream(const SceneSequence& scene, const SimConfig& cfg) {
  cfg.validate();
  scene.validate();
  return simulate_stream(scene, cfg, sample_dark_current(cfg, scene.height(), scene.width()));
}

SensorState::SensorState(const SimConfig& cfg, Image dark_current)
    : cfg_(cfg), dark_(std::move(dark_current)), accumulator_(dark_.size(), 0.0) {
  cfg_.validate();
}

void SensorState::step(const Image& frame, std::size_t n, SpikeStreamBuilder& out) {
  if (!frame.same_shape(dark_) || out.height() != dark_.height || out.width() != dark_.width) {
    throw ArgumentError("frame shape does not match the sensor");
  }
  const double phi = cfg_.threshold;
  for (std::size_t p = 0; p < accumulator_.size(); ++p) {
    double photo = cfg_.gain * frame[p];
    if (cfg_.shot_noise && photo > 0.0) {
      SplitMix64 rng(derive_seed(cfg_.seed, kShotStream, p, n));
      const double quantum = phi / cfg_.shot_quanta;
      photo = static_cast<double>(rng.poisson(photo / quantum)) * quantum;
    }
    double& a = accumulator_[p];
    a += photo + dark_[p];
    if (a >= phi) {
      out.set(n, p);
      a = std::fmod(a, phi);
    }
  }
}

SpikeStream simulate_stream(const SceneSequence& scene, const SimConfig& cfg, const Image& dark_current) {
  cfg.validate();
  scene.validate();
  if (dark_current.height != scene.height() || dark_current.width != scene.width()) {
    throw ArgumentError("dark current map shape does not match the scene");
  }
  SpikeStreamBuilder builder(scene.height(), scene.width(), scene.length(), scene.origin_tick);
  SensorState sensor(cfg, dark_current);
  for (std::size_t n = 0; n < scene.length(); ++n) sensor.step(scene.frames[n], n, builder);
  return std::move(builder).build();
}

void darken_in_place(Image& frame, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw ArgumentError("darkening factor must lie in (0, 1], got " + std::to_string(factor));
  }
  for (auto& v : frame.data) v = std::clamp(v * factor, 0.0, 1.0);
}

SceneSequence apply_darkening(const SceneSequence& scene, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) {
    throw ArgumentError("darkening factor must lie in (0, 1], got " + std::to_string(factor));
  }
  SceneSequence out = scene;
  for (auto& frame : out.frames) darken_in_place(frame, factor);
  return out;
}

}  // namespace spikecam
