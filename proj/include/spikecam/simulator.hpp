#pragma once

#include <cstdint>
#include <vector>

#include "spikecam/grid.hpp"
#include "spikecam/spike_stream.hpp"

namespace spikecam {

// Integrate-and-fire sensor parameters. Currents are in accumulation units
// per readout tick; intensities are normalized to [0, 1].
struct SimConfig {
  double threshold = 1.0;
  // Normalized intensity 1.0 fires every 4 ticks.
  double gain = 0.25;
  // The discrete model integrates exactly once per readout; only 1 is accepted.
  Tick readout_period = 1;
  double dark_mean = 1.0 / 2500.0;
  double dark_fpn_sigma = 1.0 / 10000.0;
  bool shot_noise = false;
  // Photo-electrons per threshold; sets the Poisson granularity of shot noise.
  double shot_quanta = 256.0;
  std::uint64_t seed = 0;

  // Throws ConfigError on out-of-range fields.
  void validate() const;

  // Defaults scaled to a given threshold, dark current and shot noise disabled.
  static SimConfig noiseless(double threshold = 1.0);

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// One intensity frame per readout tick; frame i covers tick origin_tick + i.
struct SceneSequence {
  std::vector<Image> frames;
  Tick origin_tick = 0;

  std::size_t height() const { return frames.empty() ? 0 : frames.front().height; }
  std::size_t width() const { return frames.empty() ? 0 : frames.front().width; }
  std::size_t length() const { return frames.size(); }
  Tick tick_of_frame(std::size_t i) const { return origin_tick + static_cast<Tick>(i); }

  // Throws ArgumentError on empty, ragged or out-of-range scenes.
  void validate() const;
};

// Per-pixel sensor state: accumulation A(x) and its fixed-pattern dark current.
// Feeds one intensity frame per readout tick.
class SensorState {
 public:
  SensorState(const SimConfig& cfg, Image dark_current);

  // Integrates `frame` for tick n and writes the fired spikes into frame n of `out`.
  void step(const Image& frame, std::size_t n, SpikeStreamBuilder& out);

  const std::vector<double>& accumulator() const { return accumulator_; }
  const Image& dark_current() const { return dark_; }

 private:
  SimConfig cfg_;
  Image dark_;
  std::vector<double> accumulator_;
};

// Fixed-pattern dark current: max(0, Normal(dark_mean, dark_fpn_sigma)) per
// pixel, drawn from a per-pixel counter-based stream keyed on cfg.seed.
Image sample_dark_current(const SimConfig& cfg, std::size_t height, std::size_t width);

// Runs the sensor: per tick and pixel the accumulator gains
// gain * Y + dark (+ shot noise); reaching the threshold emits one spike and
// keeps the accumulation modulo the threshold.
SpikeStream simulate_stream(const SceneSequence& scene, const SimConfig& cfg);
SpikeStream simulate_stream(const SceneSequence& scene, const SimConfig& cfg, const Image& dark_current);

void darken_in_place(Image& frame, double factor);

// Multiplies every intensity by factor in (0, 1], clamped to [0, 1].
SceneSequence apply_darkening(const SceneSequence& scene, double factor);

}  // namespace spikecam
