#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikecam/isi.hpp"
#include "spikecam/simulator.hpp"

namespace spikecam {

// Windowed firing rate: threshold * count / (L * gain), clamped to [0, 1].
Image tfp_reconstruct(const SpikeWindow& window, const SimConfig& cfg);

// Reciprocal interval: threshold / (gain * interval), clamped to [0, 1].
// Pixels censored on both sides take the floor value threshold / (gain * cap).
Image tfi_reconstruct(const IsiMap& isi, const SimConfig& cfg);

// TFI on the combined GISI of each window.
std::vector<Image> gisi_tfi_reconstruct(std::span<const SpikeWindow> windows, const SimConfig& cfg);

// 8-bit export with round-half-up of v * 255.
std::uint8_t to_u8(double v);
inline double from_u8(std::uint8_t v) { return static_cast<double>(v) / 255.0; }

}  // namespace spikecam
