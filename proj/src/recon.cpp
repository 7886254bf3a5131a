#include "spikecam/recon.hpp"

#include <algorithm>
#include <cmath>

namespace spikecam {

namespace {

double clamp_unit(double v) { return std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0; }

}  // namespace

Image tfp_reconstruct(const SpikeWindow& window, const SimConfig& cfg) {
  cfg.validate();
  const auto counts = spike_count_map(window);
  const double scale = cfg.threshold / (static_cast<double>(window.length()) * cfg.gain);
  Image out(window.height(), window.width());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = clamp_unit(scale * counts[p]);
  return out;
}

Image tfi_reconstruct(const IsiMap& isi, const SimConfig& cfg) {
  cfg.validate();
  Image out(isi.height(), isi.width());
  const double floor_value = clamp_unit(cfg.threshold / (cfg.gain * static_cast<double>(isi.cap)));
  for (std::size_t p = 0; p < out.size(); ++p) {
    if (isi.fully_censored(p)) {
      out[p] = floor_value;
    } else {
      out[p] = clamp_unit(cfg.threshold / (cfg.gain * static_cast<double>(isi.intervals[p])));
    }
  }
  return out;
}

std::vector<Image> gisi_tfi_reconstruct(std::span<const SpikeWindow> windows, const SimConfig& cfg) {
  const auto sweep = gisi_sweep(windows);
  std::vector<Image> out;
  out.reserve(sweep.combined.size());
  for (const auto& isi : sweep.combined) out.push_back(tfi_reconstruct(isi, cfg));
  return out;
}

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::floor(clamp_unit(v) * 255.0 + 0.5));
}

}  // namespace spikecam
