#include "spikecam/spike_stream.hpp"

#include <bit>
#include <string>

namespace spikecam {

namespace {

void check_dims(std::size_t height, std::size_t width, std::size_t length, Tick origin_tick) {
  if (height == 0 || width == 0 || length == 0) {
    throw ArgumentError("spike stream dimensions must be positive, got " + std::to_string(height) +
                        "x" + std::to_string(width) + "x" + std::to_string(length));
  }
  if (origin_tick < 0) throw ArgumentError("spike stream origin tick must be non-negative");
}

std::uint8_t padding_mask(std::size_t pixels) {
  const auto used = pixels % 8;
  return used == 0 ? 0 : static_cast<std::uint8_t>(0xFFu << used);
}

}  // namespace

SpikeStream::SpikeStream(std::size_t height, std::size_t width, std::size_t length,
                         Tick origin_tick, std::vector<std::uint8_t> bits)
    : height_(height), width_(width), length_(length), origin_tick_(origin_tick), bits_(std::move(bits)) {
  check_dims(height, width, length, origin_tick);
  if (bits_.size() != length_ * frame_bytes()) {
    throw ArgumentError("spike stream payload has " + std::to_string(bits_.size()) +
                        " bytes, expected " + std::to_string(length_ * frame_bytes()));
  }
  if (const auto mask = padding_mask(pixels()); mask != 0) {
    for (std::size_t n = 0; n < length_; ++n) {
      if (bits_[(n + 1) * frame_bytes() - 1] & mask) {
        throw CorruptionError("nonzero padding bits in frame " + std::to_string(n));
      }
    }
  }
}

std::size_t SpikeStream::total_spikes() const {
  std::size_t total = 0;
  for (auto b : bits_) total += static_cast<std::size_t>(std::popcount(b));
  return total;
}

SpikeStreamBuilder::SpikeStreamBuilder(std::size_t height, std::size_t width, std::size_t length,
                                       Tick origin_tick)
    : height_(height), width_(width), length_(length), origin_tick_(origin_tick),
      frame_bytes_((height * width + 7) / 8) {
  check_dims(height, width, length, origin_tick);
  bits_.assign(length * frame_bytes_, 0);
}

SpikeStream SpikeStreamBuilder::build() && {
  return SpikeStream(height_, width_, length_, origin_tick_, std::move(bits_));
}

SpikeWindow::SpikeWindow(const SpikeStream& stream, Tick center_tick, Tick delta_t)
    : stream_(&stream), center_tick_(center_tick), delta_t_(delta_t), first_frame_(0) {
  if (delta_t < 0) throw ArgumentError("window half-width must be non-negative");
  if (center_tick - delta_t < stream.origin_tick() || center_tick + delta_t > stream.end_tick()) {
    throw BoundsError("window [" + std::to_string(center_tick - delta_t) + ", " +
                      std::to_string(center_tick + delta_t) + "] exceeds stream ticks [" +
                      std::to_string(stream.origin_tick()) + ", " + std::to_string(stream.end_tick()) + "]");
  }
  first_frame_ = static_cast<std::size_t>(center_tick - delta_t - stream.origin_tick());
}

SpikeWindow slice_window(const SpikeStream& stream, Tick center_tick, Tick delta_t) {
  return SpikeWindow(stream, center_tick, delta_t);
}

Tick window_center(Tick origin, std::size_t index, std::size_t window_len) {
  return origin + static_cast<Tick>(index * window_len + (window_len - 1) / 2);
}

std::vector<SpikeWindow> partition_windows(const SpikeStream& stream, std::size_t count,
                                           std::size_t window_len) {
  if (window_len == 0 || window_len % 2 == 0) {
    throw ArgumentError("window length must be odd, got " + std::to_string(window_len));
  }
  if (count == 0) throw ArgumentError("window count must be positive");
  if (count * window_len > stream.length()) {
    throw BoundsError(std::to_string(count) + " windows of " + std::to_string(window_len) +
                      " ticks exceed stream length " + std::to_string(stream.length()));
  }
  std::vector<SpikeWindow> windows;
  windows.reserve(count);
  const auto half = static_cast<Tick>((window_len - 1) / 2);
  for (std::size_t i = 0; i < count; ++i) {
    windows.emplace_back(stream, window_center(stream.origin_tick(), i, window_len), half);
  }
  return windows;
}

Grid<std::uint32_t> spike_count_map(const SpikeWindow& window) {
  Grid<std::uint32_t> counts(window.height(), window.width(), 0);
  const auto pixels = window.pixels();
  for (std::size_t j = 0; j < window.length(); ++j) {
    const auto frame = window.frame(j);
    for (std::size_t byte = 0; byte < frame.size(); ++byte) {
      auto b = frame[byte];
      while (b != 0) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(b));
        const auto pixel = byte * 8 + bit;
        if (pixel < pixels) ++counts[pixel];
        b = static_cast<std::uint8_t>(b & (b - 1));
      }
    }
  }
  return counts;
}

}  // namespace spikecam
