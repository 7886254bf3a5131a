#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "spikecam/grid.hpp"

namespace spikecam {

using Tick = std::int64_t;

// Bit-packed H x W x N binary spike tensor.
//
// Frame n occupies frame_bytes() bytes starting at n * frame_bytes(). Inside a
// frame, bit k (LSB-first) of byte k / 8 is pixel k in row-major order. The
// trailing padding bits of each frame are always zero. Frame 0 sits at the
// absolute tick origin_tick().
//
// Streams are immutable once built; use SpikeStreamBuilder to produce one.
class SpikeStream {
 public:
  SpikeStream(std::size_t height, std::size_t width, std::size_t length, Tick origin_tick,
              std::vector<std::uint8_t> bits);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t length() const { return length_; }
  std::size_t pixels() const { return height_ * width_; }
  Tick origin_tick() const { return origin_tick_; }
  Tick end_tick() const { return origin_tick_ + static_cast<Tick>(length_) - 1; }
  std::size_t frame_bytes() const { return (pixels() + 7) / 8; }

  // Frame index relative to the stream start.
  bool spike(std::size_t frame, std::size_t pixel) const {
    return (bits_[frame * frame_bytes() + pixel / 8] >> (pixel % 8)) & 1u;
  }
  bool spike(std::size_t frame, std::size_t row, std::size_t col) const {
    return spike(frame, row * width_ + col);
  }

  std::span<const std::uint8_t> frame(std::size_t n) const {
    return {bits_.data() + n * frame_bytes(), frame_bytes()};
  }
  std::span<const std::uint8_t> bits() const { return bits_; }

  std::size_t total_spikes() const;

  friend bool operator==(const SpikeStream&, const SpikeStream&) = default;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t length_;
  Tick origin_tick_;
  std::vector<std::uint8_t> bits_;
};

class SpikeStreamBuilder {
 public:
  SpikeStreamBuilder(std::size_t height, std::size_t width, std::size_t length, Tick origin_tick = 0);

  void set(std::size_t frame, std::size_t pixel, bool value = true) {
    auto& byte = bits_[frame * frame_bytes_ + pixel / 8];
    const auto mask = static_cast<std::uint8_t>(1u << (pixel % 8));
    byte = value ? (byte | mask) : (byte & ~mask);
  }
  void set_at(std::size_t frame, std::size_t row, std::size_t col, bool value = true) {
    set(frame, row * width_ + col, value);
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t length() const { return length_; }

  SpikeStream build() &&;

 private:
  std::size_t height_;
  std::size_t width_;
  std::size_t length_;
  Tick origin_tick_;
  std::size_t frame_bytes_;
  std::vector<std::uint8_t> bits_;
};

// Zero-copy view of 2 * delta_t + 1 consecutive frames centered on an absolute
// tick. The parent stream must outlive the window.
class SpikeWindow {
 public:
  SpikeWindow(const SpikeStream& stream, Tick center_tick, Tick delta_t);

  const SpikeStream& stream() const { return *stream_; }
  Tick center_tick() const { return center_tick_; }
  Tick delta_t() const { return delta_t_; }
  Tick start_tick() const { return center_tick_ - delta_t_; }
  Tick end_tick() const { return center_tick_ + delta_t_; }
  std::size_t length() const { return static_cast<std::size_t>(2 * delta_t_ + 1); }
  std::size_t height() const { return stream_->height(); }
  std::size_t width() const { return stream_->width(); }
  std::size_t pixels() const { return stream_->pixels(); }

  // j is relative to the window start.
  bool spike(std::size_t j, std::size_t pixel) const {
    return stream_->spike(first_frame_ + j, pixel);
  }
  bool spike_at_tick(Tick tick, std::size_t pixel) const {
    return spike(static_cast<std::size_t>(tick - start_tick()), pixel);
  }
  std::span<const std::uint8_t> frame(std::size_t j) const { return stream_->frame(first_frame_ + j); }

 private:
  const SpikeStream* stream_;
  Tick center_tick_;
  Tick delta_t_;
  std::size_t first_frame_;
};

// Throws BoundsError when [center - delta_t, center + delta_t] leaves the stream.
SpikeWindow slice_window(const SpikeStream& stream, Tick center_tick, Tick delta_t);

// Tiles the stream start with `count` contiguous windows of odd length
// `window_len`; window i is centered at origin + i * window_len + (window_len - 1) / 2.
std::vector<SpikeWindow> partition_windows(const SpikeStream& stream, std::size_t count,
                                           std::size_t window_len);

Tick window_center(Tick origin, std::size_t index, std::size_t window_len);

Grid<std::uint32_t> spike_count_map(const SpikeWindow& window);

}  // namespace spikecam
