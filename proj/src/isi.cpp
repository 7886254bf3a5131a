#include "spikecam/isi.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace spikecam {

namespace {

// In-window bounding spikes around the center: prev <= center < next.
struct WindowBounds {
  Grid<Tick> prev;
  Grid<Tick> next;
  Grid<std::uint8_t> has_prev;
  Grid<std::uint8_t> has_next;
};

template <typename Fn>
void for_each_spike(std::span<const std::uint8_t> frame, std::size_t pixels, Fn&& fn) {
  for (std::size_t byte = 0; byte < frame.size(); ++byte) {
    auto b = frame[byte];
    while (b != 0) {
      const auto pixel = byte * 8 + static_cast<std::size_t>(std::countr_zero(b));
      if (pixel < pixels) fn(pixel);
      b = static_cast<std::uint8_t>(b & (b - 1));
    }
  }
}

WindowBounds window_bounds(const SpikeWindow& window) {
  const auto h = window.height();
  const auto w = window.width();
  WindowBounds b{Grid<Tick>(h, w, 0), Grid<Tick>(h, w, 0), Grid<std::uint8_t>(h, w, 0),
                 Grid<std::uint8_t>(h, w, 0)};
  const auto pixels = window.pixels();
  const auto center = static_cast<std::size_t>(window.delta_t());
  for (std::size_t j = 0; j <= center; ++j) {
    const Tick tick = window.start_tick() + static_cast<Tick>(j);
    for_each_spike(window.frame(j), pixels, [&](std::size_t p) {
      b.prev[p] = tick;
      b.has_prev[p] = 1;
    });
  }
  for (std::size_t j = window.length(); j-- > center + 1;) {
    const Tick tick = window.start_tick() + static_cast<Tick>(j);
    for_each_spike(window.frame(j), pixels, [&](std::size_t p) {
      b.next[p] = tick;
      b.has_next[p] = 1;
    });
  }
  return b;
}

void check_state(const ReleaseTimeState& state, const SpikeWindow& window, const char* what) {
  if (state.time.height != window.height() || state.time.width != window.width() ||
      !state.valid.same_shape(state.time)) {
    throw InvariantError(std::string(what) + " release state shape does not match the window");
  }
}

IsiMap compose(const WindowBounds& b, const SpikeWindow& window, const ReleaseTimeState* fwd,
               const ReleaseTimeState* bwd, TickExtent extent) {
  if (extent.first > window.start_tick() || extent.last < window.end_tick()) {
    throw InvariantError("tick extent does not contain the window");
  }
  const auto h = window.height();
  const auto w = window.width();
  IsiMap out{Grid<Tick>(h, w, 0), Grid<std::uint8_t>(h, w, 0), Grid<std::uint8_t>(h, w, 0),
             extent.length()};
  for (std::size_t p = 0; p < window.pixels(); ++p) {
    Tick prev = extent.first - 1;
    Tick next = extent.last + 1;
    bool prev_known = false;
    bool next_known = false;

    if (b.has_prev[p]) {
      prev = b.prev[p];
      prev_known = true;
    } else if (fwd && fwd->valid[p]) {
      const Tick t = fwd->time[p];
      if (t >= window.start_tick() || t < extent.first) {
        throw InvariantError("forward release time " + std::to_string(t) + " is not before window start " +
                             std::to_string(window.start_tick()) + " within the extent");
      }
      prev = t;
      prev_known = true;
    }

    if (b.has_next[p]) {
      next = b.next[p];
      next_known = true;
    } else if (bwd && bwd->valid[p]) {
      const Tick t = bwd->time[p];
      if (t <= window.end_tick() || t > extent.last) {
        throw InvariantError("backward release time " + std::to_string(t) + " is not after window end " +
                             std::to_string(window.end_tick()) + " within the extent");
      }
      next = t;
      next_known = true;
    }

    out.intervals[p] = std::min(next - prev, out.cap);
    out.censored_prev[p] = prev_known ? 0 : 1;
    out.censored_next[p] = next_known ? 0 : 1;
  }
  return out;
}

TickExtent window_extent(const SpikeWindow& window) { return {window.start_tick(), window.end_tick()}; }

}  // namespace

IsiMap lisi_transform(const SpikeWindow& window) {
  return compose(window_bounds(window), window, nullptr, nullptr, window_extent(window));
}

IsiMap gisi_update(const IsiMap& lisi, const SpikeWindow& window, const ReleaseTimeState& fwd,
                   const ReleaseTimeState& bwd, TickExtent extent) {
  check_state(fwd, window, "forward");
  check_state(bwd, window, "backward");
  if (lisi.height() != window.height() || lisi.width() != window.width()) {
    throw InvariantError("LISI map shape does not match the window");
  }
  const auto bounds = window_bounds(window);
  for (std::size_t p = 0; p < window.pixels(); ++p) {
    if (lisi.censored_prev[p] != !bounds.has_prev[p] || lisi.censored_next[p] != !bounds.has_next[p]) {
      throw InvariantError("LISI map was not computed from this window");
    }
  }
  return compose(bounds, window, &fwd, &bwd, extent);
}

void release_state_advance(const SpikeWindow& window, ReleaseTimeState& state, Direction direction) {
  check_state(state, window, direction == Direction::Forward ? "forward" : "backward");
  const auto pixels = window.pixels();
  const auto apply = [&](std::size_t j) {
    const Tick tick = window.start_tick() + static_cast<Tick>(j);
    for_each_spike(window.frame(j), pixels, [&](std::size_t p) {
      state.time[p] = tick;
      state.valid[p] = 1;
    });
  };
  // Later writes win: ascending order leaves the latest spike, descending the earliest.
  if (direction == Direction::Forward) {
    for (std::size_t j = 0; j < window.length(); ++j) apply(j);
  } else {
    for (std::size_t j = window.length(); j-- > 0;) apply(j);
  }
}

ReleaseTimeState release_state_update(const SpikeWindow& window, const ReleaseTimeState& state,
                                      Direction direction) {
  ReleaseTimeState next = state;
  release_state_advance(window, next, direction);
  return next;
}

GisiSweepResult gisi_sweep(std::span<const SpikeWindow> windows) {
  if (windows.empty()) throw ArgumentError("gisi_sweep needs at least one window");
  const auto h = windows.front().height();
  const auto w = windows.front().width();
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i].height() != h || windows[i].width() != w) {
      throw ArgumentError("window " + std::to_string(i) + " has a different frame shape");
    }
    if (windows[i].start_tick() != windows[i - 1].end_tick() + 1) {
      throw ArgumentError("windows " + std::to_string(i - 1) + " and " + std::to_string(i) +
                          " are not contiguous");
    }
  }
  const auto k = windows.size();
  const TickExtent global{windows.front().start_tick(), windows.back().end_tick()};
  const auto none = ReleaseTimeState::empty(h, w);

  std::vector<WindowBounds> bounds;
  bounds.reserve(k);
  GisiSweepResult result;
  result.lisi.reserve(k);
  for (const auto& win : windows) {
    bounds.push_back(window_bounds(win));
    result.lisi.push_back(compose(bounds.back(), win, nullptr, nullptr, window_extent(win)));
  }

  result.backward.resize(k);
  std::vector<ReleaseTimeState> backward_seen(k);
  auto bwd = ReleaseTimeState::empty(h, w);
  for (std::size_t i = k; i-- > 0;) {
    const auto& win = windows[i];
    result.backward[i] = compose(bounds[i], win, &none, &bwd, {win.start_tick(), global.last});
    backward_seen[i] = bwd;
    release_state_advance(win, bwd, Direction::Backward);
  }

  result.forward.reserve(k);
  result.combined.reserve(k);
  auto fwd = ReleaseTimeState::empty(h, w);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& win = windows[i];
    result.forward.push_back(compose(bounds[i], win, &fwd, &none, {global.first, win.end_tick()}));
    result.combined.push_back(compose(bounds[i], win, &fwd, &backward_seen[i], global));
    release_state_advance(win, fwd, Direction::Forward);
  }
  return result;
}

}  // namespace spikecam
