#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spikecam/grid.hpp"
#include "spikecam/spike_stream.hpp"

namespace spikecam {

// Per-pixel inter-spike interval around a reference tick.
//
// A side with no observed bounding spike is censored: its spike is replaced by
// the tick just outside the known extent, and the interval is then clamped to
// `cap`, the length of that extent.
struct IsiMap {
  Grid<Tick> intervals;
  Grid<std::uint8_t> censored_prev;
  Grid<std::uint8_t> censored_next;
  Tick cap = 0;

  std::size_t height() const { return intervals.height; }
  std::size_t width() const { return intervals.width; }
  bool fully_censored(std::size_t p) const { return censored_prev[p] && censored_next[p]; }

  friend bool operator==(const IsiMap&, const IsiMap&) = default;
};

enum class Direction { Forward, Backward };

// Carried release time of the nearest spike outside the current window:
// the latest past spike (forward) or the earliest future spike (backward).
// Exactly one H x W time map and one H x W validity map.
struct ReleaseTimeState {
  Grid<Tick> time;
  Grid<std::uint8_t> valid;

  static ReleaseTimeState empty(std::size_t height, std::size_t width) {
    return {Grid<Tick>(height, width, 0), Grid<std::uint8_t>(height, width, 0)};
  }

  friend bool operator==(const ReleaseTimeState&, const ReleaseTimeState&) = default;
};

// Inclusive absolute tick range known to the caller.
struct TickExtent {
  Tick first = 0;
  Tick last = 0;
  Tick length() const { return last - first + 1; }
};

IsiMap lisi_transform(const SpikeWindow& window);

// Completes censored LISI sides with carried release times. Sides still
// unresolved are substituted just outside `extent` and clamped to its length.
// Throws InvariantError if a valid carried time lies inside the window.
IsiMap gisi_update(const IsiMap& lisi, const SpikeWindow& window, const ReleaseTimeState& fwd,
                   const ReleaseTimeState& bwd, TickExtent extent);

// Folds a window into the carried state for the given direction.
ReleaseTimeState release_state_update(const SpikeWindow& window, const ReleaseTimeState& state,
                                      Direction direction);
void release_state_advance(const SpikeWindow& window, ReleaseTimeState& state, Direction direction);

struct GisiSweepResult {
  std::vector<IsiMap> lisi;
  // Past side completed from earlier windows only.
  std::vector<IsiMap> forward;
  // Future side completed from later windows only.
  std::vector<IsiMap> backward;
  std::vector<IsiMap> combined;
};

// One backward then one forward pass over K contiguous windows. Throws
// ArgumentError when windows are empty, reshaped or not contiguous.
GisiSweepResult gisi_sweep(std::span<const SpikeWindow> windows);

}  // namespace spikecam
