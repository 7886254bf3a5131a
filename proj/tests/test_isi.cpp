#include <random>
#include <type_traits>

#include "doctest.h"
#include "oracles.hpp"
#include "spikecam/isi.hpp"
#include "spikecam/scene.hpp"
#include "spikecam/simulator.hpp"

using namespace spikecam;

namespace {

SpikeStream pixel_stream(std::size_t n, std::initializer_list<Tick> ticks) {
  SpikeStreamBuilder b(1, 1, n);
  for (auto t : ticks) b.set(static_cast<std::size_t>(t), 0);
  return std::move(b).build();
}

SpikeStream all_ones(std::size_t h, std::size_t w, std::size_t n) {
  SpikeStreamBuilder b(h, w, n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t p = 0; p < h * w; ++p) b.set(t, p);
  return std::move(b).build();
}

}  // namespace

TEST_CASE("LISI of a saturated window is 1 everywhere") {
  const auto s = all_ones(3, 4, 41);
  const auto m = lisi_transform(slice_window(s, 20, 20));
  CHECK(m.cap == 41);
  for (std::size_t p = 0; p < 12; ++p) {
    CHECK(m.intervals[p] == 1);
    CHECK_FALSE(m.censored_prev[p]);
    CHECK_FALSE(m.censored_next[p]);
  }
}

TEST_CASE("LISI picks the spikes bounding the center") {
  const auto s = pixel_stream(41, {3, 10, 30});
  const auto m = lisi_transform(slice_window(s, 20, 20));
  CHECK(m.intervals[0] == 20);
  CHECK_FALSE(m.censored_prev[0]);
  CHECK_FALSE(m.censored_next[0]);
}

TEST_CASE("LISI censoring substitutes just outside the window") {
  SUBCASE("no next spike") {
    const auto m = lisi_transform(slice_window(pixel_stream(41, {3}), 20, 20));
    CHECK(m.censored_next[0]);
    CHECK_FALSE(m.censored_prev[0]);
    CHECK(m.intervals[0] == 41 - 3);  // next := end + 1 = 41
  }
  SUBCASE("no prev spike") {
    const auto m = lisi_transform(slice_window(pixel_stream(41, {35}), 20, 20));
    CHECK(m.censored_prev[0]);
    CHECK(m.intervals[0] == 35 - (-1));
  }
  SUBCASE("silent pixel is capped at the window length") {
    const auto m = lisi_transform(slice_window(pixel_stream(41, {}), 20, 20));
    CHECK(m.censored_prev[0]);
    CHECK(m.censored_next[0]);
    CHECK(m.intervals[0] == 41);
  }
  SUBCASE("a spike on the center tick is the previous spike") {
    const auto m = lisi_transform(slice_window(pixel_stream(41, {20, 21}), 20, 20));
    CHECK(m.intervals[0] == 1);
    CHECK_FALSE(m.censored_prev[0]);
  }
}

TEST_CASE("GISI recovers an interval spanning a silent window") {
  // Windows of 41 ticks centered at 20, 61, 102; spikes at 5 and 100.
  const auto s = pixel_stream(123, {5, 100});
  const auto windows = partition_windows(s, 3, 41);
  const auto sweep = gisi_sweep(windows);
  CHECK(sweep.lisi[1].intervals[0] == 41);
  CHECK(sweep.lisi[1].fully_censored(0));
  CHECK(sweep.combined[1].intervals[0] == 95);
  CHECK_FALSE(sweep.combined[1].censored_prev[0]);
  CHECK_FALSE(sweep.combined[1].censored_next[0]);

  // Same through the single-step API with hand-built carried states.
  auto fwd = ReleaseTimeState::empty(1, 1);
  auto bwd = ReleaseTimeState::empty(1, 1);
  fwd.time[0] = 5;
  fwd.valid[0] = 1;
  bwd.time[0] = 100;
  bwd.valid[0] = 1;
  const auto lisi = lisi_transform(windows[1]);
  const auto g = gisi_update(lisi, windows[1], fwd, bwd, {0, 122});
  CHECK(g.intervals[0] == 95);
}

TEST_CASE("gisi_update leaves uncensored pixels untouched") {
  const auto s = pixel_stream(123, {50, 70, 110});
  const auto windows = partition_windows(s, 3, 41);
  auto fwd = ReleaseTimeState::empty(1, 1);
  fwd.time[0] = 10;
  fwd.valid[0] = 1;
  auto bwd = ReleaseTimeState::empty(1, 1);
  bwd.time[0] = 110;
  bwd.valid[0] = 1;
  const auto lisi = lisi_transform(windows[1]);
  REQUIRE_FALSE(lisi.censored_prev[0]);
  REQUIRE_FALSE(lisi.censored_next[0]);
  CHECK(gisi_update(lisi, windows[1], fwd, bwd, {0, 122}).intervals[0] == lisi.intervals[0]);
}

TEST_CASE("never-spiking pixel hits the global cap") {
  const auto s = pixel_stream(205, {});
  const auto sweep = gisi_sweep(partition_windows(s, 5, 41));
  for (const auto& m : sweep.combined) {
    CHECK(m.fully_censored(0));
    CHECK(m.intervals[0] == 5 * 41);
    CHECK(m.cap == 5 * 41);
  }
}

TEST_CASE("gisi_update rejects inconsistent carried state") {
  const auto s = pixel_stream(123, {});
  const auto windows = partition_windows(s, 3, 41);
  const auto lisi = lisi_transform(windows[1]);
  auto fwd = ReleaseTimeState::empty(1, 1);
  const auto bwd = ReleaseTimeState::empty(1, 1);
  fwd.time[0] = 50;  // inside window 1 (41..81)
  fwd.valid[0] = 1;
  CHECK_THROWS_AS(gisi_update(lisi, windows[1], fwd, bwd, {0, 122}), InvariantError);

  auto bad_bwd = ReleaseTimeState::empty(1, 1);
  bad_bwd.time[0] = 81;
  bad_bwd.valid[0] = 1;
  CHECK_THROWS_AS(gisi_update(lisi, windows[1], ReleaseTimeState::empty(1, 1), bad_bwd, {0, 122}),
                  InvariantError);
  CHECK_THROWS_AS(gisi_update(lisi, windows[1], ReleaseTimeState::empty(2, 1), bwd, {0, 122}), InvariantError);
  CHECK_THROWS_AS(gisi_update(lisi_transform(windows[0]), windows[1], ReleaseTimeState::empty(1, 1), bwd,
                              {50, 122}),
                  InvariantError);
}

TEST_CASE("release_state_update") {
  const auto empty = pixel_stream(41, {});
  auto state = ReleaseTimeState::empty(1, 1);
  state.time[0] = -3;
  state.valid[0] = 1;
  CHECK(release_state_update(slice_window(empty, 20, 20), state, Direction::Forward) == state);
  CHECK(release_state_update(slice_window(empty, 20, 20), state, Direction::Backward) == state);

  const auto ones = all_ones(2, 3, 82);
  const auto w = slice_window(ones, 61, 20);
  const auto f = release_state_update(w, ReleaseTimeState::empty(2, 3), Direction::Forward);
  const auto b = release_state_update(w, ReleaseTimeState::empty(2, 3), Direction::Backward);
  for (std::size_t p = 0; p < 6; ++p) {
    CHECK(f.valid[p]);
    CHECK(f.time[p] == w.end_tick());
    CHECK(b.time[p] == w.start_tick());
  }
}

TEST_CASE("forward sweep state tracks the latest spike") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = oracle::random_stream(rng, 4, 4, 205);
    const auto windows = partition_windows(s, 5, 41);
    auto fwd = ReleaseTimeState::empty(4, 4);
    auto bwd = ReleaseTimeState::empty(4, 4);
    for (const auto& w : windows) release_state_advance(w, fwd, Direction::Forward);
    for (auto it = windows.rbegin(); it != windows.rend(); ++it) release_state_advance(*it, bwd, Direction::Backward);
    for (std::size_t p = 0; p < 16; ++p) {
      std::optional<Tick> latest, earliest;
      for (Tick t = 0; t < 205; ++t) {
        if (s.spike(static_cast<std::size_t>(t), p)) {
          latest = t;
          if (!earliest) earliest = t;
        }
      }
      REQUIRE(static_cast<bool>(fwd.valid[p]) == latest.has_value());
      REQUIRE(static_cast<bool>(bwd.valid[p]) == earliest.has_value());
      if (latest) REQUIRE(fwd.time[p] == *latest);
      if (earliest) REQUIRE(bwd.time[p] == *earliest);
    }
  }
}

TEST_CASE("single-window sweep degenerates to LISI") {
  std::mt19937_64 rng(4);
  const auto s = oracle::random_stream(rng, 6, 6, 41);
  const auto sweep = gisi_sweep(partition_windows(s, 1, 41));
  CHECK(sweep.combined[0] == sweep.lisi[0]);
  CHECK(sweep.forward[0] == sweep.lisi[0]);
  CHECK(sweep.backward[0] == sweep.lisi[0]);
}

TEST_CASE("every sweep variant matches the full-scan oracle") {
  std::mt19937_64 rng(2718);
  for (int trial = 0; trial < 100; ++trial) {
    const Tick origin = static_cast<Tick>(rng() % 1000);
    const auto s = oracle::random_stream(rng, 8, 8, 205, origin);
    const auto windows = partition_windows(s, 5, 41);
    const auto sweep = gisi_sweep(windows);
    const Tick first = windows.front().start_tick();
    const Tick last = windows.back().end_tick();
    for (std::size_t i = 0; i < windows.size(); ++i) {
      const auto& w = windows[i];
      const auto c = w.center_tick();
      REQUIRE(oracle::mismatches(sweep.lisi[i], oracle::full_scan_isi(s, c, w.start_tick(), w.end_tick())) == 0);
      REQUIRE(oracle::mismatches(sweep.forward[i], oracle::full_scan_isi(s, c, first, w.end_tick())) == 0);
      REQUIRE(oracle::mismatches(sweep.backward[i], oracle::full_scan_isi(s, c, w.start_tick(), last)) == 0);
      REQUIRE(oracle::mismatches(sweep.combined[i], oracle::full_scan_isi(s, c, first, last)) == 0);
    }
  }
}

TEST_CASE("refinement and boundedness") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = oracle::random_stream(rng, 6, 5, 246);
    const auto sweep = gisi_sweep(partition_windows(s, 6, 41));
    for (std::size_t i = 0; i < sweep.lisi.size(); ++i) {
      const auto& l = sweep.lisi[i];
      const auto& g = sweep.combined[i];
      for (std::size_t p = 0; p < 30; ++p) {
        REQUIRE(l.intervals[p] >= 1);
        REQUIRE(l.intervals[p] <= 41);
        REQUIRE(g.intervals[p] >= 1);
        REQUIRE(g.intervals[p] <= 246);
        if (g.censored_prev[p]) REQUIRE(l.censored_prev[p]);
        if (g.censored_next[p]) REQUIRE(l.censored_next[p]);
        if (!l.censored_prev[p] && !l.censored_next[p]) REQUIRE(g.intervals[p] == l.intervals[p]);
      }
    }
  }
}

TEST_CASE("directions are independent") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = oracle::random_stream(rng, 5, 5, 205);
    const auto base = gisi_sweep(partition_windows(s, 5, 41));
    const std::size_t pivot = rng() % 5;

    // Rewrite every tick after window `pivot` (or before it) at random.
    auto rewrite = [&](bool after) {
      SpikeStreamBuilder b(5, 5, 205);
      for (std::size_t t = 0; t < 205; ++t) {
        const bool keep = after ? t <= pivot * 41 + 40 : t >= pivot * 41;
        for (std::size_t p = 0; p < 25; ++p) b.set(t, p, keep ? s.spike(t, p) : (rng() % 3 == 0));
      }
      return std::move(b).build();
    };
    const auto later_changed = rewrite(true);
    const auto earlier_changed = rewrite(false);
    const auto a = gisi_sweep(partition_windows(later_changed, 5, 41));
    const auto b = gisi_sweep(partition_windows(earlier_changed, 5, 41));
    for (std::size_t i = 0; i <= pivot; ++i) REQUIRE(a.forward[i] == base.forward[i]);
    for (std::size_t i = pivot; i < 5; ++i) REQUIRE(b.backward[i] == base.backward[i]);
  }
}

TEST_CASE("sweep argument checks") {
  const auto s = pixel_stream(200, {});
  std::vector<SpikeWindow> gap = {slice_window(s, 20, 20), slice_window(s, 62, 20)};
  CHECK_THROWS_AS(gisi_sweep(gap), ArgumentError);
  CHECK_THROWS_AS(gisi_sweep(std::span<const SpikeWindow>{}), ArgumentError);
  const auto wide = all_ones(1, 2, 200);
  std::vector<SpikeWindow> reshaped = {slice_window(s, 20, 20), slice_window(wide, 61, 20)};
  CHECK_THROWS_AS(gisi_sweep(reshaped), ArgumentError);
}

TEST_CASE("low light pushes GISI past the LISI range") {
  const auto scene = apply_darkening(
      generate_synthetic_scene(SceneKind::RandomTextureFlow, 24, 24, 21 * 41, {0.02, 0}, 5), 0.08);
  const auto stream = simulate_stream(scene, SimConfig{});
  const auto sweep = gisi_sweep(partition_windows(stream, 21, 41));
  std::size_t beyond = 0;
  for (std::size_t i = 0; i < 21; ++i) {
    for (std::size_t p = 0; p < stream.pixels(); ++p) {
      if (sweep.lisi[i].intervals[p] == 41 && sweep.combined[i].intervals[p] > 41) ++beyond;
    }
  }
  MESSAGE("pixels with GISI > 41 where LISI == 41: " << beyond);
  CHECK(beyond > 0);
}

TEST_CASE("carried state is one time map and one validity map") {
  const auto state = ReleaseTimeState::empty(250, 400);
  const auto& [time, valid] = state;
  static_assert(std::is_same_v<std::remove_cvref_t<decltype(time)>, Grid<Tick>>);
  static_assert(std::is_same_v<std::remove_cvref_t<decltype(valid)>, Grid<std::uint8_t>>);
  static_assert(sizeof(ReleaseTimeState) == sizeof(Grid<Tick>) + sizeof(Grid<std::uint8_t>));
  CHECK(time.size() == 250 * 400);
  CHECK(valid.size() == 250 * 400);
}
