#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "spikecam/simulator.hpp"

namespace spikecam {

// Procedural stand-ins for rendered high-speed scenes.
enum class SceneKind { TranslatingBars, RotatingDisk, BouncingBall, RandomTextureFlow };

inline constexpr std::array<SceneKind, 4> kAllSceneKinds = {
    SceneKind::TranslatingBars, SceneKind::RotatingDisk, SceneKind::BouncingBall,
    SceneKind::RandomTextureFlow};

std::string_view to_string(SceneKind kind);
// Accepts "translating-bars", "rotating-disk", "bouncing-ball", "random-texture-flow".
SceneKind parse_scene_kind(std::string_view name);

struct MotionParams {
  // Pixels per tick. For the disk this is the rim speed.
  double speed = 0.05;
  // Disk only: ticks per revolution. 0 derives it from speed and radius.
  Tick rotation_period = 0;
};

struct Point2 {
  double x = 0;
  double y = 0;
};

// Renders a scene at any tick; content is drawn once from the seed.
class SceneGenerator {
 public:
  SceneGenerator(SceneKind kind, std::size_t height, std::size_t width, MotionParams motion,
                 std::uint64_t seed);

  Image render(Tick t) const;

  SceneKind kind() const { return kind_; }
  // Bouncing ball geometry (column x, row y).
  Point2 ball_center(Tick t) const;
  double ball_radius() const { return ball_radius_; }
  Tick rotation_period() const { return rotation_period_; }

 private:
  double bars(double x, double y, Tick t) const;
  double disk(double x, double y, Tick t) const;
  double ball(double x, double y, Tick t) const;
  double texture(double x, double y, Tick t) const;

  SceneKind kind_;
  std::size_t height_;
  std::size_t width_;
  MotionParams motion_;

  double low_ = 0;
  double high_ = 1;
  double dir_x_ = 1;
  double dir_y_ = 0;

  double bar_period_ = 16;

  int sectors_ = 4;
  double disk_radius_ = 0;
  Tick rotation_period_ = 0;

  double ball_radius_ = 0;
  Point2 ball_start_;
  double background_tilt_ = 0;

  struct Wave {
    double kx, ky, phase, amplitude;
  };
  std::vector<Wave> waves_;
};

SceneSequence generate_synthetic_scene(SceneKind kind, std::size_t height, std::size_t width,
                                       std::size_t length, const MotionParams& motion,
                                       std::uint64_t seed);

}  // namespace spikecam
