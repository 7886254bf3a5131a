#include "spikecam/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spikecam/rng.hpp"

namespace spikecam {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Fraction of a pixel covered by a region whose signed distance is d (negative inside).
double coverage(double d) { return std::clamp(0.5 - d, 0.0, 1.0); }

// Reflects x into [lo, hi] as a ball bouncing between two walls.
double fold(double x, double lo, double hi) {
  const double span = hi - lo;
  if (span <= 0) return lo;
  double m = std::fmod(x - lo, 2.0 * span);
  if (m < 0) m += 2.0 * span;
  return lo + (m <= span ? m : 2.0 * span - m);
}

double lerp(double a, double b, double s) { return a + (b - a) * s; }

}  // namespace

std::string_view to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::TranslatingBars: return "translating-bars";
    case SceneKind::RotatingDisk: return "rotating-disk";
    case SceneKind::BouncingBall: return "bouncing-ball";
    case SceneKind::RandomTextureFlow: return "random-texture-flow";
  }
  return "unknown";
}

SceneKind parse_scene_kind(std::string_view name) {
  for (auto kind : kAllSceneKinds) {
    if (to_string(kind) == name) return kind;
  }
  throw ArgumentError("unknown scene kind '" + std::string(name) + "'");
}

SceneGenerator::SceneGenerator(SceneKind kind, std::size_t height, std::size_t width,
                               MotionParams motion, std::uint64_t seed)
    : kind_(kind), height_(height), width_(width), motion_(motion) {
  if (height == 0 || width == 0) throw ArgumentError("scene dimensions must be positive");
  if (!(motion.speed >= 0) || !std::isfinite(motion.speed)) {
    throw ArgumentError("scene speed must be finite and non-negative");
  }
  if (motion.rotation_period < 0) throw ArgumentError("rotation period must be non-negative");

  SplitMix64 rng(derive_seed(seed, 0x5CE4E));
  auto uniform = [&](double lo, double hi) { return lerp(lo, hi, rng.uniform()); };

  low_ = uniform(0.03, 0.3);
  high_ = uniform(0.65, 1.0);
  const double heading = uniform(0.0, kTwoPi);
  dir_x_ = std::cos(heading);
  dir_y_ = std::sin(heading);
  const double min_side = static_cast<double>(std::min(height, width));

  switch (kind) {
    case SceneKind::TranslatingBars:
      bar_period_ = uniform(8.0, 24.0);
      break;
    case SceneKind::RotatingDisk: {
      sectors_ = 3 + static_cast<int>(rng() % 6);
      disk_radius_ = 0.42 * min_side;
      if (motion.rotation_period > 0) {
        rotation_period_ = motion.rotation_period;
      } else if (motion.speed > 0) {
        // Rim speed must not exceed the requested speed.
        rotation_period_ = static_cast<Tick>(std::ceil(kTwoPi * disk_radius_ / motion.speed));
      }
      break;
    }
    case SceneKind::BouncingBall: {
      ball_radius_ = uniform(0.1, 0.2) * min_side;
      ball_radius_ = std::min(ball_radius_, (min_side - 1.0) / 2.0);
      const double x_hi = static_cast<double>(width) - 1.0 - ball_radius_;
      const double y_hi = static_cast<double>(height) - 1.0 - ball_radius_;
      ball_start_ = {uniform(ball_radius_, std::max(ball_radius_, x_hi)),
                     uniform(ball_radius_, std::max(ball_radius_, y_hi))};
      background_tilt_ = uniform(-0.5, 0.5);
      break;
    }
    case SceneKind::RandomTextureFlow: {
      waves_.resize(6);
      for (auto& wave : waves_) {
        const double wavelength = uniform(6.0, 30.0);
        const double angle = uniform(0.0, kTwoPi);
        wave = {kTwoPi / wavelength * std::cos(angle), kTwoPi / wavelength * std::sin(angle),
                uniform(0.0, kTwoPi), uniform(0.3, 1.0)};
      }
      break;
    }
  }
}

double SceneGenerator::bars(double x, double y, Tick t) const {
  const double u = x * dir_x_ + y * dir_y_ - motion_.speed * static_cast<double>(t);
  const double q = u / bar_period_ - std::floor(u / bar_period_);
  const double dist = bar_period_ * std::min(q, 1.0 - q);
  return lerp(low_, high_, coverage(dist - bar_period_ / 4.0));
}

double SceneGenerator::disk(double x, double y, Tick t) const {
  const double cx = (static_cast<double>(width_) - 1.0) / 2.0;
  const double cy = (static_cast<double>(height_) - 1.0) / 2.0;
  const double dx = x - cx;
  const double dy = y - cy;
  const double r = std::hypot(dx, dy);
  double rotation = 0.0;
  if (rotation_period_ > 0) {
    rotation = kTwoPi * static_cast<double>(t % rotation_period_) / static_cast<double>(rotation_period_);
  }
  double angle = std::atan2(dy, dx) - rotation;
  angle -= kTwoPi * std::floor(angle / kTwoPi);
  const int sector = static_cast<int>(angle / (kTwoPi / sectors_)) % sectors_;
  const double face = sector % 2 == 0 ? high_ : lerp(low_, high_, 0.45);
  return lerp(low_, face, coverage(r - disk_radius_));
}

Point2 SceneGenerator::ball_center(Tick t) const {
  const double travel = motion_.speed * static_cast<double>(t);
  const double x_hi = static_cast<double>(width_) - 1.0 - ball_radius_;
  const double y_hi = static_cast<double>(height_) - 1.0 - ball_radius_;
  return {fold(ball_start_.x + dir_x_ * travel, ball_radius_, std::max(ball_radius_, x_hi)),
          fold(ball_start_.y + dir_y_ * travel, ball_radius_, std::max(ball_radius_, y_hi))};
}

double SceneGenerator::ball(double x, double y, Tick t) const {
  const auto c = ball_center(t);
  const double ramp = 0.5 + background_tilt_ * (x / static_cast<double>(width_) - 0.5);
  const double background = lerp(low_, lerp(low_, high_, 0.4), ramp);
  return lerp(background, high_, coverage(std::hypot(x - c.x, y - c.y) - ball_radius_));
}

double SceneGenerator::texture(double x, double y, Tick t) const {
  const double shift = motion_.speed * static_cast<double>(t);
  const double px = x - dir_x_ * shift;
  const double py = y - dir_y_ * shift;
  double sum = 0.0;
  double norm = 0.0;
  for (const auto& w : waves_) {
    sum += w.amplitude * std::sin(w.kx * px + w.ky * py + w.phase);
    norm += w.amplitude;
  }
  return lerp(low_, high_, 0.5 + 0.5 * sum / norm);
}

Image SceneGenerator::render(Tick t) const {
  Image img(height_, width_);
  for (std::size_t row = 0; row < height_; ++row) {
    for (std::size_t col = 0; col < width_; ++col) {
      const double x = static_cast<double>(col);
      const double y = static_cast<double>(row);
      double v = 0.0;
      switch (kind_) {
        case SceneKind::TranslatingBars: v = bars(x, y, t); break;
        case SceneKind::RotatingDisk: v = disk(x, y, t); break;
        case SceneKind::BouncingBall: v = ball(x, y, t); break;
        case SceneKind::RandomTextureFlow: v = texture(x, y, t); break;
      }
      img.at(row, col) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

SceneSequence generate_synthetic_scene(SceneKind kind, std::size_t height, std::size_t width,
                                       std::size_t length, const MotionParams& motion,
                                       std::uint64_t seed) {
  if (length == 0) throw ArgumentError("scene length must be positive");
  const SceneGenerator gen(kind, height, width, motion, seed);
  SceneSequence scene;
  scene.frames.reserve(length);
  for (std::size_t n = 0; n < length; ++n) scene.frames.push_back(gen.render(static_cast<Tick>(n)));
  return scene;
}

}  // namespace spikecam
