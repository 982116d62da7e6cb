#include "colreact/detection.hpp"

#include <cmath>

#include <fmt/format.h>

#include "colreact/errors.hpp"

namespace colreact {

void DetectorConfig::validate() const {
  if (!(a_star > 0.0)) throw ConfigError("detector.a_star must be > 0");
  if (window_n < 1) throw ConfigError("detector.window_n must be >= 1");
  if (!(g > 0.0)) throw ConfigError("detector.g must be > 0");
  if (!(cooldown >= 0.0)) throw ConfigError("detector.cooldown must be >= 0");
}

Vec3 gravity_compensated(const ImuSample& sample, double g) {
  return sample.accel - rotate_world_to_body(sample.attitude, g * kUnitZ);
}

bool exceeds_threshold(const ImuSample& sample, const DetectorConfig& cfg) {
  const Vec3 a = gravity_compensated(sample, cfg.g);
  return std::abs(a.x()) > cfg.a_star || std::abs(a.y()) > cfg.a_star ||
         std::abs(a.z()) > cfg.a_star;
}

CollisionDetector::CollisionDetector(DetectorConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void CollisionDetector::reset() {
  window_.clear();
  last_t_.reset();
  last_emit_t_.reset();
}

std::optional<DetectionCandidate> CollisionDetector::feed(const ImuSample& sample) {
  if (last_t_ && !(sample.t > *last_t_)) {
    throw StreamOrderError(
        fmt::format("IMU sample at t={:.6f} does not follow t={:.6f}", sample.t, *last_t_));
  }
  if (!is_finite(sample.accel)) {
    throw DegenerateInputError("IMU sample has non-finite acceleration");
  }
  last_t_ = sample.t;

  if (window_.empty()) {
    const bool cooling = last_emit_t_ && sample.t - *last_emit_t_ < cfg_.cooldown;
    if (cooling || !exceeds_threshold(sample, cfg_)) return std::nullopt;
    window_.push_back(sample);
    return std::nullopt;
  }

  window_.push_back(sample);
  if (static_cast<int>(window_.size()) < cfg_.window_n + 1) return std::nullopt;

  std::size_t best = 0;
  double best_norm = gravity_compensated(window_[0], cfg_.g).norm();
  for (std::size_t i = 1; i < window_.size(); ++i) {
    const double n = gravity_compensated(window_[i], cfg_.g).norm();
    if (n > best_norm) {
      best = i;
      best_norm = n;
    }
  }
  DetectionCandidate out{window_[best], window_.front().t};
  window_.clear();
  last_emit_t_ = sample.t;
  return out;
}

}  // namespace colreact
