#pragma once

#include <optional>
#include <vector>

#include "colreact/geometry.hpp"

namespace colreact {

/// One accelerometer reading in the specific-force convention: a level
/// hovering vehicle reads (0, 0, +g) in body axes.
struct ImuSample {
  double t = 0.0;
  Vec3 accel = Vec3::Zero();  // body frame, m/s^2
  Rotation attitude;          // world -> body
};

struct DetectorConfig {
  double a_star = 10.0;   // threshold on each gravity-compensated axis, m/s^2
  int window_n = 10;      // samples inspected after the trigger
  double g = 9.81;
  double cooldown = 0.5;  // seconds of suppression after an emission

  void validate() const;
};

struct DetectionCandidate {
  ImuSample peak_sample;
  double trigger_t = 0.0;
};

/// Acceleration with the body-frame gravity reaction removed.
Vec3 gravity_compensated(const ImuSample& sample, double g);

bool exceeds_threshold(const ImuSample& sample, const DetectorConfig& cfg);

/// Streaming threshold + sliding-window peak detector.
///
/// The first sample crossing the threshold opens a window; once `window_n`
/// further samples have arrived the sample with the largest compensated
/// acceleration norm (earliest on ties) is emitted. New triggers are ignored
/// while a window is open and for `cooldown` seconds after an emission.
class CollisionDetector {
 public:
  explicit CollisionDetector(DetectorConfig cfg);

  /// Throws StreamOrderError unless sample.t is strictly greater than the
  /// previous sample's timestamp.
  std::optional<DetectionCandidate> feed(const ImuSample& sample);

  const DetectorConfig& config() const { return cfg_; }
  bool window_open() const { return !window_.empty(); }
  void reset();

 private:
  DetectorConfig cfg_;
  std::vector<ImuSample> window_;
  std::optional<double> last_t_;
  std::optional<double> last_emit_t_;
};

}  // namespace colreact
