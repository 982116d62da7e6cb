#pragma once

#include <optional>
#include <vector>

namespace colreact {

struct AxisLimits {
  double v_max = 1.0;
  double a_max = 1.5;
  double j_max = 3.0;
};

struct JerkSegment {
  double duration = 0.0;
  double jerk = 0.0;
};

struct AxisSample {
  double p = 0.0, v = 0.0, a = 0.0;
};

/// Piecewise-constant-jerk motion along one axis.
struct AxisProfile {
  AxisSample start;
  std::vector<JerkSegment> segments;

  double duration() const;
  AxisSample at(double t) const;
  AxisSample end() const { return at(duration()); }
  /// Mean jerk over [t0, t1].
  double mean_jerk(double t0, double t1) const;
};

/// Exact constant-jerk propagation of (p, v, a) over `dt`.
AxisSample propagate(const AxisSample& s, double jerk, double dt);

/// Jerk-limited change from velocity v0 / acceleration a0 to velocity v1 with
/// zero final acceleration (accelerate-hold-release).
std::vector<JerkSegment> velocity_change(double v0, double a0, double v1, double a_max,
                                         double j_max);

/// Bang-coast-bang profile from (p0, v0, a0) to rest-acceleration state
/// (pg, vg, 0): velocity change to a peak, optional cruise, velocity change
/// to vg. Cruise speed capped at v_max.
AxisProfile fastest_profile(const AxisSample& start, double pg, double vg, const AxisLimits& lim);

/// Same family stretched to exactly `duration` (>= the fastest duration).
/// Returns nullopt when no peak velocity within the limits fits.
std::optional<AxisProfile> profile_with_duration(const AxisSample& start, double pg, double vg,
                                                 const AxisLimits& lim, double duration);

}  // namespace colreact
