#include "colreact/jerk_profile.hpp"

#include <algorithm>
#include <cmath>

namespace colreact {

AxisSample propagate(const AxisSample& s, double jerk, double dt) {
  AxisSample o;
  o.p = s.p + s.v * dt + 0.5 * s.a * dt * dt + jerk * dt * dt * dt / 6.0;
  o.v = s.v + s.a * dt + 0.5 * jerk * dt * dt;
  o.a = s.a + jerk * dt;
  return o;
}

double AxisProfile::duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

AxisSample AxisProfile::at(double t) const {
  AxisSample s = start;
  double remaining = std::max(0.0, t);
  for (const auto& seg : segments) {
    if (remaining <= seg.duration) return propagate(s, seg.jerk, remaining);
    s = propagate(s, seg.jerk, seg.duration);
    remaining -= seg.duration;
  }
  return propagate(s, 0.0, remaining);
}

double AxisProfile::mean_jerk(double t0, double t1) const {
  if (t1 <= t0) return 0.0;
  double acc = 0.0, t = 0.0;
  for (const auto& seg : segments) {
    const double lo = std::max(t0, t), hi = std::min(t1, t + seg.duration);
    if (hi > lo) acc += seg.jerk * (hi - lo);
    t += seg.duration;
  }
  return acc / (t1 - t0);
}

std::vector<JerkSegment> velocity_change(double v0, double a0, double v1, double a_max,
                                         double j_max) {
  // Velocity reached by simply releasing the current acceleration.
  const double v_release = v0 + a0 * std::abs(a0) / (2.0 * j_max);
  const double sigma = (v1 - v_release) >= 0.0 ? 1.0 : -1.0;
  const double a0m = sigma * a0;
  const double dv = sigma * (v1 - v0);

  double peak = std::sqrt(std::max(0.0, (2.0 * j_max * dv + a0m * a0m) / 2.0));
  peak = std::max(peak, std::min(a0m, a_max));
  double hold = 0.0;
  if (peak > a_max) peak = a_max;
  const double t_rise = std::abs(peak - a0m) / j_max;
  const double dv_rise = 0.5 * (a0m + peak) * t_rise;
  const double t_fall = peak / j_max;
  const double dv_fall = 0.5 * peak * t_fall;
  if (peak > 0.0) hold = std::max(0.0, (dv - dv_rise - dv_fall) / peak);

  std::vector<JerkSegment> segs;
  if (t_rise > 0.0) segs.push_back({t_rise, sigma * (peak >= a0m ? j_max : -j_max)});
  if (hold > 0.0) segs.push_back({hold, 0.0});
  if (t_fall > 0.0) segs.push_back({t_fall, -sigma * j_max});
  return segs;
}

namespace {

struct Candidate {
  AxisProfile profile;
  double ramp_time = 0.0;     // both velocity changes
  double displacement = 0.0;  // without cruise
};

Candidate through_peak(const AxisSample& start, double vp, double vg, const AxisLimits& lim) {
  Candidate c;
  c.profile.start = start;
  auto first = velocity_change(start.v, start.a, vp, lim.a_max, lim.j_max);
  auto second = velocity_change(vp, 0.0, vg, lim.a_max, lim.j_max);
  c.profile.segments = first;
  c.profile.segments.insert(c.profile.segments.end(), second.begin(), second.end());
  c.ramp_time = c.profile.duration();
  c.displacement = c.profile.end().p - start.p;
  return c;
}

AxisProfile with_cruise(const AxisSample& start, double vp, double vg, const AxisLimits& lim,
                        double cruise) {
  AxisProfile p;
  p.start = start;
  p.segments = velocity_change(start.v, start.a, vp, lim.a_max, lim.j_max);
  if (cruise > 0.0) p.segments.push_back({cruise, 0.0});
  auto second = velocity_change(vp, 0.0, vg, lim.a_max, lim.j_max);
  p.segments.insert(p.segments.end(), second.begin(), second.end());
  return p;
}

template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-13) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

AxisProfile fastest_profile(const AxisSample& start, double pg, double vg, const AxisLimits& lim) {
  const double dp = pg - start.p;
  if (std::abs(dp) < 1e-12 && std::abs(start.v - vg) < 1e-12 && std::abs(start.a) < 1e-12) {
    return AxisProfile{start, {}};
  }
  const double vmax = lim.v_max;
  const Candidate up = through_peak(start, vmax, vg, lim);
  if (up.displacement <= dp) {
    return with_cruise(start, vmax, vg, lim, (dp - up.displacement) / vmax);
  }
  const Candidate down = through_peak(start, -vmax, vg, lim);
  if (down.displacement >= dp) {
    return with_cruise(start, -vmax, vg, lim, (dp - down.displacement) / -vmax);
  }
  const double vp = bisect(
      [&](double v) { return through_peak(start, v, vg, lim).displacement - dp; }, -vmax, vmax);
  return through_peak(start, vp, vg, lim).profile;
}

std::optional<AxisProfile> profile_with_duration(const AxisSample& start, double pg, double vg,
                                                 const AxisLimits& lim, double duration) {
  const double dp = pg - start.p;
  // Residual displacement for a peak vp whose cruise fills the remaining time.
  auto residual = [&](double vp, bool& feasible) {
    const Candidate c = through_peak(start, vp, vg, lim);
    const double cruise = duration - c.ramp_time;
    feasible = cruise >= -1e-12;
    return c.displacement + vp * std::max(0.0, cruise) - dp;
  };

  constexpr int kSamples = 400;
  std::optional<double> best;
  bool prev_ok = false;
  double prev_v = 0.0, prev_r = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double vp = -lim.v_max + 2.0 * lim.v_max * i / kSamples;
    bool ok = false;
    const double r = residual(vp, ok);
    if (ok && prev_ok && ((r <= 0.0) != (prev_r <= 0.0) || r == 0.0)) {
      bool dummy = false;
      const double root = r == 0.0 ? vp : bisect([&](double v) { return residual(v, dummy); },
                                                 prev_v, vp);
      if (!best || std::abs(root) < std::abs(*best)) best = root;
    }
    prev_ok = ok;
    prev_v = vp;
    prev_r = r;
  }
  if (!best) return std::nullopt;
  const Candidate c = through_peak(start, *best, vg, lim);
  AxisProfile p = with_cruise(start, *best, vg, lim, std::max(0.0, duration - c.ramp_time));
  if (std::abs(p.end().p - pg) > 1e-6) return std::nullopt;
  return p;
}

}  // namespace colreact
