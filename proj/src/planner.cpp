#include "colreact/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "colreact/errors.hpp"
#include "colreact/guide_path.hpp"
#include "colreact/voxel_map.hpp"

namespace colreact {

namespace {

// Reference profiles are solved against slightly tightened limits so the
// endpoint correction cannot push them past the real ones.
constexpr double kReferenceLimitScale = 0.98;

Eigen::Matrix3d transition(double dt) {
  Eigen::Matrix3d phi;
  phi << 1.0, dt, 0.5 * dt * dt, 0.0, 1.0, dt, 0.0, 0.0, 1.0;
  return phi;
}

Eigen::Vector3d input_gain(double dt) {
  return Eigen::Vector3d(dt * dt * dt / 6.0, 0.5 * dt * dt, dt);
}

}  // namespace

void PlannerConfig::validate() const {
  if (!(w1 > 0.0 && w2 > 0.0)) throw ConfigError("planner weights must be > 0");
  if (!(horizon_t > 0.0) || steps < 1) throw ConfigError("planner horizon must be positive");
  if (!(j_max > 0.0 && a_max > 0.0 && v_max > 0.0))
    throw ConfigError("planner dynamic limits must be > 0");
  if (!(safety_distance > 0.0)) throw ConfigError("planner.safety_distance must be > 0");
  if (max_iterations < 0) throw ConfigError("planner.max_iterations must be >= 0");
}

State step_state(const State& x, const Vec3& jerk, double dt) {
  State o;
  o.position = x.position + x.velocity * dt + 0.5 * x.acceleration * dt * dt +
               jerk * (dt * dt * dt / 6.0);
  o.velocity = x.velocity + x.acceleration * dt + 0.5 * jerk * dt * dt;
  o.acceleration = x.acceleration + jerk * dt;
  return o;
}

Trajectory Trajectory::integrate(const State& x0, const std::vector<Vec3>& jerks, double dt) {
  Trajectory t;
  t.dt = dt;
  t.jerks = jerks;
  t.states.reserve(jerks.size() + 1);
  t.states.push_back(x0);
  for (const auto& u : jerks) t.states.push_back(step_state(t.states.back(), u, dt));
  return t;
}

State Trajectory::sample(double t) const {
  if (states.empty()) return State{};
  if (t <= 0.0 || jerks.empty()) {
    return jerks.empty() ? step_state(states.front(), Vec3::Zero(), std::max(0.0, t))
                         : states.front();
  }
  const auto k = static_cast<std::size_t>(std::floor(t / dt));
  if (k >= jerks.size()) {
    return step_state(states.back(), Vec3::Zero(), t - duration());
  }
  return step_state(states[k], jerks[k], t - static_cast<double>(k) * dt);
}

double Trajectory::dynamics_residual() const {
  if (states.empty()) return 0.0;
  const Trajectory re = integrate(states.front(), jerks, dt);
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size() && i < re.states.size(); ++i) {
    worst = std::max({worst, (states[i].position - re.states[i].position).cwiseAbs().maxCoeff(),
                      (states[i].velocity - re.states[i].velocity).cwiseAbs().maxCoeff(),
                      (states[i].acceleration - re.states[i].acceleration).cwiseAbs().maxCoeff()});
  }
  return worst;
}

Trajectory jerk_limited_reference(const State& x0, const State& xg, const PlannerConfig& cfg,
                                  double dt) {
  if (!is_finite(x0.position) || !is_finite(x0.velocity) || !is_finite(x0.acceleration) ||
      !is_finite(xg.position) || !is_finite(xg.velocity)) {
    throw InfeasibleError("reference endpoints must be finite");
  }
  if (xg.velocity.cwiseAbs().maxCoeff() > cfg.v_max) {
    throw InfeasibleError("goal velocity exceeds v_max");
  }
  if (!(dt > 0.0)) throw InfeasibleError("reference dt must be > 0");

  const bool still = (x0.position - xg.position).norm() < 1e-9 &&
                     (x0.velocity - xg.velocity).norm() < 1e-9 && x0.acceleration.norm() < 1e-9;
  if (still) {
    Trajectory t;
    t.dt = dt;
    t.states = {x0};
    return t;
  }

  AxisLimits lim = cfg.limits();
  lim.v_max *= kReferenceLimitScale;
  lim.a_max *= kReferenceLimitScale;
  lim.j_max *= kReferenceLimitScale;

  std::array<AxisProfile, 3> prof;
  double longest = 0.0;
  for (int a = 0; a < 3; ++a) {
    const AxisSample s{x0.position[a], x0.velocity[a], x0.acceleration[a]};
    prof[a] = fastest_profile(s, xg.position[a], xg.velocity[a], lim);
    longest = std::max(longest, prof[a].duration());
  }
  for (int a = 0; a < 3; ++a) {
    if (prof[a].duration() < longest - 1e-9) {
      if (auto synced = profile_with_duration(prof[a].start, xg.position[a], xg.velocity[a], lim,
                                              longest)) {
        prof[a] = *synced;
      }
    }
  }

  const int k_steps = std::max(3, static_cast<int>(std::ceil(longest / dt - 1e-9)));
  std::vector<Vec3> jerks(k_steps);
  for (int k = 0; k < k_steps; ++k)
    for (int a = 0; a < 3; ++a) jerks[k][a] = prof[a].mean_jerk(k * dt, (k + 1) * dt);

  // Minimum-norm jerk correction cancelling the sampling error at the endpoint.
  Trajectory traj = Trajectory::integrate(x0, jerks, dt);
  const Eigen::Matrix3d phi = transition(dt);
  std::vector<Eigen::Vector3d> gains(k_steps);
  gains[k_steps - 1] = input_gain(dt);
  for (int k = k_steps - 2; k >= 0; --k) gains[k] = phi * gains[k + 1];
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  for (const auto& b : gains) gram += b * b.transpose();
  const auto gram_ldlt = gram.ldlt();
  const State& end = traj.states.back();
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector3d err(xg.position[a] - end.position[a], xg.velocity[a] - end.velocity[a],
                              -end.acceleration[a]);
    const Eigen::Vector3d m = gram_ldlt.solve(err);
    for (int k = 0; k < k_steps; ++k) jerks[k][a] += gains[k].dot(m);
  }
  traj = Trajectory::integrate(x0, jerks, dt);
  if ((traj.states.back().position - xg.position).norm() > 1e-3) {
    throw InfeasibleError("jerk-limited reference missed the goal");
  }
  return traj;
}

Trajectory horizon_window(const Trajectory& ref, int steps) {
  std::vector<Vec3> jerks(steps, Vec3::Zero());
  for (int k = 0; k < steps && k < static_cast<int>(ref.jerks.size()); ++k) jerks[k] = ref.jerks[k];
  return Trajectory::integrate(ref.states.front(), jerks, ref.dt);
}

CostBreakdown evaluate_cost(const Trajectory& traj, const Trajectory& ref,
                            const DistanceQuery& edt_query, const PlannerConfig& cfg) {
  CostBreakdown c;
  const double dt = traj.dt;
  for (const auto& u : traj.jerks) c.smoothness += u.squaredNorm() * dt;
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    const State& x = traj.states[k];
    const State& r = ref.states[std::min(k, ref.states.size() - 1)];
    const double e = (x.position - r.position).squaredNorm() +
                     (x.velocity - r.velocity).squaredNorm() +
                     (x.acceleration - r.acceleration).squaredNorm();
    c.tracking += cfg.w1 * e * dt;
    const double d = edt_query ? edt_query(x.position).distance : 0.0;
    c.obstacle += cfg.w2 * std::exp(-std::abs(d)) * dt;
  }
  return c;
}

std::vector<Vec3> project_jerks(const State& x0, std::vector<Vec3> jerks, double dt,
                                const PlannerConfig& cfg) {
  State x = x0;
  const double jm = cfg.j_max, am = cfg.a_max, vm = cfg.v_max;
  for (auto& u : jerks) {
    for (int a = 0; a < 3; ++a) {
      double ua = std::clamp(u[a], -jm, jm);
      const double v_next = x.velocity[a] + x.acceleration[a] * dt + 0.5 * ua * dt * dt;
      // Acceleration that can still be released before hitting the velocity box.
      // Releasing in whole steps overshoots the continuous bound by at most j dt^2 / 8.
      const double slack = jm * dt * dt / 8.0;
      const double a_hi = std::min(am, std::sqrt(2.0 * jm * std::max(0.0, vm - slack - v_next)));
      const double a_lo = std::max(-am, -std::sqrt(2.0 * jm * std::max(0.0, vm - slack + v_next)));
      const double a_next = x.acceleration[a] + ua * dt;
      if (a_next > a_hi) ua = (a_hi - x.acceleration[a]) / dt;
      else if (a_next < a_lo) ua = (a_lo - x.acceleration[a]) / dt;
      u[a] = std::clamp(ua, -jm, jm);
    }
    x = step_state(x, u, dt);
  }
  return jerks;
}

namespace {

double horizon_cost(const State& x0, const std::vector<Vec3>& jerks, const Trajectory& ref,
                    const DistanceQuery& q, const PlannerConfig& cfg) {
  return evaluate_cost(Trajectory::integrate(x0, jerks, ref.dt), ref, q, cfg).total();
}

}  // namespace

std::vector<Vec3> cost_gradient(const State& x0, const std::vector<Vec3>& jerks,
                                const Trajectory& ref, const DistanceQuery& q,
                                const PlannerConfig& cfg) {
  const double dt = ref.dt;
  const Trajectory traj = Trajectory::integrate(x0, jerks, dt);
  const std::size_t n = jerks.size();
  const Eigen::Matrix3d phi_t = transition(dt).transpose();
  const Eigen::Vector3d b = input_gain(dt);

  // Per-axis costate over (p, v, a).
  std::array<Eigen::Vector3d, 3> lambda;
  for (auto& l : lambda) l.setZero();
  std::vector<Vec3> grad(n);
  for (std::size_t k = n; k >= 1; --k) {
    const State& x = traj.states[k];
    const State& r = ref.states[std::min(k, ref.states.size() - 1)];
    Vec3 obstacle_grad = Vec3::Zero();
    if (q) {
      const DistanceSample s = q(x.position);
      obstacle_grad = -cfg.w2 * dt * std::exp(-std::abs(s.distance)) * s.gradient;
    }
    for (int a = 0; a < 3; ++a) {
      Eigen::Vector3d g(2.0 * cfg.w1 * dt * (x.position[a] - r.position[a]) + obstacle_grad[a],
                        2.0 * cfg.w1 * dt * (x.velocity[a] - r.velocity[a]),
                        2.0 * cfg.w1 * dt * (x.acceleration[a] - r.acceleration[a]));
      lambda[a] = g + (k < n ? Eigen::Vector3d(phi_t * lambda[a]) : Eigen::Vector3d::Zero());
      grad[k - 1][a] = 2.0 * dt * jerks[k - 1][a] + b.dot(lambda[a]);
    }
  }
  return grad;
}

OptimizeResult optimize_horizon(const State& x0, const Trajectory& ref,
                                const DistanceQuery& edt_query, const PlannerConfig& cfg) {
  const double dt = ref.dt;
  std::vector<Vec3> u = project_jerks(x0, ref.jerks, dt, cfg);
  double cost = horizon_cost(x0, u, ref, edt_query, cfg);

  OptimizeResult res;
  res.cost_history.push_back(cost);
  double alpha = 1.0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    const std::vector<Vec3> g = cost_gradient(x0, u, ref, edt_query, cfg);
    double gnorm2 = 0.0;
    for (const auto& gi : g) gnorm2 += gi.squaredNorm();
    if (gnorm2 < 1e-18) break;

    bool accepted = false;
    alpha *= 2.0;
    for (int bt = 0; bt < 40 && !accepted; ++bt, alpha *= 0.5) {
      std::vector<Vec3> trial = u;
      for (std::size_t k = 0; k < trial.size(); ++k) trial[k] -= alpha * g[k];
      trial = project_jerks(x0, std::move(trial), dt, cfg);
      const double c = horizon_cost(x0, trial, ref, edt_query, cfg);
      if (c < cost) {
        u = std::move(trial);
        cost = c;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    res.cost_history.push_back(cost);
    res.iterations = it + 1;
    const double prev = res.cost_history[res.cost_history.size() - 2];
    if (prev - cost < 1e-12 * std::max(1.0, prev)) break;
  }
  res.trajectory = Trajectory::integrate(x0, u, dt);
  return res;
}

DistanceQuery planner_distance_query(const VoxelMap& map) {
  return [&map](const Vec3& p) {
    DistanceSample s;
    if (!map.in_bounds(p)) return s;
    s.distance = map.query_distance(p);
    try {
      s.gradient = map.query_gradient(p);
    } catch (const OutOfBoundsError&) {
      s.gradient.setZero();
    }
    return s;
  };
}

double min_clearance(const Trajectory& traj, const DistanceQuery& q) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : traj.states) m = std::min(m, q(s.position).distance);
  return m;
}

ReplanResult replan(const State& x0, const State& xg, const VoxelMap& map,
                    const PlannerConfig& cfg) {
  const DistanceQuery q = planner_distance_query(map);
  const auto guide = find_guide_path(map, x0.position, xg.position,
                                     cfg.safety_distance + cfg.guide_margin,
                                     cfg.goal_relax_radius);
  if (!guide) throw PlanningFailure("no collision-free guide path to the goal");

  ReplanResult out;
  out.guide = guide->pruned;
  out.subgoal = guide->pruned.size() > 1 ? guide->pruned[1] : guide->goal;
  const Trajectory full = jerk_limited_reference(x0, State::at_rest(out.subgoal), cfg, cfg.dt());
  out.reference = horizon_window(full, cfg.steps);

  OptimizeResult opt = optimize_horizon(x0, out.reference, q, cfg);
  out.trajectory = std::move(opt.trajectory);
  out.cost_history = std::move(opt.cost_history);
  out.min_clearance = min_clearance(out.trajectory, q);
  out.clearance_ok = out.min_clearance >= cfg.safety_distance;
  if (out.min_clearance < cfg.cage_radius) {
    throw PlanningFailure("optimized horizon comes closer than the cage radius to an obstacle");
  }
  return out;
}

}  // namespace colreact
