#pragma once

#include <optional>
#include <vector>

#include "colreact/jerk_profile.hpp"
#include "colreact/recovery.hpp"
#include "colreact/state.hpp"

namespace colreact {

class VoxelMap;

struct PlannerConfig {
  double w1 = 10.0;              // tracking weight
  double w2 = 5.0;               // obstacle weight
  double horizon_t = 2.0;        // s
  int steps = 40;
  double j_max = 3.0;            // per-axis boxes
  double a_max = 1.5;
  double v_max = 1.0;
  double safety_distance = 0.35; // m, post-check on the optimized horizon
  double cage_radius = 0.23;     // below this clearance a plan is rejected
  int max_iterations = 100;
  double guide_margin = 0.15;    // extra clearance for the guide search
  double goal_relax_radius = 0.3;

  double dt() const { return horizon_t / steps; }
  AxisLimits limits() const { return {v_max, a_max, j_max}; }
  void validate() const;
};

/// Discrete triple-integrator trajectory: jerks[k] is held over
/// [k*dt, (k+1)*dt] and takes states[k] to states[k+1].
struct Trajectory {
  double dt = 0.05;
  std::vector<State> states;
  std::vector<Vec3> jerks;

  double duration() const { return dt * static_cast<double>(jerks.size()); }
  /// Exact state at time t (clamped to the ends; held afterwards).
  State sample(double t) const;
  /// Re-integrates jerks from states.front(); the result obeys the dynamics exactly.
  static Trajectory integrate(const State& x0, const std::vector<Vec3>& jerks, double dt);
  /// Largest deviation of `states` from re-integrating `jerks`.
  double dynamics_residual() const;
};

/// One constant-jerk step of the triple integrator.
State step_state(const State& x, const Vec3& jerk, double dt);

/// Jerk-limited reference from x0 to xg (xg acceleration is taken as zero).
/// Per-axis bang-coast-bang profiles, every axis stretched to the slowest
/// one's duration, sampled at `dt` with a minimum-norm correction so the
/// discrete endpoint matches xg. Throws InfeasibleError for non-finite
/// inputs or a goal velocity beyond v_max.
Trajectory jerk_limited_reference(const State& x0, const State& xg, const PlannerConfig& cfg,
                                  double dt);

/// Copy of the first steps+1 states of `ref`, holding its last state if it is shorter.
Trajectory horizon_window(const Trajectory& ref, int steps);

struct CostBreakdown {
  double smoothness = 0.0;  // sum |u|^2 dt
  double tracking = 0.0;    // w1 sum |x - x_ref|^2 dt (position, velocity, acceleration)
  double obstacle = 0.0;    // w2 sum exp(-|d|) dt
  double total() const { return smoothness + tracking + obstacle; }
};

/// Discrete approximation of the replanning cost over the horizon of `traj`.
/// `ref` is held at its last state where it is shorter than `traj`.
CostBreakdown evaluate_cost(const Trajectory& traj, const Trajectory& ref,
                            const DistanceQuery& edt_query, const PlannerConfig& cfg);

/// Gradient of evaluate_cost(integrate(x0, jerks), ref) with respect to each
/// jerk, by a backward (adjoint) sweep. The obstacle term uses the query's
/// gradient.
std::vector<Vec3> cost_gradient(const State& x0, const std::vector<Vec3>& jerks,
                                const Trajectory& ref, const DistanceQuery& edt_query,
                                const PlannerConfig& cfg);

struct OptimizeResult {
  Trajectory trajectory;
  std::vector<double> cost_history;  // one entry per accepted iterate, starting with the initial guess
  int iterations = 0;
};

/// Projected gradient descent on the stacked jerks, started from the
/// reference's own jerks, with backtracking so the cost never increases.
OptimizeResult optimize_horizon(const State& x0, const Trajectory& ref,
                                const DistanceQuery& edt_query, const PlannerConfig& cfg);

/// Maps jerks onto the jerk box and adjusts them so that the integrated
/// accelerations and velocities stay inside their boxes.
std::vector<Vec3> project_jerks(const State& x0, std::vector<Vec3> jerks, double dt,
                                const PlannerConfig& cfg);

struct ReplanResult {
  Trajectory trajectory;
  Trajectory reference;
  std::vector<Vec3> guide;  // pruned guide polyline, start first
  Vec3 subgoal = Vec3::Zero();
  std::vector<double> cost_history;
  double min_clearance = 0.0;
  bool clearance_ok = false;  // min_clearance >= safety_distance
};

/// Guide search + jerk-limited reference toward the first guide vertex +
/// horizon optimization against the map's EDT. Throws PlanningFailure when
/// no guide path exists or the optimized horizon comes closer than the cage
/// radius to a mapped obstacle.
ReplanResult replan(const State& x0, const State& xg, const VoxelMap& map,
                    const PlannerConfig& cfg);

/// Map-backed distance query: out-of-map positions read as distance 0.
DistanceQuery planner_distance_query(const VoxelMap& map);

double min_clearance(const Trajectory& traj, const DistanceQuery& q);

}  // namespace colreact
