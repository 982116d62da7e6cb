#include "colreact/mission.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <optional>
#include <random>

#include "colreact/detection.hpp"
#include "colreact/errors.hpp"
#include "colreact/physics.hpp"
#include "colreact/planner.hpp"
#include "colreact/run_log.hpp"
#include "colreact/sensors.hpp"

namespace colreact {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Takeoff: return "takeoff";
    case Mode::WaypointTracking: return "waypoint_tracking";
    case Mode::RecoveryHold: return "recovery_hold";
    case Mode::Replanning: return "replanning";
    case Mode::HoverAbort: return "hover_abort";
    case Mode::Crashed: return "crashed";
  }
  return "unknown";
}

bool legal_transition(Mode from, Mode to) {
  if (to == Mode::Crashed) return from != Mode::Crashed;
  switch (from) {
    case Mode::Takeoff:
      return to == Mode::WaypointTracking || to == Mode::RecoveryHold || to == Mode::HoverAbort;
    case Mode::WaypointTracking:
      return to == Mode::RecoveryHold || to == Mode::HoverAbort;
    case Mode::RecoveryHold:
      return to == Mode::RecoveryHold || to == Mode::Replanning;
    case Mode::Replanning:
      return to == Mode::WaypointTracking || to == Mode::HoverAbort || to == Mode::RecoveryHold;
    case Mode::HoverAbort:
    case Mode::Crashed:
      return false;
  }
  return false;
}

namespace {

constexpr int kMaxPlanFailures = 4;
constexpr std::size_t kPoseHistory = 64;

int ticks_per(double period, double dt) {
  return std::max(1, static_cast<int>(std::lround(period / dt)));
}

class Mission {
 public:
  explicit Mission(const Scenario& sc)
      : sc_(sc),
        map_(std::make_shared<VoxelMap>(sc.map)),
        detector_(sc.detector),
        rng_(sc.sim.seed),
        imu_every_(ticks_per(1.0 / sc.sim.imu_rate, sc.sim.dt)),
        scan_every_(ticks_per(1.0 / sc.sim.scan_rate, sc.sim.dt)),
        replan_every_(ticks_per(sc.replan_period, sc.sim.dt)) {
    state_ = State::at_rest(sc.start);
    setpoint_ = sc.start;
    v_at_imu_ = state_.velocity;
    report_.scenario = sc.name;
    report_.seed = sc.sim.seed;
    report_.framework_enabled = sc.sim.framework_enabled;
  }

  RunReport run() {
    const auto wall0 = std::chrono::steady_clock::now();
    emit(RecordBuilder("start", 0.0)
             .add("scenario", sc_.name)
             .add("seed", static_cast<std::size_t>(sc_.sim.seed))
             .add("framework_enabled", sc_.sim.framework_enabled)
             .add("a_star", sc_.detector.a_star)
             .add("g", sc_.detector.g)
             .add("position", state_.position));
    scan_tick();
    controller_tick();
    const auto max_ticks = static_cast<std::int64_t>(std::ceil(sc_.sim.max_time / sc_.sim.dt));
    while (!done_ && k_ < max_ticks) {
      ++k_;
      physics_tick();
      if (done_) break;
      if (k_ % imu_every_ == 0) imu_tick();
      if (done_) break;
      if (k_ % scan_every_ == 0) scan_tick();
      mode_tick();
      if (done_) break;
      controller_tick();
    }
    if (!done_) finish("timeout", false);
    report_.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    report_.map = map_;
    return std::move(report_);
  }

 private:
  double now() const { return static_cast<double>(k_) * sc_.sim.dt; }
  Pose pose() const { return Pose{Rotation::identity(), state_.position}; }
  const Vec3& active_goal() const { return sc_.waypoints[active_wp_]; }

  void emit(const RecordBuilder& r) { report_.events.push_back(r.str()); }

  void set_mode(Mode m, const std::string& reason) {
    if (m == mode_ && m != Mode::RecoveryHold) return;
    if (!legal_transition(mode_, m)) {
      throw Error(fmt_transition(mode_, m));
    }
    emit(RecordBuilder("mode", now())
             .add("from", to_string(mode_))
             .add("to", to_string(m))
             .add("reason", reason));
    mode_ = m;
  }

  static std::string fmt_transition(Mode a, Mode b) {
    return std::string("illegal mode transition ") + to_string(a) + " -> " + to_string(b);
  }

  void finish(const std::string& outcome, bool success) {
    done_ = true;
    report_.outcome = outcome;
    report_.success = success;
    report_.final_mode = mode_;
    report_.sim_time = now();
    report_.final_position_error = (state_.position - sc_.waypoints.back()).norm();
    if (success) report_.completion_time = now();
    emit(RecordBuilder("end", now())
             .add("outcome", outcome)
             .add("success", success)
             .add("mode", to_string(mode_))
             .add("position", state_.position)
             .add("final_position_error", report_.final_position_error));
  }

  void physics_tick() {
    const double dt = sc_.sim.dt;
    const double t0 = now() - dt;
    Vec3 accel = cmd_;
    for (const auto& im : sc_.impulses) {
      if (im.t >= t0 - 1e-12 && im.t < t0 + dt - 1e-12) {
        accel += im.direction * (im.delta_v / dt);
        contacts_.push_back({now(), -1});
        emit(RecordBuilder("impulse", im.t)
                 .add("direction", im.direction)
                 .add("delta_v", im.delta_v));
      }
    }
    const Vec3 p0 = state_.position;
    const DynamicsStep step = step_dynamics(state_, accel, sc_.obstacles, dt,
                                            {sc_.drone.cage_radius, sc_.sim.restitution});
    state_ = step.state;
    state_.acceleration = cmd_;
    report_.path_length += (state_.position - p0).norm();

    for (const auto& c : step.contacts) {
      ++report_.contact_count;
      report_.contact_times.push_back(now());
      contacts_.push_back({now(), static_cast<int>(c.obstacle)});
      recent_contacts_.push_back(now());
      emit(RecordBuilder("contact", now())
               .add("obstacle", sc_.obstacles[c.obstacle].name)
               .add("approach_speed", c.approach_speed)
               .add("normal", c.normal));
    }
    while (!recent_contacts_.empty() &&
           recent_contacts_.front() < now() - sc_.sim.crash_window - 1e-12) {
      recent_contacts_.pop_front();
    }
    if (static_cast<int>(recent_contacts_.size()) >= sc_.sim.crash_contacts) {
      set_mode(Mode::Crashed, "repeated contact");
      finish("crashed", false);
    }
  }

  void imu_tick() {
    const double interval = imu_every_ * sc_.sim.dt;
    const Vec3 mean_accel = (state_.velocity - v_at_imu_) / interval;
    v_at_imu_ = state_.velocity;
    const ImuSample sample =
        synthesize_imu(now(), mean_accel, Vec3::Zero(), Rotation::identity(), sc_.detector.g,
                       sc_.sim.accel_noise_sigma, rng_);
    pose_history_.push_back({now(), state_.position});
    if (pose_history_.size() > kPoseHistory) pose_history_.pop_front();

    TrajectoryRow row;
    row.t = now();
    row.truth = state_;
    row.mode = mode_;
    row.imu_accel = sample.accel;
    row.accel_norm = gravity_compensated(sample, sc_.detector.g).norm();
    report_.trajectory.push_back(row);

    update_settle();

    if (!sc_.sim.framework_enabled) return;
    if (const auto cand = detector_.feed(sample)) on_detection(*cand);
  }

  Vec3 position_at(double t) const {
    for (auto it = pose_history_.rbegin(); it != pose_history_.rend(); ++it) {
      if (std::abs(it->first - t) < 1e-9) return it->second;
    }
    return state_.position;
  }

  void on_detection(const DetectionCandidate& cand) {
    const CageModel cage{sc_.drone.cage_radius};
    CollisionRecord rec;
    rec.event = estimate_from_sample(cand.peak_sample, sc_.detector.g, cage);
    rec.detected_t = now();
    rec.reacted = true;

    // The reaction consults the map as it was before this collision.
    const VoxelMap& m = *map_;
    const DistanceQuery query = [&m](const Vec3& p) {
      if (!m.in_bounds(p)) return DistanceSample{std::numeric_limits<double>::infinity(), Vec3::Zero()};
      return m.query(p);
    };
    rec.recovery = issue_recovery(rec.event, pose(), query, sc_.recovery, now());

    const double rc = sc_.drone.cage_radius + sc_.cloud.radius_margin;
    const CollisionDisc disc = generate_disc(rec.event.point_body, rc, sc_.cloud.step);
    const Pose contact_pose{Rotation::identity(), position_at(rec.event.t)};
    const std::vector<Vec3> cloud = disc_to_world(disc, contact_pose);
    rec.obb = extract_obb(cloud, sc_.cloud.thickness_floor);
    rec.registered = map_->register_collision(rec.obb, rec.event.t);
    if (rec.registered) rec.obb_voxels = map_->registry().back().voxel_count;

    double best = std::numeric_limits<double>::infinity();
    for (const auto& [ct, idx] : contacts_) {
      if (std::abs(ct - rec.event.t) < best - 1e-12) {
        best = std::abs(ct - rec.event.t);
        rec.contact_t = ct;
        rec.obstacle = idx;
      }
    }
    rec.obstacle_name = rec.obstacle >= 0 ? sc_.obstacles[rec.obstacle].name
                        : rec.contact_t >= 0.0 ? "impulse" : "";

    emit(RecordBuilder("collision", rec.event.t)
             .add("detected_t", rec.detected_t)
             .add("intensity", rec.event.intensity_c)
             .add("direction", rec.event.direction)
             .add("theta_deg", rad_to_deg(rec.event.theta))
             .add("phi_deg", rad_to_deg(rec.event.phi))
             .add("point_body", rec.event.point_body)
             .add("recovery_setpoint", rec.recovery.setpoint_world)
             .add("recovery_offset_body", rec.recovery.offset_body)
             .add("weight", rec.recovery.weight)
             .add("edt_distance", rec.recovery.distance)
             .add("obb_center", rec.obb.center)
             .add("obb_half_extents", rec.obb.half_extents)
             .add("obb_voxels", rec.obb_voxels)
             .add("contact_t", rec.contact_t)
             .add("obstacle", rec.obstacle_name)
             .add("cloud", cloud));
    if (!rec.registered) {
      emit(RecordBuilder("warning", now()).add("message", "collision box lies outside the map"));
    }

    report_.collisions.push_back(rec);
    active_collision_ = static_cast<int>(report_.collisions.size()) - 1;
    setpoint_ = rec.recovery.setpoint_world;
    hold_until_ = now() + sc_.hold_time;
    traj_.reset();
    set_mode(Mode::RecoveryHold, "collision");
  }

  void update_settle() {
    if (active_collision_ < 0 || mode_ != Mode::RecoveryHold) return;
    CollisionRecord& rec = report_.collisions[active_collision_];
    if (rec.settle_t >= 0.0) return;
    const double err = (state_.position - rec.recovery.setpoint_world).norm();
    if (err < sc_.sim.settle_position_tol && state_.velocity.norm() < sc_.sim.settle_speed_tol) {
      rec.settle_t = now();
      rec.settle_time = now() - rec.event.t;
      emit(RecordBuilder("settled", now())
               .add("settle_time", rec.settle_time)
               .add("position_error", err));
    }
  }

  void scan_tick() {
    const ScanResult scan = simulate_scan(pose(), sc_.obstacles, sc_.sensor);
    map_->integrate_scan(pose(), scan.hits, sc_.sensor.max_range, scan.no_return_endpoints);
  }

  State plan_start() const {
    const PlannerConfig& pc = sc_.planner;
    State s;
    s.position = state_.position;
    s.velocity = state_.velocity.cwiseMax(-0.999 * pc.v_max).cwiseMin(0.999 * pc.v_max);
    if (traj_) {
      s.acceleration = traj_->sample(now() - traj_t0_).acceleration;
    }
    s.acceleration = s.acceleration.cwiseMax(-0.999 * pc.a_max).cwiseMin(0.999 * pc.a_max);
    return s;
  }

  bool try_replan(const std::string& kind) {
    ReplanRecord rec;
    rec.t = now();
    rec.kind = kind;
    const State x0 = plan_start();
    rec.start = x0.position;
    rec.goal = active_goal();
    try {
      ReplanResult r = replan(x0, State::at_rest(active_goal()), *map_, sc_.planner);
      rec.success = true;
      rec.subgoal = r.subgoal;
      rec.cost_history = r.cost_history;
      rec.min_clearance = r.min_clearance;
      rec.clearance_ok = r.clearance_ok;
      traj_ = std::move(r.trajectory);
      traj_t0_ = now();
      plan_failures_ = 0;
    } catch (const PlanningFailure& e) {
      rec.error = e.what();
      ++plan_failures_;
    } catch (const InfeasibleError& e) {
      rec.error = e.what();
      ++plan_failures_;
    }
    RecordBuilder b("replan", now());
    b.add("kind", kind).add("success", rec.success).add("start", rec.start).add("goal", rec.goal);
    if (rec.success) {
      b.add("subgoal", rec.subgoal)
          .add("iterations", rec.cost_history.size())
          .add("initial_cost", rec.cost_history.front())
          .add("final_cost", rec.cost_history.back())
          .add("min_clearance", rec.min_clearance)
          .add("clearance_ok", rec.clearance_ok)
          .add("dt", traj_->dt);
      std::vector<Vec3> positions;
      for (const auto& st : traj_->states) positions.push_back(st.position);
      b.add("positions", positions);
    } else {
      b.add("error", rec.error);
    }
    emit(b);
    report_.replans.push_back(std::move(rec));
    return report_.replans.back().success;
  }

  void schedule_replan() { next_replan_k_ = k_ + replan_every_; }

  void mode_tick() {
    const double t = now();
    switch (mode_) {
      case Mode::Takeoff:
        if (t >= sc_.sim.takeoff_time - 1e-12) {
          set_mode(Mode::WaypointTracking, "takeoff complete");
          if (!try_replan("periodic")) abort("no initial plan");
          schedule_replan();
        }
        break;
      case Mode::WaypointTracking: {
        check_waypoint();
        if (done_) return;
        if (k_ >= next_replan_k_) {
          if (!try_replan("periodic") && (plan_failures_ >= kMaxPlanFailures || !traj_)) {
            abort("planning failure");
            return;
          }
          schedule_replan();
        }
        break;
      }
      case Mode::RecoveryHold:
        if (t >= hold_until_ - 1e-12) {
          if (active_collision_ >= 0) {
            CollisionRecord& rec = report_.collisions[active_collision_];
            if (rec.obstacle >= 0) {
              rec.separation = distance_to_box(sc_.obstacles[rec.obstacle], state_.position);
            }
            emit(RecordBuilder("hold_end", t)
                     .add("separation", rec.separation)
                     .add("position_error", (state_.position - rec.recovery.setpoint_world).norm()));
          }
          active_collision_ = -1;
          set_mode(Mode::Replanning, "hold expired");
          if (try_replan("post_collision")) {
            set_mode(Mode::WaypointTracking, "replanned");
            schedule_replan();
          } else {
            abort("post-collision replanning failed");
          }
        }
        break;
      case Mode::Replanning:
      case Mode::HoverAbort:
      case Mode::Crashed:
        break;
    }
  }

  void abort(const std::string& reason) {
    setpoint_ = state_.position;
    set_mode(Mode::HoverAbort, reason);
    finish("hover_abort", false);
  }

  void check_waypoint() {
    const bool last = active_wp_ + 1 == sc_.waypoints.size();
    const double err = (state_.position - active_goal()).norm();
    if (err > sc_.sim.waypoint_tolerance) return;
    if (!last) {
      emit(RecordBuilder("waypoint", now()).add("index", active_wp_).add("error", err));
      ++active_wp_;
      ++report_.waypoints_reached;
      next_replan_k_ = k_;
      return;
    }
    if (!final_logged_) {
      emit(RecordBuilder("waypoint", now()).add("index", active_wp_).add("error", err));
      ++report_.waypoints_reached;
      final_logged_ = true;
    }
    // The mission ends once the vehicle has come to rest at the final waypoint.
    if (state_.velocity.norm() >= sc_.sim.settle_speed_tol) return;
    if (now() >= sc_.sim.min_duration - 1e-12) finish("success", true);
  }

  void controller_tick() {
    Vec3 target = setpoint_;
    Vec3 vref = Vec3::Zero();
    Vec3 aff = Vec3::Zero();
    if (mode_ == Mode::WaypointTracking && traj_) {
      const State ref = traj_->sample(now() - traj_t0_);
      target = ref.position;
      vref = ref.velocity;
      aff = ref.acceleration;
    } else if (mode_ == Mode::HoverAbort || mode_ == Mode::Takeoff) {
      target = setpoint_;
    }
    cmd_ = position_controller_step(state_, target, sc_.sim.dt, sc_.controller, vref, aff);
  }

  const Scenario& sc_;
  std::shared_ptr<VoxelMap> map_;
  CollisionDetector detector_;
  std::mt19937_64 rng_;
  int imu_every_;
  int scan_every_;
  int replan_every_;

  std::int64_t k_ = 0;
  bool done_ = false;
  Mode mode_ = Mode::Takeoff;
  State state_;
  Vec3 cmd_ = Vec3::Zero();
  Vec3 setpoint_ = Vec3::Zero();
  Vec3 v_at_imu_ = Vec3::Zero();
  std::deque<std::pair<double, Vec3>> pose_history_;
  std::vector<std::pair<double, int>> contacts_;
  std::deque<double> recent_contacts_;

  std::size_t active_wp_ = 0;
  bool final_logged_ = false;
  std::optional<Trajectory> traj_;
  double traj_t0_ = 0.0;
  std::int64_t next_replan_k_ = 0;
  int plan_failures_ = 0;
  double hold_until_ = 0.0;
  int active_collision_ = -1;

  RunReport report_;
};

}  // namespace

RunReport run_mission(const Scenario& sc) {
  Scenario copy = sc;
  copy.finalize();
  Mission m(copy);
  return m.run();
}

}  // namespace colreact
