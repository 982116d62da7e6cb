#pragma once

#include "colreact/geometry.hpp"

namespace colreact {

/// Translational state of the vehicle in the world frame.
struct State {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Vec3 acceleration = Vec3::Zero();

  static State at_rest(const Vec3& p) { return State{p, Vec3::Zero(), Vec3::Zero()}; }
};

}  // namespace colreact
