#pragma once

#include "modquad/geometry.hpp"

namespace modquad {

struct VehicleState {
  Vec3 position = Vec3::Zero();          // world, m
  Vec3 velocity = Vec3::Zero();          // world, m/s
  Mat3 attitude = Mat3::Identity();      // ^W R_S
  Vec3 angular_velocity = Vec3::Zero();  // body frame {S}, rad/s

  bool finite() const {
    return position.allFinite() && velocity.allFinite() && attitude.allFinite() &&
           angular_velocity.allFinite();
  }
};

}  // namespace modquad
