// Copyright 2026 The telelink Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "telelink/locomotion.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "telelink/error.hpp"
#include "telelink/so3.hpp"

namespace telelink {
namespace {

double sat(double v, double limit) { return std::clamp(v, -limit, limit); }

Eigen::Vector2d excess(const Eigen::Vector2d& d, double radius) {
  const double n = d.norm();
  if (n <= radius) return Eigen::Vector2d::Zero();
  return (n - radius) * d / n;
}

}  // namespace

void LocomotionParams::validate() const {
  for (double v : {idle_radius, stance_width, k_linear, k_lateral, k_angular, v_max,
                   v_lateral_max, omega_max}) {
    if (!(v > 0.0)) throw Error(ErrorCode::kConfig, "locomotion gains and limits must be > 0");
  }
  if (!(yaw_deadband >= 0.0)) throw Error(ErrorCode::kConfig, "yaw deadband must be >= 0");
}

LocomotionParams load_locomotion_params(const nlohmann::json& c) {
  LocomotionParams p;
  try {
    p.idle_radius = c.value("idle_radius", p.idle_radius);
    p.stance_width = c.value("stance_width", p.stance_width);
    p.k_linear = c.value("k_linear", p.k_linear);
    p.k_lateral = c.value("k_lateral", p.k_lateral);
    p.k_angular = c.value("k_angular", p.k_angular);
    p.yaw_deadband = c.value("yaw_deadband", p.yaw_deadband);
    p.v_max = c.value("v_max", p.v_max);
    p.v_lateral_max = c.value("v_lateral_max", p.v_lateral_max);
    p.omega_max = c.value("omega_max", p.omega_max);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("locomotion: {}", e.what()));
  }
  p.validate();
  return p;
}

FeetInWaist feet_in_waist(const OperatorPose& pose) {
  const Eigen::Isometry3d inv = pose.waist.inverse(Eigen::Isometry);
  const Eigen::Isometry3d l = inv * pose.left_foot;
  const Eigen::Isometry3d r = inv * pose.right_foot;
  FeetInWaist f;
  f.left = l.translation().head<2>();
  f.right = r.translation().head<2>();
  f.left_yaw = yaw_of(l.linear());
  f.right_yaw = yaw_of(r.linear());
  return f;
}

OperatorPose planar_operator_pose(double waist_x, double waist_y, double waist_yaw,
                                  double left_x, double left_y, double left_yaw, double right_x,
                                  double right_y, double right_yaw) {
  auto planar = [](double x, double y, double yaw) {
    return make_transform(rpy_to_matrix(0.0, 0.0, yaw), Eigen::Vector3d(x, y, 0.0));
  };
  return OperatorPose{planar(waist_x, waist_y, waist_yaw), planar(left_x, left_y, left_yaw),
                      planar(right_x, right_y, right_yaw)};
}

VelocityTriplet compute_triplet(const FeetInWaist& feet, const LocomotionParams& p) {
  const Eigen::Vector2d nominal_left(0.0, 0.5 * p.stance_width);
  const Eigen::Vector2d nominal_right(0.0, -0.5 * p.stance_width);
  const Eigen::Vector2d e_left = excess(feet.left - nominal_left, p.idle_radius);
  const Eigen::Vector2d e_right = excess(feet.right - nominal_right, p.idle_radius);

  VelocityTriplet t;
  if (e_left.isZero(0.0) && e_right.isZero(0.0)) {
    const double mean_yaw = 0.5 * (feet.left_yaw + feet.right_yaw);
    if (std::abs(mean_yaw) > p.yaw_deadband) t.angular = sat(p.k_angular * mean_yaw, p.omega_max);
    return t;
  }
  // Larger excess wins; ties go to the left foot.
  const Eigen::Vector2d& e = e_right.norm() > e_left.norm() ? e_right : e_left;
  t.linear = sat(p.k_linear * e.x(), p.v_max);
  t.lateral = sat(p.k_lateral * e.y(), p.v_lateral_max);
  return t;
}

VelocityTriplet compute_triplet(const OperatorPose& pose, const LocomotionParams& params) {
  return compute_triplet(feet_in_waist(pose), params);
}

WheelSpeeds map_differential(const VelocityTriplet& t, const DifferentialBase& base) {
  if (std::abs(t.lateral) > base.lateral_epsilon) {
    throw Error(ErrorCode::kUnachievable,
                fmt::format("differential base cannot follow lateral velocity {} m/s", t.lateral));
  }
  const double half = 0.5 * t.angular * base.track;
  return WheelSpeeds{(t.linear - half) / base.wheel_radius, (t.linear + half) / base.wheel_radius};
}

VelocityTriplet differential_forward(const WheelSpeeds& w, const DifferentialBase& base) {
  VelocityTriplet t;
  t.linear = 0.5 * base.wheel_radius * (w.right + w.left);
  t.angular = base.wheel_radius * (w.right - w.left) / base.track;
  return t;
}

VelocityTriplet map_omni(const VelocityTriplet& t, const LocomotionParams& p) {
  return VelocityTriplet{sat(t.linear, p.v_max), sat(t.angular, p.omega_max),
                         sat(t.lateral, p.v_lateral_max)};
}

UnicycleFootstepPlanner::UnicycleFootstepPlanner(FootstepParams params)
    : params_(params), next_step_(params.step_period) {
  if (params_.step_period <= Nanos{0} || !(params_.stance_width > 0.0) ||
      !(params_.max_step_length > 0.0)) {
    throw Error(ErrorCode::kConfig, "footstep planner parameters must be > 0");
  }
  last_left_ = place(FootSide::kLeft);
  last_right_ = place(FootSide::kRight);
}

Footstep UnicycleFootstepPlanner::place(FootSide side) const {
  const double sign = side == FootSide::kLeft ? 1.0 : -1.0;
  const double half = 0.5 * params_.stance_width * sign;
  Footstep s;
  s.side = side;
  s.x = x_ - half * std::sin(yaw_);
  s.y = y_ + half * std::cos(yaw_);
  s.yaw = yaw_;
  s.time = elapsed_;
  return s;
}

std::vector<Footstep> UnicycleFootstepPlanner::push(const VelocityTriplet& t, Nanos dt) {
  const double h = to_seconds(dt);
  const double c = std::cos(yaw_);
  const double s = std::sin(yaw_);
  x_ += (t.linear * c - t.lateral * s) * h;
  y_ += (t.linear * s + t.lateral * c) * h;
  yaw_ += t.angular * h;
  elapsed_ += dt;
  if (!t.is_zero()) moved_ = true;

  std::vector<Footstep> emitted;
  while (elapsed_ >= next_step_) {
    next_step_ += params_.step_period;
    if (!moved_) continue;
    moved_ = false;

    Footstep step = place(next_side_);
    Footstep& prev = next_side_ == FootSide::kLeft ? last_left_ : last_right_;
    const double dx = step.x - prev.x;
    const double dy = step.y - prev.y;
    const double len = std::hypot(dx, dy);
    if (len > params_.max_step_length) {
      const double k = params_.max_step_length / len;
      step.x = prev.x + k * dx;
      step.y = prev.y + k * dy;
    }
    prev = step;
    steps_.push_back(step);
    emitted.push_back(step);
    next_side_ = next_side_ == FootSide::kLeft ? FootSide::kRight : FootSide::kLeft;
  }
  return emitted;
}

}  // namespace telelink
