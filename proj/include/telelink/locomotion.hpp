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

#pragma once

// Tracker-based locomotion: feet displaced beyond an idle disc command
// translation; feet kept inside while the operator turns command rotation.
// Translation and rotation never mix.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "json.hpp"
#include "telelink/clock.hpp"

namespace telelink {

struct OperatorPose {
  Eigen::Isometry3d waist = Eigen::Isometry3d::Identity();
  Eigen::Isometry3d left_foot = Eigen::Isometry3d::Identity();
  Eigen::Isometry3d right_foot = Eigen::Isometry3d::Identity();
};

// Foot positions and yaws expressed in the waist frame (x forward, y left).
struct FeetInWaist {
  Eigen::Vector2d left = Eigen::Vector2d::Zero();
  Eigen::Vector2d right = Eigen::Vector2d::Zero();
  double left_yaw = 0.0;
  double right_yaw = 0.0;
};

FeetInWaist feet_in_waist(const OperatorPose& pose);
// Planar operator pose: waist at (x, y, yaw), feet given in world.
OperatorPose planar_operator_pose(double waist_x, double waist_y, double waist_yaw,
                                  double left_x, double left_y, double left_yaw,
                                  double right_x, double right_y, double right_yaw);

struct LocomotionParams {
  double idle_radius = 0.08;   // m
  double stance_width = 0.30;  // m; nominal feet at (0, +-w/2)
  double k_linear = 2.0;       // 1/s
  double k_lateral = 2.0;      // 1/s
  double k_angular = 1.0;      // 1/s
  double yaw_deadband = 0.1;   // rad
  double v_max = 0.5;          // m/s
  double v_lateral_max = 0.5;  // m/s
  double omega_max = 0.8;      // rad/s

  void validate() const;
};

LocomotionParams load_locomotion_params(const nlohmann::json& config);

struct VelocityTriplet {
  double linear = 0.0;   // m/s
  double angular = 0.0;  // rad/s
  double lateral = 0.0;  // m/s

  bool operator==(const VelocityTriplet&) const = default;
  bool is_zero() const { return linear == 0.0 && angular == 0.0 && lateral == 0.0; }
};

VelocityTriplet compute_triplet(const FeetInWaist& feet, const LocomotionParams& params);
VelocityTriplet compute_triplet(const OperatorPose& pose, const LocomotionParams& params);

struct DifferentialBase {
  double wheel_radius = 0.1;  // m
  double track = 0.4;         // m
  double lateral_epsilon = 1e-6;
};

struct WheelSpeeds {
  double left = 0.0;   // rad/s
  double right = 0.0;  // rad/s
};

// Throws Error(kUnachievable) when |lateral| > lateral_epsilon.
WheelSpeeds map_differential(const VelocityTriplet& triplet, const DifferentialBase& base);
// Unicycle forward model of a differential base.
VelocityTriplet differential_forward(const WheelSpeeds& wheels, const DifferentialBase& base);

// Pass-through with saturation re-applied.
VelocityTriplet map_omni(const VelocityTriplet& triplet, const LocomotionParams& params);

enum class FootSide { kLeft, kRight };

struct Footstep {
  FootSide side = FootSide::kLeft;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  Nanos time{0};
};

struct FootstepParams {
  Nanos step_period = std::chrono::seconds(1);
  double stance_width = 0.2;  // m
  double max_step_length = 0.5;  // m, same-side displacement bound
};

// Integrates a unicycle driven by the triplet stream and drops alternating
// footsteps every step_period, starting with the left foot.  Periods in
// which the unicycle did not move produce no step.
class UnicycleFootstepPlanner {
 public:
  explicit UnicycleFootstepPlanner(FootstepParams params);

  // Explicit Euler over dt; returns the steps emitted during this sample.
  std::vector<Footstep> push(const VelocityTriplet& triplet, Nanos dt);

  double x() const { return x_; }
  double y() const { return y_; }
  double yaw() const { return yaw_; }
  const std::vector<Footstep>& steps() const { return steps_; }

 private:
  Footstep place(FootSide side) const;

  FootstepParams params_;
  double x_ = 0.0, y_ = 0.0, yaw_ = 0.0;
  Nanos elapsed_{0};
  Nanos next_step_;
  bool moved_ = false;
  FootSide next_side_ = FootSide::kLeft;
  Footstep last_left_, last_right_;
  std::vector<Footstep> steps_;
};

}  // namespace telelink
