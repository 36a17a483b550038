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

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace telelink {

Eigen::Matrix3d hat(const Eigen::Vector3d& v);

// Rodrigues.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi);
// Axis-angle vector with angle in [0, pi].
Eigen::Vector3d so3_log(const Eigen::Matrix3d& R);
// Inverse right Jacobian: d log(R0 * exp(d)) / d d at d = 0.
Eigen::Matrix3d so3_right_jacobian_inverse(const Eigen::Vector3d& phi);

bool is_rotation(const Eigen::Matrix3d& R, double tol = 1e-9);
bool is_rigid(const Eigen::Isometry3d& T, double tol = 1e-9);

// Roll-pitch-yaw (fixed axes x, y, z; R = Rz * Ry * Rx).
Eigen::Matrix3d rpy_to_matrix(double roll, double pitch, double yaw);
Eigen::Isometry3d make_transform(const Eigen::Matrix3d& R, const Eigen::Vector3d& p);
// Heading of the x axis projected on the ground plane.
double yaw_of(const Eigen::Matrix3d& R);

}  // namespace telelink
