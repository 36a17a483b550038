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

#include "telelink/so3.hpp"

#include <cmath>

namespace telelink {
namespace {

Eigen::Vector3d vee(const Eigen::Matrix3d& M) {
  return Eigen::Vector3d(M(2, 1) - M(1, 2), M(0, 2) - M(2, 0), M(1, 0) - M(0, 1));
}

}  // namespace

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d K = hat(phi);
  if (theta < 1e-8) {
    return Eigen::Matrix3d::Identity() + K + 0.5 * K * K;
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Eigen::Matrix3d::Identity() + a * K + b * K * K;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& R) {
  const Eigen::Vector3d v = vee(R);
  const double s = 0.5 * v.norm();
  const double c = 0.5 * (R.trace() - 1.0);
  const double theta = std::atan2(s, c);

  if (s > 1e-7) return (theta / (2.0 * s)) * v;
  if (c > 0.0) {
    // theta ~ 0: theta / sin(theta) ~ 1 + theta^2 / 6.
    return 0.5 * (1.0 + theta * theta / 6.0) * v;
  }

  // theta ~ pi: R ~ 2 a a^T - I, recover the axis from the largest column.
  const Eigen::Matrix3d B = 0.5 * (R + Eigen::Matrix3d::Identity());
  Eigen::Index k = 0;
  B.diagonal().maxCoeff(&k);
  Eigen::Vector3d axis = B.col(k) / std::sqrt(std::max(B(k, k), 1e-300));
  axis.normalize();
  // Pick the sign consistent with the (tiny) antisymmetric part.
  if (axis.dot(v) < 0.0) axis = -axis;
  return theta * axis;
}

Eigen::Matrix3d so3_right_jacobian_inverse(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d K = hat(phi);
  double coeff;
  if (theta < 1e-5) {
    coeff = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    coeff = 1.0 / (theta * theta) -
            (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() + 0.5 * K + coeff * K * K;
}

bool is_rotation(const Eigen::Matrix3d& R, double tol) {
  if (!R.allFinite()) return false;
  const Eigen::Matrix3d err = R.transpose() * R - Eigen::Matrix3d::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

bool is_rigid(const Eigen::Isometry3d& T, double tol) {
  const auto& M = T.matrix();
  return is_rotation(T.linear(), tol) && T.translation().allFinite() && M(3, 0) == 0.0 &&
         M(3, 1) == 0.0 && M(3, 2) == 0.0 && M(3, 3) == 1.0;
}

Eigen::Matrix3d rpy_to_matrix(double roll, double pitch, double yaw) {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
          Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Isometry3d make_transform(const Eigen::Matrix3d& R, const Eigen::Vector3d& p) {
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  T.linear() = R;
  T.translation() = p;
  return T;
}

double yaw_of(const Eigen::Matrix3d& R) { return std::atan2(R(1, 0), R(0, 0)); }

}  // namespace telelink
