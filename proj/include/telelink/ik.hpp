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

// Task-space inverse kinematics for retargeting.
//
// Two task kinds are stacked and solved with damped Gauss-Newton
// (Levenberg-style damping, per-iterate clamping to joint limits):
//
//  - Cartesian: r = [p(q) - p*; log(R*^T R(q))]  (6, or 3 position-only)
//  - Gravity:   r = g_meas x g_model(q),  g_model = R(q)^T (0, 0, -1)
//
// The gravity residual also vanishes when the two directions are
// antiparallel.  That configuration is a stationary point of the solver;
// do not initialize there.

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "telelink/kinematics.hpp"
#include "telelink/wire.hpp"

namespace telelink {

inline const Eigen::Vector3d kWorldGravity{0.0, 0.0, -1.0};

struct CartesianTarget {
  Eigen::Isometry3d pose = Eigen::Isometry3d::Identity();
  bool position_only = false;
};

struct GravityTarget {
  Eigen::Vector3d measured = kWorldGravity;  // unit, link frame
};

struct IkTask {
  std::size_t link = 0;
  double weight = 1.0;
  std::variant<CartesianTarget, GravityTarget> target;

  std::size_t dimension() const;
  // Throws Error(kValidation).
  void validate(const KinChain& chain) const;
};

Eigen::VectorXd task_residual(const KinChain& chain, const std::vector<Eigen::Isometry3d>& poses,
                              const IkTask& task);
Eigen::VectorXd task_residual(const KinChain& chain, const Eigen::VectorXd& q,
                              const IkTask& task);
Eigen::MatrixXd task_jacobian(const KinChain& chain, const std::vector<Eigen::Isometry3d>& poses,
                              const IkTask& task);

struct IkParams {
  double damping = 1e-3;
  double tol = 1e-10;  // on the weighted residual norm
  int max_iters = 100;
  double max_damping = 1e8;
  double max_step = 0.5;  // rad, largest joint change per iteration
};

struct IkResult {
  Eigen::VectorXd q;
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  // Weighted residual norm after each accepted iterate, starting at q_init.
  std::vector<double> history;
};

// sqrt(sum_i w_i |r_i|^2)
double weighted_residual_norm(const KinChain& chain, const Eigen::VectorXd& q,
                              const std::vector<IkTask>& tasks);

// Throws Error(kInvalidArgument) on empty tasks, Error(kNumerical) when the
// normal matrix is singular with zero damping.
IkResult solve_ik(const KinChain& chain, const std::vector<IkTask>& tasks,
                  const Eigen::VectorXd& q_init, const IkParams& params = {});

// Warm-started solver state for one retargeting session.
class IkSession {
 public:
  IkSession(KinChain chain, Eigen::VectorXd q0, IkParams params = {});

  const KinChain& chain() const { return chain_; }
  const Eigen::VectorXd& q() const { return q_; }
  IkResult solve(const std::vector<IkTask>& tasks);

 private:
  KinChain chain_;
  Eigen::VectorXd q_;
  IkParams params_;
};

struct FrameCalibration {
  Eigen::Isometry3d tracker_to_link = Eigen::Isometry3d::Identity();

  // tracker_to_link = T_world_tracker0^-1 * T_world_link0.
  // Throws Error(kValidation) on non-rigid inputs.
  static FrameCalibration calibrate(const Eigen::Isometry3d& world_tracker0,
                                    const Eigen::Isometry3d& world_link0);
  Eigen::Isometry3d apply(const Eigen::Isometry3d& world_tracker) const;
};

// Backward-difference velocities and accelerations from successive
// position references.
class ReferenceDifferentiator {
 public:
  JointReferences push(const Eigen::VectorXd& q, double t_seconds);

 private:
  std::optional<Eigen::VectorXd> q_prev_;
  std::optional<Eigen::VectorXd> v_prev_;
  double t_prev_ = 0.0;
};

}  // namespace telelink
