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

#include "telelink/ik.hpp"

#include <cmath>

#include <fmt/format.h>

#include "telelink/error.hpp"
#include "telelink/so3.hpp"

namespace telelink {

std::size_t IkTask::dimension() const {
  if (const auto* c = std::get_if<CartesianTarget>(&target)) return c->position_only ? 3 : 6;
  return 3;
}

void IkTask::validate(const KinChain& chain) const {
  if (link >= chain.link_count()) {
    throw Error(ErrorCode::kValidation, fmt::format("task targets missing link {}", link));
  }
  if (!(weight > 0.0)) throw Error(ErrorCode::kValidation, "task weight must be > 0");
  if (const auto* c = std::get_if<CartesianTarget>(&target)) {
    if (!is_rigid(c->pose, 1e-6)) {
      throw Error(ErrorCode::kValidation, "cartesian target is not a rigid transform");
    }
  } else {
    const auto& g = std::get<GravityTarget>(target).measured;
    if (std::abs(g.norm() - 1.0) > 1e-6) {
      throw Error(ErrorCode::kValidation, "measured gravity must be unit norm");
    }
  }
}

Eigen::VectorXd task_residual(const KinChain& /*chain*/,
                              const std::vector<Eigen::Isometry3d>& poses, const IkTask& task) {
  const Eigen::Isometry3d& T = poses.at(task.link);
  if (const auto* c = std::get_if<CartesianTarget>(&task.target)) {
    Eigen::VectorXd r(c->position_only ? 3 : 6);
    r.head<3>() = T.translation() - c->pose.translation();
    if (!c->position_only) {
      r.tail<3>() = so3_log(c->pose.linear().transpose() * T.linear());
    }
    return r;
  }
  const auto& g = std::get<GravityTarget>(task.target);
  const Eigen::Vector3d model = T.linear().transpose() * kWorldGravity;
  return g.measured.cross(model);
}

Eigen::VectorXd task_residual(const KinChain& chain, const Eigen::VectorXd& q,
                              const IkTask& task) {
  return task_residual(chain, chain.forward_kinematics(q), task);
}

Eigen::MatrixXd task_jacobian(const KinChain& chain, const std::vector<Eigen::Isometry3d>& poses,
                              const IkTask& task) {
  const Jacobian6 J = chain.jacobian(poses, task.link);
  const Eigen::Isometry3d& T = poses[task.link];
  if (const auto* c = std::get_if<CartesianTarget>(&task.target)) {
    if (c->position_only) return J.topRows<3>();
    Eigen::MatrixXd out(6, J.cols());
    out.topRows<3>() = J.topRows<3>();
    // d log(E) with E = R*^T R(q); a world-frame twist w perturbs E on the
    // right by R^T w.
    const Eigen::Vector3d phi = so3_log(c->pose.linear().transpose() * T.linear());
    out.bottomRows<3>() = so3_right_jacobian_inverse(phi) * T.linear().transpose() * J.bottomRows<3>();
    return out;
  }
  // d(R^T g_w) = R^T [g_w]x w, then the cross with g_meas.
  const auto& g = std::get<GravityTarget>(task.target);
  return hat(g.measured) * T.linear().transpose() * hat(kWorldGravity) * J.bottomRows<3>();
}

namespace {

struct Stack {
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  Eigen::VectorXd w;  // per-row weights
  double norm = 0.0;
};

std::size_t stacked_rows(const std::vector<IkTask>& tasks) {
  std::size_t rows = 0;
  for (const auto& t : tasks) rows += t.dimension();
  return rows;
}

Stack evaluate(const KinChain& chain, const Eigen::VectorXd& q, const std::vector<IkTask>& tasks,
               bool with_jacobian) {
  const auto poses = chain.forward_kinematics(q);
  const auto rows = static_cast<Eigen::Index>(stacked_rows(tasks));
  Stack s;
  s.r.resize(rows);
  s.w.resize(rows);
  if (with_jacobian) s.J.resize(rows, static_cast<Eigen::Index>(chain.joint_count()));
  Eigen::Index row = 0;
  for (const auto& task : tasks) {
    const auto d = static_cast<Eigen::Index>(task.dimension());
    s.r.segment(row, d) = task_residual(chain, poses, task);
    s.w.segment(row, d).setConstant(task.weight);
    if (with_jacobian) s.J.middleRows(row, d) = task_jacobian(chain, poses, task);
    row += d;
  }
  s.norm = std::sqrt((s.w.array() * s.r.array().square()).sum());
  return s;
}

}  // namespace

double weighted_residual_norm(const KinChain& chain, const Eigen::VectorXd& q,
                              const std::vector<IkTask>& tasks) {
  return evaluate(chain, q, tasks, false).norm;
}

IkResult solve_ik(const KinChain& chain, const std::vector<IkTask>& tasks,
                  const Eigen::VectorXd& q_init, const IkParams& params) {
  if (tasks.empty()) throw Error(ErrorCode::kInvalidArgument, "solve_ik needs at least one task");
  if (static_cast<std::size_t>(q_init.size()) != chain.joint_count()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("solve_ik: q_init has {} entries for {} joints", q_init.size(),
                            chain.joint_count()));
  }
  for (const auto& t : tasks) t.validate(chain);

  IkResult result;
  result.q = chain.clamp(q_init);
  Stack cur = evaluate(chain, result.q, tasks, true);
  result.history.push_back(cur.norm);
  double lambda = params.damping;
  const auto n = static_cast<Eigen::Index>(chain.joint_count());

  while (cur.norm >= params.tol && result.iterations < params.max_iters) {
    ++result.iterations;
    const Eigen::MatrixXd JtW = cur.J.transpose() * cur.w.asDiagonal();
    Eigen::MatrixXd H = JtW * cur.J;
    H.diagonal().array() += lambda;
    const Eigen::VectorXd g = JtW * cur.r;

    auto solve_step = [&](const Eigen::MatrixXd& A, const Eigen::VectorXd& b) -> Eigen::VectorXd {
      if (lambda > 0.0) return -A.ldlt().solve(b);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < n) {
        throw Error(ErrorCode::kNumerical, "singular normal matrix with zero damping");
      }
      return -lu.solve(b);
    };
    Eigen::VectorXd dq = solve_step(H, g);
    // Joints already on a limit and pushed further out are frozen, and the
    // step is re-solved over the remaining joints.
    const Eigen::VectorXd probe = chain.clamp(result.q + dq);
    Eigen::MatrixXd H_free = H;
    Eigen::VectorXd g_free = g;
    bool frozen = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (dq[i] != 0.0 && probe[i] == result.q[i]) {
        H_free.row(i).setZero();
        H_free.col(i).setZero();
        H_free(i, i) = 1.0;
        g_free[i] = 0.0;
        frozen = true;
      }
    }
    if (frozen) dq = solve_step(H_free, g_free);
    if (!dq.allFinite()) throw Error(ErrorCode::kNumerical, "non-finite IK step");
    const double largest = n > 0 ? dq.cwiseAbs().maxCoeff() : 0.0;
    if (largest > params.max_step) dq *= params.max_step / largest;

    const Eigen::VectorXd q_next = chain.clamp(result.q + dq);
    Stack next = evaluate(chain, q_next, tasks, true);
    if (next.norm <= cur.norm) {
      result.q = q_next;
      cur = std::move(next);
      result.history.push_back(cur.norm);
      lambda *= 0.5;
    } else {
      lambda = lambda > 0.0 ? lambda * 2.0 : 1e-9;
      if (lambda > params.max_damping) break;
    }
  }
  result.residual_norm = cur.norm;
  result.converged = cur.norm < params.tol;
  return result;
}

IkSession::IkSession(KinChain chain, Eigen::VectorXd q0, IkParams params)
    : chain_(std::move(chain)), q_(std::move(q0)), params_(params) {
  if (static_cast<std::size_t>(q_.size()) != chain_.joint_count()) {
    throw Error(ErrorCode::kDimension, "IkSession: initial configuration has wrong size");
  }
  q_ = chain_.clamp(q_);
}

IkResult IkSession::solve(const std::vector<IkTask>& tasks) {
  IkResult r = solve_ik(chain_, tasks, q_, params_);
  q_ = r.q;
  return r;
}

FrameCalibration FrameCalibration::calibrate(const Eigen::Isometry3d& world_tracker0,
                                             const Eigen::Isometry3d& world_link0) {
  if (!is_rigid(world_tracker0, 1e-6) || !is_rigid(world_link0, 1e-6)) {
    throw Error(ErrorCode::kValidation, "calibration needs rigid transforms");
  }
  return FrameCalibration{world_tracker0.inverse(Eigen::Isometry) * world_link0};
}

Eigen::Isometry3d FrameCalibration::apply(const Eigen::Isometry3d& world_tracker) const {
  if (!is_rigid(world_tracker, 1e-6)) {
    throw Error(ErrorCode::kValidation, "tracker pose is not a rigid transform");
  }
  return world_tracker * tracker_to_link;
}

JointReferences ReferenceDifferentiator::push(const Eigen::VectorXd& q, double t_seconds) {
  const auto n = static_cast<std::size_t>(q.size());
  JointReferences out;
  out.position.resize(n);
  out.velocity.assign(n, 0.0f);
  out.acceleration.assign(n, 0.0f);

  Eigen::VectorXd v = Eigen::VectorXd::Zero(q.size());
  if (q_prev_ && q_prev_->size() == q.size() && t_seconds > t_prev_) {
    const double dt = t_seconds - t_prev_;
    v = (q - *q_prev_) / dt;
    if (v_prev_) {
      const Eigen::VectorXd a = (v - *v_prev_) / dt;
      for (std::size_t i = 0; i < n; ++i) out.acceleration[i] = static_cast<float>(a[static_cast<Eigen::Index>(i)]);
    }
    v_prev_ = v;
  } else {
    v_prev_.reset();
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.position[i] = static_cast<float>(q[static_cast<Eigen::Index>(i)]);
    out.velocity[i] = static_cast<float>(v[static_cast<Eigen::Index>(i)]);
  }
  q_prev_ = q;
  t_prev_ = t_seconds;
  return out;
}

}  // namespace telelink
