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

#include "telelink/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "telelink/config.hpp"
#include "telelink/error.hpp"
#include "telelink/so3.hpp"

namespace telelink {

KinChain::KinChain(std::vector<Link> links) : links_(std::move(links)) {
  link_joint_.assign(links_.size(), -1);
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (!is_rigid(link.origin, 1e-9)) {
      throw Error(ErrorCode::kConfig, fmt::format("link '{}': origin is not rigid", link.name));
    }
    if (link.joint) {
      if (std::abs(link.joint->axis.norm() - 1.0) > 1e-9) {
        throw Error(ErrorCode::kConfig, fmt::format("link '{}': axis not unit norm", link.name));
      }
      if (!(link.joint->limits.min < link.joint->limits.max)) {
        throw Error(ErrorCode::kConfig, fmt::format("link '{}': limits not ordered", link.name));
      }
      link_joint_[i] = static_cast<int>(joint_links_.size());
      joint_links_.push_back(i);
    }
  }
}

std::optional<std::size_t> KinChain::link_index(const std::string& name) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    if (links_[i].name == name) return i;
  }
  return std::nullopt;
}

const JointLimit& KinChain::limits(std::size_t joint) const {
  return links_.at(joint_links_.at(joint)).joint->limits;
}

Eigen::VectorXd KinChain::clamp(const Eigen::VectorXd& q) const {
  Eigen::VectorXd out = q;
  for (std::size_t j = 0; j < joint_count() && j < static_cast<std::size_t>(q.size()); ++j) {
    const auto& lim = limits(j);
    const auto i = static_cast<Eigen::Index>(j);
    double v = q[i];
    if ((v < lim.min || v > lim.max) && std::isfinite(v) &&
        lim.max - lim.min >= 2 * std::numbers::pi - 1e-9) {
      // A full turn of travel: the joint is continuous, so wrap instead of pinning.
      v = lim.min + std::fmod(v - lim.min, 2 * std::numbers::pi);
      if (v < lim.min) v += 2 * std::numbers::pi;
    }
    out[i] = std::clamp(v, lim.min, lim.max);
  }
  return out;
}

bool KinChain::within_limits(const Eigen::VectorXd& q) const {
  if (static_cast<std::size_t>(q.size()) != joint_count()) return false;
  for (std::size_t j = 0; j < joint_count(); ++j) {
    const double v = q[static_cast<Eigen::Index>(j)];
    if (!(v >= limits(j).min && v <= limits(j).max)) return false;
  }
  return true;
}

std::vector<Eigen::Isometry3d> KinChain::forward_kinematics(const Eigen::VectorXd& q) const {
  if (static_cast<std::size_t>(q.size()) != joint_count()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("forward kinematics: {} values for {} joints", q.size(),
                            joint_count()));
  }
  std::vector<Eigen::Isometry3d> poses;
  poses.reserve(links_.size());
  Eigen::Isometry3d T = Eigen::Isometry3d::Identity();
  for (std::size_t i = 0; i < links_.size(); ++i) {
    T = T * links_[i].origin;
    if (link_joint_[i] >= 0) {
      const double angle = q[link_joint_[i]];
      T.linear() = T.linear() * so3_exp(links_[i].joint->axis * angle);
    }
    poses.push_back(T);
  }
  return poses;
}

Jacobian6 KinChain::jacobian(const std::vector<Eigen::Isometry3d>& poses,
                             std::size_t link) const {
  if (link >= links_.size() || poses.size() != links_.size()) {
    throw Error(ErrorCode::kDimension, "jacobian: bad link index or pose list");
  }
  Jacobian6 J = Jacobian6::Zero(6, static_cast<Eigen::Index>(joint_count()));
  const Eigen::Vector3d p_link = poses[link].translation();
  for (std::size_t j = 0; j < joint_count(); ++j) {
    const std::size_t li = joint_links_[j];
    if (li > link) break;
    const Eigen::Vector3d z = poses[li].linear() * links_[li].joint->axis;
    const Eigen::Vector3d p = poses[li].translation();
    const auto col = static_cast<Eigen::Index>(j);
    J.block<3, 1>(0, col) = z.cross(p_link - p);
    J.block<3, 1>(3, col) = z;
  }
  return J;
}

namespace {

Eigen::Vector3d vec3(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::kConfig, "expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

KinChain load_chain(const nlohmann::json& config) {
  std::vector<Link> links;
  try {
    for (const auto& item : config.at("links")) {
      Link link;
      link.name = item.at("name").get<std::string>();
      if (item.contains("origin")) {
        const auto& o = item.at("origin");
        const Eigen::Vector3d xyz = o.contains("xyz") ? vec3(o.at("xyz")) : Eigen::Vector3d::Zero();
        const Eigen::Vector3d rpy = o.contains("rpy") ? vec3(o.at("rpy")) : Eigen::Vector3d::Zero();
        link.origin = make_transform(rpy_to_matrix(rpy.x(), rpy.y(), rpy.z()), xyz);
      }
      if (item.contains("joint")) {
        const auto& j = item.at("joint");
        RevoluteJoint joint;
        joint.axis = vec3(j.at("axis"));
        const auto& lim = j.at("limits");
        joint.limits = {lim.at(0).get<double>(), lim.at(1).get<double>()};
        link.joint = joint;
      }
      links.push_back(std::move(link));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("chain: {}", e.what()));
  }
  return KinChain(std::move(links));
}

KinChain load_chain_file(const std::filesystem::path& path) {
  return load_chain(read_json_file(path));
}

}  // namespace telelink
