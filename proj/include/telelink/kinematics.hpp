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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "json.hpp"
#include "telelink/hands.hpp"

namespace telelink {

struct RevoluteJoint {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitZ();  // unit, in the link frame
  JointLimit limits{-3.14159265358979, 3.14159265358979};
};

// Link i's frame = frame(i-1) * origin * Rot(axis, q) (rotation only for
// revolute links).  Link 0 hangs off the chain root.
struct Link {
  std::string name;
  Eigen::Isometry3d origin = Eigen::Isometry3d::Identity();
  std::optional<RevoluteJoint> joint;
};

using Jacobian6 = Eigen::Matrix<double, 6, Eigen::Dynamic>;

class KinChain {
 public:
  KinChain() = default;
  // Throws Error(kConfig) on non-unit axes, bad limits or non-rigid origins.
  explicit KinChain(std::vector<Link> links);

  std::size_t link_count() const { return links_.size(); }
  std::size_t joint_count() const { return joint_links_.size(); }
  const std::vector<Link>& links() const { return links_; }
  std::optional<std::size_t> link_index(const std::string& name) const;
  const JointLimit& limits(std::size_t joint) const;

  // Pins joints to their limits; joints with a full turn of travel wrap.
  Eigen::VectorXd clamp(const Eigen::VectorXd& q) const;
  bool within_limits(const Eigen::VectorXd& q) const;

  // World pose of every link.  Throws Error(kDimension).
  std::vector<Eigen::Isometry3d> forward_kinematics(const Eigen::VectorXd& q) const;

  // Rows 0-2: linear velocity of the link origin; rows 3-5: angular
  // velocity, both in the world frame.
  Jacobian6 jacobian(const std::vector<Eigen::Isometry3d>& poses, std::size_t link) const;

 private:
  std::vector<Link> links_;
  std::vector<std::size_t> joint_links_;  // joint index -> link index
  std::vector<int> link_joint_;           // link index -> joint index or -1
};

KinChain load_chain(const nlohmann::json& config);
KinChain load_chain_file(const std::filesystem::path& path);

}  // namespace telelink
