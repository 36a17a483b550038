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

// Finger coupling: drive-joint commands expand to full finger joints through
// an affine law q_full = A q_drive + b.  Glove angles are mapped onto drive
// joints by per-joint weighted sums, clamped to the drive limits.

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace telelink {

struct JointLimit {
  double min = 0.0;
  double max = 0.0;
};

struct CouplingLaw {
  std::string name;
  Eigen::MatrixXd matrix;  // n full joints x m drive joints
  Eigen::VectorXd offset;  // n
  std::vector<JointLimit> drive_limits;  // m
  // Full joints held at their offset; only these may have an all-zero row.
  std::vector<std::size_t> fixed_joints;

  std::size_t full_joints() const { return static_cast<std::size_t>(matrix.rows()); }
  std::size_t drive_joints() const { return static_cast<std::size_t>(matrix.cols()); }

  // Throws Error(kConfig).
  void validate() const;
};

// Drive joint i = sum over (glove_index, weight) pairs.
struct GloveMapping {
  std::vector<std::vector<std::pair<std::size_t, double>>> terms;
};

struct ClampCounter {
  std::size_t clamped = 0;
};

// Clamps q_drive into the limits (counting each clamp), then applies A q + b.
// Throws Error(kDimension) on size mismatch.
Eigen::VectorXd expand(const CouplingLaw& law, const Eigen::VectorXd& q_drive,
                       ClampCounter* counter = nullptr);

// Throws Error(kConfig) if the mapping does not cover every drive joint or
// references a glove joint that does not exist.
void validate_mapping(const CouplingLaw& law, const GloveMapping& mapping,
                      std::size_t glove_joints);

Eigen::VectorXd retarget_glove(const CouplingLaw& law, const Eigen::VectorXd& glove_angles,
                               const GloveMapping& mapping, ClampCounter* counter = nullptr);

CouplingLaw identity_law(std::size_t joints, JointLimit limits = {-3.14159, 3.14159});
GloveMapping identity_mapping(std::size_t joints);

// 13 drive joints expanding to 18 hand/wrist joints; see models/README.md.
CouplingLaw honda_like_law();
// Maps a 20-angle glove (5 fingers x 4) onto the 13 drive joints above.
GloveMapping honda_like_glove_mapping();

struct HandModel {
  CouplingLaw law;
  GloveMapping mapping;
  std::size_t glove_joints = 20;
};

HandModel load_hand_model(const nlohmann::json& config);
HandModel load_hand_model_file(const std::filesystem::path& path);

}  // namespace telelink
