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

#include "telelink/hands.hpp"

#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "telelink/config.hpp"
#include "telelink/error.hpp"

namespace telelink {

void CouplingLaw::validate() const {
  const auto n = matrix.rows();
  const auto m = matrix.cols();
  if (n < m) {
    throw Error(ErrorCode::kConfig,
                fmt::format("coupling '{}': {} full joints < {} drive joints", name, n, m));
  }
  if (offset.size() != n) {
    throw Error(ErrorCode::kConfig,
                fmt::format("coupling '{}': offset has {} entries, expected {}", name,
                            offset.size(), n));
  }
  if (drive_limits.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorCode::kConfig,
                fmt::format("coupling '{}': {} drive limits for {} drive joints", name,
                            drive_limits.size(), m));
  }
  for (std::size_t i = 0; i < drive_limits.size(); ++i) {
    if (!(drive_limits[i].min < drive_limits[i].max)) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("coupling '{}': drive {} limits not ordered", name, i));
    }
  }
  const std::set<std::size_t> fixed(fixed_joints.begin(), fixed_joints.end());
  for (Eigen::Index r = 0; r < n; ++r) {
    if (matrix.row(r).isZero(0.0) && !fixed.count(static_cast<std::size_t>(r))) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("coupling '{}': joint {} is unreachable and not marked fixed",
                              name, r));
    }
  }
  if (!matrix.allFinite() || !offset.allFinite()) {
    throw Error(ErrorCode::kConfig, fmt::format("coupling '{}': non-finite entries", name));
  }
}

Eigen::VectorXd expand(const CouplingLaw& law, const Eigen::VectorXd& q_drive,
                       ClampCounter* counter) {
  if (static_cast<std::size_t>(q_drive.size()) != law.drive_joints()) {
    throw Error(ErrorCode::kDimension,
                fmt::format("expand: {} drive values for {} drive joints", q_drive.size(),
                            law.drive_joints()));
  }
  Eigen::VectorXd q = q_drive;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const auto& lim = law.drive_limits[static_cast<std::size_t>(i)];
    const double c = std::clamp(q[i], lim.min, lim.max);
    if (c != q[i] && counter) ++counter->clamped;
    q[i] = c;
  }
  return law.matrix * q + law.offset;
}

void validate_mapping(const CouplingLaw& law, const GloveMapping& mapping,
                      std::size_t glove_joints) {
  if (mapping.terms.size() != law.drive_joints()) {
    throw Error(ErrorCode::kConfig,
                fmt::format("glove mapping covers {} drive joints, law '{}' has {}",
                            mapping.terms.size(), law.name, law.drive_joints()));
  }
  for (std::size_t i = 0; i < mapping.terms.size(); ++i) {
    for (const auto& [index, weight] : mapping.terms[i]) {
      if (index >= glove_joints) {
        throw Error(ErrorCode::kConfig,
                    fmt::format("glove mapping for drive {} references glove joint {} of {}", i,
                                index, glove_joints));
      }
      (void)weight;
    }
  }
}

Eigen::VectorXd retarget_glove(const CouplingLaw& law, const Eigen::VectorXd& glove_angles,
                               const GloveMapping& mapping, ClampCounter* counter) {
  validate_mapping(law, mapping, static_cast<std::size_t>(glove_angles.size()));
  Eigen::VectorXd q(static_cast<Eigen::Index>(law.drive_joints()));
  for (std::size_t i = 0; i < mapping.terms.size(); ++i) {
    double sum = 0.0;
    for (const auto& [index, weight] : mapping.terms[i]) {
      sum += weight * glove_angles[static_cast<Eigen::Index>(index)];
    }
    const auto& lim = law.drive_limits[i];
    const double c = std::clamp(sum, lim.min, lim.max);
    if (c != sum && counter) ++counter->clamped;
    q[static_cast<Eigen::Index>(i)] = c;
  }
  return q;
}

CouplingLaw identity_law(std::size_t joints, JointLimit limits) {
  CouplingLaw law;
  law.name = "identity";
  const auto n = static_cast<Eigen::Index>(joints);
  law.matrix = Eigen::MatrixXd::Identity(n, n);
  law.offset = Eigen::VectorXd::Zero(n);
  law.drive_limits.assign(joints, limits);
  return law;
}

GloveMapping identity_mapping(std::size_t joints) {
  GloveMapping m;
  for (std::size_t i = 0; i < joints; ++i) m.terms.push_back({{i, 1.0}});
  return m;
}

CouplingLaw honda_like_law() {
  // Full joints:  0-1 wrist pitch/yaw | 2-5 thumb rot, abd, mcp, ip |
  // 6-9 index abd, mcp, pip, dip | 10-13 middle | 14-17 ring (abd fixed).
  // Distal joints follow their proximal drive (thumb ip 0.9, dips 0.7).
  constexpr double kThumbIp = 0.9;
  constexpr double kDip = 0.7;
  CouplingLaw law;
  law.name = "honda_like";
  law.matrix = Eigen::MatrixXd::Zero(18, 13);
  law.offset = Eigen::VectorXd::Zero(18);
  auto& A = law.matrix;
  A(0, 0) = 1.0;
  A(1, 1) = 1.0;
  A(2, 2) = 1.0;
  A(3, 3) = 1.0;
  A(4, 4) = 1.0;
  A(5, 4) = kThumbIp;
  A(6, 5) = 1.0;
  A(7, 6) = 1.0;
  A(8, 7) = 1.0;
  A(9, 7) = kDip;
  A(10, 8) = 1.0;
  A(11, 9) = 1.0;
  A(12, 10) = 1.0;
  A(13, 10) = kDip;
  A(15, 11) = 1.0;
  A(16, 12) = 1.0;
  A(17, 12) = kDip;
  law.fixed_joints = {14};

  const JointLimit wrist{-0.8, 0.8};
  const JointLimit abd{-0.35, 0.35};
  const JointLimit flex{0.0, 1.5};
  law.drive_limits = {wrist, wrist, {0.0, 1.2}, abd, flex, abd, flex,
                      flex,  abd,   flex,       flex, flex, flex};
  return law;
}

GloveMapping honda_like_glove_mapping() {
  // Glove: 5 fingers x 4 (thumb cmc-abd, cmc-flex, mcp, ip; others abd, mcp,
  // pip, dip).  Ring and little finger drive the single ring chain.
  GloveMapping m;
  m.terms = {
      {},                          // wrist pitch: arm IK owns the wrist
      {},                          // wrist yaw
      {{0, 1.0}},                  // thumb rotation
      {{1, 1.0}},                  // thumb abduction
      {{2, 0.5}, {3, 0.5}},        // thumb flexion
      {{4, 1.0}},                  // index abduction
      {{5, 1.0}},                  // index mcp
      {{6, 0.5}, {7, 0.5}},        // index pip
      {{8, 1.0}},                  // middle abduction
      {{9, 1.0}},                  // middle mcp
      {{10, 0.5}, {11, 0.5}},      // middle pip
      {{13, 0.5}, {17, 0.5}},      // ring mcp
      {{14, 0.25}, {15, 0.25}, {18, 0.25}, {19, 0.25}},  // ring pip
  };
  return m;
}

HandModel load_hand_model(const nlohmann::json& config) {
  HandModel model;
  try {
    const std::string builtin = config.value("builtin", std::string());
    if (builtin == "honda_like") {
      model.law = honda_like_law();
      model.mapping = honda_like_glove_mapping();
      model.glove_joints = 20;
    } else if (builtin == "identity") {
      const std::size_t joints = config.value("joints", std::size_t{20});
      model.law = identity_law(joints);
      model.mapping = identity_mapping(joints);
      model.glove_joints = joints;
    } else if (!builtin.empty()) {
      throw Error(ErrorCode::kConfig, fmt::format("unknown builtin hand model '{}'", builtin));
    } else {
      model.law.name = config.value("name", std::string("custom"));
      const auto& rows = config.at("matrix");
      const auto n = static_cast<Eigen::Index>(rows.size());
      const auto m = n == 0 ? 0 : static_cast<Eigen::Index>(rows.at(0).size());
      model.law.matrix.resize(n, m);
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != m) {
          throw Error(ErrorCode::kConfig, fmt::format("matrix row {} has wrong length", r));
        }
        for (Eigen::Index c = 0; c < m; ++c) {
          model.law.matrix(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
      }
      model.law.offset = Eigen::VectorXd::Zero(n);
      if (config.contains("offset")) {
        const auto& b = config.at("offset");
        if (static_cast<Eigen::Index>(b.size()) != n) {
          throw Error(ErrorCode::kConfig, "offset length does not match matrix rows");
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          model.law.offset[r] = b.at(static_cast<std::size_t>(r)).get<double>();
        }
      }
      for (const auto& lim : config.at("drive_limits")) {
        model.law.drive_limits.push_back({lim.at(0).get<double>(), lim.at(1).get<double>()});
      }
      model.law.fixed_joints =
          config.value("fixed_joints", std::vector<std::size_t>{});
      model.glove_joints = config.value("glove_joints", static_cast<std::size_t>(m));
      if (config.contains("mapping")) {
        for (const auto& drive : config.at("mapping")) {
          std::vector<std::pair<std::size_t, double>> terms;
          for (const auto& term : drive) {
            terms.emplace_back(term.at(0).get<std::size_t>(), term.at(1).get<double>());
          }
          model.mapping.terms.push_back(std::move(terms));
        }
      } else {
        model.mapping = identity_mapping(static_cast<std::size_t>(m));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("hand model: {}", e.what()));
  }
  model.law.validate();
  validate_mapping(model.law, model.mapping, model.glove_joints);
  return model;
}

HandModel load_hand_model_file(const std::filesystem::path& path) {
  return load_hand_model(read_json_file(path));
}

}  // namespace telelink
