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

// Operator trace: one sample per line, whitespace-separated columns,
// '#' starts a comment.
//
//   t_s  waist_x waist_y waist_yaw  lf_x lf_y lf_yaw  rf_x rf_y rf_yaw
//        hand_x hand_y hand_z  imu_gx imu_gy imu_gz  glove_0 ... glove_{G-1}
//
// Poses are planar in the operator's world frame (m, rad).  hand_* is the
// hand tracker position; imu_g* the measured unit gravity direction in the
// IMU frame, or all zeros when no IMU is worn.  G is 0, the glove joint
// count (both hands mirror it) or twice that (left block then right).

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "telelink/clock.hpp"
#include "telelink/locomotion.hpp"

namespace telelink {

inline constexpr std::size_t kTraceFixedColumns = 16;

struct OperatorSample {
  Nanos t{0};
  double waist_x = 0.0, waist_y = 0.0, waist_yaw = 0.0;
  double left_x = 0.0, left_y = 0.15, left_yaw = 0.0;
  double right_x = 0.0, right_y = -0.15, right_yaw = 0.0;
  Eigen::Vector3d hand = Eigen::Vector3d::Zero();
  Eigen::Vector3d imu_gravity = Eigen::Vector3d::Zero();
  std::vector<double> glove;

  OperatorPose pose() const;
  bool has_imu() const { return !imu_gravity.isZero(0.0); }
};

struct OperatorTrace {
  std::vector<OperatorSample> samples;

  Nanos duration() const { return samples.empty() ? Nanos{0} : samples.back().t; }
  // Throws Error(kValidation) if timestamps are not strictly increasing or
  // rows differ in width.
  void validate() const;
};

// Throws Error(kNotFound) / Error(kConfig) with the offending line number.
OperatorTrace read_trace(std::istream& in);
OperatorTrace read_trace_file(const std::filesystem::path& path);

// Round-trips exactly through read_trace (17 significant digits).
void write_trace(std::ostream& out, const OperatorTrace& trace);
std::string format_trace_line(const OperatorSample& sample);

}  // namespace telelink
