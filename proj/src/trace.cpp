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

#include "telelink/trace.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {

OperatorPose OperatorSample::pose() const {
  return planar_operator_pose(waist_x, waist_y, waist_yaw, left_x, left_y, left_yaw, right_x,
                              right_y, right_yaw);
}

void OperatorTrace::validate() const {
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t <= samples[i - 1].t) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("trace timestamps not strictly increasing at sample {}", i));
    }
    if (samples[i].glove.size() != samples[0].glove.size()) {
      throw Error(ErrorCode::kValidation, fmt::format("trace sample {} changes width", i));
    }
  }
}

OperatorTrace read_trace(std::istream& in) {
  OperatorTrace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    std::vector<double> v;
    std::string token;
    while (row >> token) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kConfig,
                    fmt::format("trace line {}: '{}' is not a number", line_no, token));
      }
    }
    if (v.empty()) continue;
    if (v.size() < kTraceFixedColumns) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("trace line {}: {} columns, need at least {}", line_no, v.size(),
                              kTraceFixedColumns));
    }
    OperatorSample s;
    s.t = from_seconds(v[0]);
    s.waist_x = v[1];
    s.waist_y = v[2];
    s.waist_yaw = v[3];
    s.left_x = v[4];
    s.left_y = v[5];
    s.left_yaw = v[6];
    s.right_x = v[7];
    s.right_y = v[8];
    s.right_yaw = v[9];
    s.hand = {v[10], v[11], v[12]};
    s.imu_gravity = {v[13], v[14], v[15]};
    s.glove.assign(v.begin() + kTraceFixedColumns, v.end());
    trace.samples.push_back(std::move(s));
  }
  trace.validate();
  return trace;
}

OperatorTrace read_trace_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, fmt::format("cannot open trace '{}'", path.string()));
  return read_trace(in);
}

std::string format_trace_line(const OperatorSample& s) {
  std::string out = fmt::format("{:.9f}", to_seconds(s.t));
  for (double v : {s.waist_x, s.waist_y, s.waist_yaw, s.left_x, s.left_y, s.left_yaw, s.right_x,
                   s.right_y, s.right_yaw, s.hand.x(), s.hand.y(), s.hand.z(), s.imu_gravity.x(),
                   s.imu_gravity.y(), s.imu_gravity.z()}) {
    out += fmt::format(" {:.17g}", v);
  }
  for (double g : s.glove) out += fmt::format(" {:.17g}", g);
  return out;
}

void write_trace(std::ostream& out, const OperatorTrace& trace) {
  out << "# t_s waist_x waist_y waist_yaw lf_x lf_y lf_yaw rf_x rf_y rf_yaw "
         "hand_x hand_y hand_z imu_gx imu_gy imu_gz glove...\n";
  for (const auto& s : trace.samples) out << format_trace_line(s) << '\n';
}

}  // namespace telelink
