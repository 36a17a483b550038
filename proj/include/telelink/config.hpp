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

// One JSON config format for every module.  A scenario config names its
// streams (bandwidth accounting), link, bridge routes, robot, models and
// simulation settings; see docs/formats.md for the schema.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "telelink/bandwidth.hpp"
#include "telelink/bridge.hpp"
#include "telelink/hands.hpp"
#include "telelink/ik.hpp"
#include "telelink/kinematics.hpp"
#include "telelink/locomotion.hpp"
#include "telelink/netem.hpp"

namespace telelink {

// Throws Error(kNotFound) or Error(kConfig).
nlohmann::json read_json_file(const std::filesystem::path& path);
// Accepts the path as given or with ".json" appended.
std::filesystem::path resolve_config_path(const std::filesystem::path& path);

enum class BaseKind { kDifferential, kOmni, kBiped };

struct RobotSpec {
  std::string name = "robot";
  std::uint32_t total_joints = 0;
  std::uint32_t controllable_joints = 0;
  BaseKind base_kind = BaseKind::kDifferential;
  std::uint32_t hand_joints = 0;
  std::uint32_t hand_drive_joints = 0;

  void validate() const;
};

struct Waypoint {
  std::string name;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // arm root frame
};

struct SimSettings {
  Nanos step = std::chrono::milliseconds(1);
  Nanos settle = std::chrono::seconds(2);  // run on after the trace ends
  double waypoint_tolerance = 0.02;        // m
  std::uint64_t seed = 1;
  Nanos trajectory_sample_period = std::chrono::milliseconds(100);
};

struct RateSettings {
  std::uint32_t glove_hz = 100;
  std::uint32_t locomotion_hz = 100;
  std::uint32_t ik_hz = 25;
  std::uint32_t telemetry_hz = 10;
};

// Operator-side topics on bus A; routes decide what crosses the link.
struct Topics {
  std::string gloves = "/gloves";
  std::string triplet = "/locomotion/triplet";
  std::string references = "/ik/references";
  std::string ping = "/ping";
};

struct ScenarioConfig {
  std::string name;
  std::filesystem::path source;
  std::string description;

  std::vector<StreamSpec> streams;
  std::optional<std::filesystem::path> baseline;  // budget comparison

  std::optional<LinkSpec> uplink;
  std::optional<LinkSpec> downlink;
  std::vector<BridgeRoute> routes;
  Topics topics;

  std::optional<RobotSpec> robot;
  LocomotionParams locomotion;
  DifferentialBase differential;
  FootstepParams footsteps;
  std::optional<HandModel> hand;
  std::optional<KinChain> arm;
  Eigen::Vector3d arm_mount = Eigen::Vector3d::Zero();
  Eigen::VectorXd arm_home;
  std::string hand_tracker_link;
  std::string imu_link;
  double cartesian_weight = 1.0;
  double gravity_weight = 1.0;
  IkParams ik;
  std::vector<Waypoint> waypoints;
  SimSettings sim;
  RateSettings rates;
  std::uint32_t glove_actuators = 5;

  // Scenario-specific checks, run before any simulation.  Throws
  // Error(kConfig) listing the inconsistency.
  void validate_for_run() const;
};

ScenarioConfig load_scenario_config(const std::filesystem::path& path);
ScenarioConfig parse_scenario_config(const nlohmann::json& j,
                                     const std::filesystem::path& base_dir = {});

StreamSpec parse_stream(const nlohmann::json& j);
LinkSpec parse_link(const nlohmann::json& j);

}  // namespace telelink
