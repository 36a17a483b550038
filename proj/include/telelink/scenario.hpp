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

// Closed-loop teleoperation pipeline on a simulated clock:
//
//   operator input -> bus A -> bridge (decimation) -> bus B -> uplink
//     -> robot side: hands, base, arm references -> simulated robot
//
// Pings travel the uplink, come back as pongs on the downlink.  Trace
// playback and the live console drive the same engine; only the source of
// OperatorSample differs.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "telelink/bridge.hpp"
#include "telelink/clock.hpp"
#include "telelink/config.hpp"
#include "telelink/ik.hpp"
#include "telelink/locomotion.hpp"
#include "telelink/netem.hpp"
#include "telelink/trace.hpp"

namespace telelink {

struct BasePose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
};

struct RobotState {
  Nanos t{0};
  BasePose base;
  VelocityTriplet command;
  Eigen::VectorXd arm_q;
  Eigen::VectorXd left_hand_q;
  Eigen::VectorXd right_hand_q;
};

class ScenarioEngine {
 public:
  // Throws Error(kConfig) before any simulation if the config is inconsistent.
  ScenarioEngine(ScenarioConfig config, std::uint64_t seed);
  ScenarioEngine(const ScenarioEngine&) = delete;
  ScenarioEngine& operator=(const ScenarioEngine&) = delete;

  const ScenarioConfig& config() const { return config_; }
  Nanos now() const { return clock_.now(); }
  Nanos step_size() const { return config_.sim.step; }

  // Held until replaced.
  void set_input(const OperatorSample& sample);
  const OperatorSample& input() const { return input_; }
  OperatorSample default_input() const;

  // Advances one simulation step.
  void step();

  // Sends a ping frame over the uplink; the token comes back through
  // take_pongs() once the pong has crossed the downlink.
  void send_ping(std::uint64_t token);
  std::vector<std::uint64_t> take_pongs();

  RobotState state() const;
  LinkStats uplink_stats() const { return uplink_.stats(); }
  LinkStats downlink_stats() const { return downlink_.stats(); }
  std::vector<RouteStats> bridge_stats() const { return bridge_.stats(); }
  const std::vector<std::array<double, 4>>& trajectory() const { return trajectory_; }

  // Structured, deterministic summary of everything so far.
  nlohmann::json report() const;

 private:
  struct StreamCounters {
    std::uint64_t offered = 0;
    std::uint64_t accepted = 0;
    std::uint64_t delivered = 0;
    std::uint64_t bytes = 0;
    std::vector<Nanos> latencies;
  };

  struct WaypointProgress {
    bool reached = false;
    Nanos reached_at{0};
    double min_distance = std::numeric_limits<double>::infinity();
  };

  void publish_gloves(Nanos t);
  void publish_triplet(Nanos t);
  void publish_references(Nanos t);
  void egress(const BusMessage& message);
  void robot_receive(const Delivery& d);
  void operator_receive(const Delivery& d);
  void integrate(Nanos dt);
  void check_waypoints(Nanos t);
  Eigen::VectorXd glove_for(HandId hand) const;

  ScenarioConfig config_;
  std::uint64_t seed_;
  Clock clock_;
  Bus bus_a_{BusId::kA};
  Bus bus_b_{BusId::kB};
  Bridge bridge_;
  EmulatedLink uplink_;
  EmulatedLink downlink_;

  Nanos glove_period_, locomotion_period_, ik_period_;

  // Operator side.
  OperatorSample input_;
  IkSession ik_;
  std::optional<FrameCalibration> calibration_;
  ReferenceDifferentiator differentiator_;
  std::uint32_t seq_gloves_ = 0, seq_triplet_ = 0, seq_refs_ = 0, seq_ping_ = 0;
  std::vector<std::uint64_t> pongs_;
  std::vector<std::array<double, 4>> ik_history_;  // t, residual, iterations, converged
  std::uint64_t ik_converged_ = 0;

  // Robot side.
  RobotState robot_;
  std::optional<UnicycleFootstepPlanner> planner_;
  std::uint64_t rejected_commands_ = 0;
  std::uint64_t hand_clamps_ = 0;
  std::uint64_t decode_errors_ = 0;
  std::vector<WaypointProgress> waypoints_;
  std::size_t next_waypoint_ = 0;

  std::map<MessageType, StreamCounters> streams_;
  std::vector<std::array<double, 4>> trajectory_;  // t, x, y, theta
};

struct ScenarioResult {
  nlohmann::json report;
  RobotState final_state;
  std::vector<std::array<double, 4>> trajectory;
};

// Plays the trace (sample-and-hold) and keeps running for sim.settle after
// the last sample.  Throws Error(kInvalidArgument) on an empty trace.
ScenarioResult run_scenario(const ScenarioConfig& config, const OperatorTrace& trace,
                            std::uint64_t seed);

// Canonical text of a report; identical inputs give identical bytes.
std::string dump_report(const nlohmann::json& report);

}  // namespace telelink
