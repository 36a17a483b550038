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

#include "telelink/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {
namespace {

using nlohmann::json;

Eigen::Vector3d vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: expected [x, y, z]", what));
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::uint32_t integer_rate(const json& j, const std::string& where) {
  const double v = j.get<double>();
  if (!(v >= 0.0) || std::floor(v) != v || v > 1e9) {
    throw Error(ErrorCode::kConfig,
                fmt::format("{}: rate_hz must be a non-negative integer, got {}", where, v));
  }
  return static_cast<std::uint32_t>(v);
}

std::filesystem::path relative_to(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

BaseKind parse_base_kind(const std::string& s) {
  if (s == "differential") return BaseKind::kDifferential;
  if (s == "omni") return BaseKind::kOmni;
  if (s == "biped") return BaseKind::kBiped;
  throw Error(ErrorCode::kConfig, fmt::format("unknown base_kind '{}'", s));
}

Nanos period_of(std::uint32_t hz, const char* what, Nanos step) {
  if (hz == 0) throw Error(ErrorCode::kConfig, fmt::format("rates.{} must be > 0", what));
  const std::int64_t ns = 1'000'000'000;
  if (ns % hz != 0 || (ns / hz) % step.count() != 0) {
    throw Error(ErrorCode::kConfig,
                fmt::format("rates.{} = {} Hz is not an integer multiple of the {} ns step", what,
                            hz, step.count()));
  }
  return Nanos(ns / hz);
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::filesystem::path resolve_config_path(const std::filesystem::path& path) {
  if (std::filesystem::is_regular_file(path)) return path;
  std::filesystem::path with_ext = path;
  with_ext += ".json";
  if (std::filesystem::is_regular_file(with_ext)) return with_ext;
  throw Error(ErrorCode::kNotFound, fmt::format("config '{}' not found", path.string()));
}

void RobotSpec::validate() const {
  if (controllable_joints > total_joints) {
    throw Error(ErrorCode::kConfig,
                fmt::format("robot '{}': {} controllable joints > {} total", name,
                            controllable_joints, total_joints));
  }
  if (hand_drive_joints > hand_joints) {
    throw Error(ErrorCode::kConfig,
                fmt::format("robot '{}': {} hand drive joints > {} hand joints", name,
                            hand_drive_joints, hand_joints));
  }
}

StreamSpec parse_stream(const json& j) {
  StreamSpec s;
  s.name = j.at("name").get<std::string>();
  s.rate_hz = integer_rate(j.at("rate_hz"), "stream '" + s.name + "'");
  const auto& p = j.at("payload_bytes");
  if (p.is_number()) {
    const double v = p.get<double>();
    if (!(v >= 0.0) || std::floor(v) != v) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("stream '{}': payload_bytes must be a non-negative integer", s.name));
    }
    s.payload = static_cast<std::uint64_t>(v);
  } else if (p.is_object()) {
    ComputedPayload c;
    const auto type_name = p.at("computed").get<std::string>();
    const auto type = message_type_from_name(type_name);
    if (!type) {
      throw Error(ErrorCode::kConfig,
                  fmt::format("stream '{}': unknown computed message '{}'", s.name, type_name));
    }
    c.message = *type;
    c.hands = p.value("hands", c.hands);
    c.joints = p.value("joints", c.joints);
    c.actuators = p.value("actuators", c.actuators);
    s.payload = c;
  } else {
    throw Error(ErrorCode::kConfig,
                fmt::format("stream '{}': payload_bytes must be a number or {{\"computed\": ...}}",
                            s.name));
  }
  s.out_of_band = j.value("out_of_band", false);
  s.note = j.value("note", std::string());
  return s;
}

LinkSpec parse_link(const json& j) {
  LinkSpec l;
  const auto& rate = j.at("rate_bps");
  if (rate.is_string()) {
    if (rate.get<std::string>() != "unlimited") {
      throw Error(ErrorCode::kConfig, "link rate_bps must be a number or \"unlimited\"");
    }
    l.rate_bps = kUnlimitedRate;
  } else {
    const double v = rate.get<double>();
    if (!(v > 0.0)) throw Error(ErrorCode::kConfig, "link rate_bps must be > 0");
    l.rate_bps = static_cast<std::uint64_t>(v);
  }
  l.propagation_delay = from_seconds(j.value("propagation_delay_ms", 0.0) * 1e-3);
  l.queue_capacity_bytes = j.value("queue_capacity_bytes", l.queue_capacity_bytes);
  l.loss_prob = j.value("loss_prob", 0.0);
  l.jitter = from_seconds(j.value("jitter_ms", 0.0) * 1e-3);
  l.seed = j.value("seed", l.seed);
  l.validate();
  return l;
}

ScenarioConfig parse_scenario_config(const json& j, const std::filesystem::path& base_dir) {
  ScenarioConfig c;
  try {
    c.name = j.value("name", std::string("scenario"));
    c.description = j.value("description", std::string());
    if (j.contains("streams")) {
      std::set<std::string> names;
      for (const auto& s : j.at("streams")) {
        c.streams.push_back(parse_stream(s));
        if (!names.insert(c.streams.back().name).second) {
          throw Error(ErrorCode::kConfig,
                      fmt::format("duplicate stream name '{}'", c.streams.back().name));
        }
      }
    }
    if (j.contains("baseline")) {
      c.baseline = relative_to(base_dir, j.at("baseline").get<std::string>());
    }
    if (j.contains("link")) c.uplink = parse_link(j.at("link"));
    if (j.contains("downlink")) {
      c.downlink = parse_link(j.at("downlink"));
    } else if (c.uplink) {
      c.downlink = c.uplink;
      c.downlink->seed = c.uplink->seed + 1;
    }
    c.routes = load_routes(j);
    if (j.contains("topics")) {
      const auto& t = j.at("topics");
      c.topics.gloves = t.value("gloves", c.topics.gloves);
      c.topics.triplet = t.value("triplet", c.topics.triplet);
      c.topics.references = t.value("references", c.topics.references);
      c.topics.ping = t.value("ping", c.topics.ping);
    }
    if (j.contains("robot")) {
      const auto& r = j.at("robot");
      RobotSpec spec;
      spec.name = r.value("name", spec.name);
      spec.total_joints = r.value("total_joints", 0u);
      spec.controllable_joints = r.value("controllable_joints", 0u);
      spec.base_kind = parse_base_kind(r.value("base_kind", std::string("differential")));
      spec.hand_joints = r.value("hand_joints", 0u);
      spec.hand_drive_joints = r.value("hand_drive_joints", 0u);
      spec.validate();
      c.robot = spec;
      c.differential.wheel_radius = r.value("wheel_radius", c.differential.wheel_radius);
      c.differential.track = r.value("track", c.differential.track);
      if (!(c.differential.wheel_radius > 0.0 && c.differential.track > 0.0)) {
        throw Error(ErrorCode::kConfig, "wheel_radius and track must be > 0");
      }
    }
    if (j.contains("locomotion")) c.locomotion = load_locomotion_params(j.at("locomotion"));
    if (j.contains("footsteps")) {
      const auto& f = j.at("footsteps");
      c.footsteps.step_period = from_seconds(f.value("step_period_s", 1.0));
      c.footsteps.stance_width = f.value("stance_width", c.footsteps.stance_width);
      c.footsteps.max_step_length = f.value("max_step_length", c.footsteps.max_step_length);
    }
    if (j.contains("hand")) {
      const auto& h = j.at("hand");
      if (h.contains("model")) {
        c.hand = load_hand_model_file(relative_to(base_dir, h.at("model").get<std::string>()));
      } else {
        c.hand = load_hand_model(h);
      }
    }
    c.glove_actuators = j.value("glove_actuators", c.glove_actuators);
    if (j.contains("arm")) {
      const auto& a = j.at("arm");
      const auto& chain = a.at("chain");
      c.arm = chain.is_string()
                  ? load_chain_file(relative_to(base_dir, chain.get<std::string>()))
                  : load_chain(chain);
      if (a.contains("mount")) c.arm_mount = vec3(a.at("mount"), "arm.mount");
      const auto home = a.value("home", std::vector<double>(c.arm->joint_count(), 0.0));
      c.arm_home = Eigen::Map<const Eigen::VectorXd>(home.data(),
                                                     static_cast<Eigen::Index>(home.size()));
      c.hand_tracker_link = a.value("hand_tracker_link", std::string());
      c.imu_link = a.value("imu_link", std::string());
      c.cartesian_weight = a.value("cartesian_weight", 1.0);
      c.gravity_weight = a.value("gravity_weight", 1.0);
    }
    if (j.contains("ik")) {
      const auto& k = j.at("ik");
      c.ik.damping = k.value("damping", c.ik.damping);
      c.ik.tol = k.value("tol", c.ik.tol);
      c.ik.max_iters = k.value("max_iters", c.ik.max_iters);
      c.ik.max_step = k.value("max_step", c.ik.max_step);
    }
    if (j.contains("waypoints")) {
      for (const auto& w : j.at("waypoints")) {
        c.waypoints.push_back(
            {w.value("name", std::string()), vec3(w.at("position"), "waypoint.position")});
      }
    }
    if (j.contains("rates")) {
      const auto& r = j.at("rates");
      c.rates.glove_hz = r.value("glove_hz", c.rates.glove_hz);
      c.rates.locomotion_hz = r.value("locomotion_hz", c.rates.locomotion_hz);
      c.rates.ik_hz = r.value("ik_hz", c.rates.ik_hz);
      c.rates.telemetry_hz = r.value("telemetry_hz", c.rates.telemetry_hz);
    }
    if (j.contains("sim")) {
      const auto& s = j.at("sim");
      c.sim.step = from_seconds(s.value("step_ms", 1.0) * 1e-3);
      c.sim.settle = from_seconds(s.value("settle_s", 2.0));
      c.sim.waypoint_tolerance = s.value("waypoint_tolerance_m", c.sim.waypoint_tolerance);
      c.sim.seed = s.value("seed", c.sim.seed);
      if (c.sim.step <= Nanos{0}) throw Error(ErrorCode::kConfig, "sim.step_ms must be > 0");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, fmt::format("config '{}': {}", c.name, e.what()));
  }
  return c;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  const auto resolved = resolve_config_path(path);
  ScenarioConfig c = parse_scenario_config(read_json_file(resolved), resolved.parent_path());
  c.source = resolved;
  return c;
}

void ScenarioConfig::validate_for_run() const {
  std::vector<std::string> problems;
  if (!uplink) problems.push_back("missing 'link'");
  if (!robot) problems.push_back("missing 'robot'");
  if (!arm) problems.push_back("missing 'arm'");
  if (!hand) problems.push_back("missing 'hand'");

  for (auto [hz, what] : {std::pair{rates.glove_hz, "glove_hz"},
                          std::pair{rates.locomotion_hz, "locomotion_hz"},
                          std::pair{rates.ik_hz, "ik_hz"},
                          std::pair{rates.telemetry_hz, "telemetry_hz"}}) {
    try {
      period_of(hz, what, sim.step);
    } catch (const Error& e) {
      problems.push_back(e.what());
    }
  }

  auto has_source = [&](const std::string& topic) {
    for (const auto& r : routes) {
      if (r.direction == Direction::kAToB && r.endpoint_a.name == topic) return true;
    }
    return false;
  };
  for (const auto* topic : {&topics.gloves, &topics.triplet, &topics.references}) {
    if (!has_source(*topic)) {
      problems.push_back(fmt::format("no a_to_b route carries operator topic '{}'", *topic));
    }
  }

  if (robot && hand) {
    if (robot->hand_joints != hand->law.full_joints() ||
        robot->hand_drive_joints != hand->law.drive_joints()) {
      problems.push_back(fmt::format(
          "robot declares {}/{} hand joints/drives, hand model has {}/{}", robot->hand_joints,
          robot->hand_drive_joints, hand->law.full_joints(), hand->law.drive_joints()));
    }
  }
  if (arm) {
    if (static_cast<std::size_t>(arm_home.size()) != arm->joint_count()) {
      problems.push_back("arm.home size does not match the chain joint count");
    } else if (!arm->within_limits(arm_home)) {
      problems.push_back("arm.home violates joint limits");
    }
    if (!arm->link_index(hand_tracker_link)) {
      problems.push_back(fmt::format("arm.hand_tracker_link '{}' not in chain", hand_tracker_link));
    }
    if (!imu_link.empty() && !arm->link_index(imu_link)) {
      problems.push_back(fmt::format("arm.imu_link '{}' not in chain", imu_link));
    }
    if (!(cartesian_weight > 0.0) || !(gravity_weight > 0.0)) {
      problems.push_back("task weights must be > 0");
    }
  }
  if (uplink && hand && arm) {
    const std::uint64_t wearable =
        kHeaderBytes + 2 * hand_payload_bytes(hand->glove_joints, glove_actuators);
    const std::uint64_t refs = kHeaderBytes + 2 + 12 * arm->joint_count();
    const std::uint64_t largest = std::max(wearable, refs);
    if (uplink->queue_capacity_bytes < largest) {
      problems.push_back(fmt::format("link queue of {} bytes cannot hold a {}-byte frame",
                                     uplink->queue_capacity_bytes, largest));
    }
  }
  if (hand && (hand->glove_joints > 255 || glove_actuators > 255)) {
    problems.push_back("glove joints and actuators must fit the wire format (<= 255)");
  }

  if (!problems.empty()) {
    std::string msg = fmt::format("scenario '{}' is inconsistent:", name);
    for (const auto& p : problems) msg += "\n  - " + p;
    throw Error(ErrorCode::kConfig, msg);
  }
}

}  // namespace telelink
