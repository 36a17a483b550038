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

#include "telelink/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "telelink/error.hpp"
#include "telelink/hands.hpp"
#include "telelink/so3.hpp"
#include "telelink/wire.hpp"

namespace telelink {
namespace {

ScenarioConfig validated(ScenarioConfig config) {
  config.validate_for_run();
  return config;
}

LinkSpec seeded(LinkSpec spec, std::uint64_t seed) {
  spec.seed += seed;
  return spec;
}

Nanos period(std::uint32_t hz) { return Nanos(1'000'000'000 / hz); }

bool on_period(Nanos t, Nanos p) { return t.count() % p.count() == 0; }

double ms(Nanos t) { return static_cast<double>(t.count()) * 1e-6; }

nlohmann::json latency_summary(std::vector<Nanos> v) {
  nlohmann::json j;
  j["count"] = v.size();
  if (v.empty()) return j;
  std::sort(v.begin(), v.end());
  auto pct = [&](double p) {
    const auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size()))) - 1;
    return ms(v[std::min(idx, v.size() - 1)]);
  };
  j["min_ms"] = ms(v.front());
  j["p50_ms"] = pct(0.50);
  j["p95_ms"] = pct(0.95);
  j["p99_ms"] = pct(0.99);
  j["max_ms"] = ms(v.back());
  return j;
}

nlohmann::json link_json(const LinkStats& s) {
  return {{"offered", s.offered},
          {"delivered", s.delivered},
          {"dropped_queue_full", s.dropped_queue_full},
          {"dropped_loss", s.dropped_loss},
          {"in_flight", s.in_flight},
          {"max_queue_bytes", s.max_bytes_in_queue},
          {"max_queue_wait_ms", ms(s.max_queue_wait)},
          {"delivered_bytes", s.delivered_bytes}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

ScenarioEngine::ScenarioEngine(ScenarioConfig config, std::uint64_t seed)
    : config_(validated(std::move(config))),
      seed_(seed),
      clock_(Clock::simulated()),
      bridge_(config_.routes, clock_),
      uplink_(seeded(*config_.uplink, seed)),
      downlink_(seeded(*config_.downlink, seed)),
      glove_period_(period(config_.rates.glove_hz)),
      locomotion_period_(period(config_.rates.locomotion_hz)),
      ik_period_(period(config_.rates.ik_hz)),
      ik_(*config_.arm, config_.arm_home, config_.ik) {
  bridge_.attach(bus_a_, bus_b_);
  std::set<std::string> egress_topics;
  for (const auto& r : config_.routes) {
    if (r.direction == Direction::kAToB) egress_topics.insert(r.endpoint_b.name);
  }
  for (const auto& topic : egress_topics) {
    bus_b_.subscribe(topic, [this](const BusMessage& m) { egress(m); });
  }

  input_ = default_input();
  robot_.arm_q = config_.arm_home;
  const auto& law = config_.hand->law;
  const Eigen::VectorXd open = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(law.drive_joints()));
  robot_.left_hand_q = expand(law, open);
  robot_.right_hand_q = robot_.left_hand_q;
  if (config_.robot->base_kind == BaseKind::kBiped) planner_.emplace(config_.footsteps);
  waypoints_.resize(config_.waypoints.size());
}

OperatorSample ScenarioEngine::default_input() const {
  OperatorSample s;
  s.left_y = 0.5 * config_.locomotion.stance_width;
  s.right_y = -0.5 * config_.locomotion.stance_width;
  return s;
}

void ScenarioEngine::set_input(const OperatorSample& sample) { input_ = sample; }

Eigen::VectorXd ScenarioEngine::glove_for(HandId hand) const {
  const std::size_t g = config_.hand->glove_joints;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
  const auto& src = input_.glove;
  std::size_t offset = 0;
  if (src.size() == 2 * g) {
    offset = hand == HandId::kRight ? g : 0;
  } else if (src.size() != g) {
    return out;
  }
  for (std::size_t i = 0; i < g; ++i) out[static_cast<Eigen::Index>(i)] = src[offset + i];
  return out;
}

void ScenarioEngine::publish_gloves(Nanos t) {
  WearableBatch batch;
  for (HandId id : {HandId::kLeft, HandId::kRight}) {
    HandFrame hand;
    hand.hand_id = id;
    const Eigen::VectorXd g = glove_for(id);
    hand.joint_angles.assign(g.data(), g.data() + g.size());
    hand.force_feedback.assign(config_.glove_actuators, 0.0f);
    hand.vibro_amplitude.assign(config_.glove_actuators, 0.0f);
    batch.hands.push_back(std::move(hand));
  }
  BusMessage m;
  m.type = MessageType::kWearable;
  m.bytes = encode(batch, {seq_gloves_++, static_cast<std::uint64_t>(t.count())});
  m.stamp = t;
  bus_a_.publish(config_.topics.gloves, std::move(m));
}

void ScenarioEngine::publish_triplet(Nanos t) {
  const VelocityTriplet v = compute_triplet(input_.pose(), config_.locomotion);
  BusMessage m;
  m.type = MessageType::kVelocityTriplet;
  m.bytes = encode_triplet({static_cast<float>(v.linear), static_cast<float>(v.angular),
                            static_cast<float>(v.lateral)},
                           {seq_triplet_++, static_cast<std::uint64_t>(t.count())});
  m.stamp = t;
  bus_a_.publish(config_.topics.triplet, std::move(m));
}

void ScenarioEngine::publish_references(Nanos t) {
  const KinChain& chain = ik_.chain();
  const std::size_t tool = *chain.link_index(config_.hand_tracker_link);
  const Eigen::Isometry3d tracker =
      make_transform(Eigen::Matrix3d::Identity(), input_.hand);
  if (!calibration_) {
    const auto poses = chain.forward_kinematics(ik_.q());
    calibration_ = FrameCalibration::calibrate(tracker, poses[tool]);
  }

  std::vector<IkTask> tasks;
  IkTask reach;
  reach.link = tool;
  reach.weight = config_.cartesian_weight;
  reach.target = CartesianTarget{calibration_->apply(tracker), true};
  tasks.push_back(reach);
  if (!config_.imu_link.empty() && input_.has_imu()) {
    IkTask g;
    g.link = *chain.link_index(config_.imu_link);
    g.weight = config_.gravity_weight;
    g.target = GravityTarget{input_.imu_gravity.normalized()};
    tasks.push_back(g);
  }

  const IkResult r = ik_.solve(tasks);
  if (r.converged) ++ik_converged_;
  ik_history_.push_back({to_seconds(t), r.residual_norm, static_cast<double>(r.iterations),
                         r.converged ? 1.0 : 0.0});

  const JointReferences refs = differentiator_.push(r.q, to_seconds(t));
  BusMessage m;
  m.type = MessageType::kJointReferences;
  m.bytes = encode_joint_references(refs, {seq_refs_++, static_cast<std::uint64_t>(t.count())});
  m.stamp = t;
  bus_a_.publish(config_.topics.references, std::move(m));
}

void ScenarioEngine::egress(const BusMessage& message) {
  auto& counters = streams_[message.type];
  ++counters.offered;
  counters.bytes += message.bytes.size();
  const auto result = uplink_.enqueue(message.bytes, clock_.now());
  if (result.status == EnqueueStatus::kAccepted) ++counters.accepted;
}

void ScenarioEngine::send_ping(std::uint64_t token) {
  const Nanos t = clock_.now();
  auto frame = encode_ping(MessageType::kPing, token,
                           {seq_ping_++, static_cast<std::uint64_t>(t.count())});
  auto& counters = streams_[MessageType::kPing];
  ++counters.offered;
  counters.bytes += frame.size();
  if (uplink_.enqueue(std::move(frame), t).status == EnqueueStatus::kAccepted) {
    ++counters.accepted;
  }
}

std::vector<std::uint64_t> ScenarioEngine::take_pongs() {
  std::vector<std::uint64_t> out;
  out.swap(pongs_);
  return out;
}

void ScenarioEngine::robot_receive(const Delivery& d) {
  try {
    const FrameView view = parse_frame(d.frame);
    auto& counters = streams_[view.type];
    ++counters.delivered;
    counters.latencies.push_back(d.latency());

    switch (view.type) {
      case MessageType::kWearable: {
        const WearableBatch batch = decode(d.frame);
        const auto& hand = *config_.hand;
        for (const auto& frame : batch.hands) {
          Eigen::VectorXd glove(static_cast<Eigen::Index>(frame.joint_angles.size()));
          for (std::size_t i = 0; i < frame.joint_angles.size(); ++i) {
            glove[static_cast<Eigen::Index>(i)] = frame.joint_angles[i];
          }
          ClampCounter clamps;
          const Eigen::VectorXd drive = retarget_glove(hand.law, glove, hand.mapping, &clamps);
          hand_clamps_ += clamps.clamped;
          auto& target = frame.hand_id == HandId::kLeft ? robot_.left_hand_q : robot_.right_hand_q;
          target = expand(hand.law, drive);
        }
        break;
      }
      case MessageType::kVelocityTriplet: {
        const TripletMessage t = decode_triplet(d.frame);
        VelocityTriplet cmd{t.linear, t.angular, t.lateral};
        if (config_.robot->base_kind == BaseKind::kDifferential &&
            std::abs(cmd.lateral) > config_.differential.lateral_epsilon) {
          ++rejected_commands_;
          cmd = {};
        }
        robot_.command = cmd;
        break;
      }
      case MessageType::kJointReferences: {
        const JointReferences refs = decode_joint_references(d.frame);
        if (refs.position.size() != static_cast<std::size_t>(robot_.arm_q.size())) {
          ++decode_errors_;
          break;
        }
        Eigen::VectorXd q(robot_.arm_q.size());
        for (std::size_t i = 0; i < refs.position.size(); ++i) {
          q[static_cast<Eigen::Index>(i)] = refs.position[i];
        }
        robot_.arm_q = config_.arm->clamp(q);
        break;
      }
      case MessageType::kPing: {
        const std::uint64_t token = decode_ping(d.frame);
        downlink_.enqueue(encode_ping(MessageType::kPong, token,
                                      {view.header.sequence,
                                       static_cast<std::uint64_t>(clock_.now().count())}),
                          clock_.now());
        break;
      }
      case MessageType::kPong:
        ++decode_errors_;
        break;
    }
  } catch (const Error&) {
    ++decode_errors_;
  }
}

void ScenarioEngine::operator_receive(const Delivery& d) {
  try {
    const FrameView view = parse_frame(d.frame);
    if (view.type == MessageType::kPong) pongs_.push_back(decode_ping(d.frame));
  } catch (const Error&) {
    ++decode_errors_;
  }
}

void ScenarioEngine::integrate(Nanos dt) {
  const double h = to_seconds(dt);
  auto& base = robot_.base;
  switch (config_.robot->base_kind) {
    case BaseKind::kDifferential: {
      const WheelSpeeds w = map_differential(robot_.command, config_.differential);
      const VelocityTriplet v = differential_forward(w, config_.differential);
      base.x += v.linear * std::cos(base.theta) * h;
      base.y += v.linear * std::sin(base.theta) * h;
      base.theta += v.angular * h;
      break;
    }
    case BaseKind::kOmni: {
      const VelocityTriplet v = map_omni(robot_.command, config_.locomotion);
      const double c = std::cos(base.theta);
      const double s = std::sin(base.theta);
      base.x += (v.linear * c - v.lateral * s) * h;
      base.y += (v.linear * s + v.lateral * c) * h;
      base.theta += v.angular * h;
      break;
    }
    case BaseKind::kBiped:
      planner_->push(robot_.command, dt);
      base = {planner_->x(), planner_->y(), planner_->yaw()};
      break;
  }
}

void ScenarioEngine::check_waypoints(Nanos t) {
  if (waypoints_.empty()) return;
  const std::size_t tool = *config_.arm->link_index(config_.hand_tracker_link);
  const Eigen::Vector3d ee = config_.arm->forward_kinematics(robot_.arm_q)[tool].translation();
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const double dist = (ee - config_.waypoints[i].position).norm();
    waypoints_[i].min_distance = std::min(waypoints_[i].min_distance, dist);
  }
  // Waypoints must be visited in order.
  while (next_waypoint_ < waypoints_.size()) {
    const double dist = (ee - config_.waypoints[next_waypoint_].position).norm();
    if (dist > config_.sim.waypoint_tolerance) break;
    waypoints_[next_waypoint_].reached = true;
    waypoints_[next_waypoint_].reached_at = t;
    ++next_waypoint_;
  }
}

void ScenarioEngine::step() {
  const Nanos t = clock_.now();

  if (on_period(t, glove_period_)) publish_gloves(t);
  if (on_period(t, locomotion_period_)) publish_triplet(t);
  if (on_period(t, ik_period_)) publish_references(t);

  for (const auto& d : uplink_.deliver_ready(t)) robot_receive(d);
  for (const auto& d : downlink_.deliver_ready(t)) operator_receive(d);

  if (on_period(t, config_.sim.trajectory_sample_period)) {
    trajectory_.push_back({to_seconds(t), robot_.base.x, robot_.base.y, robot_.base.theta});
  }
  check_waypoints(t);
  integrate(config_.sim.step);
  clock_.advance(config_.sim.step);
  robot_.t = clock_.now();
}

RobotState ScenarioEngine::state() const { return robot_; }

nlohmann::json ScenarioEngine::report() const {
  using nlohmann::json;
  json r;
  const Nanos t = clock_.now();
  r["scenario"] = config_.name;
  r["seed"] = seed_;
  r["duration_s"] = to_seconds(t);
  r["step_ms"] = ms(config_.sim.step);

  json streams = json::array();
  for (const auto& [type, c] : streams_) {
    streams.push_back({{"type", std::string(message_type_name(type))},
                       {"offered", c.offered},
                       {"accepted", c.accepted},
                       {"delivered", c.delivered},
                       {"bytes", c.bytes},
                       {"measured_bps", t.count() > 0 ? static_cast<double>(c.bytes) * 8.0 /
                                                            to_seconds(t)
                                                      : 0.0},
                       {"latency", latency_summary(c.latencies)}});
  }
  r["streams"] = streams;

  json analytic = json::object();
  for (const auto& s : config_.streams) {
    if (s.out_of_band) continue;
    const SteadyState ss = steady_state_latency(*config_.uplink, s);
    analytic[s.name] = ss.stable ? json{{"stable", true}, {"latency_s", to_seconds(ss.latency)}}
                                 : json{{"stable", false}};
  }
  r["analytic_latency"] = analytic;

  r["uplink"] = link_json(uplink_.stats());
  r["downlink"] = link_json(downlink_.stats());

  json routes = json::array();
  const auto stats = bridge_.stats();
  for (std::size_t i = 0; i < stats.size(); ++i) {
    const auto& route = bridge_.routes()[i];
    routes.push_back({{"a", route.endpoint_a.name},
                      {"b", route.endpoint_b.name},
                      {"direction", route.direction == Direction::kAToB ? "a_to_b" : "b_to_a"},
                      {"relayed", stats[i].relayed},
                      {"suppressed", stats[i].suppressed},
                      {"errors", stats[i].errors}});
  }
  r["bridge"] = routes;

  double max_residual = 0.0;
  json history = json::array();
  for (const auto& h : ik_history_) {
    max_residual = std::max(max_residual, h[1]);
    history.push_back({h[0], h[1], static_cast<int>(h[2])});
  }
  r["ik"] = {{"solves", ik_history_.size()},
             {"converged", ik_converged_},
             {"max_residual", max_residual},
             {"history", history}};

  r["hands"] = {{"clamped", hand_clamps_},
                {"left_q", to_vector(robot_.left_hand_q)},
                {"right_q", to_vector(robot_.right_hand_q)}};
  r["locomotion"] = {{"rejected_commands", rejected_commands_},
                     {"final_command",
                      {robot_.command.linear, robot_.command.angular, robot_.command.lateral}}};
  if (planner_) {
    json steps = json::array();
    for (const auto& s : planner_->steps()) {
      steps.push_back({{"side", s.side == FootSide::kLeft ? "left" : "right"},
                       {"t_s", to_seconds(s.time)},
                       {"pose", {s.x, s.y, s.yaw}}});
    }
    r["footsteps"] = steps;
  }
  r["decode_errors"] = decode_errors_;

  json traj = json::array();
  for (const auto& p : trajectory_) traj.push_back({p[0], p[1], p[2], p[3]});
  r["base_trajectory"] = traj;
  r["final"] = {{"base", {robot_.base.x, robot_.base.y, robot_.base.theta}},
                {"arm_q", to_vector(robot_.arm_q)}};

  json wps = json::array();
  bool all = true;
  for (std::size_t i = 0; i < waypoints_.size(); ++i) {
    const auto& w = waypoints_[i];
    all = all && w.reached;
    json item = {{"name", config_.waypoints[i].name},
                 {"reached", w.reached},
                 {"min_distance_m", w.min_distance}};
    if (w.reached) item["t_s"] = to_seconds(w.reached_at);
    wps.push_back(item);
  }
  r["waypoints"] = wps;
  r["success"] = all;
  r["waypoint_tolerance_m"] = config_.sim.waypoint_tolerance;
  return r;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const OperatorTrace& trace,
                            std::uint64_t seed) {
  if (trace.samples.empty()) throw Error(ErrorCode::kInvalidArgument, "trace is empty");
  trace.validate();
  ScenarioEngine engine(config, seed);
  const Nanos end = trace.duration() + config.sim.settle;
  std::size_t next = 0;
  while (engine.now() < end) {
    while (next < trace.samples.size() && trace.samples[next].t <= engine.now()) {
      engine.set_input(trace.samples[next]);
      ++next;
    }
    engine.step();
  }
  ScenarioResult out;
  out.report = engine.report();
  out.report["trace_samples"] = trace.samples.size();
  out.final_state = engine.state();
  out.trajectory = engine.trajectory();
  return out;
}

std::string dump_report(const nlohmann::json& report) { return report.dump(2) + "\n"; }

}  // namespace telelink
