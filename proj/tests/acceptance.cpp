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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>

#include <fmt/format.h>

#include "support.hpp"
#include "telelink/bandwidth.hpp"
#include "telelink/bridge.hpp"
#include "telelink/config.hpp"
#include "telelink/error.hpp"
#include "telelink/ik.hpp"
#include "telelink/locomotion.hpp"
#include "telelink/netem.hpp"
#include "telelink/scenario.hpp"
#include "telelink/trace.hpp"

using namespace telelink;
using namespace std::chrono_literals;
using telelink::testing::Gen;
using telelink::testing::source_dir;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ScenarioConfig config(const std::string& name) {
  return load_scenario_config(source_dir() / "configs" / name);
}

const StreamSpec& stream_named(const ScenarioConfig& c, const std::string& name) {
  for (const auto& s : c.streams) {
    if (s.name == name) return s;
  }
  throw Error(ErrorCode::kConfig, fmt::format("{}: no stream '{}'", c.name, name));
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * target;
}

Outcome bandwidth() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto baseline = config("xprize-baseline.json");
  const auto optimized = config("optimized.json");
  const auto b = budget_report(baseline.streams).in_band_bps;
  const auto p = budget_report(optimized.streams).in_band_bps;
  const auto& glove_before = stream_named(baseline, "gloves");
  const auto& glove_after = stream_named(optimized, "gloves");
  const auto gb = stream_bandwidth(glove_before);
  const auto ga = stream_bandwidth(glove_after);
  const double runtime = seconds_since(t0);
  o.require(within(static_cast<double>(b), 30e6, 0.10), fmt::format("baseline {} bit/s", b));
  o.require(within(static_cast<double>(p), 15.5e6, 0.10), fmt::format("optimized {} bit/s", p));
  o.require(gb == 10'000'000 && glove_before.rate_hz == 100,
            fmt::format("baseline gloves {} bit/s @ {} Hz", gb, glove_before.rate_hz));
  o.require(frame_bytes(glove_after) == 266 && ga == 21'280 && glove_after.rate_hz == 10,
            fmt::format("optimized gloves {} B, {} bit/s", frame_bytes(glove_after), ga));
  o.require(runtime < 1.0, fmt::format("runtime {:.3f} s", runtime));
  if (o.pass) {
    o.detail = fmt::format("baseline {} bit/s, optimized {} bit/s, gloves {} -> {} bit/s, {:.3f} s",
                           b, p, gb, ga, runtime);
  }
  return o;
}

Outcome starlink() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = config("starlink.json");
  const LinkSpec link = *cfg.uplink;

  // (a) batched command stream: analytic and simulated.
  const auto gloves = stream_named(cfg, "gloves");
  const auto analytic = steady_state_latency(link, gloves);
  o.require(analytic.stable, "10 Hz gloves reported unstable");
  o.require(std::abs(to_seconds(analytic.latency) - 0.507) < 1e-3,
            fmt::format("analytic {:.6f} s", to_seconds(analytic.latency)));
  const auto result = run_scenario(cfg, read_trace_file(source_dir() / "traces/reach-and-place.trace"),
                                   cfg.sim.seed);
  double measured_max = -1.0, measured_min = -1.0;
  for (const auto& s : result.report.at("streams")) {
    if (s.at("type") == "wearable") {
      measured_min = s.at("latency").at("min_ms").get<double>() / 1e3;
      measured_max = s.at("latency").at("max_ms").get<double>() / 1e3;
    }
  }
  o.require(measured_min >= 0 && std::abs(measured_min - 0.507) < 1e-3 &&
                std::abs(measured_max - 0.507) < 1e-3,
            fmt::format("simulated wearable latency [{:.6f}, {:.6f}] s", measured_min, measured_max));

  // (b) un-decimated 100 Hz, 12.5 kB stream.
  StreamSpec legacy;
  legacy.name = "gloves_legacy";
  legacy.rate_hz = 100;
  legacy.payload = std::uint64_t{12'500 - 20};
  o.require(!steady_state_latency(link, legacy).stable, "legacy stream reported stable");
  EmulatedLink l(link);
  Nanos worst{0};
  Nanos crossed{-1};
  for (Nanos t{0}; t <= 10s; t += 1ms) {
    if (t.count() % 10'000'000 == 0) l.enqueue_synthetic(frame_bytes(legacy), t);
    l.deliver_ready(t);
    const auto wait = l.stats().max_queue_wait;
    if (wait > worst) worst = wait;
    if (crossed < Nanos{0} && worst > 5s) crossed = t;
  }
  o.require(crossed >= Nanos{0}, fmt::format("max queue delay {:.3f} s in 10 s",
                                             to_seconds(worst)));
  const double runtime = seconds_since(t0);
  o.require(runtime < 5.0, fmt::format("runtime {:.3f} s", runtime));
  if (o.pass) {
    o.detail = fmt::format(
        "analytic {:.6f} s, simulated [{:.6f}, {:.6f}] s; legacy unstable, queue delay {:.3f} s "
        "observed at t={:.3f} s; {:.3f} s",
        to_seconds(analytic.latency), measured_min, measured_max, to_seconds(worst),
        to_seconds(crossed), runtime);
  }
  return o;
}

Outcome codec() {
  Outcome o;
  Gen g(20'000);
  int failures = 0;
  for (int i = 0; i < 10'000; ++i) {
    const auto b = telelink::testing::random_batch(g);
    const auto frame = encode(b, {static_cast<std::uint32_t>(i), g.bits()});
    std::size_t expected = 20;
    for (const auto& h : b.hands) {
      expected += 3 + 4 * h.joint_angles.size() + 8 * h.force_feedback.size();
    }
    if (frame.size() != expected || !bit_equal(decode(frame), b)) ++failures;
  }
  o.require(failures == 0, fmt::format("{} of 10000 failed", failures));
  if (o.pass) o.detail = "10000 randomized batches, 0 failures";
  return o;
}

BridgeRoute route(std::string a, std::string b, std::optional<double> hz = std::nullopt) {
  BridgeRoute r;
  r.endpoint_a = {BusId::kA, std::move(a)};
  r.endpoint_b = {BusId::kB, std::move(b)};
  r.message_type = MessageType::kWearable;
  r.decimate_to_hz = hz;
  return r;
}

BusMessage message(std::vector<std::uint8_t> bytes, Nanos stamp) {
  BusMessage m;
  m.type = MessageType::kWearable;
  m.bytes = std::move(bytes);
  m.stamp = stamp;
  m.origin = BusId::kA;
  return m;
}

Outcome bridge() {
  Outcome o;
  Gen g(1000);
  {
    const Clock clock = Clock::simulated();
    Bus a(BusId::kA), b(BusId::kB);
    Bridge br({route("/in", "out")}, clock);
    br.attach(a, b);
    std::vector<std::vector<std::uint8_t>> got;
    b.subscribe("out", [&](const BusMessage& m) { got.push_back(m.bytes); });
    std::vector<std::vector<std::uint8_t>> sent;
    for (int i = 0; i < 1000; ++i) {
      std::vector<std::uint8_t> bytes(static_cast<std::size_t>(g.integer(0, 600)));
      for (auto& x : bytes) x = static_cast<std::uint8_t>(g.bits());
      sent.push_back(bytes);
      a.publish("/in", message(bytes, i * 1ms));
    }
    o.require(got == sent, "relay not transparent");
  }
  std::size_t windows = 0;
  {
    const Clock clock = Clock::simulated();
    Bus a(BusId::kA), b(BusId::kB);
    Bridge br({route("/in", "out", 10.0)}, clock);
    br.attach(a, b);
    std::vector<std::pair<Nanos, int>> got;
    b.subscribe("out", [&](const BusMessage& m) {
      int v;
      std::memcpy(&v, m.bytes.data(), sizeof v);
      got.emplace_back(m.stamp, v);
    });
    int latest = -1;
    bool fresh = true;
    for (int i = 0; i < 3000; ++i) {
      std::vector<std::uint8_t> bytes(sizeof i);
      std::memcpy(bytes.data(), &i, sizeof i);
      const auto before = got.size();
      a.publish("/in", message(bytes, i * 10ms));
      latest = i;
      if (got.size() != before && got.back().second != latest) fresh = false;
    }
    o.require(fresh, "forwarded value was not the latest arrival");
    for (std::int64_t start = 0; start + 1000 <= 30'000; start += 50) {
      const Nanos lo = start * 1ms, hi = lo + 1s;
      const auto n = std::count_if(got.begin(), got.end(), [&](const auto& e) {
        return e.first >= lo && e.first < hi;
      });
      o.require(n == 10 || n == 11, fmt::format("{} forwards in [{}, +1 s)", n, to_seconds(lo)));
      ++windows;
    }
  }
  std::string latencies;
  {
    const Clock wall = Clock::wall();
    Bus a(BusId::kA), b(BusId::kB);
    const double rates[] = {0.5, 10.0, 100.0};
    std::vector<BridgeRoute> routes = {route("/none", "none_out")};
    for (double f : rates) routes.push_back(route(fmt::format("/r{}", f), fmt::format("o{}", f), f));
    Bridge br(routes, wall);
    br.attach(a, b);
    for (int i = 0; i < 2000; ++i) {
      for (const auto& r : routes) a.publish(r.endpoint_a.name, message({1, 2, 3}, wall.now()));
    }
    const auto stats = br.stats();
    std::vector<double> means;
    for (const auto& s : stats) {
      means.push_back(to_seconds(s.total_forward_latency) / static_cast<double>(s.relayed));
    }
    const double worst = *std::max_element(means.begin(), means.end());
    // Independence: every route's mean stays far below the shortest period (10 ms).
    o.require(worst < 1e-3, fmt::format("mean forwarding latency up to {:.1f} us", worst * 1e6));
    latencies = fmt::format("{:.2f}/{:.2f}/{:.2f}/{:.2f} us", means[0] * 1e6, means[1] * 1e6,
                            means[2] * 1e6, means[3] * 1e6);
  }
  if (o.pass) {
    o.detail = fmt::format(
        "1000 messages bit-exact; 10 or 11 per window over {} windows; mean forwarding latency "
        "(none/0.5/10/100 Hz) {}",
        windows, latencies);
  }
  return o;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Outcome ik() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  Gen g(606);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto chain = telelink::testing::random_chain(g, 6);
    const auto q = telelink::testing::random_q(g, chain);
    const auto poses = chain.forward_kinematics(q);
    const std::size_t link = chain.link_count() - 1;
    const Eigen::Isometry3d near = poses[link] * make_transform(
        so3_exp(g.unit_vector() * g.uniform(0.0, 2.5)),
        Eigen::Vector3d(g.uniform(-0.3, 0.3), g.uniform(-0.3, 0.3), g.uniform(-0.3, 0.3)));
    for (const IkTask& task : {IkTask{link, 1.0, CartesianTarget{near, false}},
                               IkTask{link, 1.0, GravityTarget{g.unit_vector()}}}) {
      const Eigen::MatrixXd analytic = task_jacobian(chain, poses, task);
      Eigen::MatrixXd numeric(analytic.rows(), analytic.cols());
      for (Eigen::Index j = 0; j < q.size(); ++j) {
        Eigen::VectorXd qp = q, qm = q;
        qp[j] += 1e-6;
        qm[j] -= 1e-6;
        numeric.col(j) = (task_residual(chain, qp, task) - task_residual(chain, qm, task)) / 2e-6;
      }
      worst_rel = std::max(worst_rel, (analytic - numeric).norm() / std::max(1.0, numeric.norm()));
    }
  }
  o.require(worst_rel < 1e-4, fmt::format("Jacobian relative error {:.2e}", worst_rel));

  const auto planar = telelink::testing::planar_chain({1.0, 1.0});
  const auto tip = *planar.link_index("tip");
  double worst_reach = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = g.uniform(0.3, 1.9), a = g.uniform(-kPi, kPi);
    const Eigen::Vector3d target(r * std::cos(a), r * std::sin(a), 0.0);
    CartesianTarget c{make_transform(Eigen::Matrix3d::Identity(), target), true};
    const auto res = solve_ik(planar, {IkTask{tip, 1.0, c}}, vec2(g.uniform(-1, 1), g.uniform(0.3, 2.0)));
    // Closed form: the elbow angle fixes cos(q2); compare the reached points.
    const double c2 = (target.squaredNorm() - 2.0) / 2.0;
    const double q2 = std::acos(c2) * (res.q[1] < 0 ? -1.0 : 1.0);
    const double q1 = std::atan2(target.y(), target.x()) - std::atan2(std::sin(q2), 1 + std::cos(q2));
    const Eigen::Vector3d oracle(std::cos(q1) + std::cos(q1 + q2), std::sin(q1) + std::sin(q1 + q2), 0);
    const Eigen::Vector3d reached = planar.forward_kinematics(res.q)[tip].translation();
    const double elbow = std::abs(std::remainder(res.q[1] - q2, 2 * kPi));
    worst_reach = std::max({worst_reach, (reached - oracle).norm(), (reached - target).norm(),
                            elbow < 1e-5 ? 0.0 : 1.0});
  }
  o.require(worst_reach < 1e-6, fmt::format("2-link error {:.2e} m", worst_reach));

  const KinChain pendulum({{"pivot", Eigen::Isometry3d::Identity(),
                            RevoluteJoint{Eigen::Vector3d(0, -1, 0), {-kPi, kPi}}},
                           {"bob", make_transform(Eigen::Matrix3d::Identity(), {0, 0, -0.5}),
                            std::nullopt}});
  const double theta = 0.6;
  const auto res = solve_ik(
      pendulum, {IkTask{0, 1.0, GravityTarget{Eigen::Vector3d(-std::sin(theta), 0, -std::cos(theta))}}},
      Eigen::VectorXd::Zero(1));
  const double err = std::abs(res.q[0] - theta);
  o.require(err < 1e-6, fmt::format("pendulum error {:.2e} rad", err));
  const double runtime = seconds_since(t0);
  o.require(runtime < 10.0, fmt::format("runtime {:.3f} s", runtime));
  if (o.pass) {
    o.detail = fmt::format(
        "Jacobian rel err {:.2e} over 200 chains; 2-link err {:.2e} m over 100 targets; pendulum "
        "err {:.2e} rad; {:.3f} s",
        worst_rel, worst_reach, err, runtime);
  }
  return o;
}

Outcome locomotion() {
  Outcome o;
  Gen g(10'000);
  const LocomotionParams p;
  auto stance = [&] {
    FeetInWaist f;
    f.left = {0.0, p.stance_width / 2};
    f.right = {0.0, -p.stance_width / 2};
    return f;
  };
  auto in_disc = [&](double r) {
    const double a = g.uniform(-kPi, kPi), rho = r * std::sqrt(g.uniform(0.0, 1.0));
    return Eigen::Vector2d(rho * std::cos(a), rho * std::sin(a));
  };

  int nonzero = 0;
  for (int i = 0; i < 10'000; ++i) {
    auto f = stance();
    f.left += in_disc(p.idle_radius);
    f.right += in_disc(p.idle_radius);
    const double mean = g.uniform(-p.yaw_deadband, p.yaw_deadband), split = g.uniform(-1, 1);
    f.left_yaw = mean + split;
    f.right_yaw = mean - split;
    if (!compute_triplet(f, p).is_zero()) ++nonzero;
  }
  o.require(nonzero == 0, fmt::format("{} in-disc poses produced motion", nonzero));

  double worst_boundary = 0.0;
  const double k = std::max(p.k_linear, p.k_lateral);
  for (int i = 0; i < 2000; ++i) {
    const double a = g.uniform(-kPi, kPi);
    const double excess = g.uniform(0.0, 1e-3 / k);
    auto f = stance();
    (g.coin() ? f.left : f.right) += (p.idle_radius + excess) * Eigen::Vector2d(std::cos(a), std::sin(a));
    const auto t = compute_triplet(f, p);
    worst_boundary = std::max(worst_boundary, std::hypot(t.linear, t.lateral, t.angular));
  }
  o.require(worst_boundary < 1e-3, fmt::format("boundary magnitude {:.2e}", worst_boundary));

  // Differential round trip, bit-for-bit, on the shipped base.
  const DifferentialBase base;
  int inexact = 0, total = 0;
  auto round_trip = [&](VelocityTriplet t) {
    ++total;
    if (!(differential_forward(map_differential(t, base), base) == t)) ++inexact;
  };
  for (VelocityTriplet t : {VelocityTriplet{0, 0, 0}, VelocityTriplet{0.5, 0, 0},
                            VelocityTriplet{0, 1.0, 0}}) {
    round_trip(t);
  }
  const int examples_inexact = inexact;
  for (int i = 0; i < 10'000; ++i) {
    round_trip({g.uniform(-p.v_max, p.v_max), g.uniform(-p.omega_max, p.omega_max), 0.0});
  }
  o.require(inexact == 0, fmt::format("differential round trip inexact for {} of {} inputs "
                                      "({} of 3 examples)",
                                      inexact, total, examples_inexact));

  double worst_step = 0.0;
  {
    UnicycleFootstepPlanner planner({1s, 0.2, 0.5});
    for (int i = 0; i < 300; ++i) planner.push({0.2, 0, 0}, 10ms);
    // Hand integration: 100 steps of 0.2 * 0.01 per second.
    double x = 0.0;
    const double ys[] = {0.1, -0.1, 0.1};
    const auto& s = planner.steps();
    o.require(s.size() == 3, fmt::format("{} steps for 3 s straight", s.size()));
    for (std::size_t n = 0; n < std::min<std::size_t>(s.size(), 3); ++n) {
      for (int i = 0; i < 100; ++i) x += 0.2 * 0.01;
      worst_step = std::max({worst_step, std::abs(s[n].x - x), std::abs(s[n].y - ys[n])});
    }
  }
  {
    UnicycleFootstepPlanner planner({1s, 0.2, 0.5});
    for (int i = 0; i < 4; ++i) planner.push({0, kPi / 4, 0}, 1s);
    const auto& s = planner.steps();
    o.require(s.size() == 4, fmt::format("{} steps for 4 s turning", s.size()));
    for (std::size_t n = 0; n < s.size(); ++n) {
      const double yaw = kPi / 4 * static_cast<double>(n + 1);
      const double side = n % 2 == 0 ? 0.1 : -0.1;
      worst_step = std::max({worst_step, std::abs(s[n].yaw - yaw),
                             std::abs(s[n].x + side * std::sin(yaw)),
                             std::abs(s[n].y - side * std::cos(yaw))});
    }
  }
  o.require(worst_step < 1e-9, fmt::format("footstep error {:.2e}", worst_step));
  if (o.pass) {
    o.detail = fmt::format(
        "10000 idle poses null; boundary |t| <= {:.2e}; {} differential round trips exact; "
        "footstep err {:.2e}",
        worst_boundary, total, worst_step);
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  const auto cfg = config("reach-and-place.json");
  const auto tr = read_trace_file(source_dir() / "traces/reach-and-place.trace");
  const auto a = dump_report(run_scenario(cfg, tr, cfg.sim.seed).report);
  const auto b = dump_report(run_scenario(cfg, tr, cfg.sim.seed).report);
  o.require(a == b, "reach-and-place reports differ");

  const auto cv = run_scenario(config("ideal.json"),
                               read_trace_file(source_dir() / "traces/constant-velocity.trace"), 1);
  double x = 0.0;
  for (int i = 0; i < 5000; ++i) x += static_cast<double>(0.2f) * 1e-3;
  const double err = std::hypot(cv.final_state.base.x - x, cv.final_state.base.y);
  o.require(err < 1e-6, fmt::format("constant velocity off by {:.2e} m", err));
  if (o.pass) {
    o.detail = fmt::format("{} report bytes identical; constant velocity x={:.9f}, err {:.2e} m",
                           a.size(), cv.final_state.base.x, err);
  }
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"bandwidth", bandwidth}, {"starlink", starlink},     {"codec", codec},
      {"bridge", bridge},       {"ik", ik},                 {"locomotion", locomotion},
      {"determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
