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

#include <doctest.h>

#include "support.hpp"
#include "telelink/config.hpp"
#include "telelink/error.hpp"
#include "telelink/scenario.hpp"
#include "telelink/trace.hpp"

using namespace telelink;
using namespace std::chrono_literals;
using telelink::testing::source_dir;

namespace {

ScenarioConfig config(const std::string& name) {
  return load_scenario_config(source_dir() / "configs" / name);
}

OperatorTrace trace(const std::string& name) {
  return read_trace_file(source_dir() / "traces" / name);
}

// Explicit Euler oracle: the command crosses the wire as float32 and is held
// for `steps` integration steps of `dt` seconds.
double euler_distance(float v, int steps, double dt) {
  double x = 0.0;
  for (int i = 0; i < steps; ++i) x += static_cast<double>(v) * dt;
  return x;
}

const nlohmann::json& stream_entry(const nlohmann::json& report, const std::string& type) {
  for (const auto& s : report.at("streams")) {
    if (s.at("type") == type) return s;
  }
  FAIL("stream missing from report: " << type);
  static const nlohmann::json none;
  return none;
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("idle operator: base stays at the origin and every command is zero") {
  const auto cfg = config("starlink.json");
  const auto idle = trace("idle.trace");
  ScenarioEngine engine(cfg, 1);
  std::size_t next = 0;
  while (engine.now() < idle.duration() + cfg.sim.settle) {
    while (next < idle.samples.size() && idle.samples[next].t <= engine.now()) {
      engine.set_input(idle.samples[next++]);
    }
    engine.step();
    REQUIRE(engine.state().command.is_zero());
  }
  const auto s = engine.state();
  CHECK(s.base.x == 0.0);
  CHECK(s.base.y == 0.0);
  CHECK(s.base.theta == 0.0);
  const auto result = run_scenario(cfg, idle, 1);
  for (const auto& row : result.trajectory) {
    CHECK(row[1] == 0.0);
    CHECK(row[2] == 0.0);
    CHECK(row[3] == 0.0);
  }
}

TEST_CASE("constant 0.2 m/s for 5 s through an ideal link ends at x = 1.0") {
  const auto result = run_scenario(config("ideal.json"), trace("constant-velocity.trace"), 1);
  const double oracle = euler_distance(0.2f, 5000, 1e-3);
  CHECK(std::abs(result.final_state.base.x - oracle) < 1e-6);
  CHECK(std::abs(result.final_state.base.x - 1.0) < 1e-6);
  CHECK(result.final_state.base.y == 0.0);
  CHECK(result.final_state.base.theta == 0.0);
}

TEST_CASE("same trace over the 300 kbit/s, 500 ms link: same pose, analytic latency") {
  const auto cfg = config("starlink.json");
  const auto result = run_scenario(cfg, trace("constant-velocity.trace"), 1);
  CHECK(std::abs(result.final_state.base.x - euler_distance(0.2f, 5000, 1e-3)) < 1e-6);

  const auto& r = result.report;
  const double analytic_gloves = r.at("analytic_latency").at("gloves").at("latency_s");
  CHECK(analytic_gloves == doctest::Approx(0.5 + 266.0 * 8 / 300'000).epsilon(1e-9));
  const auto& gloves = stream_entry(r, "wearable");
  CHECK(std::abs(gloves.at("latency").at("p50_ms").get<double>() - analytic_gloves * 1e3) < 1.0);
  CHECK(std::abs(gloves.at("latency").at("max_ms").get<double>() - analytic_gloves * 1e3) < 1.0);

  // The three 10 Hz streams leave on the same tick in this order, so each
  // waits behind the frames queued ahead of it.
  const double analytic_triplet = r.at("analytic_latency").at("locomotion_triplet").at("latency_s");
  CHECK(analytic_triplet == doctest::Approx(0.5 + 32.0 * 8 / 300'000).epsilon(1e-9));
  const auto& triplet = stream_entry(r, "velocity_triplet");
  CHECK(triplet.at("latency").at("p50_ms").get<double>() ==
        doctest::Approx((0.5 + (266.0 + 32.0) * 8 / 300'000) * 1e3).epsilon(1e-6));
  const auto& refs = stream_entry(r, "joint_references");
  CHECK(refs.at("latency").at("max_ms").get<double>() ==
        doctest::Approx((0.5 + (266.0 + 32.0 + 94.0) * 8 / 300'000) * 1e3).epsilon(1e-6));

  // Motion starts one command latency after the operator steps forward.
  for (const auto& row : result.trajectory) {
    if (row[0] <= 0.5) CHECK(row[1] == 0.0);
  }
  CHECK(r.at("uplink").at("dropped_queue_full") == 0);
}

TEST_CASE("reach-and-place hits every waypoint") {
  const auto result = run_scenario(config("reach-and-place.json"), trace("reach-and-place.trace"), 1);
  const auto& r = result.report;
  CHECK(r.at("success") == true);
  REQUIRE(r.at("waypoints").size() == 3);
  for (const auto& w : r.at("waypoints")) CHECK(w.at("reached") == true);
  CHECK(r.at("ik").at("converged") == r.at("ik").at("solves"));
  CHECK(r.at("hands").at("clamped") == 0);
  CHECK(r.at("decode_errors") == 0);
}

TEST_CASE("same seed, byte-identical reports") {
  const auto cfg = config("reach-and-place.json");
  const auto t = trace("reach-and-place.trace");
  const auto a = dump_report(run_scenario(cfg, t, 42).report);
  const auto b = dump_report(run_scenario(cfg, t, 42).report);
  CHECK(a == b);
  CHECK(a.size() > 1000);
}

TEST_CASE("seeded loss and jitter stay reproducible and change with the seed") {
  auto cfg = config("starlink.json");
  cfg.uplink->loss_prob = 0.1;
  cfg.uplink->jitter = 30ms;
  const auto t = trace("constant-velocity.trace");
  const auto a = dump_report(run_scenario(cfg, t, 5).report);
  CHECK(a == dump_report(run_scenario(cfg, t, 5).report));
  CHECK(a != dump_report(run_scenario(cfg, t, 6).report));
}

TEST_CASE("report telemetry honors link conservation") {
  const auto r = run_scenario(config("starlink.json"), trace("constant-velocity.trace"), 1).report;
  for (const char* side : {"uplink", "downlink"}) {
    const auto& l = r.at(side);
    CHECK(l.at("offered").get<std::uint64_t>() ==
          l.at("delivered").get<std::uint64_t>() + l.at("dropped_queue_full").get<std::uint64_t>() +
              l.at("dropped_loss").get<std::uint64_t>() + l.at("in_flight").get<std::uint64_t>());
  }
}

TEST_CASE("inconsistent configs fail before simulation; empty traces are rejected") {
  auto cfg = config("starlink.json");
  cfg.routes.clear();
  try {
    ScenarioEngine engine(cfg, 1);
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
  try {
    run_scenario(config("starlink.json"), OperatorTrace{}, 1);
    FAIL("expected an invalid-argument error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
  }
}

TEST_CASE("pings come back after both link legs") {
  ScenarioEngine engine(config("starlink.json"), 1);
  engine.send_ping(77);
  int steps = 0;
  std::vector<std::uint64_t> pongs;
  while (pongs.empty() && steps < 5000) {
    engine.step();
    ++steps;
    pongs = engine.take_pongs();
  }
  REQUIRE(pongs == std::vector<std::uint64_t>{77});
  // 2 x (500 ms + 28 B at 300 kbit/s), on a 1 ms grid.
  CHECK(steps >= 1000);
  CHECK(steps <= 1003);
}

TEST_CASE("lateral commands are rejected by a differential base") {
  auto cfg = config("ideal.json");
  OperatorTrace t;
  OperatorSample s;
  s.left_y += 0.3;  // well past the disc, sideways
  t.samples.push_back(s);
  s.t = 1s;
  t.samples.push_back(s);
  const auto r = run_scenario(cfg, t, 1);
  CHECK(r.report.at("locomotion").at("rejected_commands").get<std::uint64_t>() > 0);
  CHECK(r.final_state.base.y == 0.0);
}

}  // TEST_SUITE
