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

#include <cmath>
#include <thread>

#include "support.hpp"
#include "telelink/bridge.hpp"
#include "telelink/error.hpp"

using namespace telelink;
using namespace std::chrono_literals;
using nlohmann::json;
using telelink::testing::Gen;

namespace {

BridgeRoute route(std::string a, std::string b, std::optional<double> hz = std::nullopt,
                  Direction dir = Direction::kAToB, MessageType type = MessageType::kWearable) {
  BridgeRoute r;
  r.endpoint_a = {BusId::kA, std::move(a)};
  r.endpoint_b = {BusId::kB, std::move(b)};
  r.direction = dir;
  r.message_type = type;
  r.decimate_to_hz = hz;
  return r;
}

BusMessage message(std::vector<std::uint8_t> bytes, Nanos stamp,
                   MessageType type = MessageType::kWearable, BusId origin = BusId::kA) {
  BusMessage m;
  m.type = type;
  m.bytes = std::move(bytes);
  m.stamp = stamp;
  m.origin = origin;
  return m;
}

ErrorCode load_error(const json& j) {
  try {
    load_routes(j);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kOk;
}

struct Harness {
  Clock clock = Clock::simulated();
  Bus a{BusId::kA};
  Bus b{BusId::kB};
  Bridge bridge;
  std::vector<BusMessage> received;

  explicit Harness(std::vector<BridgeRoute> routes, const std::string& listen = {})
      : bridge(std::move(routes), clock) {
    bridge.attach(a, b);
    if (!listen.empty()) {
      b.subscribe(listen, [this](const BusMessage& m) { received.push_back(m); });
    }
  }
};

}  // namespace

TEST_SUITE("bridge") {

TEST_CASE("load_routes examples") {
  CHECK(load_routes(json::parse(R"({"routes": []})")).empty());
  CHECK(load_routes(json::array()).empty());

  const auto routes = load_routes(json::parse(
      R"([{"a": "/gloves", "b": "joint_states", "direction": "a_to_b", "type": "wearable",
           "decimate_hz": 10}])"));
  REQUIRE(routes.size() == 1);
  CHECK(routes[0].endpoint_a.bus == BusId::kA);
  CHECK(routes[0].endpoint_a.name == "/gloves");
  CHECK(routes[0].endpoint_b.bus == BusId::kB);
  CHECK(routes[0].endpoint_b.name == "joint_states");
  CHECK(routes[0].direction == Direction::kAToB);
  CHECK(routes[0].message_type == MessageType::kWearable);
  REQUIRE(routes[0].decimate_to_hz.has_value());
  CHECK(*routes[0].decimate_to_hz == 10.0);
}

TEST_CASE("load_routes rejects bad routes with a config error naming the route") {
  CHECK(load_error(json::parse(R"([{"a": "/cloud", "b": "pc", "type": "pointcloud"}])")) ==
        ErrorCode::kConfig);
  try {
    load_routes(json::parse(R"([{"a": "/cloud", "b": "pc", "type": "pointcloud"}])"));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("/cloud") != std::string::npos);
    CHECK(std::string(e.what()).find("pointcloud") != std::string::npos);
  }
  CHECK(load_error(json::parse(R"([{"a": "/x", "b": "y", "type": "wearable"},
                                   {"a": "/x", "b": "z", "type": "wearable"}])")) ==
        ErrorCode::kConfig);
  CHECK(load_error(json::parse(R"([{"a": "", "b": "y", "type": "wearable"}])")) ==
        ErrorCode::kConfig);
  CHECK(load_error(json::parse(R"([{"a": "/x", "b": "y", "type": "wearable",
                                    "decimate_hz": 0}])")) == ErrorCode::kConfig);
  CHECK(load_error(json::parse(R"([{"a": "/x", "b": "y", "type": "wearable",
                                    "direction": "sideways"}])")) == ErrorCode::kConfig);
  CHECK(load_error(json::parse(R"([{"a": "/x", "type": "wearable"}])")) == ErrorCode::kConfig);
  CHECK(load_error(json::parse(R"({"routes": 3})")) == ErrorCode::kConfig);
  // Same name in opposite directions uses distinct sources.
  CHECK(load_error(json::parse(R"([{"a": "/x", "b": "y", "type": "wearable"},
                                   {"a": "/x", "b": "y", "type": "wearable",
                                    "direction": "b_to_a"}])")) == ErrorCode::kOk);
}

TEST_CASE("undecimated route forwards bit-exact payloads") {
  Harness h({route("/gloves", "joint_states")}, "joint_states");
  const std::vector<std::uint8_t> payload = {0x54, 0x4C, 0x01, 0x00, 0xFF, 0x80};
  h.a.publish("/gloves", message(payload, 5ms));
  REQUIRE(h.received.size() == 1);
  CHECK(h.received[0].bytes == payload);
  CHECK(h.received[0].origin == BusId::kB);
  CHECK(h.received[0].hops == 1);
}

TEST_CASE("100 Hz arrivals through a 10 Hz decimator forward every 0.1 s, latest value") {
  Harness h({route("/gloves", "joint_states", 10.0)}, "joint_states");
  for (int i = 0; i < 100; ++i) {
    h.a.publish("/gloves", message({static_cast<std::uint8_t>(i)}, i * 10ms));
  }
  REQUIRE(h.received.size() == 10);
  for (std::size_t k = 0; k < h.received.size(); ++k) {
    CHECK(h.received[k].stamp == static_cast<std::int64_t>(k) * 100ms);
    CHECK(h.received[k].bytes[0] == 10 * k);
  }
  const auto s = h.bridge.stats()[0];
  CHECK(s.relayed == 10);
  CHECK(s.suppressed == 90);
  CHECK(s.errors == 0);
}

TEST_CASE("stats start at zero and count type mismatches") {
  Harness h({route("/gloves", "joint_states")});
  const auto fresh = h.bridge.stats()[0];
  CHECK(fresh.relayed == 0);
  CHECK(fresh.suppressed == 0);
  CHECK(fresh.errors == 0);
  CHECK(fresh.max_forward_latency == 0ns);
  for (int i = 0; i < 5; ++i) {
    CHECK(h.bridge.relay(0, message({1}, i * 1ms, MessageType::kVelocityTriplet), i * 1ms) ==
          RelayOutcome::kError);
  }
  CHECK(h.bridge.stats()[0].errors == 5);
  CHECK(h.bridge.stats()[0].relayed == 0);
}

TEST_CASE("wrong-direction message on a one-way route is rejected and counted") {
  Harness h({route("/gloves", "joint_states")});
  CHECK(h.bridge.relay(0, message({1}, 0ns, MessageType::kWearable, BusId::kB), 0ns) ==
        RelayOutcome::kError);
  CHECK(h.bridge.stats()[0].errors == 1);
  CHECK_THROWS_AS(h.bridge.relay(3, message({1}, 0ns), 0ns), Error);
}

TEST_CASE("b_to_a routes relay toward bus A and never echo") {
  Harness h({route("/fb", "haptics", std::nullopt, Direction::kBToA),
             route("/fb_out", "haptics_in")});
  std::vector<BusMessage> on_a;
  h.a.subscribe("/fb", [&](const BusMessage& m) { on_a.push_back(m); });
  h.b.publish("haptics", message({9}, 0ns, MessageType::kWearable, BusId::kB));
  REQUIRE(on_a.size() == 1);
  CHECK(on_a[0].bytes[0] == 9);
  CHECK(h.bridge.stats()[0].relayed == 1);
  CHECK(h.bridge.stats()[1].relayed == 0);
}

TEST_CASE("property: payload transparency over 1000 random messages") {
  Gen g(1000);
  Harness h({route("/in", "out")}, "out");
  std::vector<std::vector<std::uint8_t>> sent;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(g.integer(0, 600)));
    for (auto& b : bytes) b = static_cast<std::uint8_t>(g.bits());
    sent.push_back(bytes);
    h.a.publish("/in", message(bytes, i * 1ms));
  }
  REQUIRE(h.received.size() == sent.size());
  for (std::size_t i = 0; i < sent.size(); ++i) REQUIRE(h.received[i].bytes == sent[i]);
}

TEST_CASE("property: decimation rate bound and freshness") {
  Gen g(4242);
  for (int trial = 0; trial < 50; ++trial) {
    const double f = g.uniform(0.5, 50.0);
    Harness h({route("/in", "out", f)}, "out");
    std::vector<Nanos> arrivals;
    std::int64_t t = g.integer(0, 1'000'000'000);
    for (int i = 0; i < 500; ++i) {
      t += g.coin(0.1) ? g.integer(0, 500'000'000) : g.integer(0, 20'000'000);
      arrivals.emplace_back(t);
      std::vector<std::uint8_t> tag(8);
      std::memcpy(tag.data(), &i, sizeof i);
      h.a.publish("/in", message(tag, Nanos(t)));
      // Freshness: anything forwarded now is the arrival just published.
      if (!h.received.empty() && h.received.back().stamp == Nanos(t)) {
        int got;
        std::memcpy(&got, h.received.back().bytes.data(), sizeof got);
        REQUIRE(got == i);
      }
    }
    const auto& out = h.received;
    for (std::size_t i = 1; i < out.size(); ++i) {
      REQUIRE(out[i].stamp - out[i - 1].stamp >= from_seconds(1.0 / f));
    }
    for (int w = 0; w < 20; ++w) {
      const auto lo = arrivals[static_cast<std::size_t>(g.integer(0, 499))];
      const Nanos len(g.integer(1, 5'000'000'000));
      const auto n = std::count_if(out.begin(), out.end(), [&](const BusMessage& m) {
        return m.stamp >= lo && m.stamp < lo + len;
      });
      REQUIRE(n <= static_cast<long>(std::ceil(to_seconds(len) * f)) + 1);
    }
  }
}

TEST_CASE("relay forwarding latency does not scale with the decimation period") {
  const Clock wall = Clock::wall();
  Bus a(BusId::kA), b(BusId::kB);
  Bridge bridge({route("/slow", "slow_out", 0.5), route("/fast", "fast_out")}, wall);
  bridge.attach(a, b);
  for (int i = 0; i < 200; ++i) {
    a.publish("/slow", message({1}, wall.now()));
    a.publish("/fast", message({1}, wall.now()));
  }
  const auto s = bridge.stats();
  CHECK(s[0].relayed >= 1);
  CHECK(s[0].max_forward_latency < 50ms);
  CHECK(s[1].max_forward_latency < 50ms);
}

TEST_CASE("concurrent relays on distinct routes keep exact counts") {
  const Clock wall = Clock::wall();
  std::vector<BridgeRoute> routes;
  for (int r = 0; r < 4; ++r) routes.push_back(route("/in" + std::to_string(r), "out"));
  Bridge bridge(routes, wall);
  Bus a(BusId::kA), b(BusId::kB);
  bridge.attach(a, b);
  std::atomic<int> delivered{0};
  b.subscribe("out", [&](const BusMessage&) { delivered.fetch_add(1); });
  std::vector<std::thread> threads;
  for (int r = 0; r < 4; ++r) {
    threads.emplace_back([&, r] {
      for (int i = 0; i < 2000; ++i) a.publish("/in" + std::to_string(r), message({1}, 0ns));
    });
  }
  for (auto& t : threads) t.join();
  CHECK(delivered.load() == 8000);
  for (const auto& s : bridge.stats()) CHECK(s.relayed == 2000);
}

TEST_CASE("bridge rejects inconsistent routes and misordered buses") {
  const Clock c = Clock::simulated();
  auto same_bus = route("/x", "y");
  same_bus.endpoint_b.bus = BusId::kA;
  CHECK_THROWS_AS(Bridge({same_bus}, c), Error);
  Bridge ok({route("/x", "y")}, c);
  Bus a(BusId::kA), b(BusId::kB);
  CHECK_THROWS_AS(ok.attach(b, a), Error);
}

}  // TEST_SUITE
