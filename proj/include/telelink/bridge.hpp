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

// Config-driven relay between two in-process pub/sub buses.  Each route
// names one topic on bus A, one on bus B, the direction of travel and the
// message type it carries; optionally it decimates to a lower rate by
// forwarding the newest arrival once per period (keep-latest).

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "telelink/clock.hpp"
#include "telelink/wire.hpp"

namespace telelink {

enum class BusId : std::uint8_t { kA = 0, kB = 1 };

struct BusMessage {
  MessageType type = MessageType::kWearable;
  std::vector<std::uint8_t> bytes;
  BusId origin = BusId::kA;
  Nanos stamp{0};
  // Number of bridges this message has crossed; bridges never re-relay.
  std::uint32_t hops = 0;
};

class Bus {
 public:
  using Callback = std::function<void(const BusMessage&)>;

  explicit Bus(BusId id) : id_(id) {}
  Bus(const Bus&) = delete;
  Bus& operator=(const Bus&) = delete;

  BusId id() const { return id_; }

  void subscribe(const std::string& topic, Callback callback);
  // Invokes subscribers synchronously on the caller's thread; no lock is
  // held while callbacks run.
  void publish(const std::string& topic, BusMessage message);

 private:
  BusId id_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::vector<std::shared_ptr<Callback>>> subscribers_;
};

struct BusEndpoint {
  BusId bus = BusId::kA;
  std::string name;
};

enum class Direction { kAToB, kBToA };

struct BridgeRoute {
  BusEndpoint endpoint_a{BusId::kA, {}};
  BusEndpoint endpoint_b{BusId::kB, {}};
  Direction direction = Direction::kAToB;
  MessageType message_type = MessageType::kWearable;
  std::optional<double> decimate_to_hz;

  const BusEndpoint& source() const {
    return direction == Direction::kAToB ? endpoint_a : endpoint_b;
  }
  const BusEndpoint& destination() const {
    return direction == Direction::kAToB ? endpoint_b : endpoint_a;
  }
};

// Parses and validates a route list ({"routes": [...]} or a bare array).
// Throws Error(kConfig) naming the offending route.
std::vector<BridgeRoute> load_routes(const nlohmann::json& config);
std::vector<BridgeRoute> load_routes_file(const std::filesystem::path& path);

enum class RelayOutcome { kForwarded, kSuppressed, kError };

struct RouteStats {
  std::uint64_t relayed = 0;
  std::uint64_t suppressed = 0;
  std::uint64_t errors = 0;
  Nanos max_forward_latency{0};
  Nanos total_forward_latency{0};
};

class Bridge {
 public:
  // Routes are re-validated.  The clock is used only to time forwarding.
  Bridge(std::vector<BridgeRoute> routes, const Clock& clock);
  Bridge(const Bridge&) = delete;
  Bridge& operator=(const Bridge&) = delete;

  // Subscribes every route to its source bus.  Buses must outlive the bridge.
  void attach(Bus& bus_a, Bus& bus_b);

  // Callback body for one arrival.  Safe to call concurrently for distinct
  // routes; calls on the same route are serialized.
  RelayOutcome relay(std::size_t route_index, const BusMessage& message, Nanos arrival_time);

  const std::vector<BridgeRoute>& routes() const { return routes_; }
  std::vector<RouteStats> stats() const;

 private:
  struct RouteState {
    std::mutex mutex;
    bool started = false;
    Nanos last_forward{0};
    std::atomic<std::uint64_t> relayed{0};
    std::atomic<std::uint64_t> suppressed{0};
    std::atomic<std::uint64_t> errors{0};
    std::atomic<std::int64_t> max_latency_ns{0};
    std::atomic<std::int64_t> total_latency_ns{0};
  };

  Bus* bus_for(BusId id) const { return id == BusId::kA ? bus_a_ : bus_b_; }

  std::vector<BridgeRoute> routes_;
  std::vector<std::unique_ptr<RouteState>> state_;
  const Clock& clock_;
  Bus* bus_a_ = nullptr;
  Bus* bus_b_ = nullptr;
};

}  // namespace telelink
