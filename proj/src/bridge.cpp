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

#include "telelink/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "telelink/config.hpp"
#include "telelink/error.hpp"

namespace telelink {
namespace {

std::string describe(const BridgeRoute& r, std::size_t index) {
  return fmt::format("route {} (A:'{}' {} B:'{}')", index, r.endpoint_a.name,
                     r.direction == Direction::kAToB ? "->" : "<-", r.endpoint_b.name);
}

void validate_routes(const std::vector<BridgeRoute>& routes) {
  std::set<std::pair<BusId, std::string>> sources;
  for (std::size_t i = 0; i < routes.size(); ++i) {
    const auto& r = routes[i];
    if (r.endpoint_a.bus == r.endpoint_b.bus) {
      throw Error(ErrorCode::kConfig, describe(r, i) + ": endpoints on the same bus");
    }
    if (r.endpoint_a.name.empty() || r.endpoint_b.name.empty()) {
      throw Error(ErrorCode::kConfig, describe(r, i) + ": empty endpoint name");
    }
    if (r.decimate_to_hz && !(*r.decimate_to_hz > 0.0 && std::isfinite(*r.decimate_to_hz))) {
      throw Error(ErrorCode::kConfig, describe(r, i) + ": decimate_hz must be > 0");
    }
    if (!sources.emplace(r.source().bus, r.source().name).second) {
      throw Error(ErrorCode::kConfig, describe(r, i) + ": duplicate source endpoint");
    }
  }
}

}  // namespace

void Bus::subscribe(const std::string& topic, Callback callback) {
  std::lock_guard lock(mutex_);
  subscribers_[topic].push_back(std::make_shared<Callback>(std::move(callback)));
}

void Bus::publish(const std::string& topic, BusMessage message) {
  std::vector<std::shared_ptr<Callback>> targets;
  {
    std::lock_guard lock(mutex_);
    auto it = subscribers_.find(topic);
    if (it == subscribers_.end()) return;
    targets = it->second;
  }
  message.origin = id_;
  for (const auto& cb : targets) (*cb)(message);
}

std::vector<BridgeRoute> load_routes(const nlohmann::json& config) {
  const nlohmann::json* list = &config;
  if (config.is_object()) {
    if (!config.contains("routes")) return {};
    list = &config.at("routes");
  }
  if (!list->is_array()) throw Error(ErrorCode::kConfig, "routes must be a list");

  std::vector<BridgeRoute> routes;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& item = (*list)[i];
    const std::string where = fmt::format("route {}", i);
    if (!item.is_object()) throw Error(ErrorCode::kConfig, where + ": expected an object");
    BridgeRoute r;
    try {
      r.endpoint_a = {BusId::kA, item.at("a").get<std::string>()};
      r.endpoint_b = {BusId::kB, item.at("b").get<std::string>()};
      const auto dir = item.value("direction", std::string("a_to_b"));
      if (dir == "a_to_b") {
        r.direction = Direction::kAToB;
      } else if (dir == "b_to_a") {
        r.direction = Direction::kBToA;
      } else {
        throw Error(ErrorCode::kConfig, fmt::format("{}: unknown direction '{}'", where, dir));
      }
      const auto type_name = item.at("type").get<std::string>();
      const auto type = message_type_from_name(type_name);
      if (!type) {
        throw Error(ErrorCode::kConfig,
                    fmt::format("{} (A:'{}'): unsupported message type '{}'", where,
                                r.endpoint_a.name, type_name));
      }
      r.message_type = *type;
      if (item.contains("decimate_hz") && !item.at("decimate_hz").is_null()) {
        r.decimate_to_hz = item.at("decimate_hz").get<double>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, fmt::format("{}: {}", where, e.what()));
    }
    routes.push_back(std::move(r));
  }
  validate_routes(routes);
  return routes;
}

std::vector<BridgeRoute> load_routes_file(const std::filesystem::path& path) {
  return load_routes(read_json_file(path));
}

Bridge::Bridge(std::vector<BridgeRoute> routes, const Clock& clock)
    : routes_(std::move(routes)), clock_(clock) {
  validate_routes(routes_);
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    state_.push_back(std::make_unique<RouteState>());
  }
}

void Bridge::attach(Bus& bus_a, Bus& bus_b) {
  if (bus_a.id() != BusId::kA || bus_b.id() != BusId::kB) {
    throw Error(ErrorCode::kInvalidArgument, "bridge needs bus A then bus B");
  }
  bus_a_ = &bus_a;
  bus_b_ = &bus_b;
  for (std::size_t i = 0; i < routes_.size(); ++i) {
    const auto& src = routes_[i].source();
    bus_for(src.bus)->subscribe(src.name, [this, i](const BusMessage& m) {
      if (m.hops > 0) return;
      relay(i, m, m.stamp);
    });
  }
}

RelayOutcome Bridge::relay(std::size_t route_index, const BusMessage& message,
                           Nanos arrival_time) {
  if (route_index >= routes_.size()) {
    throw Error(ErrorCode::kRouting, fmt::format("no route {}", route_index));
  }
  const Nanos entered = clock_.now();
  const BridgeRoute& route = routes_[route_index];
  RouteState& st = *state_[route_index];

  if (message.type != route.message_type || message.origin != route.source().bus) {
    st.errors.fetch_add(1);
    return RelayOutcome::kError;
  }

  {
    std::lock_guard lock(st.mutex);
    if (route.decimate_to_hz) {
      const Nanos period = from_seconds(1.0 / *route.decimate_to_hz);
      if (st.started && arrival_time - st.last_forward < period) {
        st.suppressed.fetch_add(1);
        return RelayOutcome::kSuppressed;
      }
      st.started = true;
      st.last_forward = arrival_time;
    }

    BusMessage out = message;
    out.hops += 1;
    out.stamp = arrival_time;
    if (Bus* dst = bus_for(route.destination().bus)) {
      dst->publish(route.destination().name, std::move(out));
    }
  }

  const std::int64_t latency = (clock_.now() - entered).count();
  st.relayed.fetch_add(1);
  st.total_latency_ns.fetch_add(latency);
  std::int64_t prev = st.max_latency_ns.load();
  while (latency > prev && !st.max_latency_ns.compare_exchange_weak(prev, latency)) {
  }
  return RelayOutcome::kForwarded;
}

std::vector<RouteStats> Bridge::stats() const {
  std::vector<RouteStats> out;
  out.reserve(state_.size());
  for (const auto& st : state_) {
    RouteStats s;
    s.relayed = st->relayed.load();
    s.suppressed = st->suppressed.load();
    s.errors = st->errors.load();
    s.max_forward_latency = Nanos(st->max_latency_ns.load());
    s.total_forward_latency = Nanos(st->total_latency_ns.load());
    out.push_back(s);
  }
  return out;
}

}  // namespace telelink
