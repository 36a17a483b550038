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

// Live operator console endpoint.  JSON text messages over a websocket;
// every operator command enters the same ScenarioEngine that trace playback
// uses, so it crosses the emulated link before reaching the robot.
//
// Protocol version 1 (docs/formats.md):
//   client -> server  hello {version}
//                     cmd.feet {pL:[x,y], pR:[x,y], yawL, yawR}   waist frame
//                     cmd.glove {angles:[...]}
//                     ping {t}
//   server -> client  welcome {version, scenario, step_ms, telemetry_hz, ...}
//                     state {t, pose:{x,y,theta}, triplet:[v,w,lat],
//                            command:[v,w,lat], q:[...]}
//                     stats {t, bps, latency_ms, queue_bytes, drops}
//                     pong {t}   (t echoed once the ping made the round trip)
//
// Violations close the socket with one of the codes below.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "telelink/config.hpp"
#include "telelink/scenario.hpp"
#include "telelink/trace.hpp"

namespace telelink {

inline constexpr int kProtocolVersion = 1;

enum class CloseCode : std::uint16_t {
  kMalformed = 4000,           // not JSON, or fields missing / mistyped
  kHandshakeRequired = 4001,   // command before hello
  kUnsupportedVersion = 4002,  // hello with another version
  kUnknownType = 4003,
};

class ProtocolViolation : public std::runtime_error {
 public:
  ProtocolViolation(CloseCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  CloseCode code() const { return code_; }

 private:
  CloseCode code_;
};

// Socket-free half of a console session: parses inbound messages, steps the
// engine and produces outbound messages.  Inputs are recorded with the
// simulation time at which they take effect, so the session can be replayed
// through run_scenario.
class LiveSession {
 public:
  LiveSession(ScenarioConfig config, std::uint64_t seed);

  // Returns immediate replies.  Throws ProtocolViolation.
  std::vector<std::string> handle(std::string_view text);
  // One simulation step; returns telemetry and pongs due.
  std::vector<std::string> tick();

  bool greeted() const { return greeted_; }
  const ScenarioEngine& engine() const { return *engine_; }
  const OperatorTrace& recording() const { return recording_; }
  // Operator-side triplet for the current input.
  VelocityTriplet commanded() const;

  nlohmann::json state_message() const;
  nlohmann::json stats_message() const;

 private:
  void record();

  std::unique_ptr<ScenarioEngine> engine_;
  bool greeted_ = false;
  Nanos telemetry_period_;
  OperatorTrace recording_;
  std::uint64_t next_ping_ = 0;
  std::map<std::uint64_t, nlohmann::json> pending_pings_;
};

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks a free port
  std::uint64_t seed = 1;
  Nanos tick_period = std::chrono::milliseconds(5);  // wall pacing
  std::optional<std::filesystem::path> record;       // last session's inputs
  std::optional<Nanos> duration;                     // stop after (wall)
};

class Server {
 public:
  // Validates the config for simulation up front.  Throws Error.
  Server(ScenarioConfig config, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread.  Throws Error(kIo).
  void start();
  std::uint16_t port() const;
  void stop();
  // start() then block until stop() or the configured duration.
  void run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace telelink
