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

#include "telelink/server.hpp"

#include <cmath>
#include <csignal>
#include <deque>
#include <fstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) {
  throw ProtocolViolation(CloseCode::kMalformed, what);
}

double number(const json& msg, const char* key) {
  const auto it = msg.find(key);
  if (it == msg.end() || !it->is_number()) malformed(fmt::format("'{}' must be a number", key));
  const double v = it->get<double>();
  if (!std::isfinite(v)) malformed(fmt::format("'{}' is not finite", key));
  return v;
}

Eigen::Vector2d point(const json& msg, const char* key) {
  const auto it = msg.find(key);
  if (it == msg.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() ||
      !(*it)[1].is_number()) {
    malformed(fmt::format("'{}' must be [x, y]", key));
  }
  Eigen::Vector2d p((*it)[0].get<double>(), (*it)[1].get<double>());
  if (!p.allFinite()) malformed(fmt::format("'{}' is not finite", key));
  return p;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

LiveSession::LiveSession(ScenarioConfig config, std::uint64_t seed)
    : engine_(std::make_unique<ScenarioEngine>(std::move(config), seed)) {
  const std::uint32_t hz = std::max<std::uint32_t>(engine_->config().rates.telemetry_hz, 1);
  telemetry_period_ = Nanos(1'000'000'000 / hz);
  record();
}

void LiveSession::record() {
  OperatorSample s = engine_->input();
  s.t = engine_->now();
  // Fixed width: both hand blocks, so the recording stays a valid trace.
  if (engine_->config().hand) {
    const std::size_t g = engine_->config().hand->glove_joints;
    if (s.glove.empty()) {
      s.glove.assign(2 * g, 0.0);
    } else if (s.glove.size() == g) {
      s.glove.insert(s.glove.end(), s.glove.begin(), s.glove.end());
    }
  }
  if (!recording_.samples.empty() && recording_.samples.back().t == s.t) {
    recording_.samples.back() = std::move(s);
  } else {
    recording_.samples.push_back(std::move(s));
  }
}

VelocityTriplet LiveSession::commanded() const {
  return compute_triplet(engine_->input().pose(), engine_->config().locomotion);
}

std::vector<std::string> LiveSession::handle(std::string_view text) {
  json msg = json::parse(text, nullptr, false);
  if (msg.is_discarded() || !msg.is_object()) malformed("message is not a JSON object");
  const auto type_it = msg.find("type");
  if (type_it == msg.end() || !type_it->is_string()) malformed("missing 'type'");
  const std::string type = *type_it;

  if (type == "hello") {
    const auto v = msg.find("version");
    if (v == msg.end() || !v->is_number_integer()) malformed("hello needs an integer 'version'");
    if (v->get<int>() != kProtocolVersion) {
      throw ProtocolViolation(CloseCode::kUnsupportedVersion,
                              fmt::format("protocol version {} not supported, server speaks {}",
                                          v->get<int>(), kProtocolVersion));
    }
    greeted_ = true;
    const auto& cfg = engine_->config();
    json welcome = {{"type", "welcome"},
                    {"version", kProtocolVersion},
                    {"scenario", cfg.name},
                    {"step_ms", to_seconds(cfg.sim.step) * 1e3},
                    {"telemetry_hz", cfg.rates.telemetry_hz},
                    {"idle_radius", cfg.locomotion.idle_radius},
                    {"stance_width", cfg.locomotion.stance_width},
                    {"glove_joints", cfg.hand->glove_joints}};
    return {welcome.dump()};
  }
  if (!greeted_) {
    throw ProtocolViolation(CloseCode::kHandshakeRequired,
                            fmt::format("'{}' before hello", type));
  }

  if (type == "cmd.feet") {
    const Eigen::Vector2d pl = point(msg, "pL");
    const Eigen::Vector2d pr = point(msg, "pR");
    OperatorSample s = engine_->input();
    s.waist_x = s.waist_y = s.waist_yaw = 0.0;
    s.left_x = pl.x();
    s.left_y = pl.y();
    s.left_yaw = number(msg, "yawL");
    s.right_x = pr.x();
    s.right_y = pr.y();
    s.right_yaw = number(msg, "yawR");
    engine_->set_input(s);
    record();
    return {};
  }
  if (type == "cmd.glove") {
    const auto it = msg.find("angles");
    if (it == msg.end() || !it->is_array()) malformed("cmd.glove needs 'angles'");
    const std::size_t g = engine_->config().hand->glove_joints;
    if (it->size() != g && it->size() != 2 * g) {
      malformed(fmt::format("cmd.glove has {} angles, expected {} or {}", it->size(), g, 2 * g));
    }
    std::vector<double> angles;
    for (const auto& a : *it) {
      if (!a.is_number() || !std::isfinite(a.get<double>())) malformed("angles must be numbers");
      angles.push_back(a.get<double>());
    }
    OperatorSample s = engine_->input();
    s.glove = std::move(angles);
    engine_->set_input(s);
    record();
    return {};
  }
  if (type == "ping") {
    const auto it = msg.find("t");
    if (it == msg.end()) malformed("ping needs 't'");
    const std::uint64_t token = next_ping_++;
    pending_pings_[token] = *it;
    engine_->send_ping(token);
    return {};
  }
  throw ProtocolViolation(CloseCode::kUnknownType, fmt::format("unknown type '{}'", type));
}

std::vector<std::string> LiveSession::tick() {
  engine_->step();
  std::vector<std::string> out;
  for (std::uint64_t token : engine_->take_pongs()) {
    const auto it = pending_pings_.find(token);
    if (it == pending_pings_.end()) continue;
    out.push_back(json{{"type", "pong"}, {"t", it->second}}.dump());
    pending_pings_.erase(it);
  }
  if (greeted_ && engine_->now().count() % telemetry_period_.count() == 0) {
    out.push_back(state_message().dump());
    out.push_back(stats_message().dump());
  }
  return out;
}

json LiveSession::state_message() const {
  const RobotState s = engine_->state();
  const VelocityTriplet v = commanded();
  return {{"type", "state"},
          {"t", to_seconds(s.t)},
          {"pose", {{"x", s.base.x}, {"y", s.base.y}, {"theta", s.base.theta}}},
          {"triplet", {v.linear, v.angular, v.lateral}},
          {"command", {s.command.linear, s.command.angular, s.command.lateral}},
          {"q", to_vector(s.arm_q)},
          {"hands", {{"left", to_vector(s.left_hand_q)}, {"right", to_vector(s.right_hand_q)}}}};
}

json LiveSession::stats_message() const {
  const LinkStats up = engine_->uplink_stats();
  json latency = nullptr;
  if (!up.latency_samples.empty()) latency = to_seconds(up.latency_samples.back()) * 1e3;
  return {{"type", "stats"},
          {"t", to_seconds(engine_->now())},
          {"bps", up.throughput_bps},
          {"latency_ms", latency},
          {"queue_bytes", up.bytes_in_queue},
          {"drops", up.dropped()},
          {"offered", up.offered}};
}

// ---------------------------------------------------------------------------

struct Server::Impl {
  Impl(ScenarioConfig c, ServerOptions o) : config(std::move(c)), options(std::move(o)) {}

  struct Outbox {
    std::deque<std::string> messages;
    std::optional<ProtocolViolation> violation;
    bool peer_gone = false;
  };

  asio::awaitable<void> reader(std::shared_ptr<websocket::stream<beast::tcp_stream>> ws,
                               std::shared_ptr<LiveSession> live,
                               std::shared_ptr<Outbox> box) {
    beast::flat_buffer buffer;
    try {
      for (;;) {
        co_await ws->async_read(buffer, asio::use_awaitable);
        const std::string text = beast::buffers_to_string(buffer.data());
        buffer.consume(buffer.size());
        try {
          for (auto& m : live->handle(text)) box->messages.push_back(std::move(m));
        } catch (const ProtocolViolation& v) {
          box->violation = v;
          co_return;
        }
      }
    } catch (const std::exception&) {
      box->peer_gone = true;
    }
  }

  asio::awaitable<void> session(tcp::socket socket) {
    auto ws = std::make_shared<websocket::stream<beast::tcp_stream>>(std::move(socket));
    try {
      ws->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      ws->text(true);
      co_await ws->async_accept(asio::use_awaitable);
    } catch (const std::exception&) {
      co_return;
    }

    auto live = std::make_shared<LiveSession>(config, options.seed);
    last_session = live;
    auto box = std::make_shared<Outbox>();
    auto executor = co_await asio::this_coro::executor;
    asio::co_spawn(executor, reader(ws, live, box), asio::detached);

    // Simulation time follows wall time from the moment of accept.
    asio::steady_timer timer(executor);
    const auto origin = std::chrono::steady_clock::now();
    try {
      for (;;) {
        timer.expires_after(options.tick_period);
        co_await timer.async_wait(asio::use_awaitable);
        if (box->peer_gone) break;
        const Nanos target = std::chrono::steady_clock::now() - origin;
        while (live->engine().now() < target) {
          for (auto& m : live->tick()) box->messages.push_back(std::move(m));
        }
        while (!box->messages.empty()) {
          const std::string m = std::move(box->messages.front());
          box->messages.pop_front();
          co_await ws->async_write(asio::buffer(m), asio::use_awaitable);
        }
        if (box->violation) {
          websocket::close_reason reason(static_cast<websocket::close_code>(box->violation->code()),
                                         box->violation->what());
          co_await ws->async_close(reason, asio::use_awaitable);
          break;
        }
      }
    } catch (const std::exception&) {
    }
    save_recording();
  }

  asio::awaitable<void> listen() {
    for (;;) {
      tcp::socket socket = co_await acceptor->async_accept(asio::use_awaitable);
      asio::co_spawn(ioc, session(std::move(socket)), asio::detached);
    }
  }

  void save_recording() {
    if (!options.record || !last_session) return;
    std::ofstream out(*options.record);
    write_trace(out, last_session->recording());
  }

  void bind() {
    try {
      const tcp::endpoint endpoint(asio::ip::make_address(options.host), options.port);
      acceptor.emplace(ioc);
      acceptor->open(endpoint.protocol());
      acceptor->set_option(asio::socket_base::reuse_address(true));
      acceptor->bind(endpoint);
      acceptor->listen();
      bound_port = acceptor->local_endpoint().port();
    } catch (const boost::system::system_error& e) {
      throw Error(ErrorCode::kIo, fmt::format("cannot listen on {}:{}: {}", options.host,
                                              options.port, e.what()));
    }
    asio::co_spawn(ioc, listen(), asio::detached);
    if (options.duration) {
      deadline.emplace(ioc);
      deadline->expires_after(*options.duration);
      deadline->async_wait([this](const boost::system::error_code& ec) {
        if (!ec) ioc.stop();
      });
    }
  }

  ScenarioConfig config;
  ServerOptions options;
  asio::io_context ioc{1};
  std::optional<tcp::acceptor> acceptor;
  std::optional<asio::steady_timer> deadline;
  std::uint16_t bound_port = 0;
  std::thread thread;
  std::shared_ptr<LiveSession> last_session;
};

Server::Server(ScenarioConfig config, ServerOptions options) {
  config.validate_for_run();
  impl_ = std::make_unique<Impl>(std::move(config), std::move(options));
}

Server::~Server() { stop(); }

void Server::start() {
  impl_->bind();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

std::uint16_t Server::port() const { return impl_->bound_port; }

void Server::stop() {
  if (!impl_) return;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) {
    impl_->thread.join();
    impl_->save_recording();
  }
}

void Server::run() {
  impl_->bind();
  asio::signal_set signals(impl_->ioc, SIGINT, SIGTERM);
  signals.async_wait([this](const boost::system::error_code& ec, int) {
    if (!ec) impl_->ioc.stop();
  });
  impl_->ioc.run();
  impl_->save_recording();
}

}  // namespace telelink
