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

#include "telelink/telelink.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "telelink/bandwidth.hpp"
#include "telelink/config.hpp"
#include "telelink/error.hpp"
#include "telelink/locomotion.hpp"
#include "telelink/netem.hpp"
#include "telelink/scenario.hpp"
#include "telelink/server.hpp"
#include "telelink/trace.hpp"
#include "telelink/wire.hpp"

struct tl_batch {
  telelink::WearableBatch batch;
};

struct tl_config {
  telelink::ScenarioConfig config;
};

struct tl_link {
  explicit tl_link(const telelink::LinkSpec& spec) : link(spec) {}
  telelink::EmulatedLink link;
};

struct tl_server {
  std::unique_ptr<telelink::Server> server;
};

namespace {

using telelink::Error;
using telelink::ErrorCode;

thread_local std::string g_last_error;

tl_status fail(tl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs f, translating exceptions into status codes.
template <typename F>
tl_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return TL_OK;
  } catch (const Error& e) {
    return fail(static_cast<tl_status>(e.code()), e.what());
  } catch (const telelink::ProtocolViolation& e) {
    return fail(TL_ERR_PROTOCOL, e.what());
  } catch (const std::bad_alloc&) {
    return fail(TL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TL_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

telelink::LinkSpec to_spec(const tl_link_spec& s) {
  telelink::LinkSpec spec;
  spec.rate_bps = s.rate_bps;
  spec.propagation_delay = telelink::Nanos(s.propagation_delay_ns);
  spec.queue_capacity_bytes = s.queue_capacity_bytes;
  spec.loss_prob = s.loss_prob;
  spec.jitter = telelink::Nanos(s.jitter_ns);
  spec.seed = s.seed;
  spec.validate();
  return spec;
}

}  // namespace

extern "C" {

TL_API const char* tl_version(void) { return "0.3.0"; }

TL_API const char* tl_status_name(tl_status status) {
  if (status < TL_OK || status > TL_ERR_INTERNAL) return "unknown";
  return telelink::error_code_name(static_cast<ErrorCode>(status)).data();
}

TL_API const char* tl_last_error(void) { return g_last_error.c_str(); }

TL_API void tl_string_free(char* s) { std::free(s); }
TL_API void tl_buffer_free(uint8_t* buffer) { std::free(buffer); }

// ---- wearable batch ------------------------------------------------------

TL_API tl_status tl_batch_create(tl_batch** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new tl_batch();
  });
}

TL_API void tl_batch_destroy(tl_batch* batch) { delete batch; }

TL_API tl_status tl_batch_add_hand(tl_batch* batch, uint8_t hand_id, const float* angles,
                                   size_t joints, const float* force, const float* vibro,
                                   size_t actuators) {
  return guarded([&] {
    require(batch != nullptr, "batch is null");
    require(joints == 0 || angles != nullptr, "angles is null");
    require(actuators == 0 || (force != nullptr && vibro != nullptr), "force/vibro is null");
    telelink::HandFrame hand;
    hand.hand_id = static_cast<telelink::HandId>(hand_id);
    hand.joint_angles.assign(angles, angles + joints);
    hand.force_feedback.assign(force, force + actuators);
    hand.vibro_amplitude.assign(vibro, vibro + actuators);
    batch->batch.hands.push_back(std::move(hand));
  });
}

TL_API tl_status tl_batch_hand_count(const tl_batch* batch, size_t* count) {
  return guarded([&] {
    require(batch != nullptr && count != nullptr, "null argument");
    *count = batch->batch.hands.size();
  });
}

TL_API tl_status tl_batch_hand_shape(const tl_batch* batch, size_t index, uint8_t* hand_id,
                                     size_t* joints, size_t* actuators) {
  return guarded([&] {
    require(batch != nullptr, "batch is null");
    require(index < batch->batch.hands.size(), "hand index out of range");
    const auto& h = batch->batch.hands[index];
    if (hand_id) *hand_id = static_cast<uint8_t>(h.hand_id);
    if (joints) *joints = h.joint_angles.size();
    if (actuators) *actuators = h.force_feedback.size();
  });
}

TL_API tl_status tl_batch_copy_hand(const tl_batch* batch, size_t index, float* angles,
                                    float* force, float* vibro) {
  return guarded([&] {
    require(batch != nullptr, "batch is null");
    require(index < batch->batch.hands.size(), "hand index out of range");
    const auto& h = batch->batch.hands[index];
    if (angles) std::copy(h.joint_angles.begin(), h.joint_angles.end(), angles);
    if (force) std::copy(h.force_feedback.begin(), h.force_feedback.end(), force);
    if (vibro) std::copy(h.vibro_amplitude.begin(), h.vibro_amplitude.end(), vibro);
  });
}

TL_API tl_status tl_batch_encode(const tl_batch* batch, uint32_t sequence, uint64_t timestamp_ns,
                                 uint8_t** frame, size_t* frame_len) {
  return guarded([&] {
    require(batch != nullptr && frame != nullptr && frame_len != nullptr, "null argument");
    const auto bytes = telelink::encode(batch->batch, {sequence, timestamp_ns});
    auto* out = static_cast<uint8_t*>(std::malloc(bytes.size()));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, bytes.data(), bytes.size());
    *frame = out;
    *frame_len = bytes.size();
  });
}

TL_API tl_status tl_batch_decode(const uint8_t* frame, size_t frame_len, tl_batch** out,
                                 uint32_t* sequence, uint64_t* timestamp_ns) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(frame != nullptr || frame_len == 0, "frame is null");
    telelink::MessageHeader header;
    auto b = std::make_unique<tl_batch>();
    b->batch = telelink::decode({frame, frame_len}, &header);
    if (sequence) *sequence = header.sequence;
    if (timestamp_ns) *timestamp_ns = header.timestamp_ns;
    *out = b.release();
  });
}

TL_API tl_status tl_wearable_frame_bytes(size_t hands, size_t joints, size_t actuators,
                                         uint64_t* bytes) {
  return guarded([&] {
    require(bytes != nullptr, "bytes is null");
    telelink::ComputedPayload shape;
    shape.hands = static_cast<uint32_t>(hands);
    shape.joints = static_cast<uint32_t>(joints);
    shape.actuators = static_cast<uint32_t>(actuators);
    *bytes = telelink::computed_payload_bytes(shape) + telelink::kHeaderBytes;
  });
}

TL_API tl_status tl_stream_bandwidth(uint32_t rate_hz, uint64_t payload_bytes, uint64_t* bps) {
  return guarded([&] {
    require(bps != nullptr, "bps is null");
    telelink::StreamSpec spec;
    spec.rate_hz = rate_hz;
    spec.payload = payload_bytes;
    *bps = telelink::stream_bandwidth(spec);
  });
}

// ---- configs --------------------------------------------------------------

TL_API tl_status tl_config_load(const char* path, tl_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto c = std::make_unique<tl_config>();
    c->config = telelink::load_scenario_config(path);
    *out = c.release();
  });
}

TL_API void tl_config_destroy(tl_config* config) { delete config; }

TL_API const char* tl_config_name(const tl_config* config) {
  return config == nullptr ? "" : config->config.name.c_str();
}

TL_API tl_status tl_bandwidth_report(const tl_config* config, char** text, uint64_t* total_bps) {
  return guarded([&] {
    require(config != nullptr && text != nullptr, "null argument");
    const auto& c = config->config;
    const auto after = telelink::budget_report(c.streams, c.name);
    std::string out;
    if (c.baseline) {
      const auto base = telelink::load_scenario_config(*c.baseline);
      out = telelink::format_budget_comparison(telelink::budget_report(base.streams, base.name),
                                               after);
    } else {
      out = telelink::format_budget_table(after);
    }
    if (total_bps) *total_bps = after.in_band_bps;
    *text = copy_string(out);
  });
}

// ---- link -----------------------------------------------------------------

TL_API void tl_link_spec_default(tl_link_spec* spec) {
  if (spec == nullptr) return;
  const telelink::LinkSpec d;
  spec->rate_bps = d.rate_bps;
  spec->propagation_delay_ns = d.propagation_delay.count();
  spec->queue_capacity_bytes = d.queue_capacity_bytes;
  spec->loss_prob = d.loss_prob;
  spec->jitter_ns = d.jitter.count();
  spec->seed = d.seed;
}

TL_API tl_status tl_link_create(const tl_link_spec* spec, tl_link** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = new tl_link(to_spec(*spec));
  });
}

TL_API void tl_link_destroy(tl_link* link) { delete link; }

TL_API tl_status tl_link_enqueue(tl_link* link, uint64_t size_bytes, int64_t send_ns,
                                 tl_enqueue_result* result) {
  return guarded([&] {
    require(link != nullptr, "link is null");
    const auto r = link->link.enqueue_synthetic(size_bytes, telelink::Nanos(send_ns));
    if (result) *result = static_cast<tl_enqueue_result>(r.status);
  });
}

TL_API tl_status tl_link_deliver(tl_link* link, int64_t now_ns, int64_t* latency_ns,
                                 size_t capacity, size_t* delivered) {
  return guarded([&] {
    require(link != nullptr, "link is null");
    const auto out = link->link.deliver_ready(telelink::Nanos(now_ns));
    if (latency_ns) {
      for (size_t i = 0; i < out.size() && i < capacity; ++i) {
        latency_ns[i] = out[i].latency().count();
      }
    }
    if (delivered) *delivered = out.size();
  });
}

TL_API tl_status tl_link_stats_get(const tl_link* link, tl_link_stats* stats) {
  return guarded([&] {
    require(link != nullptr && stats != nullptr, "null argument");
    const auto s = link->link.stats();
    stats->offered = s.offered;
    stats->delivered = s.delivered;
    stats->dropped_queue_full = s.dropped_queue_full;
    stats->dropped_loss = s.dropped_loss;
    stats->in_flight = s.in_flight;
    stats->max_bytes_in_queue = s.max_bytes_in_queue;
    stats->max_latency_ns = s.max_latency.count();
    stats->max_queue_wait_ns = s.max_queue_wait.count();
  });
}

TL_API tl_status tl_steady_state(const tl_link_spec* spec, uint32_t rate_hz,
                                 uint64_t payload_bytes, int* stable, int64_t* latency_ns) {
  return guarded([&] {
    require(spec != nullptr && stable != nullptr, "null argument");
    telelink::StreamSpec stream;
    stream.rate_hz = rate_hz;
    stream.payload = payload_bytes;
    const auto ss = telelink::steady_state_latency(to_spec(*spec), stream);
    *stable = ss.stable ? 1 : 0;
    if (latency_ns) *latency_ns = ss.latency.count();
  });
}

// ---- locomotion -------------------------------------------------------------

TL_API tl_status tl_compute_triplet(const tl_config* config, double left_x, double left_y,
                                    double left_yaw, double right_x, double right_y,
                                    double right_yaw, tl_triplet* out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    const telelink::LocomotionParams params =
        config ? config->config.locomotion : telelink::LocomotionParams{};
    telelink::FeetInWaist feet;
    feet.left = {left_x, left_y};
    feet.right = {right_x, right_y};
    feet.left_yaw = left_yaw;
    feet.right_yaw = right_yaw;
    const auto t = telelink::compute_triplet(feet, params);
    *out = {t.linear, t.angular, t.lateral};
  });
}

TL_API tl_status tl_map_differential(const tl_triplet* triplet, double wheel_radius,
                                     double track, double* left, double* right) {
  return guarded([&] {
    require(triplet != nullptr && left != nullptr && right != nullptr, "null argument");
    telelink::DifferentialBase base;
    base.wheel_radius = wheel_radius;
    base.track = track;
    const auto w = telelink::map_differential({triplet->linear, triplet->angular, triplet->lateral},
                                              base);
    *left = w.left;
    *right = w.right;
  });
}

// ---- scenario ---------------------------------------------------------------

TL_API tl_status tl_run_scenario(const tl_config* config, const char* trace_path, uint64_t seed,
                                 const char* report_path, char** report_json, int* success) {
  return guarded([&] {
    require(config != nullptr && trace_path != nullptr, "null argument");
    const auto trace = telelink::read_trace_file(trace_path);
    const auto result = telelink::run_scenario(config->config, trace, seed);
    const std::string text = telelink::dump_report(result.report);
    if (report_path) {
      std::ofstream out(report_path, std::ios::binary);
      out << text;
      out.close();
      if (!out) {
        throw Error(ErrorCode::kIo, std::string("cannot write report '") + report_path + "'");
      }
    }
    if (report_json) *report_json = copy_string(text);
    if (success) *success = result.report.at("success").get<bool>() ? 1 : 0;
  });
}

// ---- server -----------------------------------------------------------------

TL_API void tl_server_options_default(tl_server_options* options) {
  if (options == nullptr) return;
  *options = tl_server_options{nullptr, 0, 1, nullptr, 0};
}

TL_API tl_status tl_server_create(const tl_config* config, const tl_server_options* options,
                                  tl_server** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    telelink::ServerOptions o;
    if (options) {
      if (options->host) o.host = options->host;
      o.port = options->port;
      o.seed = options->seed;
      if (options->record_path) o.record = options->record_path;
      if (options->duration_ms > 0) o.duration = std::chrono::milliseconds(options->duration_ms);
    }
    auto s = std::make_unique<tl_server>();
    s->server = std::make_unique<telelink::Server>(config->config, o);
    *out = s.release();
  });
}

TL_API void tl_server_destroy(tl_server* server) { delete server; }

TL_API tl_status tl_server_start(tl_server* server) {
  return guarded([&] {
    require(server != nullptr, "server is null");
    server->server->start();
  });
}

TL_API uint16_t tl_server_port(const tl_server* server) {
  return server == nullptr ? 0 : server->server->port();
}

TL_API tl_status tl_server_stop(tl_server* server) {
  return guarded([&] {
    require(server != nullptr, "server is null");
    server->server->stop();
  });
}

TL_API tl_status tl_server_run(tl_server* server) {
  return guarded([&] {
    require(server != nullptr, "server is null");
    server->server->run();
  });
}

}  // extern "C"
