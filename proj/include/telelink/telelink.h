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

/* C interface to telelink.
 *
 * Every call returns a tl_status.  On failure tl_last_error() holds a
 * human-readable message for the calling thread until its next call.
 * Handles are opaque; release each with its *_destroy function.  Strings
 * and buffers handed out by the library are released with tl_string_free /
 * tl_buffer_free.  Times are integer nanoseconds. */

#ifndef TELELINK_TELELINK_H_
#define TELELINK_TELELINK_H_

#include <stddef.h>
#include <stdint.h>

#if defined(TELELINK_BUILDING_LIBRARY)
#define TL_API __attribute__((visibility("default")))
#else
#define TL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tl_status {
  TL_OK = 0,
  TL_ERR_INVALID_ARGUMENT = 1,
  TL_ERR_CORRUPT_FRAME = 2,
  TL_ERR_TRUNCATED = 3,
  TL_ERR_UNSUPPORTED_TYPE = 4,
  TL_ERR_VALIDATION = 5,
  TL_ERR_ENCODE = 6,
  TL_ERR_OVERSIZED_FRAME = 7,
  TL_ERR_CONFIG = 8,
  TL_ERR_ROUTING = 9,
  TL_ERR_NUMERICAL = 10,
  TL_ERR_DIMENSION = 11,
  TL_ERR_UNACHIEVABLE = 12,
  TL_ERR_IO = 13,
  TL_ERR_NOT_FOUND = 14,
  TL_ERR_PROTOCOL = 15,
  TL_ERR_INTERNAL = 16
} tl_status;

TL_API const char* tl_version(void);
TL_API const char* tl_status_name(tl_status status);
TL_API const char* tl_last_error(void);
TL_API void tl_string_free(char* s);
TL_API void tl_buffer_free(uint8_t* buffer);

/* ---- wearable batch codec ---------------------------------------------- */

typedef struct tl_batch tl_batch;

enum { TL_HAND_LEFT = 0, TL_HAND_RIGHT = 1 };

TL_API tl_status tl_batch_create(tl_batch** out);
TL_API void tl_batch_destroy(tl_batch* batch);
/* force and vibro both hold `actuators` values. */
TL_API tl_status tl_batch_add_hand(tl_batch* batch, uint8_t hand_id, const float* angles,
                                   size_t joints, const float* force, const float* vibro,
                                   size_t actuators);
TL_API tl_status tl_batch_hand_count(const tl_batch* batch, size_t* count);
TL_API tl_status tl_batch_hand_shape(const tl_batch* batch, size_t index, uint8_t* hand_id,
                                     size_t* joints, size_t* actuators);
/* Output arrays must hold the counts reported by tl_batch_hand_shape. */
TL_API tl_status tl_batch_copy_hand(const tl_batch* batch, size_t index, float* angles,
                                    float* force, float* vibro);
/* Full frame (header + payload); release with tl_buffer_free. */
TL_API tl_status tl_batch_encode(const tl_batch* batch, uint32_t sequence, uint64_t timestamp_ns,
                                 uint8_t** frame, size_t* frame_len);
/* sequence / timestamp_ns may be NULL. */
TL_API tl_status tl_batch_decode(const uint8_t* frame, size_t frame_len, tl_batch** out,
                                 uint32_t* sequence, uint64_t* timestamp_ns);

TL_API tl_status tl_wearable_frame_bytes(size_t hands, size_t joints, size_t actuators,
                                         uint64_t* bytes);
/* rate_hz * (payload_bytes + header) * 8, exact. */
TL_API tl_status tl_stream_bandwidth(uint32_t rate_hz, uint64_t payload_bytes, uint64_t* bps);

/* ---- configs ------------------------------------------------------------ */

typedef struct tl_config tl_config;

/* Accepts the path with or without the ".json" suffix. */
TL_API tl_status tl_config_load(const char* path, tl_config** out);
TL_API void tl_config_destroy(tl_config* config);
TL_API const char* tl_config_name(const tl_config* config);
/* Budget table, followed by a before/after comparison when the config names
 * a baseline.  total_bps (may be NULL) receives the in-band total. */
TL_API tl_status tl_bandwidth_report(const tl_config* config, char** text, uint64_t* total_bps);

/* ---- emulated link ------------------------------------------------------ */

#define TL_UNLIMITED_RATE UINT64_MAX

typedef struct tl_link_spec {
  uint64_t rate_bps;
  int64_t propagation_delay_ns;
  uint64_t queue_capacity_bytes;
  double loss_prob;
  int64_t jitter_ns;
  uint64_t seed;
} tl_link_spec;

typedef struct tl_link_stats {
  uint64_t offered;
  uint64_t delivered;
  uint64_t dropped_queue_full;
  uint64_t dropped_loss;
  uint64_t in_flight;
  uint64_t max_bytes_in_queue;
  int64_t max_latency_ns;
  int64_t max_queue_wait_ns;
} tl_link_stats;

typedef enum tl_enqueue_result {
  TL_ENQUEUE_ACCEPTED = 0,
  TL_ENQUEUE_DROPPED_QUEUE_FULL = 1,
  TL_ENQUEUE_LOST = 2
} tl_enqueue_result;

typedef struct tl_link tl_link;

TL_API void tl_link_spec_default(tl_link_spec* spec);
TL_API tl_status tl_link_create(const tl_link_spec* spec, tl_link** out);
TL_API void tl_link_destroy(tl_link* link);
/* Size-only frame. */
TL_API tl_status tl_link_enqueue(tl_link* link, uint64_t size_bytes, int64_t send_ns,
                                 tl_enqueue_result* result);
/* Delivers everything due by now_ns; latency_ns (may be NULL) receives up to
 * capacity latencies in delivery order. */
TL_API tl_status tl_link_deliver(tl_link* link, int64_t now_ns, int64_t* latency_ns,
                                 size_t capacity, size_t* delivered);
TL_API tl_status tl_link_stats_get(const tl_link* link, tl_link_stats* stats);
/* Analytic single-stream steady state; latency_ns valid when *stable. */
TL_API tl_status tl_steady_state(const tl_link_spec* spec, uint32_t rate_hz,
                                 uint64_t payload_bytes, int* stable, int64_t* latency_ns);

/* ---- locomotion --------------------------------------------------------- */

typedef struct tl_triplet {
  double linear;
  double angular;
  double lateral;
} tl_triplet;

/* Feet in the waist frame; config may be NULL for default parameters. */
TL_API tl_status tl_compute_triplet(const tl_config* config, double left_x, double left_y,
                                    double left_yaw, double right_x, double right_y,
                                    double right_yaw, tl_triplet* out);
TL_API tl_status tl_map_differential(const tl_triplet* triplet, double wheel_radius,
                                     double track, double* left, double* right);

/* ---- scenario ----------------------------------------------------------- */

/* Runs the trace through the config's pipeline.  Writes the JSON report to
 * report_path when it is not NULL, and/or returns it in *report_json.
 * success (may be NULL) receives whether every waypoint was reached. */
TL_API tl_status tl_run_scenario(const tl_config* config, const char* trace_path, uint64_t seed,
                                 const char* report_path, char** report_json, int* success);

/* ---- console server ----------------------------------------------------- */

typedef struct tl_server tl_server;

typedef struct tl_server_options {
  const char* host;        /* NULL: 127.0.0.1 */
  uint16_t port;           /* 0: any free port */
  uint64_t seed;
  const char* record_path; /* NULL: no recording */
  int64_t duration_ms;     /* <= 0: until stopped */
} tl_server_options;

TL_API void tl_server_options_default(tl_server_options* options);
TL_API tl_status tl_server_create(const tl_config* config, const tl_server_options* options,
                                  tl_server** out);
TL_API void tl_server_destroy(tl_server* server);
/* Background thread. */
TL_API tl_status tl_server_start(tl_server* server);
TL_API uint16_t tl_server_port(const tl_server* server);
TL_API tl_status tl_server_stop(tl_server* server);
/* Blocks until the duration elapses or the process is interrupted. */
TL_API tl_status tl_server_run(tl_server* server);

#ifdef __cplusplus
}
#endif

#endif /* TELELINK_TELELINK_H_ */
