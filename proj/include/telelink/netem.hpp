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

// Store-and-forward, single-server FIFO link.  A frame waits behind the
// frames already queued, is serialized at rate_bps, then propagates.
// Frames that do not fit in the queue are tail-dropped.

#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <vector>

#include "telelink/bandwidth.hpp"
#include "telelink/clock.hpp"

namespace telelink {

inline constexpr std::uint64_t kUnlimitedRate = std::numeric_limits<std::uint64_t>::max();

struct LinkSpec {
  std::uint64_t rate_bps = 300'000;
  Nanos propagation_delay{0};
  std::uint64_t queue_capacity_bytes = 256 * 1024;
  double loss_prob = 0.0;
  Nanos jitter{0};  // uniform +/- bound
  std::uint64_t seed = 1;

  // Throws Error(kConfig).
  void validate() const;
};

// size * 8 / rate, rounded to the nearest nanosecond.
Nanos serialization_time(std::uint64_t bytes, std::uint64_t rate_bps);

struct LinkStats {
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped_queue_full = 0;
  std::uint64_t dropped_loss = 0;
  std::uint64_t in_flight = 0;  // accepted, not yet delivered or lost
  std::uint64_t bytes_in_queue = 0;
  std::uint64_t max_bytes_in_queue = 0;
  std::uint64_t delivered_bytes = 0;
  std::uint64_t throughput_bps = 0;  // delivered bits over the trailing 1 s
  Nanos min_latency{0};
  Nanos max_latency{0};
  Nanos max_queue_wait{0};
  std::vector<Nanos> latency_samples;  // most recent kMaxLatencySamples

  std::uint64_t dropped() const { return dropped_queue_full + dropped_loss; }

  static constexpr std::size_t kMaxLatencySamples = 100'000;
};

struct Delivery {
  std::uint64_t id = 0;
  std::vector<std::uint8_t> frame;
  std::uint64_t size_bytes = 0;
  Nanos sent{0};
  Nanos delivered{0};
  Nanos queue_wait{0};  // time spent waiting behind earlier frames

  Nanos latency() const { return delivered - sent; }
};

enum class EnqueueStatus { kAccepted, kDroppedQueueFull, kLost };

struct EnqueueResult {
  EnqueueStatus status = EnqueueStatus::kAccepted;
  std::uint64_t id = 0;
  Nanos delivery_time{0};  // meaningful when accepted
};

class EmulatedLink {
 public:
  explicit EmulatedLink(const LinkSpec& spec);

  const LinkSpec& spec() const { return spec_; }

  // Throws Error(kOversizedFrame) if the frame can never fit in the queue.
  EnqueueResult enqueue(std::vector<std::uint8_t> frame, Nanos send_time);
  // Size-only frame for synthetic load.
  EnqueueResult enqueue_synthetic(std::uint64_t size_bytes, Nanos send_time);

  // All frames with delivery time <= now, in delivery order.
  std::vector<Delivery> deliver_ready(Nanos now);

  std::optional<Nanos> next_delivery_time() const;
  LinkStats stats() const;
  // Queue occupancy at `now`, without consuming deliveries.
  std::uint64_t bytes_in_queue(Nanos now);

 private:
  struct InFlight {
    std::vector<std::uint8_t> frame;
    std::uint64_t size = 0;
    Nanos sent{0};
    Nanos queue_wait{0};
  };

  EnqueueResult enqueue_locked(std::vector<std::uint8_t> frame, std::uint64_t size,
                               Nanos send_time);
  void drain_queue_locked(Nanos now);
  double uniform_locked();

  const LinkSpec spec_;
  mutable std::mutex mutex_;
  std::mt19937_64 rng_;
  std::uint64_t next_id_ = 0;
  Nanos busy_until_{0};
  Nanos last_time_{0};
  // (serialization end, size) of frames still occupying the queue.
  std::deque<std::pair<Nanos, std::uint64_t>> queue_;
  std::map<std::pair<Nanos, std::uint64_t>, InFlight> in_flight_;
  std::deque<std::pair<Nanos, std::uint64_t>> window_;
  std::uint64_t window_bits_ = 0;
  LinkStats stats_;
};

struct SteadyState {
  bool stable = true;
  Nanos latency{0};  // serialization + propagation, when stable
};

// Analytic single-stream view: stable iff offered bits/s < rate_bps.
SteadyState steady_state_latency(const LinkSpec& link, const StreamSpec& stream);

}  // namespace telelink
