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

#include "telelink/netem.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {

void LinkSpec::validate() const {
  if (rate_bps == 0) throw Error(ErrorCode::kConfig, "link rate_bps must be > 0");
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
    throw Error(ErrorCode::kConfig, fmt::format("loss_prob {} outside [0,1]", loss_prob));
  }
  if (propagation_delay < Nanos{0} || jitter < Nanos{0}) {
    throw Error(ErrorCode::kConfig, "link delays must be non-negative");
  }
  if (queue_capacity_bytes == 0) throw Error(ErrorCode::kConfig, "queue capacity must be > 0");
}

Nanos serialization_time(std::uint64_t bytes, std::uint64_t rate_bps) {
  if (rate_bps == kUnlimitedRate || bytes == 0) return Nanos{0};
  const unsigned __int128 bits_ns = static_cast<unsigned __int128>(bytes) * 8u * 1'000'000'000u;
  return Nanos(static_cast<std::int64_t>((bits_ns + rate_bps / 2) / rate_bps));
}

EmulatedLink::EmulatedLink(const LinkSpec& spec) : spec_(spec), rng_(spec.seed) {
  spec_.validate();
}

double EmulatedLink::uniform_locked() {
  // 53 random mantissa bits; independent of the standard library's
  // distribution implementations so traces match across toolchains.
  return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

void EmulatedLink::drain_queue_locked(Nanos now) {
  while (!queue_.empty() && queue_.front().first <= now) {
    stats_.bytes_in_queue -= queue_.front().second;
    queue_.pop_front();
  }
}

EnqueueResult EmulatedLink::enqueue(std::vector<std::uint8_t> frame, Nanos send_time) {
  const std::uint64_t size = frame.size();
  std::lock_guard lock(mutex_);
  return enqueue_locked(std::move(frame), size, send_time);
}

EnqueueResult EmulatedLink::enqueue_synthetic(std::uint64_t size_bytes, Nanos send_time) {
  std::lock_guard lock(mutex_);
  return enqueue_locked({}, size_bytes, send_time);
}

EnqueueResult EmulatedLink::enqueue_locked(std::vector<std::uint8_t> frame, std::uint64_t size,
                                           Nanos send_time) {
  if (size > spec_.queue_capacity_bytes) {
    throw Error(ErrorCode::kOversizedFrame,
                fmt::format("{}-byte frame exceeds queue capacity of {} bytes", size,
                            spec_.queue_capacity_bytes));
  }
  // Concurrent wall-clock producers may race by a few ns; never schedule
  // into the past of an earlier enqueue.
  const Nanos now = std::max(send_time, last_time_);
  last_time_ = now;
  drain_queue_locked(now);

  EnqueueResult result;
  result.id = next_id_++;
  ++stats_.offered;

  if (stats_.bytes_in_queue + size > spec_.queue_capacity_bytes) {
    ++stats_.dropped_queue_full;
    result.status = EnqueueStatus::kDroppedQueueFull;
    return result;
  }

  const Nanos start = std::max(now, busy_until_);
  const Nanos serialized = start + serialization_time(size, spec_.rate_bps);
  busy_until_ = serialized;
  if (serialized > now) {
    queue_.emplace_back(serialized, size);
    stats_.bytes_in_queue += size;
    stats_.max_bytes_in_queue = std::max(stats_.max_bytes_in_queue, stats_.bytes_in_queue);
  }

  if (spec_.loss_prob > 0.0 && uniform_locked() < spec_.loss_prob) {
    ++stats_.dropped_loss;
    result.status = EnqueueStatus::kLost;
    return result;
  }

  Nanos delivery = serialized + spec_.propagation_delay;
  if (spec_.jitter > Nanos{0}) {
    const double offset = (2.0 * uniform_locked() - 1.0) * static_cast<double>(spec_.jitter.count());
    delivery += Nanos(std::llround(offset));
    // Jitter never beats the speed of light.
    delivery = std::max(delivery, send_time + spec_.propagation_delay);
  }

  in_flight_.emplace(std::make_pair(delivery, result.id),
                     InFlight{std::move(frame), size, send_time, start - send_time});
  ++stats_.in_flight;
  result.delivery_time = delivery;
  return result;
}

std::vector<Delivery> EmulatedLink::deliver_ready(Nanos now) {
  std::lock_guard lock(mutex_);
  last_time_ = std::max(last_time_, now);
  drain_queue_locked(last_time_);

  std::vector<Delivery> out;
  while (!in_flight_.empty() && in_flight_.begin()->first.first <= now) {
    auto node = in_flight_.extract(in_flight_.begin());
    InFlight& f = node.mapped();
    Delivery d;
    d.id = node.key().second;
    d.frame = std::move(f.frame);
    d.size_bytes = f.size;
    d.sent = f.sent;
    d.delivered = node.key().first;
    d.queue_wait = f.queue_wait;

    const Nanos latency = d.latency();
    if (stats_.delivered == 0 || latency < stats_.min_latency) stats_.min_latency = latency;
    stats_.max_latency = std::max(stats_.max_latency, latency);
    stats_.max_queue_wait = std::max(stats_.max_queue_wait, d.queue_wait);
    ++stats_.delivered;
    --stats_.in_flight;
    stats_.delivered_bytes += f.size;
    if (stats_.latency_samples.size() == LinkStats::kMaxLatencySamples) {
      stats_.latency_samples.erase(stats_.latency_samples.begin());
    }
    stats_.latency_samples.push_back(latency);

    window_.emplace_back(d.delivered, f.size * 8);
    window_bits_ += f.size * 8;
    out.push_back(std::move(d));
  }

  while (!window_.empty() && window_.front().first <= now - std::chrono::seconds(1)) {
    window_bits_ -= window_.front().second;
    window_.pop_front();
  }
  stats_.throughput_bps = window_bits_;
  return out;
}

std::optional<Nanos> EmulatedLink::next_delivery_time() const {
  std::lock_guard lock(mutex_);
  if (in_flight_.empty()) return std::nullopt;
  return in_flight_.begin()->first.first;
}

LinkStats EmulatedLink::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

std::uint64_t EmulatedLink::bytes_in_queue(Nanos now) {
  std::lock_guard lock(mutex_);
  last_time_ = std::max(last_time_, now);
  drain_queue_locked(last_time_);
  return stats_.bytes_in_queue;
}

SteadyState steady_state_latency(const LinkSpec& link, const StreamSpec& stream) {
  SteadyState out;
  const std::uint64_t offered = stream_bandwidth(stream);
  if (offered == 0) {
    out.latency = link.propagation_delay;
    return out;
  }
  if (link.rate_bps != kUnlimitedRate && offered >= link.rate_bps) {
    out.stable = false;
    return out;
  }
  out.latency = serialization_time(frame_bytes(stream), link.rate_bps) + link.propagation_delay;
  return out;
}

}  // namespace telelink
