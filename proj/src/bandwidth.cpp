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

#include "telelink/bandwidth.hpp"

#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {
namespace {

std::string mbit(std::uint64_t bps) { return fmt::format("{:.3f}", bps / 1e6); }

}  // namespace

std::uint64_t computed_payload_bytes(const ComputedPayload& shape) {
  switch (shape.message) {
    case MessageType::kWearable: {
      if (shape.hands > 2) throw Error(ErrorCode::kConfig, "wearable batch holds at most 2 hands");
      WearableBatch batch;
      for (std::uint32_t h = 0; h < shape.hands; ++h) {
        HandFrame hand;
        hand.hand_id = static_cast<HandId>(h);
        hand.joint_angles.assign(shape.joints, 0.0f);
        hand.force_feedback.assign(shape.actuators, 0.0f);
        hand.vibro_amplitude.assign(shape.actuators, 0.0f);
        batch.hands.push_back(std::move(hand));
      }
      return encode(batch, {}).size() - kHeaderBytes;
    }
    case MessageType::kVelocityTriplet:
      return encode_triplet({}, {}).size() - kHeaderBytes;
    case MessageType::kJointReferences: {
      JointReferences refs;
      refs.position.assign(shape.joints, 0.0f);
      refs.velocity.assign(shape.joints, 0.0f);
      refs.acceleration.assign(shape.joints, 0.0f);
      return encode_joint_references(refs, {}).size() - kHeaderBytes;
    }
    case MessageType::kPing:
    case MessageType::kPong:
      return encode_ping(shape.message, 0, {}).size() - kHeaderBytes;
  }
  throw Error(ErrorCode::kConfig, "unknown computed payload message");
}

std::uint64_t payload_bytes(const StreamSpec& spec) {
  if (const auto* fixed = std::get_if<std::uint64_t>(&spec.payload)) return *fixed;
  return computed_payload_bytes(std::get<ComputedPayload>(spec.payload));
}

std::uint64_t frame_bytes(const StreamSpec& spec) { return payload_bytes(spec) + kHeaderBytes; }

std::uint64_t stream_bandwidth(const StreamSpec& spec) {
  if (spec.rate_hz == 0) return 0;
  return static_cast<std::uint64_t>(spec.rate_hz) * frame_bytes(spec) * 8;
}

BudgetReport budget_report(const std::vector<StreamSpec>& specs, std::string title) {
  BudgetReport report;
  report.title = std::move(title);
  for (const auto& spec : specs) {
    BudgetLine line{spec.name, spec.rate_hz, frame_bytes(spec), stream_bandwidth(spec),
                    spec.out_of_band};
    report.total_bps += line.bits_per_second;
    if (!line.out_of_band) report.in_band_bps += line.bits_per_second;
    report.lines.push_back(std::move(line));
  }
  return report;
}

std::string format_budget_table(const BudgetReport& report) {
  std::string out;
  if (!report.title.empty()) out += fmt::format("== {} ==\n", report.title);
  out += fmt::format("{:<28} {:>8} {:>12} {:>14} {:>10}\n", "stream", "rate_hz", "frame_bytes",
                     "bits_per_s", "mbit_s");
  for (const auto& line : report.lines) {
    out += fmt::format("{:<28} {:>8} {:>12} {:>14} {:>10}{}\n", line.name, line.rate_hz,
                       line.frame_bytes, line.bits_per_second, mbit(line.bits_per_second),
                       line.out_of_band ? "  (out-of-band)" : "");
  }
  out += fmt::format("{:<28} {:>8} {:>12} {:>14} {:>10}\n", "TOTAL", "", "", report.total_bps,
                     mbit(report.total_bps));
  if (report.in_band_bps != report.total_bps) {
    out += fmt::format("{:<28} {:>8} {:>12} {:>14} {:>10}\n", "TOTAL (in-band)", "", "",
                       report.in_band_bps, mbit(report.in_band_bps));
  }
  return out;
}

std::string format_budget_comparison(const BudgetReport& before, const BudgetReport& after) {
  std::string out = format_budget_table(before);
  out += "\n";
  out += format_budget_table(after);
  const double ratio =
      before.total_bps == 0 ? 0.0 : static_cast<double>(after.total_bps) / before.total_bps;
  out += fmt::format("\nreduction: {} -> {} mbit/s ({:.1f}% of baseline)\n",
                     mbit(before.total_bps), mbit(after.total_bps), 100.0 * ratio);
  return out;
}

}  // namespace telelink
