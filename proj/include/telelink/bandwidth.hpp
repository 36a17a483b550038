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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "telelink/wire.hpp"

namespace telelink {

// Payload size derived from an actual encoded message of the given shape.
struct ComputedPayload {
  MessageType message = MessageType::kWearable;
  std::uint32_t hands = 2;      // wearable
  std::uint32_t joints = 20;    // wearable: per hand; joint_references: total
  std::uint32_t actuators = 5;  // wearable, per hand
};

struct StreamSpec {
  std::string name;
  std::uint32_t rate_hz = 0;
  std::variant<std::uint64_t, ComputedPayload> payload = std::uint64_t{0};
  // Carried on a separate channel; excluded from the in-band total.
  bool out_of_band = false;
  std::string note;
};

// Builds the zero-valued message of `shape` and returns its encoded payload size.
std::uint64_t computed_payload_bytes(const ComputedPayload& shape);
std::uint64_t payload_bytes(const StreamSpec& spec);
std::uint64_t frame_bytes(const StreamSpec& spec);

// rate_hz * (payload + header) * 8, exact.
std::uint64_t stream_bandwidth(const StreamSpec& spec);

struct BudgetLine {
  std::string name;
  std::uint32_t rate_hz = 0;
  std::uint64_t frame_bytes = 0;
  std::uint64_t bits_per_second = 0;
  bool out_of_band = false;
};

struct BudgetReport {
  std::string title;
  std::vector<BudgetLine> lines;
  std::uint64_t total_bps = 0;
  std::uint64_t in_band_bps = 0;
};

BudgetReport budget_report(const std::vector<StreamSpec>& specs, std::string title = {});

std::string format_budget_table(const BudgetReport& report);
std::string format_budget_comparison(const BudgetReport& before, const BudgetReport& after);

}  // namespace telelink
