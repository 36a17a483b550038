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

// Binary framing for every stream that crosses the emulated link.
//
// Frame = 20-byte header || payload, all little-endian:
//
//   offset size field
//   0      2    magic 0x54 0x4C ("TL")
//   2      1    version
//   3      1    type_id
//   4      4    sequence
//   8      8    timestamp_ns
//   16     4    payload_len
//
// The wearable payload repeats, per hand:
//   hand_id u8 | J u8 | J x f32 angles | K u8 | K x f32 forces | K x f32 vibro

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace telelink {

inline constexpr std::array<std::uint8_t, 2> kFrameMagic = {0x54, 0x4C};
inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kHeaderBytes = 20;
inline constexpr float kDefaultMaxForceNewtons = 50.0f;

enum class MessageType : std::uint8_t {
  kWearable = 1,
  kVelocityTriplet = 2,
  kJointReferences = 3,
  kPing = 4,
  kPong = 5,
};

std::string_view message_type_name(MessageType type);
std::optional<MessageType> message_type_from_name(std::string_view name);
std::optional<MessageType> message_type_from_id(std::uint8_t id);

struct MessageHeader {
  std::uint8_t version = kWireVersion;
  std::uint8_t type_id = 0;
  std::uint32_t sequence = 0;
  std::uint64_t timestamp_ns = 0;
  std::uint32_t payload_len = 0;

  bool operator==(const MessageHeader&) const = default;
};

// The caller-owned part of a header; the rest is derived from the message.
struct HeaderFields {
  std::uint32_t sequence = 0;
  std::uint64_t timestamp_ns = 0;
};

enum class HandId : std::uint8_t { kLeft = 0, kRight = 1 };

struct HandFrame {
  HandId hand_id = HandId::kLeft;
  std::vector<float> joint_angles;     // rad
  std::vector<float> force_feedback;   // N, one per actuator
  std::vector<float> vibro_amplitude;  // [0, 1], one per actuator
};

struct WearableBatch {
  std::vector<HandFrame> hands;
};

// Bitwise comparison, so NaN payloads and signed zeros compare faithfully.
bool bit_equal(const WearableBatch& a, const WearableBatch& b);

struct WearableLimits {
  float max_force = kDefaultMaxForceNewtons;
};

// Throws Error(kValidation) or Error(kEncode).
void validate(const WearableBatch& batch, const WearableLimits& limits = {});

std::size_t wearable_payload_bytes(const WearableBatch& batch);
// 3 + 4J + 8K for a single hand.
constexpr std::size_t hand_payload_bytes(std::size_t joints, std::size_t actuators) {
  return 3 + 4 * joints + 8 * actuators;
}

std::vector<std::uint8_t> encode(const WearableBatch& batch, const HeaderFields& fields,
                                 const WearableLimits& limits = {});
WearableBatch decode(std::span<const std::uint8_t> frame,
                     MessageHeader* header_out = nullptr);

// Generic framing, used for the non-wearable message types.
std::vector<std::uint8_t> encode_frame(MessageType type, const HeaderFields& fields,
                                       std::span<const std::uint8_t> payload);

struct FrameView {
  MessageHeader header;
  MessageType type;
  std::span<const std::uint8_t> payload;
};

// Validates magic, version, type and length.  Throws kCorruptFrame,
// kTruncated or kUnsupportedType.
FrameView parse_frame(std::span<const std::uint8_t> frame);

struct TripletMessage {
  float linear = 0.0f;
  float angular = 0.0f;
  float lateral = 0.0f;
};

std::vector<std::uint8_t> encode_triplet(const TripletMessage& triplet,
                                         const HeaderFields& fields);
TripletMessage decode_triplet(std::span<const std::uint8_t> frame);

// Joint position / velocity / acceleration references for the body.
struct JointReferences {
  std::vector<float> position;
  std::vector<float> velocity;
  std::vector<float> acceleration;
};

std::vector<std::uint8_t> encode_joint_references(const JointReferences& refs,
                                                  const HeaderFields& fields);
JointReferences decode_joint_references(std::span<const std::uint8_t> frame);

std::vector<std::uint8_t> encode_ping(MessageType type, std::uint64_t origin_ns,
                                      const HeaderFields& fields);
std::uint64_t decode_ping(std::span<const std::uint8_t> frame);

}  // namespace telelink
