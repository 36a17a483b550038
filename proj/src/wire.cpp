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

#include "telelink/wire.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>

#include "telelink/error.hpp"

namespace telelink {
namespace {

class Writer {
 public:
  explicit Writer(std::vector<std::uint8_t>* out) : out_(out) {}

  void u8(std::uint8_t v) { out_->push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out_->push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  std::vector<std::uint8_t>* out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  float f32() { return std::bit_cast<float>(u32()); }

  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::uint64_t get(std::size_t bytes) {
    if (remaining() < bytes) {
      throw Error(ErrorCode::kTruncated,
                  fmt::format("payload ends at byte {} while reading {} more", pos_, bytes));
    }
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bytes; ++i) {
      v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += bytes;
    return v;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

void write_header(Writer& w, MessageType type, const HeaderFields& fields,
                  std::size_t payload_len) {
  w.u8(kFrameMagic[0]);
  w.u8(kFrameMagic[1]);
  w.u8(kWireVersion);
  w.u8(static_cast<std::uint8_t>(type));
  w.u32(fields.sequence);
  w.u64(fields.timestamp_ns);
  w.u32(static_cast<std::uint32_t>(payload_len));
}

FrameView expect(std::span<const std::uint8_t> frame, MessageType type) {
  FrameView view = parse_frame(frame);
  if (view.type != type) {
    throw Error(ErrorCode::kUnsupportedType,
                fmt::format("expected {} frame, got {}", message_type_name(type),
                            message_type_name(view.type)));
  }
  return view;
}

bool bits_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

}  // namespace

std::string_view message_type_name(MessageType type) {
  switch (type) {
    case MessageType::kWearable: return "wearable";
    case MessageType::kVelocityTriplet: return "velocity_triplet";
    case MessageType::kJointReferences: return "joint_references";
    case MessageType::kPing: return "ping";
    case MessageType::kPong: return "pong";
  }
  return "unknown";
}

std::optional<MessageType> message_type_from_name(std::string_view name) {
  for (auto t : {MessageType::kWearable, MessageType::kVelocityTriplet,
                 MessageType::kJointReferences, MessageType::kPing, MessageType::kPong}) {
    if (message_type_name(t) == name) return t;
  }
  return std::nullopt;
}

std::optional<MessageType> message_type_from_id(std::uint8_t id) {
  if (id >= 1 && id <= 5) return static_cast<MessageType>(id);
  return std::nullopt;
}

bool bit_equal(const WearableBatch& a, const WearableBatch& b) {
  if (a.hands.size() != b.hands.size()) return false;
  for (std::size_t i = 0; i < a.hands.size(); ++i) {
    const auto& ha = a.hands[i];
    const auto& hb = b.hands[i];
    if (ha.hand_id != hb.hand_id || !bits_equal(ha.joint_angles, hb.joint_angles) ||
        !bits_equal(ha.force_feedback, hb.force_feedback) ||
        !bits_equal(ha.vibro_amplitude, hb.vibro_amplitude)) {
      return false;
    }
  }
  return true;
}

void validate(const WearableBatch& batch, const WearableLimits& limits) {
  if (batch.hands.size() > 2) {
    throw Error(ErrorCode::kValidation,
                fmt::format("batch carries {} hands, at most 2 allowed", batch.hands.size()));
  }
  bool seen[2] = {false, false};
  for (const auto& hand : batch.hands) {
    const auto id = static_cast<std::uint8_t>(hand.hand_id);
    if (id > 1) throw Error(ErrorCode::kValidation, fmt::format("bad hand_id {}", id));
    if (seen[id]) throw Error(ErrorCode::kValidation, "duplicate hand_id in batch");
    seen[id] = true;

    if (hand.joint_angles.size() > 255) {
      throw Error(ErrorCode::kEncode,
                  fmt::format("{} joint angles exceed the 255 limit", hand.joint_angles.size()));
    }
    if (hand.force_feedback.size() > 255 || hand.vibro_amplitude.size() > 255) {
      throw Error(ErrorCode::kEncode, "actuator count exceeds the 255 limit");
    }
    if (hand.force_feedback.size() != hand.vibro_amplitude.size()) {
      throw Error(ErrorCode::kValidation,
                  fmt::format("force ({}) and vibro ({}) actuator counts differ",
                              hand.force_feedback.size(), hand.vibro_amplitude.size()));
    }
    for (float v : hand.vibro_amplitude) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw Error(ErrorCode::kValidation, fmt::format("vibro amplitude {} outside [0,1]", v));
      }
    }
    for (float f : hand.force_feedback) {
      if (!(f >= 0.0f && f <= limits.max_force)) {
        throw Error(ErrorCode::kValidation,
                    fmt::format("force {} N outside [0, {}]", f, limits.max_force));
      }
    }
  }
}

std::size_t wearable_payload_bytes(const WearableBatch& batch) {
  std::size_t total = 0;
  for (const auto& hand : batch.hands) {
    total += hand_payload_bytes(hand.joint_angles.size(), hand.force_feedback.size());
  }
  return total;
}

std::vector<std::uint8_t> encode(const WearableBatch& batch, const HeaderFields& fields,
                                 const WearableLimits& limits) {
  validate(batch, limits);
  const std::size_t payload = wearable_payload_bytes(batch);
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload);
  Writer w(&out);
  write_header(w, MessageType::kWearable, fields, payload);
  for (const auto& hand : batch.hands) {
    w.u8(static_cast<std::uint8_t>(hand.hand_id));
    w.u8(static_cast<std::uint8_t>(hand.joint_angles.size()));
    for (float v : hand.joint_angles) w.f32(v);
    w.u8(static_cast<std::uint8_t>(hand.force_feedback.size()));
    for (float v : hand.force_feedback) w.f32(v);
    for (float v : hand.vibro_amplitude) w.f32(v);
  }
  return out;
}

FrameView parse_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kHeaderBytes) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("frame of {} bytes is shorter than the header", frame.size()));
  }
  if (frame[0] != kFrameMagic[0] || frame[1] != kFrameMagic[1]) {
    throw Error(ErrorCode::kCorruptFrame,
                fmt::format("bad magic {:02x}{:02x}", frame[0], frame[1]));
  }
  Reader r(frame.subspan(2));
  MessageHeader header;
  header.version = r.u8();
  header.type_id = r.u8();
  header.sequence = r.u32();
  header.timestamp_ns = r.u64();
  header.payload_len = r.u32();
  if (header.version != kWireVersion) {
    throw Error(ErrorCode::kUnsupportedType,
                fmt::format("unsupported wire version {}", header.version));
  }
  const auto type = message_type_from_id(header.type_id);
  if (!type) {
    throw Error(ErrorCode::kUnsupportedType, fmt::format("unknown type_id {}", header.type_id));
  }
  if (frame.size() - kHeaderBytes != header.payload_len) {
    throw Error(ErrorCode::kTruncated,
                fmt::format("payload_len {} but {} payload bytes present", header.payload_len,
                            frame.size() - kHeaderBytes));
  }
  return FrameView{header, *type, frame.subspan(kHeaderBytes)};
}

WearableBatch decode(std::span<const std::uint8_t> frame, MessageHeader* header_out) {
  const FrameView view = expect(frame, MessageType::kWearable);
  Reader r(view.payload);
  WearableBatch batch;
  while (r.remaining() > 0) {
    HandFrame hand;
    const std::uint8_t id = r.u8();
    if (id > 1) throw Error(ErrorCode::kCorruptFrame, fmt::format("bad hand_id {}", id));
    hand.hand_id = static_cast<HandId>(id);
    hand.joint_angles.resize(r.u8());
    for (auto& v : hand.joint_angles) v = r.f32();
    const std::size_t actuators = r.u8();
    hand.force_feedback.resize(actuators);
    hand.vibro_amplitude.resize(actuators);
    for (auto& v : hand.force_feedback) v = r.f32();
    for (auto& v : hand.vibro_amplitude) v = r.f32();
    batch.hands.push_back(std::move(hand));
    if (batch.hands.size() > 2) {
      throw Error(ErrorCode::kCorruptFrame, "more than two hands in wearable frame");
    }
  }
  if (batch.hands.size() == 2 && batch.hands[0].hand_id == batch.hands[1].hand_id) {
    throw Error(ErrorCode::kCorruptFrame, "duplicate hand_id in wearable frame");
  }
  if (header_out) *header_out = view.header;
  return batch;
}

std::vector<std::uint8_t> encode_frame(MessageType type, const HeaderFields& fields,
                                       std::span<const std::uint8_t> payload) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + payload.size());
  Writer w(&out);
  write_header(w, type, fields, payload.size());
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

std::vector<std::uint8_t> encode_triplet(const TripletMessage& triplet,
                                         const HeaderFields& fields) {
  std::vector<std::uint8_t> payload;
  Writer w(&payload);
  w.f32(triplet.linear);
  w.f32(triplet.angular);
  w.f32(triplet.lateral);
  return encode_frame(MessageType::kVelocityTriplet, fields, payload);
}

TripletMessage decode_triplet(std::span<const std::uint8_t> frame) {
  const FrameView view = expect(frame, MessageType::kVelocityTriplet);
  Reader r(view.payload);
  TripletMessage t;
  t.linear = r.f32();
  t.angular = r.f32();
  t.lateral = r.f32();
  if (r.remaining() != 0) throw Error(ErrorCode::kCorruptFrame, "trailing triplet bytes");
  return t;
}

std::vector<std::uint8_t> encode_joint_references(const JointReferences& refs,
                                                  const HeaderFields& fields) {
  const std::size_t n = refs.position.size();
  if (refs.velocity.size() != n || refs.acceleration.size() != n) {
    throw Error(ErrorCode::kValidation, "joint reference vectors differ in length");
  }
  if (n > 0xFFFF) throw Error(ErrorCode::kEncode, "too many joints for one reference frame");
  std::vector<std::uint8_t> payload;
  payload.reserve(2 + 12 * n);
  Writer w(&payload);
  w.u16(static_cast<std::uint16_t>(n));
  for (float v : refs.position) w.f32(v);
  for (float v : refs.velocity) w.f32(v);
  for (float v : refs.acceleration) w.f32(v);
  return encode_frame(MessageType::kJointReferences, fields, payload);
}

JointReferences decode_joint_references(std::span<const std::uint8_t> frame) {
  const FrameView view = expect(frame, MessageType::kJointReferences);
  Reader r(view.payload);
  const std::size_t n = r.u16();
  JointReferences refs;
  refs.position.resize(n);
  refs.velocity.resize(n);
  refs.acceleration.resize(n);
  for (auto& v : refs.position) v = r.f32();
  for (auto& v : refs.velocity) v = r.f32();
  for (auto& v : refs.acceleration) v = r.f32();
  if (r.remaining() != 0) throw Error(ErrorCode::kCorruptFrame, "trailing reference bytes");
  return refs;
}

std::vector<std::uint8_t> encode_ping(MessageType type, std::uint64_t origin_ns,
                                      const HeaderFields& fields) {
  if (type != MessageType::kPing && type != MessageType::kPong) {
    throw Error(ErrorCode::kInvalidArgument, "ping frames must be ping or pong");
  }
  std::vector<std::uint8_t> payload;
  Writer w(&payload);
  w.u64(origin_ns);
  return encode_frame(type, fields, payload);
}

std::uint64_t decode_ping(std::span<const std::uint8_t> frame) {
  const FrameView view = parse_frame(frame);
  if (view.type != MessageType::kPing && view.type != MessageType::kPong) {
    throw Error(ErrorCode::kUnsupportedType, "not a ping/pong frame");
  }
  Reader r(view.payload);
  const std::uint64_t t = r.u64();
  if (r.remaining() != 0) throw Error(ErrorCode::kCorruptFrame, "trailing ping bytes");
  return t;
}

}  // namespace telelink
