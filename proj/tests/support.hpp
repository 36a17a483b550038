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

// Hand-rolled generators for the property tests.  Every generator takes the
// Gen explicitly so a failing case can be replayed from its seed.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "telelink/kinematics.hpp"
#include "telelink/so3.hpp"
#include "telelink/wire.hpp"

namespace telelink::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  std::uint64_t bits() { return rng_(); }

  // Any 32-bit pattern: NaNs, infinities, denormals and signed zeros included.
  float any_float() {
    const auto raw = static_cast<std::uint32_t>(rng_());
    float f;
    std::memcpy(&f, &raw, sizeof f);
    return f;
  }

  Eigen::Vector3d unit_vector() {
    Eigen::Vector3d v;
    do {
      v = {uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
    } while (v.norm() < 0.1 || v.norm() > 1.0);
    return v.normalized();
  }

  Eigen::Matrix3d rotation() { return so3_exp(unit_vector() * uniform(0.0, 3.1)); }

  Eigen::Isometry3d transform(double reach = 1.0) {
    Eigen::Vector3d p(uniform(-reach, reach), uniform(-reach, reach), uniform(-reach, reach));
    return make_transform(rotation(), p);
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline HandFrame random_hand(Gen& g, HandId id, std::size_t max_joints = 40,
                             std::size_t max_actuators = 10) {
  HandFrame h;
  h.hand_id = id;
  const auto joints = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(max_joints)));
  const auto actuators =
      static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(max_actuators)));
  for (std::size_t j = 0; j < joints; ++j) {
    h.joint_angles.push_back(g.coin(0.9) ? static_cast<float>(g.uniform(-3.2, 3.2))
                                         : g.any_float());
  }
  for (std::size_t k = 0; k < actuators; ++k) {
    h.force_feedback.push_back(static_cast<float>(g.uniform(0.0, kDefaultMaxForceNewtons)));
    h.vibro_amplitude.push_back(static_cast<float>(g.uniform(0.0, 1.0)));
  }
  if (actuators > 0 && g.coin(0.1)) h.force_feedback[0] = 0.0f;
  if (actuators > 0 && g.coin(0.1)) h.vibro_amplitude[0] = 1.0f;
  return h;
}

inline WearableBatch random_batch(Gen& g) {
  WearableBatch b;
  switch (g.integer(0, 3)) {
    case 0: break;
    case 1: b.hands.push_back(random_hand(g, HandId::kLeft)); break;
    case 2: b.hands.push_back(random_hand(g, HandId::kRight)); break;
    default:
      b.hands.push_back(random_hand(g, g.coin() ? HandId::kLeft : HandId::kRight));
      b.hands.push_back(random_hand(
          g, b.hands[0].hand_id == HandId::kLeft ? HandId::kRight : HandId::kLeft));
  }
  // Occasionally exercise the 255-element ceiling.
  if (!b.hands.empty() && g.coin(0.02)) {
    b.hands[0].joint_angles.assign(255, 0.25f);
  }
  return b;
}

// Random serial chain with `joints` revolute joints and a fixed tool link.
inline KinChain random_chain(Gen& g, std::size_t joints) {
  std::vector<Link> links;
  links.push_back({"root", Eigen::Isometry3d::Identity(), std::nullopt});
  for (std::size_t i = 0; i < joints; ++i) {
    Link l;
    l.name = "j" + std::to_string(i);
    l.origin = make_transform(so3_exp(g.unit_vector() * g.uniform(0.0, 1.5)),
                              Eigen::Vector3d(g.uniform(-0.4, 0.4), g.uniform(-0.4, 0.4),
                                              g.uniform(-0.4, 0.4)));
    l.joint = RevoluteJoint{g.unit_vector(), {-3.0, 3.0}};
    links.push_back(l);
  }
  links.push_back({"tool", make_transform(Eigen::Matrix3d::Identity(), {0.1, 0.0, 0.05}),
                   std::nullopt});
  return KinChain(links);
}

inline Eigen::VectorXd random_q(Gen& g, const KinChain& chain, double margin = 0.2) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(chain.joint_count()));
  for (std::size_t i = 0; i < chain.joint_count(); ++i) {
    const auto& lim = chain.limits(i);
    q[static_cast<Eigen::Index>(i)] = g.uniform(lim.min + margin, lim.max - margin);
  }
  return q;
}

// Planar chain in the x-y plane, z-axis joints, unit-free link lengths.
inline KinChain planar_chain(const std::vector<double>& lengths) {
  std::vector<Link> links;
  links.push_back({"base", Eigen::Isometry3d::Identity(), RevoluteJoint{}});
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    Link l;
    l.name = i + 1 == lengths.size() ? "tip" : "link" + std::to_string(i + 1);
    l.origin = make_transform(Eigen::Matrix3d::Identity(), {lengths[i], 0.0, 0.0});
    if (i + 1 < lengths.size()) l.joint = RevoluteJoint{};
    links.push_back(l);
  }
  return KinChain(links);
}

inline std::filesystem::path source_dir() { return TELELINK_SOURCE_DIR; }

}  // namespace telelink::testing
