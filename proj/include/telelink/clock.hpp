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

#include <atomic>
#include <chrono>
#include <cstdint>

namespace telelink {

using Nanos = std::chrono::nanoseconds;

inline constexpr Nanos from_seconds(double s) {
  return Nanos(static_cast<std::int64_t>(s * 1e9 + (s >= 0 ? 0.5 : -0.5)));
}
inline constexpr double to_seconds(Nanos t) { return static_cast<double>(t.count()) * 1e-9; }

// Time source shared by the link, the bridge and the scenario runner.
// Simulated time only moves through advance(); wall time follows
// std::chrono::steady_clock from construction.
class Clock {
 public:
  enum class Mode { kSimulated, kWall };

  static Clock simulated(Nanos start = Nanos{0}) { return Clock(Mode::kSimulated, start); }
  static Clock wall() { return Clock(Mode::kWall, Nanos{0}); }

  Clock(const Clock& other)
      : mode_(other.mode_), origin_(other.origin_), now_(other.now_.load()) {}

  Mode mode() const { return mode_; }
  Nanos now() const;
  // Throws Error(kInvalidArgument) on wall clocks or negative steps.
  void advance(Nanos dt);

 private:
  Clock(Mode mode, Nanos start);

  Mode mode_;
  std::chrono::steady_clock::time_point origin_;
  std::atomic<std::int64_t> now_;
};

}  // namespace telelink
