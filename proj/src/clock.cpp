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

#include "telelink/clock.hpp"

#include "telelink/error.hpp"

namespace telelink {

Clock::Clock(Mode mode, Nanos start)
    : mode_(mode), origin_(std::chrono::steady_clock::now()), now_(start.count()) {}

Nanos Clock::now() const {
  if (mode_ == Mode::kWall) {
    return std::chrono::duration_cast<Nanos>(std::chrono::steady_clock::now() - origin_);
  }
  return Nanos(now_.load());
}

void Clock::advance(Nanos dt) {
  if (mode_ != Mode::kSimulated) {
    throw Error(ErrorCode::kInvalidArgument, "wall clocks cannot be stepped");
  }
  if (dt < Nanos{0}) throw Error(ErrorCode::kInvalidArgument, "clock step must be non-negative");
  now_.fetch_add(dt.count());
}

}  // namespace telelink
