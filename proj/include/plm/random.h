//
// Copyright 2026 The Piecewise Laplace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PLM_RANDOM_H_
#define PLM_RANDOM_H_

#include <cstdint>

namespace plm {

// Counter-based splitmix64 stream. Draw k of a stream seeded with s is a pure
// function of (s, k), so a batch can be split across threads with Skip() and
// still reproduce the serial sequence bit for bit.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t NextBits() {
    state_ += kGamma;
    return Mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double NextUniform() {
    return static_cast<double>(NextBits() >> 11) * 0x1.0p-53;
  }

  void Skip(std::uint64_t draws) { state_ += kGamma * draws; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  static std::uint64_t Mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace plm

#endif  // PLM_RANDOM_H_
