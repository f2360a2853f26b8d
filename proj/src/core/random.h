// Copyright 2026 The ldpfo Authors
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

#ifndef LDPFO_CORE_RANDOM_H_
#define LDPFO_CORE_RANDOM_H_

#include <cstdint>
#include <limits>

namespace ldpfo {

// Root of every random stream in the library. Two runs with equal seeds
// produce identical outputs.
struct RngSeed {
  uint64_t value = 0;

  friend bool operator==(RngSeed a, RngSeed b) { return a.value == b.value; }
};

// Finalizer from MurmurHash3. A bijection on 64-bit words.
constexpr uint64_t Mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

// SplitMix64 (Steele, Lea, Flood). Small state, so one generator per
// simulated user is cheap. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = uint64_t;

  explicit SplitMix64(RngSeed seed) : state_(seed.value) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

// Child seed for stream `index` of `parent`. Pure, so work keyed by index can
// run in any order or on any thread.
constexpr RngSeed DeriveSeed(RngSeed parent, uint64_t index) {
  return RngSeed{Mix64(parent.value ^ Mix64(index + 0x632be59bd9b4e019ULL))};
}

// Maps a uniform 64-bit word onto [0, range) with a multiply-high.
constexpr uint64_t ReduceToRange(uint64_t word, uint64_t range) {
  return static_cast<uint64_t>(
      (static_cast<unsigned __int128>(word) * range) >> 64);
}

template <typename Gen>
double UniformDouble(Gen& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

template <typename Gen>
uint64_t UniformIndex(Gen& gen, uint64_t range) {
  return ReduceToRange(gen(), range);
}

}  // namespace ldpfo

#endif  // LDPFO_CORE_RANDOM_H_
