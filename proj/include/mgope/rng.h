// Copyright 2026 The mgope Authors.
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

#ifndef MGOPE_RNG_H_
#define MGOPE_RNG_H_

#include <array>
#include <cstdint>
#include <span>

namespace mgope {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> Philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Counter-based stream: the key is the seed, the upper counter words hold a
// 64-bit stream id and the lower words count blocks. Two streams with the
// same (seed, stream) always produce the same sequence regardless of what
// other streams were drawn before, which is what makes parallel simulation
// order-independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return NextU64(); }

  std::uint64_t NextU64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  double Normal();
  // Inverse-CDF draw. Mass is assumed to sum to one; round-off at the tail
  // resolves to the last index with positive mass.
  int Categorical(std::span<const double> probs);
  // Uniform integer on [0, bound).
  std::uint64_t Below(std::uint64_t bound);

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

// Packs (major, minor, substream) into one stream id: major takes 32 bits,
// minor and substream 16 bits each.
std::uint64_t StreamId(std::uint64_t major, std::uint64_t minor,
                       std::uint64_t substream);

// Deterministic child seed, e.g. per trial of an experiment.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t index);

}  // namespace mgope

#endif  // MGOPE_RNG_H_
