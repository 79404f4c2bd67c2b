//
// Copyright 2026 The LLQFP Authors
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

// Seedable, splittable uniform source.
//
// Every stream is a std::mt19937_64 engine whose seed is derived from a
// (seed, stream index) pair through the SplitMix64 finalizer, so stream k of
// seed s is reproducible independently of how many other streams were used.
// Uniforms are built from the top 53 bits of each 64-bit output; this avoids
// std::uniform_real_distribution, whose output is implementation-defined.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace llqfp {

// Recorded in output metadata so results can be regenerated.
inline constexpr std::string_view kGeneratorId = "mt19937_64/splitmix64-v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(derive_seed(seed, stream)) {}

  // Uniform on [0, 1) with 53 bits of resolution.
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next_bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace llqfp
