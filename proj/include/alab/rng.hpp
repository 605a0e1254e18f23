/*
 * Copyright 2026 The alab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef ALAB_RNG_HPP_
#define ALAB_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace alab {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// FNV-1a, used to turn a stream name into a 64-bit key.
constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives independent generators from one master seed.
//
// Every consumer asks for a named stream plus an optional tuple of counters
// (epoch, instance id, batch index, ...). The resulting seed is a pure
// function of (master, name, counters), so the number of draws taken from
// one stream never shifts the values another stream sees, and per-instance
// streams can be evaluated in any order or in parallel.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  std::uint64_t derive(std::string_view name,
                       std::initializer_list<std::uint64_t> counters = {}) const {
    std::uint64_t s = mix64(master_ ^ mix64(hash_name(name)));
    for (std::uint64_t c : counters) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    return s;
  }

  Rng stream(std::string_view name,
             std::initializer_list<std::uint64_t> counters = {}) const {
    return Rng(derive(name, counters));
  }

 private:
  std::uint64_t master_;
};

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace alab

#endif  // ALAB_RNG_HPP_
