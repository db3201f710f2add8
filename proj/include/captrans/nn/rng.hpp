/* Copyright 2026 The captrans Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace captrans::nn {

/// SplitMix64-based generator. Every distribution here is implemented by hand
/// so a seed reproduces the same stream on any platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller; caches the second variate.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream. Does not advance this generator.
  Rng split(std::uint64_t stream) const;

  template <class T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t mix64(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::span<const unsigned char> bytes);

/// Combines a base seed with a label and integer coordinates into a new seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                          std::span<const std::int64_t> coords = {});
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label,
                                 std::initializer_list<std::int64_t> coords) {
  return derive_seed(base, label, std::span<const std::int64_t>(coords.begin(), coords.size()));
}

}  // namespace captrans::nn
