// Copyright 2026 The Authors.
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

#ifndef FAIRREC_RNG_H_
#define FAIRREC_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace fairrec {

// mt19937_64 keyed by (seed, stream) through std::seed_seq, with uniforms
// built from raw 53-bit draws so sequences do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  double Uniform();  // [0, 1)
  std::size_t UniformIndex(std::size_t n);
  // Index drawn with the given (nonnegative, summing to ~1) probabilities.
  std::size_t Categorical(std::span<const double> probs);
  bool Bernoulli(double p) { return Uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

// Independent streams so that changing the policy path never perturbs the
// arrival sequence.
struct RngStreams {
  explicit RngStreams(std::uint64_t seed)
      : arrivals(seed, 1), purchases(seed, 2), items(seed, 3) {}
  Rng arrivals;
  Rng purchases;
  Rng items;
};

}  // namespace fairrec

#endif  // FAIRREC_RNG_H_
