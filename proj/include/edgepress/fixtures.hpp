// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"

namespace edgepress {

/// Seeded generator with a platform-independent output sequence: the
/// mt19937_64 engine is fully specified and the float conversions are done
/// here rather than by library distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  /// Uniform integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

enum class FixtureKind { ToyYolo, Chain, Residual, Concat };

std::string to_string(FixtureKind k);
FixtureKind parse_fixture_kind(const std::string& s);

/// Deterministic synthetic models. toy_yolo is a miniature detector (stem
/// convs, a split/bottleneck/concat block, a pooling pyramid, an
/// upsample/concat neck and two tagged heads) on a 1x3x32x32 input. The
/// other kinds are small randomized networks with zero-preserving
/// activations, sized by the seed.
ModelGraph gen_fixture(FixtureKind kind, std::uint64_t seed);

/// `count` inputs for a single-input graph, uniform in [-1, 1].
std::vector<TensorValue> gen_samples(const ModelGraph& g, std::size_t count, std::uint64_t seed);

}  // namespace edgepress
