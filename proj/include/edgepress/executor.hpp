// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"
#include "edgepress/quant.hpp"

namespace edgepress {

enum class ExecMode {
  /// QuantizeLinear/DequantizeLinear on activations pass values through.
  /// Integer constants feeding a DequantizeLinear are still dequantized, since
  /// that is the only form in which those weights exist.
  Float,
  /// QuantizeLinear applies the affine quantizer, DequantizeLinear its
  /// inverse. All other arithmetic stays float32.
  QdqSimulated,
};

/// Graph inputs and every node output, keyed by tensor id.
struct ExecutionTrace {
  ExecMode mode = ExecMode::Float;
  std::map<std::string, TensorValue> values;

  const TensorValue& at(const std::string& id) const;
};

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference interpreter. Nodes run in the lexicographic topological order;
/// each kernel accumulates in a fixed loop order so results are bit-identical
/// across runs.
ExecutionTrace run(const ModelGraph& g, std::span<const TensorValue> inputs, ExecMode mode = ExecMode::Float);

/// Graph outputs of `run`, in graph output order.
std::vector<TensorValue> run_outputs(const ModelGraph& g, std::span<const TensorValue> inputs,
                                     ExecMode mode = ExecMode::Float);

/// Element-wise quantize/dequantize of a whole buffer with per-element param
/// lookup.
std::vector<float> quantize_tensor(std::span<const float> x, const Shape& shape, const QuantParams& p);
std::vector<float> dequantize_tensor(std::span<const float> q, const Shape& shape, const QuantParams& p);

float silu(float x);
float sigmoid(float x);

}  // namespace edgepress
