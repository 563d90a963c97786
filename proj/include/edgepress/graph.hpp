// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgepress/quant.hpp"

namespace edgepress {

using Shape = std::vector<std::int64_t>;

enum class DType { Float32, Int8, UInt8, Int32 };

enum class OpKind {
  Conv2d,
  Add,
  Mul,
  Concat,
  Split,
  MaxPool,
  Upsample,
  SiLU,
  Sigmoid,
  QuantizeLinear,
  DequantizeLinear,
  Identity,
};

inline constexpr const char* kGraphInput = "graph-input";
inline constexpr const char* kConstant = "constant";

std::string to_string(DType t);
std::string to_string(OpKind op);
DType parse_dtype(const std::string& s);
/// Throws std::invalid_argument for unknown names.
OpKind parse_op_kind(const std::string& s);
std::size_t dtype_size(DType t);

std::int64_t element_count(const Shape& shape);

struct TensorSpec {
  std::string id;
  DType dtype = DType::Float32;
  Shape shape;
  /// Node id, kGraphInput, or kConstant.
  std::string producer;

  bool operator==(const TensorSpec&) const = default;
};

/// Constant payload. Integer dtypes keep their codes as exact float values.
struct Constant {
  DType dtype = DType::Float32;
  Shape shape;
  std::vector<float> values;

  bool operator==(const Constant&) const = default;
};

/// Runtime tensor: row-major NCHW buffer whose length equals the shape's
/// element count. Integer codes are held as exact float values.
struct TensorValue {
  TensorSpec spec;
  std::vector<float> data;

  bool operator==(const TensorValue&) const = default;
};

struct Attrs {
  std::array<std::int64_t, 2> kernel{1, 1};
  std::array<std::int64_t, 2> stride{1, 1};
  std::array<std::int64_t, 2> pad{0, 0};
  std::int64_t groups = 1;
  std::int64_t axis = 1;
  std::vector<std::int64_t> split;
  std::int64_t scale = 2;
  std::vector<std::string> tags;
  std::optional<QuantParams> quant;

  bool has_tag(const std::string& tag) const;
  bool operator==(const Attrs&) const = default;
};

struct Node {
  std::string id;
  OpKind op = OpKind::Identity;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  Attrs attrs;
  /// Role ("kernel", "bias") to tensor id.
  std::map<std::string, std::string> weights;

  bool operator==(const Node&) const = default;
};

/// Directed acyclic compute graph. Batch is fixed at 1 and feature maps are
/// NCHW. Rewrites copy the graph; nothing mutates a validated graph in place.
struct ModelGraph {
  std::string name = "model";
  std::string version = "1";
  std::vector<Node> nodes;
  std::map<std::string, TensorSpec> tensors;
  std::map<std::string, Constant> constants;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  const Node* find_node(const std::string& id) const;
  Node* find_node(const std::string& id);
  const TensorSpec& tensor(const std::string& id) const;

  /// Node ids that read `tensor_id` as an input or weight.
  std::vector<std::string> consumers(const std::string& tensor_id) const;

  bool operator==(const ModelGraph&) const = default;
};

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Small builder used by fixtures and tests. Appends nodes and records their
/// output tensors; shapes are filled by shape inference afterwards.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::string name = "model");

  std::string input(const std::string& id, Shape shape);
  std::string constant(const std::string& id, Shape shape, std::vector<float> values,
                       DType dtype = DType::Float32);

  std::string conv(const std::string& id, const std::string& x, std::vector<float> kernel,
                   Shape kernel_shape, std::vector<float> bias = {}, std::int64_t stride = 1,
                   std::int64_t pad = 0, std::int64_t groups = 1);
  std::string unary(const std::string& id, OpKind op, const std::string& x);
  std::string binary(const std::string& id, OpKind op, const std::string& a, const std::string& b);
  std::string concat(const std::string& id, std::vector<std::string> xs, std::int64_t axis = 1);
  std::vector<std::string> split(const std::string& id, const std::string& x,
                                 std::vector<std::int64_t> sizes, std::int64_t axis = 1);
  std::string maxpool(const std::string& id, const std::string& x, std::int64_t kernel,
                      std::int64_t stride, std::int64_t pad);
  std::string upsample(const std::string& id, const std::string& x, std::int64_t scale);

  void tag(const std::string& node_id, const std::string& tag);
  void output(const std::string& tensor_id);

  /// Runs shape inference and returns the finished graph. Throws on any
  /// validation issue.
  ModelGraph build() const;

 private:
  std::string add_node(Node node, std::size_t outputs = 1);
  ModelGraph g_;
};

}  // namespace edgepress
