// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/graph.hpp"

#include <algorithm>
#include <utility>

#include "edgepress/validate.hpp"

namespace edgepress {

namespace {

constexpr std::pair<OpKind, const char*> kOpNames[] = {
    {OpKind::Conv2d, "Conv2d"},
    {OpKind::Add, "Add"},
    {OpKind::Mul, "Mul"},
    {OpKind::Concat, "Concat"},
    {OpKind::Split, "Split"},
    {OpKind::MaxPool, "MaxPool"},
    {OpKind::Upsample, "Upsample"},
    {OpKind::SiLU, "SiLU"},
    {OpKind::Sigmoid, "Sigmoid"},
    {OpKind::QuantizeLinear, "QuantizeLinear"},
    {OpKind::DequantizeLinear, "DequantizeLinear"},
    {OpKind::Identity, "Identity"},
};

}  // namespace

std::string to_string(DType t) {
  switch (t) {
    case DType::Float32: return "float32";
    case DType::Int8: return "int8";
    case DType::UInt8: return "uint8";
    case DType::Int32: return "int32";
  }
  return "float32";
}

DType parse_dtype(const std::string& s) {
  if (s == "float32") return DType::Float32;
  if (s == "int8") return DType::Int8;
  if (s == "uint8") return DType::UInt8;
  if (s == "int32") return DType::Int32;
  throw std::invalid_argument("unknown dtype '" + s + "'");
}

std::size_t dtype_size(DType t) {
  switch (t) {
    case DType::Float32: return 4;
    case DType::Int8: return 1;
    case DType::UInt8: return 1;
    case DType::Int32: return 4;
  }
  return 4;
}

std::string to_string(OpKind op) {
  for (const auto& [kind, name] : kOpNames)
    if (kind == op) return name;
  return "Identity";
}

OpKind parse_op_kind(const std::string& s) {
  for (const auto& [kind, name] : kOpNames)
    if (s == name) return kind;
  throw std::invalid_argument("unknown op_kind '" + s + "'");
}

std::int64_t element_count(const Shape& shape) {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

bool Attrs::has_tag(const std::string& tag) const {
  return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const Node* ModelGraph::find_node(const std::string& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

Node* ModelGraph::find_node(const std::string& id) {
  for (auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

const TensorSpec& ModelGraph::tensor(const std::string& id) const {
  auto it = tensors.find(id);
  if (it == tensors.end()) throw GraphError("unknown tensor '" + id + "'");
  return it->second;
}

std::vector<std::string> ModelGraph::consumers(const std::string& tensor_id) const {
  std::vector<std::string> out;
  for (const auto& n : nodes) {
    bool uses = std::find(n.inputs.begin(), n.inputs.end(), tensor_id) != n.inputs.end();
    for (const auto& [role, t] : n.weights) uses = uses || t == tensor_id;
    if (uses) out.push_back(n.id);
  }
  return out;
}

GraphBuilder::GraphBuilder(std::string name) { g_.name = std::move(name); }

std::string GraphBuilder::input(const std::string& id, Shape shape) {
  g_.tensors[id] = TensorSpec{id, DType::Float32, std::move(shape), kGraphInput};
  g_.inputs.push_back(id);
  return id;
}

std::string GraphBuilder::constant(const std::string& id, Shape shape, std::vector<float> values,
                                   DType dtype) {
  g_.tensors[id] = TensorSpec{id, dtype, shape, kConstant};
  g_.constants[id] = Constant{dtype, std::move(shape), std::move(values)};
  return id;
}

std::string GraphBuilder::add_node(Node node, std::size_t outputs) {
  if (node.outputs.empty()) {
    if (outputs == 1) {
      node.outputs.push_back(node.id);
    } else {
      for (std::size_t i = 0; i < outputs; ++i) node.outputs.push_back(node.id + ":" + std::to_string(i));
    }
  }
  for (const auto& t : node.outputs) g_.tensors[t] = TensorSpec{t, DType::Float32, {}, node.id};
  g_.nodes.push_back(node);
  return node.outputs.front();
}

std::string GraphBuilder::conv(const std::string& id, const std::string& x, std::vector<float> kernel,
                               Shape kernel_shape, std::vector<float> bias, std::int64_t stride,
                               std::int64_t pad, std::int64_t groups) {
  Node n;
  n.id = id;
  n.op = OpKind::Conv2d;
  n.inputs = {x};
  if (kernel_shape.size() == 4) n.attrs.kernel = {kernel_shape[2], kernel_shape[3]};
  n.attrs.stride = {stride, stride};
  n.attrs.pad = {pad, pad};
  n.attrs.groups = groups;
  const Shape bias_shape{kernel_shape.empty() ? 0 : kernel_shape[0]};
  n.weights["kernel"] = constant(id + ".kernel", std::move(kernel_shape), std::move(kernel));
  if (!bias.empty()) n.weights["bias"] = constant(id + ".bias", bias_shape, std::move(bias));
  return add_node(std::move(n));
}

std::string GraphBuilder::unary(const std::string& id, OpKind op, const std::string& x) {
  Node n;
  n.id = id;
  n.op = op;
  n.inputs = {x};
  return add_node(std::move(n));
}

std::string GraphBuilder::binary(const std::string& id, OpKind op, const std::string& a,
                                 const std::string& b) {
  Node n;
  n.id = id;
  n.op = op;
  n.inputs = {a, b};
  return add_node(std::move(n));
}

std::string GraphBuilder::concat(const std::string& id, std::vector<std::string> xs, std::int64_t axis) {
  Node n;
  n.id = id;
  n.op = OpKind::Concat;
  n.inputs = std::move(xs);
  n.attrs.axis = axis;
  return add_node(std::move(n));
}

std::vector<std::string> GraphBuilder::split(const std::string& id, const std::string& x,
                                             std::vector<std::int64_t> sizes, std::int64_t axis) {
  Node n;
  n.id = id;
  n.op = OpKind::Split;
  n.inputs = {x};
  n.attrs.axis = axis;
  const auto count = sizes.size();
  n.attrs.split = std::move(sizes);
  add_node(n, count);
  return g_.nodes.back().outputs;
}

std::string GraphBuilder::maxpool(const std::string& id, const std::string& x, std::int64_t kernel,
                                  std::int64_t stride, std::int64_t pad) {
  Node n;
  n.id = id;
  n.op = OpKind::MaxPool;
  n.inputs = {x};
  n.attrs.kernel = {kernel, kernel};
  n.attrs.stride = {stride, stride};
  n.attrs.pad = {pad, pad};
  return add_node(std::move(n));
}

std::string GraphBuilder::upsample(const std::string& id, const std::string& x, std::int64_t scale) {
  Node n;
  n.id = id;
  n.op = OpKind::Upsample;
  n.inputs = {x};
  n.attrs.scale = scale;
  return add_node(std::move(n));
}

void GraphBuilder::tag(const std::string& node_id, const std::string& tag) {
  Node* n = g_.find_node(node_id);
  if (n == nullptr) throw GraphError("cannot tag unknown node '" + node_id + "'");
  n->attrs.tags.push_back(tag);
}

void GraphBuilder::output(const std::string& tensor_id) { g_.outputs.push_back(tensor_id); }

ModelGraph GraphBuilder::build() const {
  ModelGraph g = with_inferred_shapes(g_);
  const auto report = validate(g);
  if (!report.ok()) throw GraphError("invalid graph '" + g.name + "': " + report.summary());
  return g;
}

}  // namespace edgepress
