// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/validate.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace edgepress {

namespace {

std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

const Shape& need(const Node& node, const ShapeMap& known, const std::string& tensor) {
  auto it = known.find(tensor);
  if (it == known.end()) throw ShapeError(node.id, "unknown input shape for tensor '" + tensor + "'");
  return it->second;
}

std::int64_t window_extent(const Node& node, std::int64_t in, std::int64_t k, std::int64_t s,
                           std::int64_t p) {
  if (k < 1 || s < 1 || p < 0) throw ShapeError(node.id, "bad window attributes");
  const std::int64_t span = in + 2 * p - k;
  if (span < 0) throw ShapeError(node.id, "window larger than padded input");
  return span / s + 1;
}

Shape require_rank4(const Node& node, const ShapeMap& known, const std::string& t) {
  const Shape& s = need(node, known, t);
  if (s.size() != 4) throw ShapeError(node.id, "expected rank-4 feature map, got " + shape_str(s));
  return s;
}

}  // namespace

ShapeError::ShapeError(std::string node, const std::string& message)
    : GraphError(node.empty() ? message : message + " at node " + node), node_(std::move(node)) {}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) os << (i ? "; " : "") << issues[i].message;
  return os.str();
}

std::optional<std::vector<std::string>> topological_order(const ModelGraph& g) {
  std::map<std::string, std::string> producer;
  for (const auto& n : g.nodes)
    for (const auto& t : n.outputs) producer[t] = n.id;

  std::map<std::string, std::set<std::string>> deps;
  std::map<std::string, std::vector<std::string>> users;
  for (const auto& n : g.nodes) {
    auto& d = deps[n.id];
    auto add_dep = [&](const std::string& t) {
      auto it = producer.find(t);
      if (it != producer.end() && d.insert(it->second).second) users[it->second].push_back(n.id);
    };
    for (const auto& t : n.inputs) add_dep(t);
    for (const auto& [role, t] : n.weights) add_dep(t);
  }

  std::set<std::string> ready;
  std::map<std::string, std::size_t> pending;
  for (const auto& [id, d] : deps) {
    pending[id] = d.size();
    if (d.empty()) ready.insert(id);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& u : users[id])
      if (--pending[u] == 0) ready.insert(u);
  }
  if (order.size() != deps.size()) return std::nullopt;
  return order;
}

std::vector<Shape> infer_node(const Node& node, const ShapeMap& known) {
  const auto& a = node.attrs;
  auto single_input = [&]() -> const std::string& {
    if (node.inputs.size() != 1) throw ShapeError(node.id, "expected exactly one input");
    return node.inputs.front();
  };

  switch (node.op) {
    case OpKind::Conv2d: {
      const Shape x = require_rank4(node, known, single_input());
      auto kit = node.weights.find("kernel");
      if (kit == node.weights.end()) throw ShapeError(node.id, "missing kernel");
      const Shape& k = need(node, known, kit->second);
      if (k.size() != 4) throw ShapeError(node.id, "bad kernel rank");
      if (a.groups < 1 || x[1] % a.groups != 0 || k[0] % a.groups != 0)
        throw ShapeError(node.id, "channel count not divisible by groups");
      if (k[1] != x[1] / a.groups)
        throw ShapeError(node.id, "kernel expects " + std::to_string(k[1] * a.groups) +
                                      " input channels, got " + std::to_string(x[1]));
      if (k[2] != a.kernel[0] || k[3] != a.kernel[1])
        throw ShapeError(node.id, "kernel attribute disagrees with kernel shape");
      if (auto bit = node.weights.find("bias"); bit != node.weights.end()) {
        const Shape& b = need(node, known, bit->second);
        if (b != Shape{k[0]}) throw ShapeError(node.id, "bias shape " + shape_str(b) + " does not match");
      }
      return {{x[0], k[0], window_extent(node, x[2], k[2], a.stride[0], a.pad[0]),
               window_extent(node, x[3], k[3], a.stride[1], a.pad[1])}};
    }
    case OpKind::Add:
    case OpKind::Mul: {
      if (node.inputs.size() != 2) throw ShapeError(node.id, "expected two operands");
      const Shape& l = need(node, known, node.inputs[0]);
      const Shape& r = need(node, known, node.inputs[1]);
      if (l != r) throw ShapeError(node.id, "operand shape mismatch " + shape_str(l) + " vs " + shape_str(r));
      return {l};
    }
    case OpKind::Concat: {
      if (node.inputs.empty()) throw ShapeError(node.id, "concat needs inputs");
      Shape out = need(node, known, node.inputs.front());
      if (a.axis < 0 || a.axis >= static_cast<std::int64_t>(out.size()))
        throw ShapeError(node.id, "concat axis out of range");
      const auto axis = static_cast<std::size_t>(a.axis);
      for (std::size_t i = 1; i < node.inputs.size(); ++i) {
        const Shape& s = need(node, known, node.inputs[i]);
        if (s.size() != out.size()) throw ShapeError(node.id, "rank mismatch");
        for (std::size_t d = 0; d < s.size(); ++d) {
          if (d == axis || s[d] == out[d]) continue;
          throw ShapeError(node.id, d >= 2 ? "spatial mismatch" : "shape mismatch");
        }
        out[axis] += s[axis];
      }
      return {out};
    }
    case OpKind::Split: {
      const Shape& x = need(node, known, single_input());
      if (a.axis < 0 || a.axis >= static_cast<std::int64_t>(x.size()))
        throw ShapeError(node.id, "split axis out of range");
      if (a.split.size() != node.outputs.size())
        throw ShapeError(node.id, "split sizes do not match output count");
      std::int64_t sum = 0;
      for (auto s : a.split) {
        if (s < 1) throw ShapeError(node.id, "split sizes must be positive");
        sum += s;
      }
      const auto axis = static_cast<std::size_t>(a.axis);
      if (sum != x[axis]) throw ShapeError(node.id, "split sizes do not sum to input extent");
      std::vector<Shape> outs;
      for (auto s : a.split) {
        Shape o = x;
        o[axis] = s;
        outs.push_back(o);
      }
      return outs;
    }
    case OpKind::MaxPool: {
      const Shape x = require_rank4(node, known, single_input());
      return {{x[0], x[1], window_extent(node, x[2], a.kernel[0], a.stride[0], a.pad[0]),
               window_extent(node, x[3], a.kernel[1], a.stride[1], a.pad[1])}};
    }
    case OpKind::Upsample: {
      const Shape x = require_rank4(node, known, single_input());
      if (a.scale < 1) throw ShapeError(node.id, "upsample scale must be positive");
      return {{x[0], x[1], x[2] * a.scale, x[3] * a.scale}};
    }
    case OpKind::QuantizeLinear:
    case OpKind::DequantizeLinear: {
      const Shape& x = need(node, known, single_input());
      if (a.quant) {
        const auto& q = *a.quant;
        std::size_t expected = 1;
        if (q.granularity == Granularity::PerChannel) {
          if (q.axis < 0 || q.axis >= static_cast<int>(x.size()))
            throw ShapeError(node.id, "quant axis out of range");
          expected = static_cast<std::size_t>(x[static_cast<std::size_t>(q.axis)]);
        } else if (q.granularity == Granularity::PerGroup) {
          if (q.group_size < 1) throw ShapeError(node.id, "bad quant group size");
          const std::int64_t row = element_count(x) / x[0];
          expected = static_cast<std::size_t>(x[0] * ((row + q.group_size - 1) / q.group_size));
        }
        if (q.scale.size() != expected || q.zero_point.size() != expected)
          throw ShapeError(node.id, "quant param count does not match tensor");
      }
      return {x};
    }
    case OpKind::SiLU:
    case OpKind::Sigmoid:
    case OpKind::Identity:
      return {need(node, known, single_input())};
  }
  throw ShapeError(node.id, "unsupported op");
}

ShapeMap infer_shapes(const ModelGraph& g) {
  const auto order = topological_order(g);
  if (!order) throw GraphError("no topological order");
  ShapeMap known;
  for (const auto& id : g.inputs) known[id] = g.tensor(id).shape;
  for (const auto& [id, c] : g.constants) known[id] = c.shape;
  for (const auto& id : *order) {
    const Node& n = *g.find_node(id);
    auto outs = infer_node(n, known);
    if (outs.size() != n.outputs.size()) throw ShapeError(n.id, "output count mismatch");
    for (std::size_t i = 0; i < outs.size(); ++i) known[n.outputs[i]] = std::move(outs[i]);
  }
  return known;
}

ModelGraph with_inferred_shapes(const ModelGraph& g) {
  ModelGraph out = g;
  for (auto& [id, shape] : infer_shapes(g)) {
    auto it = out.tensors.find(id);
    if (it != out.tensors.end()) it->second.shape = shape;
  }
  return out;
}

ValidationReport validate(const ModelGraph& g) {
  ValidationReport r;
  auto issue = [&](const std::string& node, std::string msg) { r.issues.push_back({node, std::move(msg)}); };

  std::set<std::string> node_ids;
  std::map<std::string, std::string> produced_by;
  for (const auto& n : g.nodes) {
    if (n.id.empty()) issue("", "node with empty id");
    if (!node_ids.insert(n.id).second) issue(n.id, "duplicate node id '" + n.id + "'");
    for (const auto& t : n.outputs) {
      if (!produced_by.emplace(t, n.id).second) issue(n.id, "multiple producers for tensor '" + t + "'");
      auto it = g.tensors.find(t);
      if (it == g.tensors.end()) {
        issue(n.id, "unknown tensor '" + t + "'");
      } else if (it->second.producer != n.id) {
        issue(n.id, "tensor '" + t + "' records producer '" + it->second.producer + "'");
      }
    }
    auto check_ref = [&](const std::string& t) {
      if (!g.tensors.contains(t)) issue(n.id, "unknown tensor '" + t + "' at node " + n.id);
    };
    for (const auto& t : n.inputs) check_ref(t);
    for (const auto& [role, t] : n.weights) check_ref(t);
  }

  std::set<std::string> consumed(g.outputs.begin(), g.outputs.end());
  for (const auto& n : g.nodes) {
    consumed.insert(n.inputs.begin(), n.inputs.end());
    for (const auto& [role, t] : n.weights) consumed.insert(t);
  }
  const std::set<std::string> graph_inputs(g.inputs.begin(), g.inputs.end());
  for (const auto& [id, spec] : g.tensors) {
    if (spec.id != id) issue("", "tensor key '" + id + "' disagrees with spec id");
    for (auto d : spec.shape)
      if (d < 1) issue("", "tensor '" + id + "' has a non-positive extent");
    if (spec.producer == kGraphInput) {
      if (!graph_inputs.contains(id)) issue("", "tensor '" + id + "' claims to be a graph input");
    } else if (spec.producer == kConstant) {
      auto c = g.constants.find(id);
      if (c == g.constants.end()) {
        issue("", "constant tensor '" + id + "' has no payload");
      } else if (static_cast<std::int64_t>(c->second.values.size()) != element_count(c->second.shape) ||
                 c->second.shape != spec.shape || c->second.dtype != spec.dtype) {
        issue("", "constant '" + id + "' payload disagrees with its spec");
      }
    } else if (!produced_by.contains(id)) {
      issue("", "dangling tensor '" + id + "' has no producer");
    }
    if (!consumed.contains(id)) issue("", "dangling tensor '" + id + "' is never used");
  }
  for (const auto& [id, c] : g.constants)
    if (!g.tensors.contains(id)) issue("", "constant '" + id + "' has no tensor spec");
  for (const auto& id : g.inputs) {
    auto it = g.tensors.find(id);
    if (it == g.tensors.end() || it->second.producer != kGraphInput)
      issue("", "graph input '" + id + "' is not declared as one");
    else if (it->second.shape.empty())
      issue("", "graph input '" + id + "' has no shape");
  }
  for (const auto& id : g.outputs)
    if (!g.tensors.contains(id)) issue("", "graph output '" + id + "' is unknown");

  const auto order = topological_order(g);
  if (!order) {
    issue("", "no topological order");
    return r;
  }
  r.topo_order = *order;

  for (const auto& id : g.inputs)
    if (auto it = g.tensors.find(id); it != g.tensors.end()) r.shapes[id] = it->second.shape;
  for (const auto& [id, c] : g.constants) r.shapes[id] = c.shape;
  for (const auto& id : *order) {
    const Node& n = *g.find_node(id);
    bool inputs_known = true;
    for (const auto& t : n.inputs) inputs_known = inputs_known && r.shapes.contains(t);
    for (const auto& [role, t] : n.weights) inputs_known = inputs_known && r.shapes.contains(t);
    if (!inputs_known) {
      // Upstream failure or unknown tensor already reported.
      continue;
    }
    try {
      auto outs = infer_node(n, r.shapes);
      if (outs.size() != n.outputs.size()) throw ShapeError(n.id, "output count mismatch");
      for (std::size_t i = 0; i < outs.size(); ++i) r.shapes[n.outputs[i]] = std::move(outs[i]);
    } catch (const ShapeError& e) {
      issue(n.id, e.what());
    }
  }
  for (const auto& [id, shape] : r.shapes) {
    auto it = g.tensors.find(id);
    if (it != g.tensors.end() && !it->second.shape.empty() && it->second.shape != shape)
      issue(it->second.producer, "declared shape " + shape_str(it->second.shape) + " of tensor '" + id +
                                     "' disagrees with inferred " + shape_str(shape));
  }
  for (const auto& [id, spec] : g.tensors)
    if (!r.shapes.contains(id) && spec.producer != kGraphInput && r.ok())
      issue(spec.producer, "no shape inferred for tensor '" + id + "'");
  return r;
}

}  // namespace edgepress
