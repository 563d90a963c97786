// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/executor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "edgepress/validate.hpp"

namespace edgepress {

namespace {

using Values = std::map<std::string, TensorValue>;

const TensorValue& fetch(const Values& v, const Node& n, const std::string& id) {
  auto it = v.find(id);
  if (it == v.end()) throw ExecutionError("missing value for tensor '" + id + "' at node " + n.id);
  return it->second;
}

// Direct NCHW convolution, batch 1. Accumulates input channel, then kernel
// row, then kernel column; bias is added last.
std::vector<float> conv2d(const Node& n, const TensorValue& x, const TensorValue& w, const TensorValue* b,
                          const Shape& out) {
  const auto& a = n.attrs;
  const std::int64_t cin = x.spec.shape[1], h = x.spec.shape[2], wd = x.spec.shape[3];
  const std::int64_t cout = out[1], ho = out[2], wo = out[3];
  const std::int64_t kh = w.spec.shape[2], kw = w.spec.shape[3];
  const std::int64_t cin_g = cin / a.groups, cout_g = cout / a.groups;
  std::vector<float> y(static_cast<std::size_t>(cout * ho * wo));
  for (std::int64_t oc = 0; oc < cout; ++oc) {
    const std::int64_t g = oc / cout_g;
    for (std::int64_t oy = 0; oy < ho; ++oy) {
      for (std::int64_t ox = 0; ox < wo; ++ox) {
        float acc = 0.0f;
        for (std::int64_t ic = 0; ic < cin_g; ++ic) {
          const std::int64_t c = g * cin_g + ic;
          for (std::int64_t ky = 0; ky < kh; ++ky) {
            const std::int64_t iy = oy * a.stride[0] + ky - a.pad[0];
            if (iy < 0 || iy >= h) continue;
            for (std::int64_t kx = 0; kx < kw; ++kx) {
              const std::int64_t ix = ox * a.stride[1] + kx - a.pad[1];
              if (ix < 0 || ix >= wd) continue;
              acc += x.data[static_cast<std::size_t>((c * h + iy) * wd + ix)] *
                     w.data[static_cast<std::size_t>(((oc * cin_g + ic) * kh + ky) * kw + kx)];
            }
          }
        }
        if (b != nullptr) acc += b->data[static_cast<std::size_t>(oc)];
        y[static_cast<std::size_t>((oc * ho + oy) * wo + ox)] = acc;
      }
    }
  }
  return y;
}

std::vector<float> maxpool(const Node& n, const TensorValue& x, const Shape& out) {
  const auto& a = n.attrs;
  const std::int64_t c = x.spec.shape[1], h = x.spec.shape[2], wd = x.spec.shape[3];
  const std::int64_t ho = out[2], wo = out[3];
  std::vector<float> y(static_cast<std::size_t>(c * ho * wo));
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t oy = 0; oy < ho; ++oy)
      for (std::int64_t ox = 0; ox < wo; ++ox) {
        float m = -std::numeric_limits<float>::infinity();
        for (std::int64_t ky = 0; ky < a.kernel[0]; ++ky) {
          const std::int64_t iy = oy * a.stride[0] + ky - a.pad[0];
          if (iy < 0 || iy >= h) continue;
          for (std::int64_t kx = 0; kx < a.kernel[1]; ++kx) {
            const std::int64_t ix = ox * a.stride[1] + kx - a.pad[1];
            if (ix < 0 || ix >= wd) continue;
            m = std::max(m, x.data[static_cast<std::size_t>((ch * h + iy) * wd + ix)]);
          }
        }
        y[static_cast<std::size_t>((ch * ho + oy) * wo + ox)] = m;
      }
  return y;
}

std::vector<float> upsample(const Node& n, const TensorValue& x, const Shape& out) {
  const std::int64_t c = x.spec.shape[1], h = x.spec.shape[2], wd = x.spec.shape[3];
  const std::int64_t ho = out[2], wo = out[3], s = n.attrs.scale;
  std::vector<float> y(static_cast<std::size_t>(c * ho * wo));
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t oy = 0; oy < ho; ++oy)
      for (std::int64_t ox = 0; ox < wo; ++ox)
        y[static_cast<std::size_t>((ch * ho + oy) * wo + ox)] =
            x.data[static_cast<std::size_t>((ch * h + oy / s) * wd + ox / s)];
  return y;
}

// Row-major copy of `x` viewed as [outer, extent, inner] slices along `axis`.
struct AxisView {
  std::int64_t outer = 1, inner = 1;
};

AxisView axis_view(const Shape& s, std::int64_t axis) {
  AxisView v;
  for (std::int64_t d = 0; d < axis; ++d) v.outer *= s[static_cast<std::size_t>(d)];
  for (std::size_t d = static_cast<std::size_t>(axis) + 1; d < s.size(); ++d) v.inner *= s[d];
  return v;
}

std::vector<float> concat(const Node& n, const std::vector<const TensorValue*>& xs, const Shape& out) {
  const auto axis = n.attrs.axis;
  const AxisView v = axis_view(out, axis);
  const std::int64_t total = out[static_cast<std::size_t>(axis)];
  std::vector<float> y(static_cast<std::size_t>(element_count(out)));
  std::int64_t offset = 0;
  for (const TensorValue* x : xs) {
    const std::int64_t e = x->spec.shape[static_cast<std::size_t>(axis)];
    for (std::int64_t o = 0; o < v.outer; ++o)
      std::copy_n(x->data.begin() + o * e * v.inner, e * v.inner,
                  y.begin() + (o * total + offset) * v.inner);
    offset += e;
  }
  return y;
}

std::vector<std::vector<float>> split(const Node& n, const TensorValue& x) {
  const auto axis = n.attrs.axis;
  const AxisView v = axis_view(x.spec.shape, axis);
  const std::int64_t total = x.spec.shape[static_cast<std::size_t>(axis)];
  std::vector<std::vector<float>> outs;
  std::int64_t offset = 0;
  for (auto e : n.attrs.split) {
    std::vector<float> y(static_cast<std::size_t>(v.outer * e * v.inner));
    for (std::int64_t o = 0; o < v.outer; ++o)
      std::copy_n(x.data.begin() + (o * total + offset) * v.inner, e * v.inner, y.begin() + o * e * v.inner);
    outs.push_back(std::move(y));
    offset += e;
  }
  return outs;
}

const QuantParams& need_params(const Node& n) {
  if (!n.attrs.quant) throw ExecutionError("missing quant params at node " + n.id);
  return *n.attrs.quant;
}

}  // namespace

const TensorValue& ExecutionTrace::at(const std::string& id) const {
  auto it = values.find(id);
  if (it == values.end()) throw ExecutionError("trace has no tensor '" + id + "'");
  return it->second;
}

float sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

float silu(float x) { return x * sigmoid(x); }

std::vector<float> quantize_tensor(std::span<const float> x, const Shape& shape, const QuantParams& p) {
  check_params(p);
  std::vector<float> q(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    q[i] = static_cast<float>(quantize_value(x[i], p, p.param_index(shape, static_cast<std::int64_t>(i))));
  return q;
}

std::vector<float> dequantize_tensor(std::span<const float> q, const Shape& shape, const QuantParams& p) {
  check_params(p);
  std::vector<float> x(q.size());
  for (std::size_t i = 0; i < q.size(); ++i)
    x[i] = static_cast<float>(dequantize_value(static_cast<std::int64_t>(q[i]), p,
                                               p.param_index(shape, static_cast<std::int64_t>(i))));
  return x;
}

ExecutionTrace run(const ModelGraph& g, std::span<const TensorValue> inputs, ExecMode mode) {
  if (inputs.size() != g.inputs.size())
    throw ExecutionError("expected " + std::to_string(g.inputs.size()) + " inputs, got " +
                         std::to_string(inputs.size()));
  const auto order = topological_order(g);
  if (!order) throw ExecutionError("graph has no topological order");

  ExecutionTrace trace;
  trace.mode = mode;
  Values consts;
  for (const auto& [id, c] : g.constants) consts[id] = TensorValue{g.tensor(id), c.values};

  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const TensorSpec& spec = g.tensor(g.inputs[i]);
    if (inputs[i].spec.shape != spec.shape ||
        static_cast<std::int64_t>(inputs[i].data.size()) != element_count(spec.shape))
      throw ExecutionError("shape mismatch for graph input '" + spec.id + "'");
    trace.values[spec.id] = TensorValue{spec, inputs[i].data};
  }

  auto value = [&](const Node& n, const std::string& id) -> const TensorValue& {
    if (auto it = consts.find(id); it != consts.end()) return it->second;
    return fetch(trace.values, n, id);
  };

  for (const auto& id : *order) {
    const Node& n = *g.find_node(id);
    std::vector<Shape> out_shapes;
    {
      ShapeMap known;
      for (const auto& t : n.inputs) known[t] = value(n, t).spec.shape;
      for (const auto& [role, t] : n.weights) known[t] = value(n, t).spec.shape;
      try {
        out_shapes = infer_node(n, known);
      } catch (const ShapeError& e) {
        throw ExecutionError(std::string("shape mismatch: ") + e.what());
      }
    }
    std::vector<std::vector<float>> outs;
    switch (n.op) {
      case OpKind::Conv2d: {
        const TensorValue* bias = nullptr;
        if (auto it = n.weights.find("bias"); it != n.weights.end()) bias = &value(n, it->second);
        outs.push_back(conv2d(n, value(n, n.inputs[0]), value(n, n.weights.at("kernel")), bias, out_shapes[0]));
        break;
      }
      case OpKind::Add:
      case OpKind::Mul: {
        const auto& l = value(n, n.inputs[0]).data;
        const auto& r = value(n, n.inputs[1]).data;
        std::vector<float> y(l.size());
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = n.op == OpKind::Add ? l[i] + r[i] : l[i] * r[i];
        outs.push_back(std::move(y));
        break;
      }
      case OpKind::Concat: {
        std::vector<const TensorValue*> xs;
        for (const auto& t : n.inputs) xs.push_back(&value(n, t));
        outs.push_back(concat(n, xs, out_shapes[0]));
        break;
      }
      case OpKind::Split:
        outs = split(n, value(n, n.inputs[0]));
        break;
      case OpKind::MaxPool:
        outs.push_back(maxpool(n, value(n, n.inputs[0]), out_shapes[0]));
        break;
      case OpKind::Upsample:
        outs.push_back(upsample(n, value(n, n.inputs[0]), out_shapes[0]));
        break;
      case OpKind::SiLU:
      case OpKind::Sigmoid: {
        std::vector<float> y = value(n, n.inputs[0]).data;
        for (auto& v : y) v = n.op == OpKind::SiLU ? silu(v) : sigmoid(v);
        outs.push_back(std::move(y));
        break;
      }
      case OpKind::Identity:
        outs.push_back(value(n, n.inputs[0]).data);
        break;
      case OpKind::QuantizeLinear: {
        const auto& x = value(n, n.inputs[0]);
        if (mode == ExecMode::QdqSimulated)
          outs.push_back(quantize_tensor(x.data, x.spec.shape, need_params(n)));
        else
          outs.push_back(x.data);
        break;
      }
      case OpKind::DequantizeLinear: {
        const auto& x = value(n, n.inputs[0]);
        const bool from_constant = consts.contains(n.inputs[0]);
        if (mode == ExecMode::QdqSimulated || from_constant)
          outs.push_back(dequantize_tensor(x.data, x.spec.shape, need_params(n)));
        else
          outs.push_back(x.data);
        break;
      }
    }
    for (std::size_t i = 0; i < n.outputs.size(); ++i) {
      TensorSpec spec = g.tensor(n.outputs[i]);
      spec.shape = out_shapes[i];
      const std::string key = spec.id;
      trace.values[key] = TensorValue{std::move(spec), std::move(outs[i])};
    }
  }
  return trace;
}

std::vector<TensorValue> run_outputs(const ModelGraph& g, std::span<const TensorValue> inputs, ExecMode mode) {
  auto trace = run(g, inputs, mode);
  std::vector<TensorValue> out;
  for (const auto& id : g.outputs) {
    if (auto it = trace.values.find(id); it != trace.values.end()) {
      out.push_back(it->second);
    } else if (auto c = g.constants.find(id); c != g.constants.end()) {
      out.push_back(TensorValue{g.tensor(id), c->second.values});
    } else {
      throw ExecutionError("graph output '" + id + "' was not produced");
    }
  }
  return out;
}

}  // namespace edgepress
