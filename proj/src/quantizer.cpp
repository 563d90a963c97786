// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "edgepress/executor.hpp"
#include "edgepress/validate.hpp"

namespace edgepress {

namespace {

const std::set<OpKind> kQuantizable{OpKind::Conv2d, OpKind::Add, OpKind::Mul};

void check_subset(const std::vector<OpKind>& subset) {
  for (OpKind op : subset)
    if (!kQuantizable.contains(op)) throw std::invalid_argument("cannot quantize op '" + to_string(op) + "'");
}

bool in_subset(const std::vector<OpKind>& subset, OpKind op) {
  return std::find(subset.begin(), subset.end(), op) != subset.end();
}

ExecutionTrace run_one(const ModelGraph& g, const TensorValue& sample, ExecMode mode) {
  return run(g, std::span<const TensorValue>(&sample, 1), mode);
}

void require_single_input(const ModelGraph& g) {
  if (g.inputs.size() != 1) throw std::invalid_argument("sample sets need a graph with exactly one input");
}

std::int64_t channels_of(const Shape& s) { return s.size() > 1 ? s[1] : 1; }

std::int64_t channel_of(const Shape& s, std::size_t flat) {
  if (s.size() < 2) return 0;
  std::int64_t inner = 1;
  for (std::size_t d = 2; d < s.size(); ++d) inner *= s[d];
  return (static_cast<std::int64_t>(flat) / inner) % s[1];
}

}  // namespace

TensorStats stats_from_values(std::span<const float> values) {
  TensorStats st;
  st.min = std::numeric_limits<double>::infinity();
  st.max = -std::numeric_limits<double>::infinity();
  st.values.reserve(values.size());
  for (float v : values) {
    st.min = std::min(st.min, static_cast<double>(v));
    st.max = std::max(st.max, static_cast<double>(v));
    st.values.push_back(v);
  }
  st.count = static_cast<std::int64_t>(values.size());
  if (values.empty()) st.min = st.max = 0.0;
  return st;
}

std::vector<std::string> calibration_targets(const ModelGraph& g, const std::vector<OpKind>& op_subset) {
  check_subset(op_subset);
  std::set<std::string> out;
  for (const auto& n : g.nodes) {
    if (!in_subset(op_subset, n.op)) continue;
    for (const auto& t : n.inputs)
      if (!g.constants.contains(t)) out.insert(t);
    for (const auto& t : n.outputs) out.insert(t);
  }
  return {out.begin(), out.end()};
}

CalibrationStats calibrate(const ModelGraph& g, std::span<const TensorValue> samples,
                           const CalibrationOptions& options) {
  if (samples.empty()) throw std::invalid_argument("calibration needs at least one sample");
  require_single_input(g);
  if (options.bins < 1) throw std::invalid_argument("calibration needs at least one histogram bin");
  const auto targets = calibration_targets(g, options.op_subset);

  CalibrationStats out;
  out.samples = samples.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (const auto& t : targets) {
    auto& st = out.tensors[t];
    st.min = inf;
    st.max = -inf;
  }

  // Pass 1: extremes and population sizes.
  for (const auto& sample : samples) {
    const auto trace = run_one(g, sample, ExecMode::Float);
    for (const auto& t : targets) {
      const auto& v = trace.at(t);
      auto& st = out.tensors[t];
      if (options.per_channel && st.per_channel.empty())
        st.per_channel.assign(static_cast<std::size_t>(channels_of(v.spec.shape)), Range{inf, -inf});
      for (std::size_t i = 0; i < v.data.size(); ++i) {
        const double x = v.data[i];
        if (!std::isfinite(x)) throw std::domain_error("non-finite activation in tensor '" + t + "'");
        st.min = std::min(st.min, x);
        st.max = std::max(st.max, x);
        if (options.per_channel) {
          auto& r = st.per_channel[static_cast<std::size_t>(channel_of(v.spec.shape, i))];
          r.min = std::min(r.min, x);
          r.max = std::max(r.max, x);
        }
      }
      st.count += static_cast<std::int64_t>(v.data.size());
    }
  }

  for (auto& [t, st] : out.tensors) {
    if (st.count <= options.exact_limit) {
      st.values.reserve(static_cast<std::size_t>(st.count));
    } else {
      st.hist_lo = st.min;
      st.hist_hi = st.max;
      st.bin_count.assign(options.bins, 0.0);
      st.bin_sum.assign(options.bins, 0.0);
    }
  }

  // Pass 2: populations, exact or binned against the final extremes.
  for (const auto& sample : samples) {
    const auto trace = run_one(g, sample, ExecMode::Float);
    for (const auto& t : targets) {
      const auto& v = trace.at(t);
      auto& st = out.tensors[t];
      if (st.exact()) {
        st.values.insert(st.values.end(), v.data.begin(), v.data.end());
        continue;
      }
      const double width = st.hist_hi - st.hist_lo;
      const auto bins = static_cast<double>(st.bin_count.size());
      for (float f : v.data) {
        const double x = f;
        std::size_t b = 0;
        if (width > 0.0)
          b = static_cast<std::size_t>(std::min(bins - 1.0, std::floor((x - st.hist_lo) / width * bins)));
        st.bin_count[b] += 1.0;
        st.bin_sum[b] += x;
      }
    }
  }
  return out;
}

std::string to_string(RangeMethod m) { return m == RangeMethod::Mse ? "mse" : "min-max"; }

RangeMethod parse_method(const std::string& s) {
  if (s == "min-max") return RangeMethod::MinMax;
  if (s == "mse") return RangeMethod::Mse;
  throw std::invalid_argument("unknown range method '" + s + "'");
}

double calibration_mse(const TensorStats& stats, Range range, QuantScheme scheme) {
  const QuantParams p = derive_params(range, scheme);
  double err = 0.0, weight = 0.0;
  stats.for_each_point([&](double v, double w) {
    const double d = v - dequantize_value(quantize_value(v, p), p);
    err += w * d * d;
    weight += w;
  });
  return weight > 0.0 ? err / weight : 0.0;
}

Range estimate_range(const TensorStats& stats, RangeMethod method, QuantScheme scheme, int grid_size) {
  const Range minmax{stats.min, stats.max};
  if (method == RangeMethod::MinMax || stats.min == stats.max) return minmax;
  if (grid_size < 2) throw std::invalid_argument("mse range search needs a grid of at least 2 points");
  Range best = minmax;
  double best_err = calibration_mse(stats, minmax, scheme);
  for (int i = 0; i < grid_size; ++i) {
    const double alpha = 0.5 + 0.5 * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    const Range cand{alpha * stats.min, alpha * stats.max};
    const double err = calibration_mse(stats, cand, scheme);
    if (err < best_err) {
      best_err = err;
      best = cand;
    }
  }
  return best;
}

QuantParams derive_params(std::span<const Range> ranges, QuantScheme scheme, Granularity granularity, int axis,
                          int group_size, int bits) {
  if (bits < 2 || bits > 16) throw std::invalid_argument("unsupported bit width " + std::to_string(bits));
  if (ranges.empty()) throw std::invalid_argument("no ranges to derive quant params from");
  QuantParams p;
  p.bits = bits;
  p.scheme = scheme;
  p.granularity = granularity;
  p.axis = axis;
  p.group_size = group_size;
  const double levels = std::ldexp(1.0, bits) - 1.0;
  const double half = std::ldexp(1.0, bits - 1);
  for (const Range& r : ranges) {
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
      throw std::invalid_argument("invalid range [" + std::to_string(r.min) + ", " + std::to_string(r.max) + "]");
    double s = 0.0, z = 0.0;
    if (r.min == r.max) {
      const double c = r.min;
      s = c == 0.0 ? 1.0 : std::fabs(c);
      if (scheme == QuantScheme::Asymmetric) z = c / s - half;
    } else if (scheme == QuantScheme::Asymmetric) {
      s = (r.max - r.min) / levels;
      z = r.min * levels / (r.max - r.min);
    } else {
      s = std::max(std::fabs(r.min), std::fabs(r.max)) / (half - 1.0);
    }
    p.scale.push_back(s);
    p.zero_point.push_back(z);
  }
  return p;
}

QuantParams derive_params(Range range, QuantScheme scheme, int bits) {
  return derive_params(std::span<const Range>(&range, 1), scheme, Granularity::PerTensor, 0, 0, bits);
}

namespace {

// Chunks of a weight payload that share one set of params, in param order.
std::vector<std::span<const float>> weight_chunks(const Constant& w, Granularity granularity, int group_size) {
  std::span<const float> all(w.values);
  if (granularity == Granularity::PerTensor || w.shape.empty()) return {all};
  const auto rows = static_cast<std::size_t>(w.shape[0]);
  const std::size_t row_len = rows ? all.size() / rows : 0;
  std::vector<std::span<const float>> out;
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = all.subspan(r * row_len, row_len);
    if (granularity == Granularity::PerChannel) {
      out.push_back(row);
      continue;
    }
    if (group_size < 1) throw std::invalid_argument("per-group quantization needs a positive group size");
    for (std::size_t o = 0; o < row_len; o += static_cast<std::size_t>(group_size))
      out.push_back(row.subspan(o, std::min<std::size_t>(static_cast<std::size_t>(group_size), row_len - o)));
  }
  return out;
}

}  // namespace

std::vector<Range> weight_ranges(const Constant& w, Granularity granularity, int group_size) {
  std::vector<Range> out;
  for (auto chunk : weight_chunks(w, granularity, group_size)) {
    const auto st = stats_from_values(chunk);
    out.push_back({st.min, st.max});
  }
  return out;
}

double weight_quant_mse(const Constant& w, const QuantParams& p) {
  if (w.values.empty()) return 0.0;
  const auto dq = dequantize_tensor(quantize_tensor(w.values, w.shape, p), w.shape, p);
  double err = 0.0;
  for (std::size_t i = 0; i < dq.size(); ++i) {
    const double d = static_cast<double>(w.values[i]) - dq[i];
    err += d * d;
  }
  return err / static_cast<double>(dq.size());
}

QdqParams derive_graph_params(const ModelGraph& g, const CalibrationStats& stats, const QuantConfig& config) {
  QdqParams out;
  if (config.activation_granularity == Granularity::PerGroup)
    throw std::invalid_argument("activations support per-tensor or per-channel granularity only");
  for (const auto& t : calibration_targets(g, config.op_subset)) {
    auto it = stats.tensors.find(t);
    if (it == stats.tensors.end()) throw std::invalid_argument("no calibration stats for tensor '" + t + "'");
    if (config.activation_granularity == Granularity::PerChannel) {
      if (it->second.per_channel.empty())
        throw std::invalid_argument("no per-channel calibration stats for tensor '" + t + "'");
      out.activations[t] =
          derive_params(it->second.per_channel, config.activation_scheme, Granularity::PerChannel, 1);
    } else {
      out.activations[t] =
          derive_params(estimate_range(it->second, config.method, config.activation_scheme, config.grid_size),
                        config.activation_scheme);
    }
  }
  for (const auto& n : g.nodes) {
    if (n.op != OpKind::Conv2d || !in_subset(config.op_subset, n.op)) continue;
    const std::string& k = n.weights.at("kernel");
    auto c = g.constants.find(k);
    if (c == g.constants.end() || c->second.dtype != DType::Float32) continue;
    std::vector<Range> ranges;
    for (auto chunk : weight_chunks(c->second, config.weight_granularity, config.group_size))
      ranges.push_back(
          estimate_range(stats_from_values(chunk), config.method, config.weight_scheme, config.grid_size));
    out.weights[k] = derive_params(ranges, config.weight_scheme, config.weight_granularity, 0, config.group_size);
  }
  return out;
}

namespace {

DType code_dtype(const QuantParams& p) { return p.scheme == QuantScheme::Symmetric ? DType::Int8 : DType::UInt8; }

bool produced_by(const ModelGraph& g, const std::string& t, OpKind op) {
  const auto& producer = g.tensor(t).producer;
  const Node* n = g.find_node(producer);
  return n && n->op == op;
}

// Adds t -> Q -> DQ once and returns the dequantized tensor id.
std::string add_pair(ModelGraph& g, const std::string& t, const QuantParams& p) {
  const std::string q = t + ".q", dq = t + ".dq";
  const std::string qnode = t + "/quantize", dqnode = t + "/dequantize";
  if (g.find_node(qnode)) return dq;
  check_params(p);
  const Shape& shape = g.tensor(t).shape;

  Node qn;
  qn.id = qnode;
  qn.op = OpKind::QuantizeLinear;
  qn.inputs = {t};
  qn.outputs = {q};
  qn.attrs.quant = p;
  Node dn;
  dn.id = dqnode;
  dn.op = OpKind::DequantizeLinear;
  dn.inputs = {q};
  dn.outputs = {dq};
  dn.attrs.quant = p;
  g.tensors[q] = TensorSpec{q, code_dtype(p), shape, qnode};
  g.tensors[dq] = TensorSpec{dq, DType::Float32, shape, dqnode};
  g.nodes.push_back(std::move(qn));
  g.nodes.push_back(std::move(dn));
  return dq;
}

std::string add_weight_dq(ModelGraph& g, const std::string& k, const QuantParams& p) {
  const std::string q = k + ".q", dq = k + ".dq", dqnode = k + "/dequantize";
  if (g.find_node(dqnode)) return dq;
  check_params(p);
  const Constant& w = g.constants.at(k);
  Constant codes{code_dtype(p), w.shape, quantize_tensor(w.values, w.shape, p)};
  g.tensors[q] = TensorSpec{q, codes.dtype, w.shape, kConstant};
  g.tensors[dq] = TensorSpec{dq, DType::Float32, w.shape, dqnode};
  g.constants[q] = std::move(codes);
  Node dn;
  dn.id = dqnode;
  dn.op = OpKind::DequantizeLinear;
  dn.inputs = {q};
  dn.outputs = {dq};
  dn.attrs.quant = p;
  g.nodes.push_back(std::move(dn));
  return dq;
}

std::size_t node_index(const ModelGraph& g, const std::string& id) {
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].id == id) return i;
  throw GraphError("unknown node '" + id + "'");
}

}  // namespace

ModelGraph rewrite_qdq(const ModelGraph& g, const QdqParams& params, const std::vector<OpKind>& op_subset) {
  check_subset(op_subset);
  const auto order = topological_order(g);
  if (!order) throw GraphError("no topological order");
  ModelGraph out = g;

  auto act_params = [&](const std::string& t) -> const QuantParams& {
    auto it = params.activations.find(t);
    if (it == params.activations.end()) throw std::invalid_argument("missing quant params for tensor '" + t + "'");
    return it->second;
  };

  for (const auto& id : *order) {
    const std::size_t idx = node_index(out, id);
    if (!in_subset(op_subset, out.nodes[idx].op)) continue;

    for (std::size_t i = 0; i < out.nodes[idx].inputs.size(); ++i) {
      const std::string t = out.nodes[idx].inputs[i];
      if (out.constants.contains(t) || produced_by(out, t, OpKind::DequantizeLinear)) continue;
      const std::string dq = add_pair(out, t, act_params(t));
      out.nodes[idx].inputs[i] = dq;
    }

    if (auto k = out.nodes[idx].weights.find("kernel"); k != out.nodes[idx].weights.end()) {
      const std::string kt = k->second;
      auto c = out.constants.find(kt);
      if (c != out.constants.end() && c->second.dtype == DType::Float32) {
        auto p = params.weights.find(kt);
        if (p == params.weights.end()) throw std::invalid_argument("missing quant params for weight '" + kt + "'");
        const std::string dq = add_weight_dq(out, kt, p->second);
        out.nodes[idx].weights["kernel"] = dq;
        if (out.consumers(kt).empty()) {
          out.constants.erase(kt);
          out.tensors.erase(kt);
        }
      }
    }

    const auto outputs = out.nodes[idx].outputs;  // add_pair may reallocate nodes
    for (const auto& t : outputs) {
      const auto users = out.consumers(t);
      const bool graph_out = std::find(out.outputs.begin(), out.outputs.end(), t) != out.outputs.end();
      const bool bracketed = !users.empty() && !graph_out && std::all_of(users.begin(), users.end(), [&](const auto& u) {
        return out.find_node(u)->op == OpKind::QuantizeLinear;
      });
      if (bracketed) continue;
      const std::string dq = add_pair(out, t, act_params(t));
      const std::string qnode = t + "/quantize";
      for (auto& n : out.nodes) {
        if (n.id == qnode) continue;
        for (auto& in : n.inputs)
          if (in == t) in = dq;
        for (auto& [role, w] : n.weights)
          if (w == t) w = dq;
      }
      for (auto& o : out.outputs)
        if (o == t) o = dq;
    }
  }

  out = with_inferred_shapes(out);
  const auto report = validate(out);
  if (!report.ok()) throw GraphError("qdq rewrite produced an invalid graph: " + report.summary());
  return out;
}

QuantErrorReport measure_quant_error(const ModelGraph& g_float, const ModelGraph& g_qdq,
                                     std::span<const TensorValue> eval_set) {
  require_single_input(g_float);
  require_single_input(g_qdq);
  if (g_float.outputs.size() != g_qdq.outputs.size())
    throw std::invalid_argument("float and quantized graphs have different output counts");

  struct Acc {
    double sq = 0.0, abs = 0.0, max = 0.0;
    std::int64_t n = 0;
    void add(std::span<const float> a, std::span<const float> b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::fabs(static_cast<double>(a[i]) - b[i]);
        sq += d * d;
        abs += d;
        max = std::max(max, d);
      }
      n += static_cast<std::int64_t>(a.size());
    }
    TensorError done() const {
      if (n == 0) return {};
      return {sq / static_cast<double>(n), max, abs / static_cast<double>(n), n};
    }
  };

  std::map<std::string, Acc> tensors;
  std::vector<Acc> outputs(g_float.outputs.size());
  for (const auto& sample : eval_set) {
    const auto tf = run_one(g_float, sample, ExecMode::Float);
    const auto tq = run_one(g_qdq, sample, ExecMode::QdqSimulated);
    for (const auto& [id, v] : tf.values) {
      auto it = tq.values.find(id);
      if (it == tq.values.end() || it->second.spec.shape != v.spec.shape) continue;
      tensors[id].add(v.data, it->second.data);
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      const auto& a = tf.at(g_float.outputs[i]);
      const auto& b = tq.at(g_qdq.outputs[i]);
      if (a.spec.shape != b.spec.shape)
        throw std::invalid_argument("output " + std::to_string(i) + " shapes differ between graphs");
      outputs[i].add(a.data, b.data);
    }
  }

  QuantErrorReport r;
  for (const auto& [id, acc] : tensors) r.tensors[id] = acc.done();
  for (const auto& acc : outputs) r.outputs.push_back(acc.done());
  return r;
}

}  // namespace edgepress
