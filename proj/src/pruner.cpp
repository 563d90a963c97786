// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "edgepress/accountant.hpp"
#include "edgepress/validate.hpp"

namespace edgepress {

namespace {

GraphError unsupported(const std::string& what) { return GraphError("unsupported topology: " + what); }

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool is_depthwise(const Node& n, const ShapeMap& shapes) {
  const Shape& x = shapes.at(n.inputs[0]);
  const Shape& k = shapes.at(n.weights.at("kernel"));
  return n.attrs.groups > 1 && n.attrs.groups == x[1] && k[0] == n.attrs.groups;
}

// Channel positions of every rank-4 activation tensor.
struct ChannelSpace {
  std::vector<std::string> tensors;  // in first-seen topological order
  std::map<std::string, std::size_t> base;
  std::map<std::string, std::int64_t> width;
  std::vector<std::pair<std::string, std::int64_t>> position;

  bool has(const std::string& t) const { return base.contains(t); }
  std::size_t at(const std::string& t, std::int64_t c) const { return base.at(t) + static_cast<std::size_t>(c); }
  void add(const std::string& t, std::int64_t channels) {
    if (has(t)) return;
    tensors.push_back(t);
    base[t] = position.size();
    width[t] = channels;
    for (std::int64_t c = 0; c < channels; ++c) position.emplace_back(t, c);
  }
};

std::vector<float> remove_along(const Constant& c, std::size_t dim, const std::set<std::int64_t>& drop,
                                Shape& new_shape) {
  std::int64_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < dim; ++d) outer *= c.shape[d];
  for (std::size_t d = dim + 1; d < c.shape.size(); ++d) inner *= c.shape[d];
  const std::int64_t extent = c.shape[dim];
  std::vector<float> out;
  out.reserve(c.values.size());
  for (std::int64_t o = 0; o < outer; ++o)
    for (std::int64_t e = 0; e < extent; ++e) {
      if (drop.contains(e)) continue;
      const auto begin = c.values.begin() + (o * extent + e) * inner;
      out.insert(out.end(), begin, begin + inner);
    }
  new_shape = c.shape;
  new_shape[dim] = extent - static_cast<std::int64_t>(drop.size());
  return out;
}

}  // namespace

std::string to_string(SlotRole r) {
  switch (r) {
    case SlotRole::ConvOut: return "conv-out-channels";
    case SlotRole::ConvIn: return "conv-in-channels";
    case SlotRole::Bias: return "bias";
    case SlotRole::ConcatSegment: return "concat-segment";
    case SlotRole::AddOperand: return "add-operand";
    case SlotRole::SplitSegment: return "split-segment";
  }
  return "conv-out-channels";
}

bool DependencyGroup::has_role(SlotRole r) const {
  return std::any_of(slots.begin(), slots.end(), [r](const Slot& s) { return s.role == r; });
}

std::vector<DependencyGroup> build_dependency_groups(const ModelGraph& g, const ExclusionPolicy& policy) {
  const ShapeMap shapes = infer_shapes(g);
  const auto order = *topological_order(g);
  std::map<std::string, std::size_t> topo;
  for (std::size_t i = 0; i < order.size(); ++i) topo[order[i]] = i;

  std::set<std::string> weight_tensors;
  for (const auto& n : g.nodes)
    for (const auto& [role, t] : n.weights) weight_tensors.insert(t);

  ChannelSpace space;
  auto feature = [&](const std::string& t) {
    if (g.constants.contains(t) || weight_tensors.contains(t)) return false;
    auto it = shapes.find(t);
    return it != shapes.end() && it->second.size() == 4;
  };
  for (const auto& t : g.inputs)
    if (feature(t)) space.add(t, shapes.at(t)[1]);
  for (const auto& id : order) {
    const Node& n = *g.find_node(id);
    for (const auto& t : n.inputs)
      if (feature(t)) space.add(t, shapes.at(t)[1]);
    for (const auto& t : n.outputs)
      if (feature(t)) space.add(t, shapes.at(t)[1]);
  }

  UnionFind uf(space.position.size());
  auto tie = [&](const std::string& a, std::int64_t ca, const std::string& b, std::int64_t cb) {
    uf.unite(space.at(a, ca), space.at(b, cb));
  };
  auto pass_through = [&](const std::string& in, const std::string& out) {
    for (std::int64_t c = 0; c < space.width.at(out); ++c) tie(in, c, out, c);
  };

  for (const auto& id : order) {
    const Node& n = *g.find_node(id);
    const bool fm_in = !n.inputs.empty() && space.has(n.inputs[0]);
    if (!fm_in) continue;
    switch (n.op) {
      case OpKind::Conv2d:
        for (const auto& [role, t] : n.weights)
          if (!g.constants.contains(t)) throw unsupported("weights of node " + n.id + " are not constants");
        if (n.attrs.groups == 1) break;
        if (!is_depthwise(n, shapes)) throw unsupported("grouped convolution at node " + n.id);
        pass_through(n.inputs[0], n.outputs[0]);
        break;
      case OpKind::Add:
      case OpKind::Mul:
        if (!space.has(n.inputs[1])) throw unsupported("constant operand at node " + n.id);
        pass_through(n.inputs[0], n.outputs[0]);
        pass_through(n.inputs[1], n.outputs[0]);
        break;
      case OpKind::Concat: {
        if (n.attrs.axis != 1) throw unsupported("concat on axis " + std::to_string(n.attrs.axis) + " at node " + n.id);
        std::int64_t off = 0;
        for (const auto& t : n.inputs) {
          for (std::int64_t c = 0; c < space.width.at(t); ++c) tie(t, c, n.outputs[0], off + c);
          off += space.width.at(t);
        }
        break;
      }
      case OpKind::Split: {
        if (n.attrs.axis != 1) throw unsupported("split on axis " + std::to_string(n.attrs.axis) + " at node " + n.id);
        std::int64_t off = 0;
        for (const auto& t : n.outputs) {
          for (std::int64_t c = 0; c < space.width.at(t); ++c) tie(n.inputs[0], off + c, t, c);
          off += space.width.at(t);
        }
        break;
      }
      case OpKind::QuantizeLinear:
      case OpKind::DequantizeLinear:
        if (n.attrs.quant && n.attrs.quant->granularity != Granularity::PerTensor)
          throw unsupported("per-channel activation quantization at node " + n.id);
        pass_through(n.inputs[0], n.outputs[0]);
        break;
      case OpKind::MaxPool:
      case OpKind::Upsample:
      case OpKind::SiLU:
      case OpKind::Sigmoid:
      case OpKind::Identity:
        pass_through(n.inputs[0], n.outputs[0]);
        break;
    }
  }

  // Members of each channel class, ordered by (tensor, channel).
  std::map<std::size_t, std::vector<std::pair<std::string, std::int64_t>>> classes;
  for (std::size_t p = 0; p < space.position.size(); ++p) classes[uf.find(p)].push_back(space.position[p]);
  using Signature = std::vector<std::string>;
  std::map<Signature, std::vector<std::vector<std::pair<std::string, std::int64_t>>>> buckets;
  for (auto& [root, members] : classes) {
    std::sort(members.begin(), members.end());
    Signature sig;
    for (const auto& m : members) sig.push_back(m.first);
    buckets[sig].push_back(members);
  }

  std::map<std::string, std::string> producer;
  for (const auto& n : g.nodes)
    for (const auto& t : n.outputs) producer[t] = n.id;
  const std::set<std::string> io = [&] {
    std::set<std::string> s(g.inputs.begin(), g.inputs.end());
    s.insert(g.outputs.begin(), g.outputs.end());
    return s;
  }();

  std::vector<DependencyGroup> groups;
  auto finish = [&](const std::vector<std::pair<std::string, std::int64_t>>& first, std::int64_t width) {
    DependencyGroup grp;
    grp.width = width;
    for (const auto& [t, off] : first) grp.tensors.push_back({t, off});
    for (const auto& [t, off] : grp.tensors) {
      if (auto p = producer.find(t); p != producer.end()) {
        const Node& n = *g.find_node(p->second);
        if (n.op == OpKind::Conv2d) {
          grp.slots.push_back({n.id, SlotRole::ConvOut, t, off});
          if (n.weights.contains("bias")) grp.slots.push_back({n.id, SlotRole::Bias, t, off});
        } else if (n.op == OpKind::Concat) {
          grp.slots.push_back({n.id, SlotRole::ConcatSegment, t, off});
        } else if (n.op == OpKind::Add || n.op == OpKind::Mul) {
          grp.slots.push_back({n.id, SlotRole::AddOperand, t, off});
        }
      }
      for (const auto& cid : g.consumers(t)) {
        const Node& n = *g.find_node(cid);
        if (n.op == OpKind::Conv2d && n.attrs.groups == 1 && n.inputs[0] == t)
          grp.slots.push_back({n.id, SlotRole::ConvIn, t, off});
        else if (n.op == OpKind::Split)
          grp.slots.push_back({n.id, SlotRole::SplitSegment, t, off});
      }
    }
    std::sort(grp.slots.begin(), grp.slots.end(), [&](const Slot& a, const Slot& b) {
      return std::tuple(topo.at(a.node), a.role, a.tensor, a.offset) <
             std::tuple(topo.at(b.node), b.role, b.tensor, b.offset);
    });
    grp.slots.erase(std::unique(grp.slots.begin(), grp.slots.end()), grp.slots.end());

    auto touches = [&](auto pred) { return std::any_of(grp.slots.begin(), grp.slots.end(), pred); };
    const bool at_io = std::any_of(grp.tensors.begin(), grp.tensors.end(),
                                   [&](const TensorRange& r) { return io.contains(r.tensor); });
    if (at_io) {
      grp.excluded = true;
      grp.exclusion_reason = "graph-io";
    } else if (!grp.has_role(SlotRole::ConvOut)) {
      grp.excluded = true;
      grp.exclusion_reason = "no-weights";
    } else if (policy.exclude_concat && grp.has_role(SlotRole::ConcatSegment)) {
      grp.excluded = true;
      grp.exclusion_reason = "concat";
    } else if (touches([&](const Slot& s) {
                 const auto& tags = g.find_node(s.node)->attrs;
                 return std::any_of(policy.tags.begin(), policy.tags.end(),
                                    [&](const std::string& tag) { return tags.has_tag(tag); });
               })) {
      grp.excluded = true;
      grp.exclusion_reason = "tagged";
    } else if (touches([&](const Slot& s) {
                 return std::find(policy.nodes.begin(), policy.nodes.end(), s.node) != policy.nodes.end();
               })) {
      grp.excluded = true;
      grp.exclusion_reason = "listed";
    }
    groups.push_back(std::move(grp));
  };

  for (auto& [sig, members] : buckets) {
    std::sort(members.begin(), members.end());
    std::size_t start = 0;
    for (std::size_t i = 1; i <= members.size(); ++i) {
      bool contiguous = i < members.size();
      for (std::size_t m = 0; contiguous && m < sig.size(); ++m)
        contiguous = members[i][m].second == members[i - 1][m].second + 1;
      if (!contiguous) {
        finish(members[start], static_cast<std::int64_t>(i - start));
        start = i;
      }
    }
  }

  auto first_node = [&](const DependencyGroup& grp) {
    std::size_t best = order.size();
    for (const auto& s : grp.slots)
      if (s.role == SlotRole::ConvOut) best = std::min(best, topo.at(s.node));
    return best;
  };
  auto first_tensor = [&](const DependencyGroup& grp) {
    return std::pair(space.base.at(grp.tensors.front().tensor), grp.tensors.front().offset);
  };
  std::stable_sort(groups.begin(), groups.end(), [&](const DependencyGroup& a, const DependencyGroup& b) {
    return std::pair(first_node(a), first_tensor(a)) < std::pair(first_node(b), first_tensor(b));
  });
  return groups;
}

std::vector<ImportanceScore> score_channels(const ModelGraph& g, const std::vector<DependencyGroup>& groups,
                                            PruneScope scope, GlobalNormalization norm) {
  std::vector<ImportanceScore> out;
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& grp = groups[gi];
    std::vector<double> sq(static_cast<std::size_t>(grp.width), 0.0);
    for (const auto& s : grp.slots) {
      const Node& n = *g.find_node(s.node);
      if (s.role == SlotRole::Bias) {
        const auto& b = g.constants.at(n.weights.at("bias")).values;
        for (std::int64_t c = 0; c < grp.width; ++c) {
          const double v = b[static_cast<std::size_t>(s.offset + c)];
          sq[static_cast<std::size_t>(c)] += v * v;
        }
      } else if (s.role == SlotRole::ConvOut || s.role == SlotRole::ConvIn) {
        const Constant& k = g.constants.at(n.weights.at("kernel"));
        const std::int64_t o = k.shape[0], i = k.shape[1], hw = k.shape[2] * k.shape[3];
        for (std::int64_t c = 0; c < grp.width; ++c) {
          double acc = 0.0;
          if (s.role == SlotRole::ConvOut) {
            const auto row = (s.offset + c) * i * hw;
            for (std::int64_t e = 0; e < i * hw; ++e) {
              const double v = k.values[static_cast<std::size_t>(row + e)];
              acc += v * v;
            }
          } else {
            for (std::int64_t oc = 0; oc < o; ++oc)
              for (std::int64_t e = 0; e < hw; ++e) {
                const double v = k.values[static_cast<std::size_t>((oc * i + s.offset + c) * hw + e)];
                acc += v * v;
              }
          }
          sq[static_cast<std::size_t>(c)] += acc;
        }
      }
    }
    double mean = 0.0;
    for (double v : sq) mean += std::sqrt(v);
    mean /= std::max<double>(1.0, static_cast<double>(sq.size()));
    for (std::int64_t c = 0; c < grp.width; ++c) {
      ImportanceScore s{gi, c, std::sqrt(sq[static_cast<std::size_t>(c)]), 0.0};
      s.normalized = s.score;
      if (scope == PruneScope::Global && norm == GlobalNormalization::MeanNormalized)
        s.normalized = mean > 0.0 ? s.score / mean : 0.0;
      out.push_back(s);
    }
  }
  return out;
}

double PruningSchedule::per_step() const {
  check();
  return 1.0 - std::pow(1.0 - r_target, 1.0 / static_cast<double>(k));
}

void PruningSchedule::check() const {
  if (!(r_target > 0.0 && r_target < 1.0)) throw std::invalid_argument("r_target must lie in (0, 1)");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (!(stop_threshold >= 0.0 && stop_threshold <= 1.0))
    throw std::invalid_argument("stop_threshold must lie in [0, 1]");
}

std::size_t prune_count(const PruneSet& s) {
  std::size_t n = 0;
  for (const auto& [g, chans] : s) n += chans.size();
  return n;
}

PruneSet plan_fraction(const std::vector<DependencyGroup>& groups, const std::vector<ImportanceScore>& scores,
                       PruneScope scope, double fraction) {
  if (!(fraction >= 0.0 && fraction < 1.0))
    throw std::invalid_argument("schedule would reduce a group below width 1");
  // Absorbs representation error in fraction * width (e.g. 0.5 * 8).
  constexpr double kSlack = 1e-9;
  PruneSet out;
  if (scope == PruneScope::Local) {
    std::map<std::size_t, std::vector<const ImportanceScore*>> by_group;
    for (const auto& s : scores) by_group[s.group].push_back(&s);
    for (auto& [gi, list] : by_group) {
      const auto& grp = groups.at(gi);
      if (grp.excluded || grp.width <= 1) continue;
      const auto n = std::min<std::int64_t>(
          static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(grp.width) + kSlack)), grp.width - 1);
      if (n <= 0) continue;
      std::sort(list.begin(), list.end(), [](const ImportanceScore* a, const ImportanceScore* b) {
        return std::pair(a->score, a->channel) < std::pair(b->score, b->channel);
      });
      for (std::int64_t i = 0; i < n; ++i) out[gi].insert(list[static_cast<std::size_t>(i)]->channel);
    }
    return out;
  }

  std::vector<const ImportanceScore*> pool;
  std::int64_t total = 0;
  std::map<std::size_t, std::int64_t> remaining;
  for (std::size_t gi = 0; gi < groups.size(); ++gi)
    if (!groups[gi].excluded && groups[gi].width > 1) {
      total += groups[gi].width;
      remaining[gi] = groups[gi].width;
    }
  for (const auto& s : scores)
    if (remaining.contains(s.group)) pool.push_back(&s);
  std::sort(pool.begin(), pool.end(), [](const ImportanceScore* a, const ImportanceScore* b) {
    return std::tuple(a->normalized, a->group, a->channel) < std::tuple(b->normalized, b->group, b->channel);
  });
  auto budget = static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(total) + kSlack));
  for (const auto* s : pool) {
    if (budget <= 0) break;
    auto& left = remaining[s->group];
    if (left <= 1) continue;
    out[s->group].insert(s->channel);
    --left;
    --budget;
  }
  return out;
}

PruneSet plan_step(const std::vector<DependencyGroup>& groups, const std::vector<ImportanceScore>& scores,
                   const PruningSchedule& schedule, int step_index) {
  if (step_index < 0 || step_index >= schedule.k) throw std::invalid_argument("step index out of range");
  return plan_fraction(groups, scores, schedule.scope, schedule.per_step());
}

ModelGraph apply_prune(const ModelGraph& g, const std::vector<DependencyGroup>& groups, const PruneSet& prune) {
  std::map<std::pair<std::string, std::size_t>, std::set<std::int64_t>> drops;  // (constant, dim)
  std::map<std::string, std::set<std::int64_t>> split_drops;                      // split node -> input channels
  std::set<std::string> depthwise_nodes;

  for (const auto& [gi, chans] : prune) {
    if (gi >= groups.size()) throw GraphError("inconsistent prune set: unknown group " + std::to_string(gi));
    const auto& grp = groups[gi];
    if (chans.empty()) continue;
    if (grp.excluded) throw GraphError("inconsistent prune set: group " + std::to_string(gi) + " is excluded");
    if (static_cast<std::int64_t>(chans.size()) >= grp.width)
      throw GraphError("inconsistent prune set: group " + std::to_string(gi) + " would lose every channel");
    for (auto c : chans)
      if (c < 0 || c >= grp.width) throw GraphError("inconsistent prune set: channel out of range");
    for (const auto& s : grp.slots) {
      const Node* n = g.find_node(s.node);
      if (n == nullptr) throw GraphError("inconsistent prune set: unknown node " + s.node);
      std::set<std::int64_t> abs;
      for (auto c : chans) abs.insert(s.offset + c);
      switch (s.role) {
        case SlotRole::ConvOut:
          drops[{n->weights.at("kernel"), 0}].insert(abs.begin(), abs.end());
          if (n->attrs.groups > 1) depthwise_nodes.insert(n->id);
          break;
        case SlotRole::Bias:
          drops[{n->weights.at("bias"), 0}].insert(abs.begin(), abs.end());
          break;
        case SlotRole::ConvIn:
          drops[{n->weights.at("kernel"), 1}].insert(abs.begin(), abs.end());
          break;
        case SlotRole::SplitSegment:
          split_drops[n->id].insert(abs.begin(), abs.end());
          break;
        case SlotRole::ConcatSegment:
        case SlotRole::AddOperand:
          break;
      }
    }
  }

  ModelGraph out = g;
  for (const auto& [key, drop] : drops) {
    Constant& c = out.constants.at(key.first);
    Shape shape;
    c.values = remove_along(c, key.second, drop, shape);
    c.shape = shape;
    out.tensors.at(key.first).shape = shape;
  }
  for (const auto& [id, drop] : split_drops) {
    Node& n = *out.find_node(id);
    std::int64_t start = 0;
    for (auto& size : n.attrs.split) {
      const std::int64_t end = start + size;
      size -= std::count_if(drop.begin(), drop.end(), [&](std::int64_t c) { return c >= start && c < end; });
      start = end;
    }
  }
  for (const auto& id : depthwise_nodes) {
    Node& n = *out.find_node(id);
    n.attrs.groups = out.constants.at(n.weights.at("kernel")).shape[0];
  }
  for (auto& [id, t] : out.tensors)
    if (t.producer != kConstant && t.producer != kGraphInput) t.shape.clear();
  try {
    out = with_inferred_shapes(out);
  } catch (const GraphError& e) {
    throw GraphError(std::string("inconsistent prune set: ") + e.what());
  }
  const auto report = validate(out);
  if (!report.ok()) throw GraphError("inconsistent prune set: " + report.summary());
  return out;
}

RecoveryHook identity_recovery() {
  return [](const ModelGraph& g, int) { return g; };
}

namespace {

bool same_topology(const ModelGraph& a, const ModelGraph& b) {
  if (a.nodes.size() != b.nodes.size() || a.inputs != b.inputs || a.outputs != b.outputs) return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const Node& x = a.nodes[i];
    const Node& y = b.nodes[i];
    if (x.id != y.id || x.op != y.op || x.inputs != y.inputs || x.outputs != y.outputs || x.weights != y.weights)
      return false;
  }
  if (a.tensors.size() != b.tensors.size()) return false;
  for (const auto& [id, t] : a.tensors) {
    auto it = b.tensors.find(id);
    if (it == b.tensors.end() || it->second.shape != t.shape) return false;
  }
  return true;
}

}  // namespace

ScheduleResult run_schedule(const ModelGraph& g, const PruningSchedule& schedule, const EvalFn& eval,
                            const RecoveryHook& hook) {
  schedule.check();
  const double per_step = schedule.per_step();
  const std::int64_t original = count_params(g);

  ScheduleResult result;
  result.graphs.push_back(g);
  const double baseline = eval(g);
  result.metrics.push_back({0, 0, original, count_macs(g), baseline});

  for (int step = 0; step < schedule.k; ++step) {
    const ModelGraph& cur = result.graphs.back();
    const auto groups = build_dependency_groups(cur, schedule.exclusions);
    const auto scores = score_channels(cur, groups, schedule.scope, schedule.normalization);

    PruneSet plan;
    if (schedule.target == PruneTarget::Channels) {
      plan = plan_step(groups, scores, schedule, step);
    } else {
      const double goal = static_cast<double>(original) * std::pow(1.0 - per_step, step + 1);
      auto params_at = [&](double f) {
        return static_cast<double>(count_params(apply_prune(cur, groups, plan_fraction(groups, scores, schedule.scope, f))));
      };
      // Parameter count is non-increasing in the fraction; bisect for the
      // boundary, then keep whichever side lands closer to the goal.
      double lo = 0.0, hi = std::nextafter(1.0, 0.0);
      const double p_lo = params_at(lo);
      const double p_hi = params_at(hi);
      double best = lo;
      if (p_lo <= goal) {
        best = lo;
      } else if (p_hi > goal) {
        best = hi;
      } else {
        double above = p_lo, below = p_hi;
        for (int it = 0; it < 48; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double p = params_at(mid);
          if (p > goal) {
            lo = mid;
            above = p;
          } else {
            hi = mid;
            below = p;
          }
        }
        best = (goal - below) < (above - goal) ? hi : lo;
      }
      plan = plan_fraction(groups, scores, schedule.scope, best);
    }

    ModelGraph next = apply_prune(cur, groups, plan);
    ModelGraph recovered = hook(next, step + 1);
    if (!same_topology(next, recovered)) throw GraphError("recovery hook changed graph topology or shapes");
    const double metric = eval(recovered);
    result.metrics.push_back({step + 1, prune_count(plan), count_params(recovered), count_macs(recovered), metric});
    result.graphs.push_back(std::move(recovered));
    if (metric < (1.0 - schedule.stop_threshold) * baseline) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

std::string to_string(PruneScope s) { return s == PruneScope::Global ? "global" : "local"; }

PruneScope parse_scope(const std::string& s) {
  if (s == "local") return PruneScope::Local;
  if (s == "global") return PruneScope::Global;
  throw std::invalid_argument("unknown pruning scope '" + s + "'");
}

std::string to_string(PruneTarget t) { return t == PruneTarget::Channels ? "channels" : "parameters"; }

PruneTarget parse_target(const std::string& s) {
  if (s == "parameters") return PruneTarget::Parameters;
  if (s == "channels") return PruneTarget::Channels;
  throw std::invalid_argument("unknown pruning target '" + s + "'");
}

std::string to_string(GlobalNormalization n) { return n == GlobalNormalization::Raw ? "raw" : "mean-normalized"; }

GlobalNormalization parse_normalization(const std::string& s) {
  if (s == "raw") return GlobalNormalization::Raw;
  if (s == "mean-normalized") return GlobalNormalization::MeanNormalized;
  throw std::invalid_argument("unknown normalization '" + s + "'");
}

}  // namespace edgepress
