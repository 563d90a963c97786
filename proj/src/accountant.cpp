// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/accountant.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "edgepress/validate.hpp"

namespace edgepress {

void HardwareProfile::check() const {
  for (double v : {flash_budget, ram_budget, supply_voltage, active_current, sleep_current, wake_period, clock_hz})
    if (!(v > 0.0)) throw std::invalid_argument("hardware profile '" + name + "' has a non-positive field");
}

HardwareProfile stm32u575zi() {
  HardwareProfile p;
  p.name = "stm32u575zi";
  p.flash_budget = 2.0 * kMiB;
  p.ram_budget = 768.0 * kKiB;
  p.supply_voltage = 3.3;
  p.active_current = 10.4e-3;
  p.sleep_current = 1.1e-3;
  p.wake_period = 30.0;
  p.clock_hz = 160e6;
  return p;
}

ReferenceFigures yolov8n_baseline() { return {9.95 * kMiB, 2.5 * kMiB, 3.2e6, 0.50}; }

ReferenceFigures yolov8n_compressed() { return {850.97 * kKiB, 677.30 * kKiB, 960e3, 0.143}; }

std::int64_t count_params(const ModelGraph& g) {
  std::int64_t n = 0;
  for (const auto& [id, c] : g.constants) n += element_count(c.shape);
  return n;
}

std::int64_t count_macs(const ModelGraph& g) {
  if (g.nodes.empty()) return 0;
  const ShapeMap shapes = infer_shapes(g);
  std::int64_t macs = 0;
  for (const auto& n : g.nodes) {
    if (n.op == OpKind::Conv2d) {
      const Shape& out = shapes.at(n.outputs[0]);
      const Shape& k = shapes.at(n.weights.at("kernel"));
      macs += k[0] * k[1] * k[2] * k[3] * out[2] * out[3];
    } else if (n.op == OpKind::Add || n.op == OpKind::Mul) {
      macs += element_count(shapes.at(n.outputs[0]));
    }
  }
  return macs;
}

std::int64_t ram_peak(const ModelGraph& g) {
  const auto order = topological_order(g);
  if (!order) throw GraphError("no topological order");
  const ShapeMap shapes = infer_shapes(g);
  auto bytes = [&](const std::string& t) {
    return element_count(shapes.at(t)) * static_cast<std::int64_t>(dtype_size(g.tensor(t).dtype));
  };

  const std::size_t end = order->size();
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < order->size(); ++i) position[(*order)[i]] = i;

  // Last step at which each activation is read; constants are flash-resident.
  std::map<std::string, std::size_t> last_use;
  for (const auto& n : g.nodes) {
    auto touch = [&](const std::string& t) {
      if (g.constants.contains(t)) return;
      auto& u = last_use[t];
      u = std::max(u, position.at(n.id));
    };
    for (const auto& t : n.inputs) touch(t);
    for (const auto& [role, t] : n.weights) touch(t);
  }
  for (const auto& t : g.outputs)
    if (!g.constants.contains(t)) last_use[t] = end;

  std::int64_t live = 0, peak = 0;
  std::set<std::string> alive;
  for (const auto& t : g.inputs) {
    live += bytes(t);
    alive.insert(t);
  }
  peak = live;
  for (std::size_t i = 0; i < order->size(); ++i) {
    const Node& n = *g.find_node((*order)[i]);
    for (const auto& t : n.outputs) {
      live += bytes(t);
      alive.insert(t);
    }
    peak = std::max(peak, live);
    for (auto it = alive.begin(); it != alive.end();) {
      auto u = last_use.find(*it);
      const std::size_t last = u == last_use.end() ? i : u->second;
      if (last <= i) {
        live -= bytes(*it);
        it = alive.erase(it);
      } else {
        ++it;
      }
    }
  }
  return peak;
}

ResourceFootprint footprint(const ModelGraph& g) {
  ResourceFootprint fp;
  fp.params = count_params(g);
  fp.macs = count_macs(g);
  for (const auto& [id, c] : g.constants)
    fp.weight_bytes += element_count(c.shape) * static_cast<std::int64_t>(dtype_size(c.dtype));
  for (const auto& n : g.nodes)
    if (n.op == OpKind::DequantizeLinear && n.attrs.quant)
      fp.quant_param_bytes += static_cast<std::int64_t>(n.attrs.quant->scale.size() * 4 + n.attrs.quant->zero_point.size());
  fp.flash_bytes = fp.weight_bytes + fp.quant_param_bytes;
  fp.ram_peak_bytes = g.nodes.empty() ? 0 : ram_peak(g);
  return fp;
}

namespace {

BudgetVerdict verdict(std::string resource, double used, double budget) {
  BudgetVerdict v;
  v.resource = std::move(resource);
  v.used = used;
  v.budget = budget;
  v.headroom_pct = budget > 0.0 ? (budget - used) / budget * 100.0 : 0.0;
  v.pass = used <= budget;
  return v;
}

}  // namespace

FitReport fit_report(double flash_bytes, double ram_bytes, const HardwareProfile& profile) {
  return FitReport{verdict("flash", flash_bytes, profile.flash_budget), verdict("ram", ram_bytes, profile.ram_budget)};
}

FitReport fit_report(const ResourceFootprint& fp, const HardwareProfile& profile) {
  return fit_report(static_cast<double>(fp.flash_bytes), static_cast<double>(fp.ram_peak_bytes), profile);
}

}  // namespace edgepress
