// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Tolerances and runtime limits are pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <spdlog/spdlog.h>

#include "edgepress/accountant.hpp"
#include "edgepress/executor.hpp"
#include "edgepress/fixtures.hpp"
#include "edgepress/pipeline.hpp"
#include "edgepress/powersim.hpp"
#include "edgepress/pruner.hpp"
#include "edgepress/quantizer.hpp"
#include "edgepress/serialize.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using namespace edgepress;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double retained_fraction(const ModelGraph& a, const ModelGraph& b) {
  return static_cast<double>(count_params(b)) / static_cast<double>(count_params(a));
}

Outcome schedule_algebra() {
  PruningSchedule s;
  s.r_target = 0.7;
  s.k = 6;
  const double p = s.per_step();
  const double want = oracle::per_step(0.7, 6);
  const double rel = std::fabs(p - want) / want;
  const double residual = std::fabs(std::pow(1.0 - p, 6) - 0.3);
  return {rel < 1e-12 && residual <= 1e-12,
          fmt("per_step %.15f, relative error %.2e, |(1-p)^6 - 0.3| = %.2e", p, rel, residual)};
}

Outcome parameter_target() {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  PruningSchedule s;
  const auto res = run_schedule(g, s, [](const ModelGraph&) { return 1.0; }, identity_recovery());
  const double pct = 100.0 * retained_fraction(g, res.graphs.back());
  const bool all_steps = res.graphs.size() == 7 && !res.stopped_early;
  return {all_steps && std::fabs(pct - 30.0) <= 3.0,
          fmt("retained %.2f%% of %.0f params after %.0f steps", pct, static_cast<double>(count_params(g)),
              static_cast<double>(res.graphs.size() - 1))};
}

Outcome mask_equivalence() {
  std::size_t compared = 0, mismatched = 0, pruned_channels = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const FixtureKind kind = std::array{FixtureKind::Chain, FixtureKind::Residual, FixtureKind::Concat}[seed % 3];
    const auto g = gen_fixture(kind, 1000 + seed);
    ExclusionPolicy keep;
    keep.exclude_concat = false;
    const auto groups = build_dependency_groups(g, keep);
    Rng rng(seed);
    PruneSet plan;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      if (groups[gi].excluded || groups[gi].width < 2) continue;
      const auto n = rng.range(1, groups[gi].width - 1);
      std::set<std::int64_t> chans;
      while (static_cast<std::int64_t>(chans.size()) < n) chans.insert(rng.range(0, groups[gi].width - 1));
      plan[gi] = chans;
    }
    pruned_channels += prune_count(plan);
    const auto pruned = apply_prune(g, groups, plan);
    const auto masked = oracle::mask_channels(g, groups, plan);
    for (const auto& x : gen_samples(g, 3, seed)) {
      const auto a = run_outputs(pruned, std::span<const TensorValue>(&x, 1));
      const auto b = run_outputs(masked, std::span<const TensorValue>(&x, 1));
      for (std::size_t o = 0; o < a.size(); ++o)
        for (std::size_t i = 0; i < a[o].data.size(); ++i) {
          ++compared;
          // 0 ULP: the float values compare equal.
          if (a[o].data[i] != b[o].data[i]) ++mismatched;
        }
    }
  }
  return {mismatched == 0 && pruned_channels > 0,
          fmt("%.0f output values over 50 graphs (%.0f channels pruned), %.0f differ", static_cast<double>(compared),
              static_cast<double>(pruned_channels), static_cast<double>(mismatched))};
}

Outcome quant_round_trip() {
  Rng rng(2024);
  std::size_t bound_fail = 0, mono_fail = 0, zero_fail = 0;
  double worst = 0.0;
  for (int t = 0; t < 100000; ++t) {
    const auto scheme = rng.unit() < 0.5 ? QuantScheme::Asymmetric : QuantScheme::Symmetric;
    double lo = rng.uniform(-100, 100), hi = rng.uniform(-100, 100);
    if (lo > hi) std::swap(lo, hi);
    if (t % 10 == 0) lo = 0.0, hi = std::fabs(hi) + 1.0;
    if (hi - lo < 1e-6) hi = lo + 1.0;
    const auto p = derive_params(Range{lo, hi}, scheme);
    const double s = p.scale[0], z = p.zero_point[0];
    if (scheme == QuantScheme::Symmetric && z != 0.0) ++zero_fail;
    const double x = rng.uniform(lo, hi);
    const double err = std::fabs(x - dequantize_value(quantize_value(x, p), p));
    const double bound = s * (0.5 + std::fabs(z - round_half_even(z)));
    worst = std::max(worst, err / bound);
    if (err > bound * (1.0 + 1e-9)) ++bound_fail;
    const double y = rng.uniform(lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo));
    const auto qx = quantize_value(x, p), qy = quantize_value(y, p);
    if ((x <= y && qx > qy) || (y <= x && qy > qx)) ++mono_fail;
  }
  return {bound_fail == 0 && mono_fail == 0 && zero_fail == 0,
          fmt("1e5 triples: %.0f bound, %.0f monotonicity, %.0f zero-point violations; worst err/bound %.4f",
              static_cast<double>(bound_fail), static_cast<double>(mono_fail), static_cast<double>(zero_fail), worst)};
}

Outcome calibration_dominance() {
  std::size_t tensors = 0, tensor_fail = 0, convs = 0, conv_fail = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FixtureKind kind = std::array{FixtureKind::Chain, FixtureKind::Residual, FixtureKind::Concat}[seed % 3];
    const auto g = gen_fixture(kind, 500 + seed);
    const auto stats = calibrate(g, gen_samples(g, 300, seed));
    for (const auto& [id, st] : stats.tensors) {
      ++tensors;
      const double mm = calibration_mse(st, estimate_range(st, RangeMethod::MinMax), QuantScheme::Asymmetric);
      const double ms = calibration_mse(st, estimate_range(st, RangeMethod::Mse), QuantScheme::Asymmetric);
      if (ms > mm) ++tensor_fail;
    }
    for (const auto& n : g.nodes) {
      if (n.op != OpKind::Conv2d) continue;
      ++convs;
      const auto& w = g.constants.at(n.weights.at("kernel"));
      const auto pc = derive_params(weight_ranges(w, Granularity::PerChannel), QuantScheme::Symmetric,
                                    Granularity::PerChannel, 0);
      const auto pt = derive_params(weight_ranges(w, Granularity::PerTensor), QuantScheme::Symmetric);
      if (weight_quant_mse(w, pc) > weight_quant_mse(w, pt)) ++conv_fail;
    }
  }
  return {tensor_fail == 0 && conv_fail == 0 && tensors > 0,
          fmt("mse > min-max on %.0f of %.0f tensors; per-channel > per-tensor on %.0f of %.0f convs",
              static_cast<double>(tensor_fail), static_cast<double>(tensors), static_cast<double>(conv_fail),
              static_cast<double>(convs))};
}

Outcome compression_accounting() {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  const auto stats = calibrate(g, gen_samples(g, 16, 1));
  const auto qdq = rewrite_qdq(g, derive_graph_params(g, stats, {}));
  const double ratio =
      static_cast<double>(footprint(g).weight_bytes) / static_cast<double>(footprint(qdq).weight_bytes);
  const auto fit = fit_report(850.97 * kKiB, 677.30 * kKiB, stm32u575zi());
  const bool ok = ratio >= 3.9 && fit.flash.pass && fit.ram.pass && std::fabs(fit.flash.headroom_pct - 58.4) <= 0.1 &&
                  std::fabs(fit.ram.headroom_pct - 11.8) <= 0.1;
  return {ok, fmt("weight bytes ratio %.3f; headroom flash %.2f%%, ram %.2f%%", ratio, fit.flash.headroom_pct,
                  fit.ram.headroom_pct)};
}

Outcome energy_math() {
  const auto c = duty_cycle(stm32u575zi(), 1.510);
  const double e = energy_per_inference(c);
  const auto trace = simulate_trace(c, 120.0);
  const double te = trace_energy(trace, c.supply_voltage);
  const double closed = average_power(c) * 120.0;
  const double rel = std::fabs(te - closed) / closed;
  const auto bursts = count_bursts(trace);
  return {std::fabs(e - 51.8e-3) / 51.8e-3 <= 0.005 && rel <= 1e-9 && bursts == 4,
          fmt("E = %.4f mJ, trace vs closed form %.2e relative, %.0f bursts", e * 1e3, rel,
              static_cast<double>(bursts))};
}

Outcome battery_projection() {
  const auto c = duty_cycle(stm32u575zi(), 1.510);
  const double days = battery_life_days(c, BatterySpec{25.9});
  const double dev = std::fabs(189.0 - days) / days;
  return {dev <= 0.12, fmt("closed form %.2f days at %.4f mW; 189 days is %.2f%% away", days,
                           average_power(c) * 1e3, dev * 100.0)};
}

Outcome mac_monotonicity(const fs::path& dir) {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  save_model(g, dir / "toy_yolo.epm");
  PipelineConfig c;
  c.model = dir / "toy_yolo.epm";
  c.output_dir = dir / "sweep";
  std::vector<double> rs;
  for (int i = 1; i <= 8; ++i) rs.push_back(i / 10.0);
  const auto rows = sweep(c, SweepVariable::RTarget, rs);
  bool decreasing = true;
  std::vector<double> params, macs;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].macs >= rows[i - 1].macs) decreasing = false;
    params.push_back(static_cast<double>(rows[i].params));
    macs.push_back(static_cast<double>(rows[i].macs));
  }
  const double r2 = oracle::r_squared(params, macs);
  return {decreasing && r2 >= 0.95,
          fmt("MACs %.0f -> %.0f over 8 points, R^2 %.4f", macs.front(), macs.back(), r2) +
              (decreasing ? ", strictly decreasing" : ", NOT strictly decreasing")};
}

Outcome determinism(const fs::path& dir) {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  save_model(g, dir / "toy_yolo.epm");
  fs::create_directories(dir / "calib");
  const auto xs = gen_samples(g, 32, 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    save_tensor(xs[i], dir / "calib" / ("sample_" + std::to_string(10000 + i) + ".ept"));
  PipelineConfig c;
  c.model = dir / "toy_yolo.epm";
  c.calibration_dir = dir / "calib";
  c.seed = 3;
  c.output_dir = dir / "run_a";
  const auto a = run_pipeline(c);
  c.output_dir = dir / "run_b";
  const auto b = run_pipeline(c);
  std::size_t compared = 0, differ = 0;
  for (const auto& f : a.artifacts) {
    const auto ext = fs::path(f).extension();
    if (ext != ".epm" && ext != ".json") continue;
    ++compared;
    if (slurp(dir / "run_a" / f) != slurp(dir / "run_b" / f)) ++differ;
  }
  return {a.artifacts == b.artifacts && compared > 0 && differ == 0,
          fmt("%.0f .epm/.json artifacts compared, %.0f differ", static_cast<double>(compared),
              static_cast<double>(differ))};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  test::TempDir scratch;
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "schedule algebra", 1, schedule_algebra},
      {2, "parameter-target fidelity", 30, parameter_target},
      {3, "mask-equivalence oracle", 120, mask_equivalence},
      {4, "quantization round-trip", 10, quant_round_trip},
      {5, "calibration dominance", 120, calibration_dominance},
      {6, "compression accounting", 5, compression_accounting},
      {7, "energy math", 1, energy_math},
      {8, "battery projection", 1, battery_projection},
      {9, "MAC monotonicity", 120, [&] { return mac_monotonicity(scratch.path); }},
      {10, "determinism", 60, [&] { return determinism(scratch.path); }},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %-26s %s  %s [%.2f s, limit %.0f s%s]\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
