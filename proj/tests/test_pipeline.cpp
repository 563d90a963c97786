// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "edgepress/fixtures.hpp"
#include "edgepress/pipeline.hpp"
#include "edgepress/serialize.hpp"
#include "support/helpers.hpp"

using namespace edgepress;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes toy_yolo and `samples` calibration inputs under `dir`.
PipelineConfig toy_setup(const fs::path& dir, std::size_t samples = 16) {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  save_model(g, dir / "toy_yolo.epm");
  fs::create_directories(dir / "calib");
  const auto xs = gen_samples(g, samples, 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "sample_%05zu.ept", i);
    save_tensor(xs[i], dir / "calib" / name);
  }
  PipelineConfig c;
  c.model = dir / "toy_yolo.epm";
  c.output_dir = dir / "out";
  c.calibration_dir = dir / "calib";
  return c;
}

Stage stage_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const StageError& e) {
    return e.stage();
  }
  FAIL("no StageError thrown");
  return Stage::Report;
}

}  // namespace

TEST_CASE("stage exit codes are distinct and above the fit code") {
  std::set<int> seen;
  for (auto s : {Stage::Config, Stage::Validate, Stage::Prune, Stage::Calibrate, Stage::Quantize, Stage::Account,
                 Stage::Power, Stage::Report}) {
    CHECK(exit_code(s) > 1);
    CHECK(seen.insert(exit_code(s)).second);
  }
  StageError e(Stage::Calibrate, "boom");
  CHECK(std::string(e.what()).find("calibrate") != std::string::npos);
}

TEST_CASE("config parsing") {
  const auto c = parse_config(R"({
    "schema_version": 1,
    "model": "m.epm",
    "output_dir": "o",
    "seed": 7,
    "pruning": {"r_target": 0.5, "k": 3, "scope": "global", "exclusions": {"concat": false, "nodes": ["stem"]}},
    "quantization": {"range_method": "mse", "grid_size": 20, "weight_granularity": "per-tensor",
                     "calibration_dir": "cal", "sample_count": 10},
    "hardware": {"name": "tiny", "flash_bytes": 65536, "ram_bytes": 32768, "supply_voltage_v": 1.8,
                 "active_current_a": 0.005, "sleep_current_a": 0.0001, "wake_period_s": 10, "clock_hz": 64e6},
    "battery": {"amp_hours": 1.0, "nominal_voltage_v": 3.0},
    "inference_latency_s": 0.5,
    "formats": ["json"]
  })", "/base");
  CHECK(c.model == fs::path("/base/m.epm"));
  CHECK(c.output_dir == fs::path("/base/o"));
  CHECK(c.seed == 7);
  CHECK(c.pruning.r_target == 0.5);
  CHECK(c.pruning.k == 3);
  CHECK(c.pruning.scope == PruneScope::Global);
  CHECK_FALSE(c.pruning.exclusions.exclude_concat);
  CHECK(c.pruning.exclusions.nodes == std::vector<std::string>{"stem"});
  CHECK(c.quant.method == RangeMethod::Mse);
  CHECK(c.quant.grid_size == 20);
  CHECK(c.quant.weight_granularity == Granularity::PerTensor);
  CHECK(c.calibration_dir == fs::path("/base/cal"));
  CHECK(c.sample_count == 10);
  CHECK(c.hardware.name == "tiny");
  CHECK(c.hardware.ram_budget == 32768);
  CHECK(c.battery.watt_hours == doctest::Approx(3.0));
  CHECK(c.inference_latency == 0.5);
  CHECK(c.write_json);
  CHECK_FALSE(c.write_table);

  const auto back = parse_config(config_to_json(c).dump(), "/elsewhere");
  CHECK(back.model == c.model);
  CHECK(back.pruning.exclusions.nodes == c.pruning.exclusions.nodes);
  CHECK(back.hardware.flash_budget == c.hardware.flash_budget);
}

TEST_CASE("bad configs are config-stage errors") {
  for (const char* text : {
           R"({"model": "m.epm", "pruning": {"r_target": 0}})",
           R"({"model": "m.epm", "pruning": {"r_target": 1.0}})",
           R"({"model": "m.epm", "pruning": {"k": 0}})",
           R"({"model": "m.epm", "colour": "red"})",
           R"({"model": "m.epm", "schema_version": 2})",
           R"({"model": "m.epm", "hardware": "esp32"})",
           R"({"output_dir": "o"})",
           R"([1, 2])",
           "not json",
       })
    CHECK_MESSAGE(stage_of([&] { parse_config(text); }) == Stage::Config, text);
}

TEST_CASE("missing calibration directory fails the calibrate stage") {
  test::TempDir dir;
  auto c = toy_setup(dir.path, 2);
  c.calibration_dir = dir.path / "nowhere";
  c.prune = false;
  CHECK(stage_of([&] { run_pipeline(c); }) == Stage::Calibrate);
  c.calibration_dir.clear();
  CHECK(stage_of([&] { run_pipeline(c); }) == Stage::Calibrate);
}

TEST_CASE("missing model fails the validate stage") {
  test::TempDir dir;
  PipelineConfig c;
  c.model = dir.path / "absent.epm";
  c.output_dir = dir.path / "out";
  CHECK(stage_of([&] { run_pipeline(c); }) == Stage::Validate);
}

TEST_CASE("default pipeline on the toy model") {
  test::TempDir dir;
  auto c = toy_setup(dir.path);
  c.hardware.flash_budget = 64 * kKiB;
  c.hardware.ram_budget = 192 * kKiB;
  const auto r = run_pipeline(c);
  CHECK(r.steps.size() == 7);
  CHECK(static_cast<double>(r.pruned.params) / static_cast<double>(r.baseline.params) ==
        doctest::Approx(0.30).epsilon(0.1));
  CHECK(r.final.params == r.pruned.params);
  CHECK(static_cast<double>(r.final.weight_bytes) / static_cast<double>(r.pruned.weight_bytes) ==
        doctest::Approx(0.25).epsilon(0.1));
  CHECK(r.fit.pass());
  CHECK(r.exit_code() == 0);
  CHECK(r.trace_bursts == 4);
  REQUIRE(r.quant_error.has_value());
  CHECK(r.quant_error->outputs.size() == 2);
  for (const char* f : {"model_pruned.epm", "model_qdq.epm", "trace.csv", "metrics.json", "quant_error.json",
                        "footprint.json", "fit.json", "energy.json", "report.json", "summary.txt",
                        "steps/step_0.epm", "steps/step_6.epm"})
    CHECK_MESSAGE(fs::exists(c.output_dir / f), f);
  const auto report = Json::parse(slurp(c.output_dir / "report.json"));
  CHECK(report.at("artifacts").get<std::vector<std::string>>() == r.artifacts);
  CHECK(load_model(c.output_dir / "model_qdq.epm").name == load_model(c.model).name);
}

TEST_CASE("a profile that is too small fails the fit, not the run") {
  test::TempDir dir;
  auto c = toy_setup(dir.path, 4);
  c.prune = false;
  c.hardware.flash_budget = 1024;
  const auto r = run_pipeline(c);
  CHECK_FALSE(r.fit.flash.pass);
  CHECK(r.exit_code() == 1);
}

TEST_CASE("two runs with the same config write identical bytes") {
  test::TempDir dir;
  auto c = toy_setup(dir.path, 8);
  c.pruning.k = 2;
  c.eval_metric = EvalMetric::OutputFidelity;
  c.output_dir = dir.path / "a";
  const auto ra = run_pipeline(c);
  c.output_dir = dir.path / "b";
  const auto rb = run_pipeline(c);
  REQUIRE(ra.artifacts == rb.artifacts);
  for (const auto& f : ra.artifacts) CHECK_MESSAGE(slurp(dir.path / "a" / f) == slurp(dir.path / "b" / f), f);
}

TEST_CASE("output fidelity metric starts at one and stays in range") {
  test::TempDir dir;
  auto c = toy_setup(dir.path, 2);
  c.quantize = false;
  c.eval_metric = EvalMetric::OutputFidelity;
  const auto r = run_pipeline(c);
  CHECK(r.steps.front().metric == 1.0);
  for (const auto& s : r.steps) {
    CHECK(s.metric >= 0.0);
    CHECK(s.metric <= 1.0);
  }
}

TEST_CASE("fixture generation is deterministic") {
  CHECK(encode_model(gen_fixture(FixtureKind::Chain, 42)) == encode_model(gen_fixture(FixtureKind::Chain, 42)));
  const auto g = gen_fixture(FixtureKind::ToyYolo, 0);
  CHECK(g.inputs.size() == 1);
  CHECK(g.outputs.size() == 2);
  CHECK(parse_fixture_kind(to_string(FixtureKind::Residual)) == FixtureKind::Residual);
  CHECK_THROWS_AS(parse_fixture_kind("resnet"), std::invalid_argument);
}

TEST_CASE("k sweep reaches the target at every k") {
  test::TempDir dir;
  const auto c = toy_setup(dir.path, 1);
  std::vector<double> ks;
  for (int k = 1; k <= 12; ++k) ks.push_back(k);
  const auto rows = sweep(c, SweepVariable::K, ks);
  REQUIRE(rows.size() == 12);
  for (const auto& r : rows) CHECK(r.retained_params_pct == doctest::Approx(30.0).epsilon(0.1));
}

TEST_CASE("r_target sweep lowers MACs monotonically") {
  test::TempDir dir;
  const auto c = toy_setup(dir.path, 1);
  const auto rows = sweep(c, SweepVariable::RTarget, {0.3, 0.5, 0.7});
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].macs < rows[0].macs);
  CHECK(rows[2].macs < rows[1].macs);
  const auto csv = sweep_csv(rows);
  CHECK(csv.rfind("value,retained_params_pct,params,macs,metric\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("sweep needs values") {
  test::TempDir dir;
  const auto c = toy_setup(dir.path, 1);
  CHECK_THROWS_AS(sweep(c, SweepVariable::K, {}), std::invalid_argument);
  CHECK(stage_of([&] { sweep(c, SweepVariable::K, {2.5}); }) == Stage::Config);
  CHECK_THROWS_AS(parse_sweep_variable("lr"), std::invalid_argument);
}

TEST_CASE("hardware presets and files") {
  test::TempDir dir;
  const auto preset = hardware_from_json(Json("stm32u575zi"));
  CHECK(preset.flash_budget == 2 * kMiB);
  std::ofstream(dir.path / "hw.json") << hardware_to_json(preset).dump();
  const auto file = hardware_from_json(Json("hw.json"), dir.path);
  CHECK(file.ram_budget == preset.ram_budget);
  CHECK(file.sleep_current == preset.sleep_current);
}
