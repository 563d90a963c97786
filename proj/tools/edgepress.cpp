// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "edgepress/executor.hpp"
#include "edgepress/fixtures.hpp"
#include "edgepress/pipeline.hpp"
#include "edgepress/serialize.hpp"
#include "edgepress/validate.hpp"

namespace fs = std::filesystem;
using namespace edgepress;

namespace {

constexpr int kUnexpected = 10;

struct Globals {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string format = "table";
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("edgepress");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("EDGEPRESS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("EDGEPRESS_LOG='{}' is not a level, keeping warn", env);
    else
      spdlog::set_level(level);
  }
}

PipelineConfig base_config(const Globals& g) {
  PipelineConfig c = g.config.empty() ? PipelineConfig{} : load_config(g.config);
  if (g.seed_set) c.seed = g.seed;
  return c;
}

void emit(const Globals& g, const Json& j, const std::string& table) {
  if (g.format == "json")
    std::cout << dump(j);
  else
    std::cout << table;
}

std::string kv_table(const Json& j) {
  std::string out;
  for (const auto& [k, v] : j.items()) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-24s %s\n", k.c_str(), v.is_string() ? v.get<std::string>().c_str() : v.dump().c_str());
    out += buf;
  }
  return out;
}

ModelGraph load_for(Stage stage, const std::string& path) {
  try {
    return load_model(path);
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

std::vector<TensorValue> load_samples(const std::string& dir, std::size_t count) {
  try {
    if (!fs::is_directory(dir)) throw std::invalid_argument("calibration directory not found: " + dir);
    auto all = load_tensor_dir(dir);
    if (all.empty()) throw std::invalid_argument("calibration directory holds no .ept samples");
    if (all.size() > count) all.resize(count);
    return all;
  } catch (const std::exception& e) {
    throw StageError(Stage::Calibrate, e.what());
  }
}

template <typename Fn>
auto in_stage(Stage s, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(s, e.what());
  }
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("--values", "not a number: " + item);
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"edgepress: structured pruning, int8 quantization and MCU budget accounting"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "pipeline config JSON")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output file or directory");
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { g.seed = s, g.seed_set = true; }, "RNG seed");
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "table"}));

  int rc = 0;

  // validate
  auto* v = app.add_subcommand("validate", "check a model file");
  std::string v_model;
  v->add_option("model", v_model)->required();
  v->callback([&] {
    const auto report = in_stage(Stage::Validate, [&] {
      const Bytes bytes = read_file(v_model);
      return validate(decode_model(bytes));
    });
    Json j{{"ok", report.ok()}, {"issues", Json::array()}};
    for (const auto& i : report.issues) j["issues"].push_back({{"node", i.node}, {"message", i.message}});
    emit(g, j, report.ok() ? "ok\n" : report.summary() + "\n");
    if (!report.ok()) rc = exit_code(Stage::Validate);
  });

  // prune
  auto* p = app.add_subcommand("prune", "run the iterative pruning schedule");
  std::string p_model;
  std::optional<double> p_r;
  std::optional<int> p_k;
  std::string p_scope, p_target;
  p->add_option("model", p_model)->required();
  p->add_option("--r-target", p_r, "overall pruning ratio in (0, 1)");
  p->add_option("--k", p_k, "number of steps");
  p->add_option("--scope", p_scope)->check(CLI::IsMember({"local", "global"}));
  p->add_option("--target", p_target)->check(CLI::IsMember({"parameters", "channels"}));
  p->callback([&] {
    PipelineConfig c = base_config(g);
    if (p_r) c.pruning.r_target = *p_r;
    if (p_k) c.pruning.k = *p_k;
    if (!p_scope.empty()) c.pruning.scope = parse_scope(p_scope);
    if (!p_target.empty()) c.pruning.target = parse_target(p_target);
    c.check();
    const ModelGraph model = load_for(Stage::Validate, p_model);
    const auto result = in_stage(Stage::Prune, [&] {
      return run_schedule(model, c.pruning, [](const ModelGraph&) { return 1.0; });
    });
    const fs::path out = g.out.empty() ? fs::path(fs::path(p_model).replace_extension("").string() + "_pruned.epm") : fs::path(g.out);
    in_stage(Stage::Report, [&] {
      save_model(result.graphs.back(), out);
      return 0;
    });
    Json steps = result.metrics;
    std::string table;
    for (const auto& m : result.metrics)
      table += "step " + std::to_string(m.step) + ": params " + std::to_string(m.params) + ", macs " +
               std::to_string(m.macs) + ", pruned channels " + std::to_string(m.pruned_channels) + "\n";
    emit(g, steps, table);
  });

  // calibrate / quantize share their options
  auto add_quant_opts = [](CLI::App* s, std::string& model, std::string& dir, std::size_t& n, std::string& method) {
    s->add_option("model", model)->required();
    s->add_option("--calibration-dir", dir, "directory of .ept samples")->required();
    s->add_option("--samples", n, "number of samples to use");
    s->add_option("--method", method)->check(CLI::IsMember({"min-max", "mse"}));
  };

  auto* cal = app.add_subcommand("calibrate", "estimate activation ranges");
  std::string c_model, c_dir, c_method;
  std::size_t c_n = 300;
  add_quant_opts(cal, c_model, c_dir, c_n, c_method);
  cal->callback([&] {
    PipelineConfig c = base_config(g);
    if (!c_method.empty()) c.quant.method = parse_method(c_method);
    const ModelGraph model = load_for(Stage::Validate, c_model);
    const auto samples = load_samples(c_dir, c_n);
    const auto stats = in_stage(Stage::Calibrate, [&] {
      CalibrationOptions o;
      o.op_subset = c.quant.op_subset;
      return calibrate(model, samples, o);
    });
    Json j = Json::object();
    std::string table;
    for (const auto& [t, st] : stats.tensors) {
      const Range r = estimate_range(st, c.quant.method, c.quant.activation_scheme, c.quant.grid_size);
      j[t] = {{"observed_min", st.min}, {"observed_max", st.max}, {"min", r.min}, {"max", r.max}, {"count", st.count}};
      char buf[256];
      std::snprintf(buf, sizeof buf, "%-28s [% .6g, % .6g]\n", t.c_str(), r.min, r.max);
      table += buf;
    }
    if (!g.out.empty()) in_stage(Stage::Report, [&] {
        write_text_atomic(g.out, dump(j));
        return 0;
      });
    emit(g, j, table);
  });

  auto* q = app.add_subcommand("quantize", "rewrite a model into QDQ form");
  std::string q_model, q_dir, q_method;
  std::size_t q_n = 300;
  add_quant_opts(q, q_model, q_dir, q_n, q_method);
  q->callback([&] {
    PipelineConfig c = base_config(g);
    if (!q_method.empty()) c.quant.method = parse_method(q_method);
    const ModelGraph model = load_for(Stage::Validate, q_model);
    const auto samples = load_samples(q_dir, q_n);
    const auto stats = in_stage(Stage::Calibrate, [&] {
      CalibrationOptions o;
      o.op_subset = c.quant.op_subset;
      o.per_channel = c.quant.activation_granularity == Granularity::PerChannel;
      return calibrate(model, samples, o);
    });
    const auto qdq = in_stage(Stage::Quantize, [&] {
      return rewrite_qdq(model, derive_graph_params(model, stats, c.quant), c.quant.op_subset);
    });
    const auto err = in_stage(Stage::Quantize, [&] {
      const std::size_t n = std::min<std::size_t>(samples.size(), 32);
      return measure_quant_error(model, qdq, std::span<const TensorValue>(samples.data(), n));
    });
    const fs::path out = g.out.empty() ? fs::path(fs::path(q_model).replace_extension("").string() + "_qdq.epm") : fs::path(g.out);
    in_stage(Stage::Report, [&] {
      save_model(qdq, out);
      return 0;
    });
    Json j = err;
    std::string table;
    for (std::size_t i = 0; i < err.outputs.size(); ++i) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "output %zu: mse %.6g, max abs %.6g\n", i, err.outputs[i].mse,
                    err.outputs[i].max_abs);
      table += buf;
    }
    emit(g, j, table);
  });

  // account
  auto* a = app.add_subcommand("account", "report params, MACs, flash, RAM and fit");
  std::string a_model, a_hw;
  a->add_option("model", a_model)->required();
  a->add_option("--hardware", a_hw, "preset name or profile JSON path");
  a->callback([&] {
    PipelineConfig c = base_config(g);
    if (!a_hw.empty()) c.hardware = in_stage(Stage::Config, [&] { return hardware_from_json(Json(a_hw)); });
    const ModelGraph model = load_for(Stage::Validate, a_model);
    const auto fp = in_stage(Stage::Account, [&] { return footprint(model); });
    const auto fit = fit_report(fp, c.hardware);
    Json j{{"footprint", fp}, {"fit", fit}, {"hardware", c.hardware.name}};
    Json flat = fp;
    flat["flash_headroom_pct"] = fit.flash.headroom_pct;
    flat["ram_headroom_pct"] = fit.ram.headroom_pct;
    flat["fit"] = fit.pass() ? "pass" : "fail";
    emit(g, j, kv_table(flat));
    if (!fit.pass()) rc = 1;
  });

  // power
  auto* pw = app.add_subcommand("power", "duty-cycle energy and battery projection");
  std::string pw_hw, pw_csv;
  std::optional<double> pw_latency, pw_wh;
  double pw_duration = 120.0;
  pw->add_option("--hardware", pw_hw, "preset name or profile JSON path");
  pw->add_option("--latency", pw_latency, "inference latency in seconds");
  pw->add_option("--battery-wh", pw_wh, "battery capacity in watt-hours");
  pw->add_option("--duration", pw_duration, "trace length in seconds");
  pw->add_option("--trace-csv", pw_csv, "write the simulated current trace here");
  pw->callback([&] {
    PipelineConfig c = base_config(g);
    if (!pw_hw.empty()) c.hardware = in_stage(Stage::Config, [&] { return hardware_from_json(Json(pw_hw)); });
    if (pw_latency) c.inference_latency = *pw_latency;
    if (pw_wh) c.battery.watt_hours = *pw_wh;
    Json j = in_stage(Stage::Power, [&] {
      const auto cycle = duty_cycle(c.hardware, c.inference_latency);
      const auto trace = simulate_trace(cycle, pw_duration);
      if (!pw_csv.empty()) write_text_atomic(pw_csv, trace_csv(trace));
      return Json{{"energy_per_inference_j", energy_per_inference(cycle)},
                  {"average_power_w", average_power(cycle)},
                  {"battery_life_days", battery_life_days(cycle, c.battery)},
                  {"trace_bursts", count_bursts(trace)},
                  {"trace_energy_j", trace_energy(trace, cycle.supply_voltage)}};
    });
    emit(g, j, kv_table(j));
  });

  // pipeline
  auto* pl = app.add_subcommand("pipeline", "run every stage from a config");
  pl->callback([&] {
    if (g.config.empty()) throw StageError(Stage::Config, "pipeline needs --config");
    PipelineConfig c = base_config(g);
    if (!g.out.empty()) c.output_dir = g.out;
    const auto report = run_pipeline(c);
    emit(g, Json(report), summary_table(report, c.hardware));
    rc = report.exit_code();
  });

  // sweep
  auto* sw = app.add_subcommand("sweep", "prune once per value of k or r_target");
  std::string sw_var, sw_values;
  sw->add_option("--variable", sw_var)->required()->check(CLI::IsMember({"k", "r_target"}));
  sw->add_option("--values", sw_values, "comma-separated values")->required();
  sw->callback([&] {
    if (g.config.empty()) throw StageError(Stage::Config, "sweep needs --config");
    const PipelineConfig c = base_config(g);
    const auto values = parse_values(sw_values);
    if (values.empty()) throw CLI::ValidationError("--values", "at least one value is required");
    const auto rows = sweep(c, parse_sweep_variable(sw_var), values);
    if (!g.out.empty()) in_stage(Stage::Report, [&] {
        write_text_atomic(fs::path(g.out) / "sweep.json", dump(Json(rows)));
        write_text_atomic(fs::path(g.out) / "sweep.csv", sweep_csv(rows));
        return 0;
      });
    emit(g, Json(rows), sweep_csv(rows));
  });

  // gen-fixture
  auto* gf = app.add_subcommand("gen-fixture", "write a synthetic model and calibration samples");
  std::string gf_kind;
  std::size_t gf_samples = 0;
  std::string gf_samples_dir;
  gf->add_option("kind", gf_kind)->required()->check(CLI::IsMember({"toy_yolo", "chain", "residual", "concat"}));
  gf->add_option("--samples", gf_samples, "also write this many input samples");
  gf->add_option("--samples-dir", gf_samples_dir, "directory for the samples (default: <out stem>_calib)");
  gf->callback([&] {
    const auto kind = parse_fixture_kind(gf_kind);
    const fs::path out = g.out.empty() ? fs::path(gf_kind + ".epm") : fs::path(g.out);
    const auto model = gen_fixture(kind, g.seed);
    save_model(model, out);
    Json j{{"model", out.filename().string()}, {"params", footprint(model).params}, {"samples", gf_samples}};
    if (gf_samples > 0) {
      const fs::path dir = gf_samples_dir.empty() ? fs::path(fs::path(out).replace_extension("").string() + "_calib")
                                                  : fs::path(gf_samples_dir);
      const auto samples = gen_samples(model, gf_samples, g.seed + 1);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "sample_%05zu.ept", i);
        save_tensor(samples[i], dir / name);
      }
    }
    emit(g, j, kv_table(j));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.stage());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUnexpected;
  }
  return rc;
}
