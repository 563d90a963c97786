// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edgepress/executor.hpp"
#include "edgepress/fixtures.hpp"
#include "edgepress/serialize.hpp"
#include "edgepress/validate.hpp"

namespace edgepress {

namespace fs = std::filesystem;

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Config: return "config";
    case Stage::Validate: return "validate";
    case Stage::Prune: return "prune";
    case Stage::Calibrate: return "calibrate";
    case Stage::Quantize: return "quantize";
    case Stage::Account: return "account";
    case Stage::Power: return "power";
    case Stage::Report: return "report";
  }
  return "unknown";
}

int exit_code(Stage s) { return 2 + static_cast<int>(s); }

StageError::StageError(Stage stage, const std::string& message)
    : std::runtime_error("[" + to_string(stage) + "] " + message), stage_(stage) {}

std::string to_string(EvalMetric m) { return m == EvalMetric::OutputFidelity ? "output-fidelity" : "constant"; }

EvalMetric parse_eval_metric(const std::string& s) {
  if (s == "constant") return EvalMetric::Constant;
  if (s == "output-fidelity") return EvalMetric::OutputFidelity;
  throw std::invalid_argument("unknown eval metric '" + s + "'");
}

void PipelineConfig::check() const {
  try {
    pruning.check();
    hardware.check();
    battery.check();
    if (quantize && sample_count == 0) throw std::invalid_argument("sample_count must be positive");
    if (!(inference_latency >= 0.0) || inference_latency > hardware.wake_period)
      throw std::invalid_argument("inference latency must lie in [0, wake period]");
    if (quant.grid_size < 2) throw std::invalid_argument("grid_size must be at least 2");
    if (quant.weight_granularity == Granularity::PerGroup && quant.group_size < 1)
      throw std::invalid_argument("per-group weights need a positive group_size");
  } catch (const std::invalid_argument& e) {
    throw StageError(Stage::Config, e.what());
  }
}

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw std::invalid_argument("unknown key '" + k + "' in " + where);
  }
}

}  // namespace

HardwareProfile hardware_from_json(const Json& j, const fs::path& base_dir) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "stm32u575zi") return stm32u575zi();
    return hardware_from_json(read_json_file(resolve(base_dir, s)), {});
  }
  if (!j.is_object()) throw std::invalid_argument("hardware profile must be a preset name, path or object");
  reject_unknown(j,
                 {"name", "flash_bytes", "ram_bytes", "supply_voltage_v", "active_current_a", "sleep_current_a",
                  "wake_period_s", "clock_hz"},
                 "hardware profile");
  HardwareProfile p;
  p.name = get_or<std::string>(j, "name", "custom");
  p.flash_budget = j.at("flash_bytes").get<double>();
  p.ram_budget = j.at("ram_bytes").get<double>();
  p.supply_voltage = j.at("supply_voltage_v").get<double>();
  p.active_current = j.at("active_current_a").get<double>();
  p.sleep_current = j.at("sleep_current_a").get<double>();
  p.wake_period = j.at("wake_period_s").get<double>();
  p.clock_hz = j.at("clock_hz").get<double>();
  p.check();
  return p;
}

Json hardware_to_json(const HardwareProfile& p) {
  return Json{{"name", p.name},
              {"flash_bytes", p.flash_budget},
              {"ram_bytes", p.ram_budget},
              {"supply_voltage_v", p.supply_voltage},
              {"active_current_a", p.active_current},
              {"sleep_current_a", p.sleep_current},
              {"wake_period_s", p.wake_period},
              {"clock_hz", p.clock_hz}};
}

namespace {

BatterySpec battery_from_json(const Json& j, const fs::path& base_dir) {
  if (j.is_string()) return battery_from_json(read_json_file(resolve(base_dir, j.get<std::string>())), {});
  reject_unknown(j, {"watt_hours", "amp_hours", "nominal_voltage_v"}, "battery");
  if (j.contains("watt_hours")) {
    BatterySpec b{j.at("watt_hours").get<double>()};
    b.check();
    return b;
  }
  return BatterySpec::from_amp_hours(j.at("amp_hours").get<double>(), j.at("nominal_voltage_v").get<double>());
}

void parse_pruning(const Json& j, PipelineConfig& c) {
  reject_unknown(j,
                 {"enabled", "r_target", "k", "scope", "target", "normalization", "stop_threshold", "exclusions",
                  "eval_metric"},
                 "pruning");
  auto& s = c.pruning;
  c.prune = get_or(j, "enabled", c.prune);
  s.r_target = get_or(j, "r_target", s.r_target);
  s.k = get_or(j, "k", s.k);
  s.scope = parse_scope(get_or<std::string>(j, "scope", to_string(s.scope)));
  s.target = parse_target(get_or<std::string>(j, "target", to_string(s.target)));
  s.normalization = parse_normalization(get_or<std::string>(j, "normalization", to_string(s.normalization)));
  s.stop_threshold = get_or(j, "stop_threshold", s.stop_threshold);
  c.eval_metric = parse_eval_metric(get_or<std::string>(j, "eval_metric", to_string(c.eval_metric)));
  if (j.contains("exclusions")) {
    const Json& e = j.at("exclusions");
    reject_unknown(e, {"concat", "tags", "nodes"}, "pruning.exclusions");
    s.exclusions.exclude_concat = get_or(e, "concat", s.exclusions.exclude_concat);
    s.exclusions.tags = get_or(e, "tags", s.exclusions.tags);
    s.exclusions.nodes = get_or(e, "nodes", s.exclusions.nodes);
  }
}

void parse_quant(const Json& j, PipelineConfig& c, const fs::path& base_dir) {
  reject_unknown(j,
                 {"enabled", "activation_scheme", "weight_scheme", "activation_granularity", "weight_granularity",
                  "group_size", "range_method", "grid_size", "op_subset", "calibration_dir", "sample_count"},
                 "quantization");
  auto& q = c.quant;
  c.quantize = get_or(j, "enabled", c.quantize);
  q.activation_scheme = parse_scheme(get_or<std::string>(j, "activation_scheme", to_string(q.activation_scheme)));
  q.weight_scheme = parse_scheme(get_or<std::string>(j, "weight_scheme", to_string(q.weight_scheme)));
  q.activation_granularity =
      parse_granularity(get_or<std::string>(j, "activation_granularity", to_string(q.activation_granularity)));
  q.weight_granularity =
      parse_granularity(get_or<std::string>(j, "weight_granularity", to_string(q.weight_granularity)));
  q.group_size = get_or(j, "group_size", q.group_size);
  q.method = parse_method(get_or<std::string>(j, "range_method", to_string(q.method)));
  q.grid_size = get_or(j, "grid_size", q.grid_size);
  if (j.contains("op_subset")) {
    q.op_subset.clear();
    for (const auto& op : j.at("op_subset")) q.op_subset.push_back(parse_op_kind(op.get<std::string>()));
  }
  c.calibration_dir = resolve(base_dir, get_or<std::string>(j, "calibration_dir", ""));
  c.sample_count = get_or(j, "sample_count", c.sample_count);
}

}  // namespace

PipelineConfig parse_config(const std::string& text, const fs::path& base_dir) {
  PipelineConfig c;
  try {
    const Json j = Json::parse(text);
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    reject_unknown(j,
                   {"schema_version", "model", "output_dir", "seed", "pruning", "quantization", "hardware", "battery",
                    "inference_latency_s", "formats"},
                   "config");
    const int version = get_or(j, "schema_version", PipelineConfig::kSchemaVersion);
    if (version != PipelineConfig::kSchemaVersion)
      throw std::invalid_argument("unsupported schema_version " + std::to_string(version));
    c.model = resolve(base_dir, j.at("model").get<std::string>());
    c.output_dir = resolve(base_dir, get_or<std::string>(j, "output_dir", "out"));
    c.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("pruning")) parse_pruning(j.at("pruning"), c);
    if (j.contains("quantization")) parse_quant(j.at("quantization"), c, base_dir);
    if (j.contains("hardware")) c.hardware = hardware_from_json(j.at("hardware"), base_dir);
    if (j.contains("battery")) c.battery = battery_from_json(j.at("battery"), base_dir);
    c.inference_latency = get_or(j, "inference_latency_s", c.inference_latency);
    if (j.contains("formats")) {
      c.write_json = c.write_table = false;
      for (const auto& f : j.at("formats")) {
        const auto s = f.get<std::string>();
        if (s == "json") c.write_json = true;
        else if (s == "table") c.write_table = true;
        else throw std::invalid_argument("unknown report format '" + s + "'");
      }
    }
  } catch (const StageError&) {
    throw;
  } catch (const Json::exception& e) {
    throw StageError(Stage::Config, e.what());
  } catch (const std::invalid_argument& e) {
    throw StageError(Stage::Config, e.what());
  }
  c.check();
  return c;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw StageError(Stage::Config, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

Json config_to_json(const PipelineConfig& c) {
  Json ops = Json::array();
  for (OpKind op : c.quant.op_subset) ops.push_back(to_string(op));
  Json formats = Json::array();
  if (c.write_json) formats.push_back("json");
  if (c.write_table) formats.push_back("table");
  const auto& s = c.pruning;
  return Json{
      {"schema_version", PipelineConfig::kSchemaVersion},
      {"model", c.model.generic_string()},
      {"output_dir", c.output_dir.generic_string()},
      {"seed", c.seed},
      {"pruning",
       {{"enabled", c.prune},
        {"r_target", s.r_target},
        {"k", s.k},
        {"scope", to_string(s.scope)},
        {"target", to_string(s.target)},
        {"normalization", to_string(s.normalization)},
        {"stop_threshold", s.stop_threshold},
        {"eval_metric", to_string(c.eval_metric)},
        {"exclusions", {{"concat", s.exclusions.exclude_concat}, {"tags", s.exclusions.tags}, {"nodes", s.exclusions.nodes}}}}},
      {"quantization",
       {{"enabled", c.quantize},
        {"activation_scheme", to_string(c.quant.activation_scheme)},
        {"weight_scheme", to_string(c.quant.weight_scheme)},
        {"activation_granularity", to_string(c.quant.activation_granularity)},
        {"weight_granularity", to_string(c.quant.weight_granularity)},
        {"group_size", c.quant.group_size},
        {"range_method", to_string(c.quant.method)},
        {"grid_size", c.quant.grid_size},
        {"op_subset", ops},
        {"calibration_dir", c.calibration_dir.generic_string()},
        {"sample_count", c.sample_count}}},
      {"hardware", hardware_to_json(c.hardware)},
      {"battery", {{"watt_hours", c.battery.watt_hours}}},
      {"inference_latency_s", c.inference_latency},
      {"formats", formats},
  };
}

void to_json(Json& j, const ResourceFootprint& fp) {
  j = Json{{"params", fp.params},
           {"macs", fp.macs},
           {"weight_bytes", fp.weight_bytes},
           {"quant_param_bytes", fp.quant_param_bytes},
           {"flash_bytes", fp.flash_bytes},
           {"ram_peak_bytes", fp.ram_peak_bytes}};
}

void to_json(Json& j, const BudgetVerdict& v) {
  j = Json{{"resource", v.resource},
           {"used_bytes", v.used},
           {"budget_bytes", v.budget},
           {"headroom_pct", v.headroom_pct},
           {"pass", v.pass}};
}

void to_json(Json& j, const FitReport& r) { j = Json{{"flash", r.flash}, {"ram", r.ram}, {"pass", r.pass()}}; }

void to_json(Json& j, const StepMetrics& m) {
  j = Json{{"step", m.step},
           {"pruned_channels", m.pruned_channels},
           {"params", m.params},
           {"macs", m.macs},
           {"metric", m.metric}};
}

void to_json(Json& j, const TensorError& e) {
  j = Json{{"mse", e.mse}, {"max_abs", e.max_abs}, {"mean_abs", e.mean_abs}, {"count", e.count}};
}

void to_json(Json& j, const QuantErrorReport& r) { j = Json{{"tensors", r.tensors}, {"outputs", r.outputs}}; }

void to_json(Json& j, const DutyCycle& c) {
  j = Json{{"inference_latency_s", c.inference_latency},
           {"active_current_a", c.active_current},
           {"sleep_current_a", c.sleep_current},
           {"wake_period_s", c.wake_period},
           {"supply_voltage_v", c.supply_voltage}};
}

void to_json(Json& j, const SweepRow& r) {
  j = Json{{"value", r.value},
           {"retained_params_pct", r.retained_params_pct},
           {"params", r.params},
           {"macs", r.macs},
           {"metric", r.metric}};
}

namespace {

Json energy_json(const CompressionReport& r) {
  return Json{{"cycle", r.cycle},
              {"energy_per_inference_j", r.energy_per_inference},
              {"average_power_w", r.average_power},
              {"battery_life_days", r.battery_days},
              {"trace_bursts", r.trace_bursts}};
}

Json footprint_json(const CompressionReport& r) {
  return Json{{"baseline", r.baseline}, {"pruned", r.pruned}, {"final", r.final}};
}

}  // namespace

void to_json(Json& j, const CompressionReport& r) {
  j = Json{{"footprint", footprint_json(r)},
           {"steps", r.steps},
           {"stopped_early", r.stopped_early},
           {"fit", r.fit},
           {"energy", energy_json(r)},
           {"exit_code", r.exit_code()}};
  if (r.quant_error) j["quant_error"] = *r.quant_error;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

namespace {

std::string fmt_bytes(double b) {
  char buf[64];
  if (b >= kMiB)
    std::snprintf(buf, sizeof buf, "%.2f MB", b / kMiB);
  else
    std::snprintf(buf, sizeof buf, "%.2f KB", b / kKiB);
  return buf;
}

std::string fmt_count(double n) {
  char buf[64];
  if (n >= 1e6)
    std::snprintf(buf, sizeof buf, "%.2fM", n / 1e6);
  else if (n >= 1e3)
    std::snprintf(buf, sizeof buf, "%.2fk", n / 1e3);
  else
    std::snprintf(buf, sizeof buf, "%.0f", n);
  return buf;
}

std::string row(const std::string& a, const std::string& b, const std::string& c, const std::string& d) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %14s %14s %14s\n", a.c_str(), b.c_str(), c.c_str(), d.c_str());
  return buf;
}

}  // namespace

std::string summary_table(const CompressionReport& r, const HardwareProfile& hw) {
  std::string out;
  out += row("", "baseline", "compressed", "constraint");
  out += row("flash", fmt_bytes(static_cast<double>(r.baseline.flash_bytes)),
             fmt_bytes(static_cast<double>(r.final.flash_bytes)), fmt_bytes(hw.flash_budget));
  out += row("ram", fmt_bytes(static_cast<double>(r.baseline.ram_peak_bytes)),
             fmt_bytes(static_cast<double>(r.final.ram_peak_bytes)), fmt_bytes(hw.ram_budget));
  out += row("params", fmt_count(static_cast<double>(r.baseline.params)),
             fmt_count(static_cast<double>(r.final.params)), "-");
  out += row("macs", fmt_count(static_cast<double>(r.baseline.macs)), fmt_count(static_cast<double>(r.final.macs)),
             "-");
  char buf[256];
  std::snprintf(buf, sizeof buf, "\nfit %s: flash %s (%.2f%% headroom), ram %s (%.2f%% headroom)\n", hw.name.c_str(),
                r.fit.flash.pass ? "pass" : "FAIL", r.fit.flash.headroom_pct, r.fit.ram.pass ? "pass" : "FAIL",
                r.fit.ram.headroom_pct);
  out += buf;
  std::snprintf(buf, sizeof buf, "energy %.4f mJ/inference, average %.4f mW, battery %.1f days\n",
                r.energy_per_inference * 1e3, r.average_power * 1e3, r.battery_days);
  out += buf;
  return out;
}

namespace {

EvalFn make_eval(const ModelGraph& baseline, EvalMetric metric, std::uint64_t seed) {
  if (metric == EvalMetric::Constant) return [](const ModelGraph&) { return 1.0; };
  auto inputs = gen_samples(baseline, 8, seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::vector<TensorValue>> reference;
  for (const auto& x : inputs) reference.push_back(run_outputs(baseline, std::span<const TensorValue>(&x, 1)));
  return [inputs = std::move(inputs), reference = std::move(reference)](const ModelGraph& g) {
    double err = 0.0, norm = 0.0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const auto y = run_outputs(g, std::span<const TensorValue>(&inputs[s], 1));
      for (std::size_t o = 0; o < y.size(); ++o)
        for (std::size_t i = 0; i < y[o].data.size(); ++i) {
          const double r = reference[s][o].data[i];
          const double d = y[o].data[i] - r;
          err += d * d;
          norm += r * r;
        }
    }
    if (norm == 0.0) return err == 0.0 ? 1.0 : 0.0;
    return std::clamp(1.0 - std::sqrt(err / norm), 0.0, 1.0);
  };
}

template <typename Fn>
auto staged(Stage stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

class ArtifactWriter {
 public:
  ArtifactWriter(fs::path root, std::vector<std::string>& log) : root_(std::move(root)), log_(log) {}

  void model(const std::string& name, const ModelGraph& g) {
    save_model(g, root_ / name);
    log_.push_back(name);
  }
  void text(const std::string& name, const std::string& body) {
    write_text_atomic(root_ / name, body);
    log_.push_back(name);
  }

 private:
  fs::path root_;
  std::vector<std::string>& log_;
};

ModelGraph load_checked(const fs::path& path) {
  return staged(Stage::Validate, [&] {
    ModelGraph g = load_model(path);
    const auto report = validate(g);
    if (!report.ok()) throw GraphError(report.summary());
    return g;
  });
}

ScheduleResult prune_stage(const ModelGraph& g, const PipelineConfig& config) {
  return staged(Stage::Prune, [&] {
    return run_schedule(g, config.pruning, make_eval(g, config.eval_metric, config.seed));
  });
}

}  // namespace

CompressionReport run_pipeline(const PipelineConfig& config) {
  config.check();
  CompressionReport report;
  ArtifactWriter out(config.output_dir, report.artifacts);
  auto write = [&](auto&& fn) { staged(Stage::Report, fn); };

  spdlog::info("validate: loading {}", config.model.filename().string());
  const ModelGraph original = load_checked(config.model);
  report.baseline = staged(Stage::Account, [&] { return footprint(original); });
  spdlog::info("training: out of scope, model weights used as given");

  ModelGraph current = original;
  if (config.prune) {
    auto result = prune_stage(original, config);
    report.steps = result.metrics;
    report.stopped_early = result.stopped_early;
    write([&] {
      for (std::size_t i = 0; i < result.graphs.size(); ++i)
        out.model("steps/step_" + std::to_string(i) + ".epm", result.graphs[i]);
    });
    current = result.graphs.back();
    spdlog::info("prune: {} -> {} params over {} steps", report.baseline.params,
                 report.steps.empty() ? report.baseline.params : report.steps.back().params,
                 result.graphs.size() - 1);
  } else {
    spdlog::info("prune: disabled");
  }
  report.pruned = staged(Stage::Account, [&] { return footprint(current); });
  write([&] { out.model("model_pruned.epm", current); });

  if (config.quantize) {
    const auto samples = staged(Stage::Calibrate, [&] {
      if (config.calibration_dir.empty()) throw std::invalid_argument("quantization needs a calibration_dir");
      if (!fs::is_directory(config.calibration_dir))
        throw std::invalid_argument("calibration directory not found: " + config.calibration_dir.string());
      auto all = load_tensor_dir(config.calibration_dir);
      if (all.empty()) throw std::invalid_argument("calibration directory holds no .ept samples");
      if (all.size() > config.sample_count) all.resize(config.sample_count);
      return all;
    });
    const auto stats = staged(Stage::Calibrate, [&] {
      CalibrationOptions opts;
      opts.op_subset = config.quant.op_subset;
      opts.per_channel = config.quant.activation_granularity == Granularity::PerChannel;
      return calibrate(current, samples, opts);
    });
    spdlog::info("calibrate: {} samples, {} tensors", stats.samples, stats.tensors.size());
    const ModelGraph quantized = staged(Stage::Quantize, [&] {
      const auto params = derive_graph_params(current, stats, config.quant);
      return rewrite_qdq(current, params, config.quant.op_subset);
    });
    report.quant_error = staged(Stage::Quantize, [&] {
      const std::size_t n = std::min<std::size_t>(samples.size(), 32);
      return measure_quant_error(current, quantized, std::span<const TensorValue>(samples.data(), n));
    });
    write([&] { out.model("model_qdq.epm", quantized); });
    current = quantized;
  } else {
    spdlog::info("quantize: disabled");
  }

  report.final = staged(Stage::Account, [&] { return footprint(current); });
  report.fit = fit_report(report.final, config.hardware);
  spdlog::info("account: flash {} B, ram {} B, fit {}", report.final.flash_bytes, report.final.ram_peak_bytes,
               report.fit.pass() ? "pass" : "fail");

  std::vector<TraceSegment> trace;
  staged(Stage::Power, [&] {
    report.cycle = duty_cycle(config.hardware, config.inference_latency);
    report.energy_per_inference = energy_per_inference(report.cycle);
    report.average_power = average_power(report.cycle);
    report.battery_days = battery_life_days(report.cycle, config.battery);
    trace = simulate_trace(report.cycle, 4.0 * report.cycle.wake_period);
    report.trace_bursts = count_bursts(trace);
    return 0;
  });
  spdlog::info("deploy: out of scope, no vendor image produced");

  write([&] {
    out.text("trace.csv", trace_csv(trace));
    if (config.write_json) {
      Json steps = report.steps;
      out.text("metrics.json", dump(steps));
      if (report.quant_error) out.text("quant_error.json", dump(Json(*report.quant_error)));
      out.text("footprint.json", dump(footprint_json(report)));
      out.text("fit.json", dump(Json(report.fit)));
      out.text("energy.json", dump(energy_json(report)));
      Json full = report;
      auto listed = report.artifacts;
      listed.push_back("report.json");
      if (config.write_table) listed.push_back("summary.txt");
      full["artifacts"] = listed;
      out.text("report.json", dump(full));
    }
    if (config.write_table) out.text("summary.txt", summary_table(report, config.hardware));
  });
  return report;
}

std::string to_string(SweepVariable v) { return v == SweepVariable::K ? "k" : "r_target"; }

SweepVariable parse_sweep_variable(const std::string& s) {
  if (s == "k") return SweepVariable::K;
  if (s == "r_target") return SweepVariable::RTarget;
  throw std::invalid_argument("unknown sweep variable '" + s + "'");
}

std::vector<SweepRow> sweep(const PipelineConfig& config, SweepVariable variable, const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const ModelGraph original = load_checked(config.model);
  const auto base = staged(Stage::Account, [&] { return footprint(original); });
  std::vector<SweepRow> rows;
  for (double v : values) {
    PipelineConfig c = config;
    if (variable == SweepVariable::K) {
      if (v != std::floor(v)) throw StageError(Stage::Config, "k must be an integer");
      c.pruning.k = static_cast<int>(v);
    } else {
      c.pruning.r_target = v;
    }
    c.check();
    const auto result = prune_stage(original, c);
    const auto fp = staged(Stage::Account, [&] { return footprint(result.graphs.back()); });
    SweepRow r;
    r.value = v;
    r.params = fp.params;
    r.macs = fp.macs;
    r.retained_params_pct = 100.0 * static_cast<double>(fp.params) / static_cast<double>(base.params);
    r.metric = result.metrics.back().metric;
    rows.push_back(r);
    spdlog::info("sweep {}={}: {:.2f}% params, {} MACs", to_string(variable), v, r.retained_params_pct, r.macs);
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,retained_params_pct,params,macs,metric\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.15g,%.6f,%lld,%lld,%.6f\n", r.value, r.retained_params_pct,
                  static_cast<long long>(r.params), static_cast<long long>(r.macs), r.metric);
    out += buf;
  }
  return out;
}

}  // namespace edgepress
