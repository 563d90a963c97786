// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgepress/accountant.hpp"
#include "edgepress/powersim.hpp"
#include "edgepress/pruner.hpp"
#include "edgepress/quantizer.hpp"
#include "json.hpp"

namespace edgepress {

using Json = nlohmann::json;

enum class Stage { Config, Validate, Prune, Calibrate, Quantize, Account, Power, Report };

std::string to_string(Stage s);
/// Process exit code for a failure in `s`. 0 is success and 1 a failed fit.
int exit_code(Stage s);

class StageError : public std::runtime_error {
 public:
  StageError(Stage stage, const std::string& message);
  Stage stage() const { return stage_; }

 private:
  Stage stage_;
};

enum class EvalMetric {
  /// Always 1. Without a recovery hook there is nothing to measure accuracy
  /// against, so early stopping never triggers.
  Constant,
  /// 1 - ||y - y0|| / ||y0|| over fixed seeded inputs, clamped to [0, 1].
  OutputFidelity,
};

std::string to_string(EvalMetric m);
EvalMetric parse_eval_metric(const std::string& s);

struct PipelineConfig {
  static constexpr int kSchemaVersion = 1;

  std::filesystem::path model;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;

  bool prune = true;
  PruningSchedule pruning;
  EvalMetric eval_metric = EvalMetric::Constant;

  bool quantize = true;
  QuantConfig quant;
  std::filesystem::path calibration_dir;
  std::size_t sample_count = 300;

  HardwareProfile hardware = stm32u575zi();
  BatterySpec battery{25.9};
  double inference_latency = 1.510;

  bool write_json = true;
  bool write_table = true;

  /// Throws StageError(Config) on any out-of-range field.
  void check() const;
};

/// Relative paths resolve against `base_dir`. Throws StageError(Config).
PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);
Json config_to_json(const PipelineConfig& c);

/// "stm32u575zi", a JSON file path, or an inline object.
HardwareProfile hardware_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json hardware_to_json(const HardwareProfile& p);

struct CompressionReport {
  ResourceFootprint baseline;
  ResourceFootprint pruned;
  ResourceFootprint final;
  std::vector<StepMetrics> steps;
  bool stopped_early = false;
  std::optional<QuantErrorReport> quant_error;
  FitReport fit;
  DutyCycle cycle;
  double energy_per_inference = 0.0;
  double average_power = 0.0;
  double battery_days = 0.0;
  std::size_t trace_bursts = 0;
  /// Files written, relative to the output directory, in write order.
  std::vector<std::string> artifacts;

  int exit_code() const { return fit.pass() ? 0 : 1; }
};

/// validate -> prune -> calibrate -> quantize -> account -> power, writing
/// step graphs, the final model and reports into config.output_dir. Throws
/// StageError tagged with the failing stage.
CompressionReport run_pipeline(const PipelineConfig& config);

enum class SweepVariable { K, RTarget };

std::string to_string(SweepVariable v);
SweepVariable parse_sweep_variable(const std::string& s);

struct SweepRow {
  double value = 0.0;
  double retained_params_pct = 0.0;
  std::int64_t params = 0;
  std::int64_t macs = 0;
  double metric = 0.0;
};

/// Runs the pruning schedule once per value and accounts the result.
/// Throws std::invalid_argument for an empty value list.
std::vector<SweepRow> sweep(const PipelineConfig& config, SweepVariable variable, const std::vector<double>& values);

std::string sweep_csv(const std::vector<SweepRow>& rows);

void to_json(Json& j, const ResourceFootprint& fp);
void to_json(Json& j, const BudgetVerdict& v);
void to_json(Json& j, const FitReport& r);
void to_json(Json& j, const StepMetrics& m);
void to_json(Json& j, const TensorError& e);
void to_json(Json& j, const QuantErrorReport& r);
void to_json(Json& j, const DutyCycle& c);
void to_json(Json& j, const SweepRow& r);
void to_json(Json& j, const CompressionReport& r);

/// Two-space indented, keys sorted, trailing newline.
std::string dump(const Json& j);

/// Baseline vs compressed vs constraint rows for flash, RAM, parameters and
/// MACs, followed by the fit verdicts and the energy figures.
std::string summary_table(const CompressionReport& r, const HardwareProfile& hw);

}  // namespace edgepress
