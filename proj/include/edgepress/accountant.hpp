// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <string>

#include "edgepress/graph.hpp"

namespace edgepress {

inline constexpr double kKiB = 1024.0;
inline constexpr double kMiB = 1024.0 * 1024.0;

struct HardwareProfile {
  std::string name = "custom";
  double flash_budget = 0.0;  // bytes
  double ram_budget = 0.0;    // bytes
  double supply_voltage = 0.0;
  double active_current = 0.0;  // A
  double sleep_current = 0.0;   // A
  double wake_period = 0.0;     // s
  double clock_hz = 0.0;

  /// Throws std::invalid_argument unless every field is positive.
  void check() const;
};

/// STM32U575ZI deployment target: 2 MB flash, 768 KB RAM, 3.3 V supply,
/// 10.4 mA over an inference cycle, 1.1 mA in Stop 2, 30 s RTC wake, 160 MHz.
HardwareProfile stm32u575zi();

/// Recorded YOLOv8n figures at 224x224 for report comparison. Baseline
/// params are stored as 3.2M (the published table prints "3200M").
struct ReferenceFigures {
  double flash_bytes;
  double ram_bytes;
  double params;
  double gmacs;
};
ReferenceFigures yolov8n_baseline();
ReferenceFigures yolov8n_compressed();

struct ResourceFootprint {
  std::int64_t params = 0;
  std::int64_t macs = 0;
  /// Constant payload bytes at their stored dtypes.
  std::int64_t weight_bytes = 0;
  /// Scales (float32) and zero points (one byte) of every DequantizeLinear.
  std::int64_t quant_param_bytes = 0;
  std::int64_t flash_bytes = 0;
  /// Estimated liveness peak over activations, graph inputs and outputs.
  std::int64_t ram_peak_bytes = 0;
};

/// Element count of every constant payload. Quantization scales and zero
/// points live in node attributes and are not parameters.
std::int64_t count_params(const ModelGraph& g);

/// Conv2d: out_ch * (in_ch / groups) * kH * kW * H_out * W_out. Add and Mul:
/// one per output element. Everything else: zero.
std::int64_t count_macs(const ModelGraph& g);

/// Peak live activation bytes over the lexicographic topological schedule.
/// A tensor is live from its producer until its last consumer; graph inputs
/// are live from the start and graph outputs until the end.
std::int64_t ram_peak(const ModelGraph& g);

ResourceFootprint footprint(const ModelGraph& g);

struct BudgetVerdict {
  std::string resource;
  double used = 0.0;
  double budget = 0.0;
  double headroom_pct = 0.0;
  bool pass = false;
};

struct FitReport {
  BudgetVerdict flash;
  BudgetVerdict ram;
  bool pass() const { return flash.pass && ram.pass; }
};

FitReport fit_report(double flash_bytes, double ram_bytes, const HardwareProfile& profile);
FitReport fit_report(const ResourceFootprint& fp, const HardwareProfile& profile);

}  // namespace edgepress
