// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <string>
#include <vector>

#include "edgepress/accountant.hpp"

namespace edgepress {

/// One wake period: an inference burst at active_current, then sleep.
struct DutyCycle {
  double inference_latency = 0.0;  // s
  double active_current = 0.0;     // A
  double sleep_current = 0.0;      // A
  double wake_period = 0.0;        // s
  double supply_voltage = 0.0;     // V

  /// Throws std::invalid_argument unless currents, voltage and period are
  /// positive and 0 <= inference_latency <= wake_period.
  void check() const;
};

DutyCycle duty_cycle(const HardwareProfile& profile, double inference_latency);

struct BatterySpec {
  double watt_hours = 0.0;

  static BatterySpec from_amp_hours(double amp_hours, double nominal_voltage);
  void check() const;
};

/// E = V * I_active * t_inf, in joules.
double energy_per_inference(const DutyCycle& c);

/// V * (I_active * t_inf + I_sleep * (T - t_inf)) / T, in watts.
double average_power(const DutyCycle& c);

/// watt_hours / P_avg / 24. Zero capacity gives zero days.
double battery_life_days(const DutyCycle& c, const BatterySpec& b);

struct TraceSegment {
  double start = 0.0;
  double end = 0.0;
  double current = 0.0;  // A
  bool active = false;
};

/// Piecewise-constant current over [0, duration): each period starts with a
/// burst of min(t_inf, remaining) seconds, then sleeps. Zero-length segments
/// are omitted.
std::vector<TraceSegment> simulate_trace(const DutyCycle& c, double duration);

std::size_t count_bursts(const std::vector<TraceSegment>& trace);

/// Integral of V * I over the trace, in joules.
double trace_energy(const std::vector<TraceSegment>& trace, double supply_voltage);

/// "time_s,current_mA" rows: one at each segment start plus the trace end.
std::string trace_csv(const std::vector<TraceSegment>& trace);

}  // namespace edgepress
