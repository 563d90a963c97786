// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/powersim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace edgepress {

void DutyCycle::check() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(inference_latency) || !finite(active_current) || !finite(sleep_current) || !finite(wake_period) ||
      !finite(supply_voltage))
    throw std::invalid_argument("duty cycle fields must be finite");
  if (active_current <= 0.0 || sleep_current <= 0.0) throw std::invalid_argument("currents must be positive");
  if (supply_voltage <= 0.0) throw std::invalid_argument("supply voltage must be positive");
  if (wake_period <= 0.0) throw std::invalid_argument("wake period must be positive");
  if (inference_latency < 0.0 || inference_latency > wake_period)
    throw std::invalid_argument("inference latency must lie in [0, wake period]");
}

DutyCycle duty_cycle(const HardwareProfile& profile, double inference_latency) {
  DutyCycle c{inference_latency, profile.active_current, profile.sleep_current, profile.wake_period,
              profile.supply_voltage};
  c.check();
  return c;
}

BatterySpec BatterySpec::from_amp_hours(double amp_hours, double nominal_voltage) {
  BatterySpec b{amp_hours * nominal_voltage};
  b.check();
  return b;
}

void BatterySpec::check() const {
  if (!std::isfinite(watt_hours) || watt_hours < 0.0)
    throw std::invalid_argument("battery capacity must be finite and non-negative");
}

double energy_per_inference(const DutyCycle& c) {
  c.check();
  return c.supply_voltage * c.active_current * c.inference_latency;
}

double average_power(const DutyCycle& c) {
  c.check();
  const double charge = c.active_current * c.inference_latency + c.sleep_current * (c.wake_period - c.inference_latency);
  return c.supply_voltage * charge / c.wake_period;
}

double battery_life_days(const DutyCycle& c, const BatterySpec& b) {
  b.check();
  if (b.watt_hours == 0.0) return 0.0;
  return b.watt_hours / average_power(c) / 24.0;
}

std::vector<TraceSegment> simulate_trace(const DutyCycle& c, double duration) {
  c.check();
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("trace duration must be positive");
  std::vector<TraceSegment> out;
  for (long k = 0;; ++k) {
    const double t0 = static_cast<double>(k) * c.wake_period;
    if (t0 >= duration) break;
    const double burst_end = std::min(t0 + c.inference_latency, duration);
    const double period_end = std::min(t0 + c.wake_period, duration);
    if (burst_end > t0) out.push_back({t0, burst_end, c.active_current, true});
    if (period_end > burst_end) out.push_back({burst_end, period_end, c.sleep_current, false});
  }
  return out;
}

std::size_t count_bursts(const std::vector<TraceSegment>& trace) {
  return static_cast<std::size_t>(std::count_if(trace.begin(), trace.end(), [](const auto& s) { return s.active; }));
}

double trace_energy(const std::vector<TraceSegment>& trace, double supply_voltage) {
  double e = 0.0;
  for (const auto& s : trace) e += supply_voltage * s.current * (s.end - s.start);
  return e;
}

std::string trace_csv(const std::vector<TraceSegment>& trace) {
  std::string out = "time_s,current_mA\n";
  char buf[64];
  auto row = [&](double t, double amps) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", t, amps * 1e3);
    out += buf;
  };
  for (const auto& s : trace) row(s.start, s.current);
  if (!trace.empty()) row(trace.back().end, trace.back().current);
  return out;
}

}  // namespace edgepress
