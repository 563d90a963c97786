// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"
#include "edgepress/quant.hpp"

namespace edgepress {

struct Range {
  double min = 0.0;
  double max = 0.0;

  bool operator==(const Range&) const = default;
};

/// Observed values of one tensor. Small populations are kept exactly; larger
/// ones are summarized by a fixed-bin histogram whose bins remember the mean
/// of the values they hold.
struct TensorStats {
  double min = 0.0;
  double max = 0.0;
  std::int64_t count = 0;
  std::vector<Range> per_channel;  // along axis 1, when requested

  std::vector<double> values;  // exact mode

  double hist_lo = 0.0;
  double hist_hi = 0.0;
  std::vector<double> bin_count;  // histogram mode
  std::vector<double> bin_sum;

  bool exact() const { return bin_count.empty(); }
  /// Calls fn(value, weight) for every representative point.
  template <typename Fn>
  void for_each_point(Fn&& fn) const {
    if (exact()) {
      for (double v : values) fn(v, 1.0);
      return;
    }
    for (std::size_t b = 0; b < bin_count.size(); ++b)
      if (bin_count[b] > 0.0) fn(bin_sum[b] / bin_count[b], bin_count[b]);
  }
};

TensorStats stats_from_values(std::span<const float> values);

struct CalibrationStats {
  std::map<std::string, TensorStats> tensors;
  std::size_t samples = 0;
};

struct CalibrationOptions {
  std::vector<OpKind> op_subset{OpKind::Conv2d, OpKind::Mul, OpKind::Add};
  bool per_channel = false;
  /// Tensors with at most this many observations keep every value.
  std::int64_t exact_limit = std::int64_t{1} << 20;
  std::size_t bins = 4096;
};

/// Activation tensors feeding or produced by a quantizable op.
std::vector<std::string> calibration_targets(const ModelGraph& g, const std::vector<OpKind>& op_subset);

/// Exact min/max over every sample's float trace. Throws
/// std::invalid_argument for an empty sample set.
CalibrationStats calibrate(const ModelGraph& g, std::span<const TensorValue> samples,
                           const CalibrationOptions& options = {});

enum class RangeMethod { MinMax, Mse };

std::string to_string(RangeMethod m);
RangeMethod parse_method(const std::string& s);

/// Mean squared quantize/dequantize error of the observed values under the
/// params derived from `range`.
double calibration_mse(const TensorStats& stats, Range range, QuantScheme scheme);

/// Min-max returns the observed extremes. MSE evaluates the min-max range
/// first, then `grid_size` evenly spaced shrink factors in [0.5, 1] applied to
/// both ends, keeping a candidate only when its error is strictly lower.
Range estimate_range(const TensorStats& stats, RangeMethod method, QuantScheme scheme = QuantScheme::Asymmetric,
                     int grid_size = 100);

/// Scale and zero point per range. Asymmetric: s = (max - min) / (2^b - 1),
/// z = min / s. Symmetric: s = max(|min|, |max|) / (2^(b-1) - 1), z = 0. A
/// degenerate range {c, c} gets s = |c| (1 when c = 0) and a zero point that
/// makes c exactly representable.
QuantParams derive_params(std::span<const Range> ranges, QuantScheme scheme,
                          Granularity granularity = Granularity::PerTensor, int axis = 0, int group_size = 0,
                          int bits = 8);
QuantParams derive_params(Range range, QuantScheme scheme, int bits = 8);

/// Per-channel (axis 0) or per-group ranges of a weight payload.
std::vector<Range> weight_ranges(const Constant& w, Granularity granularity, int group_size = 0);

/// Mean squared round-trip error of a weight payload under `p`.
double weight_quant_mse(const Constant& w, const QuantParams& p);

struct QdqParams {
  std::map<std::string, QuantParams> activations;
  std::map<std::string, QuantParams> weights;
};

struct QuantConfig {
  QuantScheme activation_scheme = QuantScheme::Asymmetric;
  /// PerTensor or PerChannel (axis 1, min-max ranges; needs per-channel stats).
  Granularity activation_granularity = Granularity::PerTensor;
  QuantScheme weight_scheme = QuantScheme::Symmetric;
  Granularity weight_granularity = Granularity::PerChannel;
  int group_size = 0;
  RangeMethod method = RangeMethod::MinMax;
  int grid_size = 100;
  std::vector<OpKind> op_subset{OpKind::Conv2d, OpKind::Mul, OpKind::Add};
};

QdqParams derive_graph_params(const ModelGraph& g, const CalibrationStats& stats, const QuantConfig& config);

/// Brackets every input, kernel and output edge of each op in `op_subset` with
/// QuantizeLinear/DequantizeLinear. Kernels become integer constants feeding a
/// DequantizeLinear. Edges that already carry a pair are left alone, so a
/// second rewrite with the same params is a no-op.
ModelGraph rewrite_qdq(const ModelGraph& g, const QdqParams& params,
                       const std::vector<OpKind>& op_subset = {OpKind::Conv2d, OpKind::Mul, OpKind::Add});

struct TensorError {
  double mse = 0.0;
  double max_abs = 0.0;
  double mean_abs = 0.0;
  std::int64_t count = 0;
};

struct QuantErrorReport {
  std::map<std::string, TensorError> tensors;
  std::vector<TensorError> outputs;
};

/// Runs `g_float` in float mode and `g_qdq` in simulated-integer mode on each
/// sample and compares tensors present in both graphs plus graph outputs.
QuantErrorReport measure_quant_error(const ModelGraph& g_float, const ModelGraph& g_qdq,
                                     std::span<const TensorValue> eval_set);

}  // namespace edgepress
