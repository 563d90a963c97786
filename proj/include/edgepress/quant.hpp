// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace edgepress {

enum class QuantScheme { Asymmetric, Symmetric };
enum class Granularity { PerTensor, PerChannel, PerGroup };

/// Affine quantization parameters for one tensor.
///
/// Codes follow x_q = clamp(round(x / s) - round(z), qmin, qmax) and
/// x_hat = s * (x_q + round(z)). Asymmetric tensors use unsigned codes
/// [0, 2^b - 1] with z = theta_min / s; symmetric tensors fix z = 0 and use
/// the signed range [-(2^(b-1) - 1), 2^(b-1) - 1].
///
/// Per-channel params hold one (s, z) per index along `axis`. Per-group
/// params split each row (axis-0 slice) into runs of `group_size` elements.
struct QuantParams {
  std::vector<double> scale;
  std::vector<double> zero_point;
  int bits = 8;
  QuantScheme scheme = QuantScheme::Asymmetric;
  Granularity granularity = Granularity::PerTensor;
  int axis = 0;
  int group_size = 0;

  std::int64_t qmin() const;
  std::int64_t qmax() const;
  std::size_t size() const { return scale.size(); }

  /// Index into scale/zero_point for the element at row-major `flat` index
  /// of a tensor with `shape`.
  std::size_t param_index(std::span<const std::int64_t> shape, std::int64_t flat) const;

  bool operator==(const QuantParams&) const = default;
};

/// Round half to even.
double round_half_even(double v);

std::int64_t quantize_value(double x, const QuantParams& p, std::size_t index = 0);
double dequantize_value(std::int64_t q, const QuantParams& p, std::size_t index = 0);

/// Throws std::invalid_argument unless every scale is finite and positive and
/// bits == 8.
void check_params(const QuantParams& p);

std::string to_string(QuantScheme s);
std::string to_string(Granularity g);
QuantScheme parse_scheme(const std::string& s);
Granularity parse_granularity(const std::string& s);

}  // namespace edgepress
