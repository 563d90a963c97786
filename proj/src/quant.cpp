// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/quant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgepress {

std::int64_t QuantParams::qmin() const {
  if (scheme == QuantScheme::Symmetric) return -((std::int64_t{1} << (bits - 1)) - 1);
  return 0;
}

std::int64_t QuantParams::qmax() const {
  if (scheme == QuantScheme::Symmetric) return (std::int64_t{1} << (bits - 1)) - 1;
  return (std::int64_t{1} << bits) - 1;
}

std::size_t QuantParams::param_index(std::span<const std::int64_t> shape,
                                     std::int64_t flat) const {
  switch (granularity) {
    case Granularity::PerTensor:
      return 0;
    case Granularity::PerChannel: {
      std::int64_t inner = 1;
      for (std::size_t d = static_cast<std::size_t>(axis) + 1; d < shape.size(); ++d) inner *= shape[d];
      return static_cast<std::size_t>((flat / inner) % shape[static_cast<std::size_t>(axis)]);
    }
    case Granularity::PerGroup: {
      std::int64_t row_len = 1;
      for (std::size_t d = 1; d < shape.size(); ++d) row_len *= shape[d];
      const std::int64_t per_row = (row_len + group_size - 1) / group_size;
      return static_cast<std::size_t>((flat / row_len) * per_row + (flat % row_len) / group_size);
    }
  }
  return 0;
}

double round_half_even(double v) {
  const double r = std::round(v);
  if (std::fabs(v - std::trunc(v)) == 0.5) return 2.0 * std::round(v / 2.0);
  return r;
}

void check_params(const QuantParams& p) {
  if (p.bits != 8) throw std::invalid_argument("only 8-bit quantization is supported");
  if (p.scale.empty() || p.scale.size() != p.zero_point.size())
    throw std::invalid_argument("quant params need matching scale/zero_point lists");
  for (std::size_t i = 0; i < p.scale.size(); ++i) {
    if (!std::isfinite(p.scale[i]) || p.scale[i] <= 0.0)
      throw std::invalid_argument("quant scale must be finite and positive");
    if (!std::isfinite(p.zero_point[i])) throw std::invalid_argument("quant zero point must be finite");
    if (p.scheme == QuantScheme::Symmetric && p.zero_point[i] != 0.0)
      throw std::invalid_argument("symmetric quant params must have zero point 0");
  }
  if (p.granularity == Granularity::PerGroup && p.group_size <= 0)
    throw std::invalid_argument("per-group quant params need a positive group size");
}

std::int64_t quantize_value(double x, const QuantParams& p, std::size_t index) {
  if (!std::isfinite(x)) throw std::domain_error("cannot quantize a non-finite value");
  if (p.bits != 8) throw std::invalid_argument("only 8-bit quantization is supported");
  const double s = p.scale.at(index);
  if (!(s > 0.0)) throw std::invalid_argument("quant scale must be positive");
  const double code = round_half_even(x / s) - round_half_even(p.zero_point.at(index));
  const double clamped = std::clamp(code, static_cast<double>(p.qmin()), static_cast<double>(p.qmax()));
  return static_cast<std::int64_t>(clamped);
}

double dequantize_value(std::int64_t q, const QuantParams& p, std::size_t index) {
  return p.scale.at(index) * (static_cast<double>(q) + round_half_even(p.zero_point.at(index)));
}

std::string to_string(QuantScheme s) {
  return s == QuantScheme::Symmetric ? "symmetric" : "asymmetric";
}

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::PerTensor: return "per-tensor";
    case Granularity::PerChannel: return "per-channel";
    case Granularity::PerGroup: return "per-group";
  }
  return "per-tensor";
}

QuantScheme parse_scheme(const std::string& s) {
  if (s == "asymmetric") return QuantScheme::Asymmetric;
  if (s == "symmetric") return QuantScheme::Symmetric;
  throw std::invalid_argument("unknown quant scheme '" + s + "'");
}

Granularity parse_granularity(const std::string& s) {
  if (s == "per-tensor") return Granularity::PerTensor;
  if (s == "per-channel") return Granularity::PerChannel;
  if (s == "per-group") return Granularity::PerGroup;
  throw std::invalid_argument("unknown granularity '" + s + "'");
}

}  // namespace edgepress
