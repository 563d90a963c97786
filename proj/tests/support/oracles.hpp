// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

// Slow reference computations the library results are checked against. They
// deliberately share no code with src/.

#pragma once

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/rational.hpp>

#include "edgepress/graph.hpp"
#include "edgepress/powersim.hpp"
#include "edgepress/pruner.hpp"

namespace oracle {

using Shape = std::vector<std::int64_t>;

/// Direct NCHW convolution in double precision, batch 1.
inline std::vector<double> conv2d(const std::vector<float>& x, const Shape& xs, const std::vector<float>& k,
                                  const Shape& ks, const std::vector<float>& bias, std::int64_t stride,
                                  std::int64_t pad, std::int64_t groups) {
  const std::int64_t cin = xs[1], h = xs[2], w = xs[3];
  const std::int64_t cout = ks[0], cpg = ks[1], kh = ks[2], kw = ks[3];
  const std::int64_t oh = (h + 2 * pad - kh) / stride + 1, ow = (w + 2 * pad - kw) / stride + 1;
  const std::int64_t opg = cout / groups;
  (void)cin;
  std::vector<double> y(static_cast<std::size_t>(cout * oh * ow));
  for (std::int64_t o = 0; o < cout; ++o)
    for (std::int64_t i = 0; i < oh; ++i)
      for (std::int64_t j = 0; j < ow; ++j) {
        double acc = bias.empty() ? 0.0 : bias[static_cast<std::size_t>(o)];
        for (std::int64_t c = 0; c < cpg; ++c) {
          const std::int64_t ic = (o / opg) * cpg + c;
          for (std::int64_t a = 0; a < kh; ++a)
            for (std::int64_t b = 0; b < kw; ++b) {
              const std::int64_t yy = i * stride - pad + a, xx = j * stride - pad + b;
              if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
              acc += static_cast<double>(k[static_cast<std::size_t>(((o * cpg + c) * kh + a) * kw + b)]) *
                     x[static_cast<std::size_t>((ic * h + yy) * w + xx)];
            }
        }
        y[static_cast<std::size_t>((o * oh + i) * ow + j)] = acc;
      }
  return y;
}

/// 1 - (1 - r)^(1/k) with 50 significant digits.
inline double per_step(double r, int k) {
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 one(1);
  const cpp_dec_float_50 p = one - boost::multiprecision::pow(one - cpp_dec_float_50(r), one / k);
  return p.convert_to<double>();
}

/// Round half to even on an exact fraction.
inline std::int64_t rhe(const boost::rational<std::int64_t>& v) {
  std::int64_t fl = v.numerator() / v.denominator();
  if (v < boost::rational<std::int64_t>(fl)) --fl;
  const auto frac = v - fl;
  if (frac > boost::rational<std::int64_t>(1, 2)) return fl + 1;
  if (frac < boost::rational<std::int64_t>(1, 2)) return fl;
  return fl % 2 == 0 ? fl : fl + 1;
}

/// Round half to even through the floating-point environment.
inline double rint_even(double v) {
  const int saved = std::fegetround();
  std::fesetround(FE_TONEAREST);
  const double r = std::nearbyint(v);
  std::fesetround(saved);
  return r;
}

/// Asymmetric 8-bit quantize/dequantize of v for range [lo, hi], lo < hi.
inline double qdq_asym(double v, double lo, double hi) {
  const double s = (hi - lo) / 255.0;
  const double zr = rint_even(lo * 255.0 / (hi - lo));
  const double q = std::clamp(rint_even(v / s) - zr, 0.0, 255.0);
  return s * (q + zr);
}

inline double mse_asym(const std::vector<double>& vals, double lo, double hi) {
  double e = 0.0;
  for (double v : vals) {
    const double d = v - qdq_asym(v, lo, hi);
    e += d * d;
  }
  return e / static_cast<double>(vals.size());
}

/// Exhaustive search over the min-max range and shrink factors in [0.5, 1],
/// returning the first candidate with the lowest error.
inline std::pair<double, double> best_range(const std::vector<double>& vals, int grid) {
  const auto [mn, mx] = std::minmax_element(vals.begin(), vals.end());
  std::vector<std::pair<double, double>> cands{{*mn, *mx}};
  for (int i = 0; i < grid; ++i) {
    const double a = 0.5 + 0.5 * i / static_cast<double>(grid - 1);
    cands.emplace_back(a * *mn, a * *mx);
  }
  std::size_t best = 0;
  double best_e = mse_asym(vals, cands[0].first, cands[0].second);
  for (std::size_t c = 1; c < cands.size(); ++c) {
    const double e = mse_asym(vals, cands[c].first, cands[c].second);
    if (e < best_e) {
      best_e = e;
      best = c;
    }
  }
  return cands[best];
}

/// Zeroes the kernel rows and bias entries owned by every pruned channel,
/// leaving the shapes untouched.
inline edgepress::ModelGraph mask_channels(const edgepress::ModelGraph& g,
                                           const std::vector<edgepress::DependencyGroup>& groups,
                                           const edgepress::PruneSet& prune) {
  using edgepress::SlotRole;
  auto out = g;
  for (const auto& [gi, channels] : prune)
    for (const auto& slot : groups[gi].slots) {
      const auto* n = g.find_node(slot.node);
      if (slot.role == SlotRole::ConvOut) {
        auto& k = out.constants.at(n->weights.at("kernel"));
        const std::int64_t row = edgepress::element_count(k.shape) / k.shape[0];
        for (auto c : channels)
          std::fill_n(k.values.begin() + (slot.offset + c) * row, row, 0.0f);
      } else if (slot.role == SlotRole::Bias) {
        auto& b = out.constants.at(n->weights.at("bias"));
        for (auto c : channels) b.values[static_cast<std::size_t>(slot.offset + c)] = 0.0f;
      }
    }
  return out;
}

/// Midpoint-rule integral of V * i(t) with i(t) looked up from first
/// principles: active for the first t_inf seconds of each period.
inline double integrate_current(const edgepress::DutyCycle& c, double duration, std::int64_t steps) {
  const double dt = duration / static_cast<double>(steps);
  double sum = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * dt;
    const double phase = std::fmod(t, c.wake_period);
    sum += (phase < c.inference_latency ? c.active_current : c.sleep_current) * dt;
  }
  return c.supply_voltage * sum;
}

/// Ordinary least squares fit of y on x; returns R^2.
inline double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = icpt + slope * x[i];
    ss_res += (y[i] - f) * (y[i] - f);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace oracle
