// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace edgepress {

std::string to_string(FixtureKind k) {
  switch (k) {
    case FixtureKind::ToyYolo: return "toy_yolo";
    case FixtureKind::Chain: return "chain";
    case FixtureKind::Residual: return "residual";
    case FixtureKind::Concat: return "concat";
  }
  return "chain";
}

FixtureKind parse_fixture_kind(const std::string& s) {
  if (s == "toy_yolo") return FixtureKind::ToyYolo;
  if (s == "chain") return FixtureKind::Chain;
  if (s == "residual") return FixtureKind::Residual;
  if (s == "concat") return FixtureKind::Concat;
  throw std::invalid_argument("unknown fixture kind '" + s + "'");
}

namespace {

struct Maker {
  GraphBuilder b;
  Rng rng;

  Maker(const std::string& name, std::uint64_t seed) : b(name), rng(seed) {}

  // He-style uniform init with a per-filter gain so channel norms spread out.
  std::string conv(const std::string& id, const std::string& x, std::int64_t cin, std::int64_t cout, std::int64_t k,
                   std::int64_t stride = 1, bool act = true) {
    const std::int64_t fan_in = cin * k * k;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    std::vector<float> w(static_cast<std::size_t>(cout * fan_in));
    std::vector<float> bias(static_cast<std::size_t>(cout));
    for (std::int64_t o = 0; o < cout; ++o) {
      const double gain = rng.uniform(0.25, 1.0);
      for (std::int64_t i = 0; i < fan_in; ++i)
        w[static_cast<std::size_t>(o * fan_in + i)] = static_cast<float>(gain * rng.uniform(-bound, bound));
      bias[static_cast<std::size_t>(o)] = static_cast<float>(rng.uniform(-0.1, 0.1));
    }
    b.conv(id, x, std::move(w), {cout, cin, k, k}, std::move(bias), stride, k / 2);
    if (!act) return id;
    return b.unary(id + ".act", OpKind::SiLU, id);
  }
};

ModelGraph toy_yolo(std::uint64_t seed) {
  Maker m("toy_yolo", seed);
  auto& b = m.b;
  auto x = b.input("images", {1, 3, 32, 32});
  x = m.conv("stem", x, 3, 16, 3, 2);
  x = m.conv("conv1", x, 16, 32, 3, 2);
  x = m.conv("conv1b", x, 32, 32, 3);

  // Split / bottleneck / concat block.
  const auto p3 = m.conv("c2f.cv1", x, 32, 16, 1);
  const auto halves = b.split("c2f.split", p3, {8, 8});
  auto y = m.conv("c2f.m1", halves[1], 8, 8, 3);
  y = m.conv("c2f.m2", y, 8, 8, 3);
  y = b.binary("c2f.add", OpKind::Add, halves[1], y);
  const auto cat = b.concat("c2f.cat", {halves[0], halves[1], y});
  x = m.conv("c2f.cv2", cat, 24, 32, 1);

  x = m.conv("conv2", x, 32, 40, 3, 2);
  x = m.conv("conv2b", x, 40, 40, 3);

  // Pooling pyramid.
  const auto s = m.conv("sppf.cv1", x, 40, 16, 1);
  const auto p1 = b.maxpool("sppf.pool1", s, 5, 1, 2);
  const auto p2 = b.maxpool("sppf.pool2", p1, 5, 1, 2);
  const auto pp3 = b.maxpool("sppf.pool3", p2, 5, 1, 2);
  const auto pyr = b.concat("sppf.cat", {s, p1, p2, pp3});
  const auto p5 = m.conv("sppf.cv2", pyr, 64, 32, 1);

  // Neck and heads.
  const auto up = b.upsample("neck.up", p5, 2);
  const auto merged = b.concat("neck.cat", {up, p3});
  const auto n = m.conv("neck.conv", merged, 48, 8, 3);
  const auto h1 = m.conv("head.p3", n, 8, 6, 1, 1, false);
  const auto h2 = m.conv("head.p5", p5, 32, 6, 1, 1, false);
  b.tag("head.p3", "head");
  b.tag("head.p5", "head");
  b.output(h1);
  b.output(h2);
  return b.build();
}

std::int64_t width(Rng& rng) { return rng.range(3, 8); }

ModelGraph chain(std::uint64_t seed) {
  Maker m("chain", seed);
  const std::int64_t cin = m.rng.range(1, 4);
  auto x = m.b.input("x", {1, cin, 6, 6});
  const auto depth = m.rng.range(2, 4);
  std::int64_t c = cin;
  for (std::int64_t i = 0; i < depth; ++i) {
    const auto w = width(m.rng);
    const std::int64_t k = m.rng.range(0, 1) ? 3 : 1;
    x = m.conv("conv" + std::to_string(i), x, c, w, k, 1, i + 1 < depth);
    c = w;
  }
  m.b.output(x);
  return m.b.build();
}

ModelGraph residual(std::uint64_t seed) {
  Maker m("residual", seed);
  const std::int64_t cin = m.rng.range(1, 4);
  auto x = m.b.input("x", {1, cin, 6, 6});
  const auto c = width(m.rng);
  const auto mid = width(m.rng);
  const auto stem = m.conv("stem", x, cin, c, 3);
  auto y = m.conv("block.a", stem, c, mid, 3);
  y = m.conv("block.b", y, mid, c, 1);
  const auto sum = m.b.binary("block.add", OpKind::Add, stem, y);
  const auto pooled = m.b.maxpool("pool", sum, 3, 1, 1);
  const auto out = m.conv("out", pooled, c, width(m.rng), 1, 1, false);
  m.b.output(out);
  return m.b.build();
}

ModelGraph concat(std::uint64_t seed) {
  Maker m("concat", seed);
  const std::int64_t cin = m.rng.range(1, 4);
  auto x = m.b.input("x", {1, cin, 6, 6});
  const auto a = width(m.rng), c = width(m.rng);
  const auto stem = m.conv("stem", x, cin, a + c, 3);
  const auto parts = m.b.split("split", stem, {a, c});
  const auto lw = width(m.rng), rw = width(m.rng);
  const auto l = m.conv("left", parts[0], a, lw, 3);
  const auto r = m.conv("right", parts[1], c, rw, 1);
  const auto cat = m.b.concat("cat", {l, r});
  const auto out = m.conv("out", cat, lw + rw, width(m.rng), 1, 1, false);
  m.b.output(out);
  return m.b.build();
}

}  // namespace

ModelGraph gen_fixture(FixtureKind kind, std::uint64_t seed) {
  switch (kind) {
    case FixtureKind::ToyYolo: return toy_yolo(seed);
    case FixtureKind::Chain: return chain(seed);
    case FixtureKind::Residual: return residual(seed);
    case FixtureKind::Concat: return concat(seed);
  }
  throw std::invalid_argument("unknown fixture kind");
}

std::vector<TensorValue> gen_samples(const ModelGraph& g, std::size_t count, std::uint64_t seed) {
  if (g.inputs.size() != 1) throw std::invalid_argument("sample generation needs a single-input graph");
  const TensorSpec& spec = g.tensor(g.inputs[0]);
  Rng rng(seed);
  std::vector<TensorValue> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    TensorValue v{spec, std::vector<float>(static_cast<std::size_t>(element_count(spec.shape)))};
    for (auto& f : v.data) f = static_cast<float>(rng.uniform(-1.0, 1.0));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace edgepress
