// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include <filesystem>

#include "doctest.h"
#include "edgepress/fixtures.hpp"
#include "edgepress/graph.hpp"
#include "edgepress/quantizer.hpp"
#include "edgepress/pruner.hpp"
#include "edgepress/serialize.hpp"
#include "edgepress/validate.hpp"
#include "support/helpers.hpp"

using namespace edgepress;

namespace {

bool has_issue(const ValidationReport& r, const std::string& needle) {
  for (const auto& i : r.issues)
    if (i.message.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("conv output extent follows the floor relation") {
  GraphBuilder b;
  auto x = b.input("x", {1, 3, 224, 224});
  auto y = b.conv("same", x, test::filled(16 * 3 * 9, 0.1f), {16, 3, 3, 3}, {}, 1, 1);
  auto z = b.conv("down", y, test::filled(8 * 16 * 9, 0.1f), {8, 16, 3, 3}, {}, 2, 1);
  b.output(z);
  const auto g = b.build();
  const auto shapes = infer_shapes(g);
  CHECK(shapes.at("same") == Shape{1, 16, 224, 224});
  // floor((224 + 2 - 3) / 2) + 1 = 112
  CHECK(shapes.at("down") == Shape{1, 8, 112, 112});
}

TEST_CASE("maxpool 2x2 stride 2 halves the map") {
  GraphBuilder b;
  auto x = b.input("x", {1, 8, 8, 8});
  b.output(b.maxpool("pool", x, 2, 2, 0));
  CHECK(infer_shapes(b.build()).at("pool") == Shape{1, 8, 4, 4});
}

TEST_CASE("shape inference is idempotent") {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 1);
  const auto once = with_inferred_shapes(g);
  CHECK(with_inferred_shapes(once) == once);
  CHECK(infer_shapes(once) == infer_shapes(g));
}

TEST_CASE("valid fixtures produce an empty issue list and full shape map") {
  for (auto kind : {FixtureKind::ToyYolo, FixtureKind::Chain, FixtureKind::Residual, FixtureKind::Concat}) {
    const auto g = gen_fixture(kind, 11);
    const auto r = validate(g);
    CHECK_MESSAGE(r.ok(), r.summary());
    CHECK(r.shapes.size() == g.tensors.size());
    CHECK(r.topo_order.size() == g.nodes.size());
  }
}

TEST_CASE("a cycle is reported as no topological order") {
  GraphBuilder b;
  auto x = b.input("x", {1, 2, 4, 4});
  auto a = b.binary("A", OpKind::Add, x, x);
  auto c = b.unary("B", OpKind::SiLU, a);
  b.output(c);
  auto g = b.build();
  g.find_node("A")->inputs[1] = "B";  // A feeds B feeds A
  const auto r = validate(g);
  CHECK(has_issue(r, "no topological order"));
  CHECK_FALSE(topological_order(g).has_value());
  CHECK_THROWS_AS(infer_shapes(g), GraphError);
}

TEST_CASE("concat of mismatched spatial extents is a spatial mismatch") {
  GraphBuilder b;
  auto l = b.input("l", {1, 8, 16, 16});
  auto r = b.input("r", {1, 8, 8, 8});
  b.output(b.concat("cat", {l, r}));
  CHECK_THROWS_WITH_AS(b.build(), doctest::Contains("spatial mismatch"), GraphError);
}

TEST_CASE("validation is total on malformed graphs") {
  ModelGraph g;
  g.inputs = {"ghost"};
  g.outputs = {"nowhere"};
  Node n;
  n.id = "n";
  n.op = OpKind::Conv2d;
  n.inputs = {"missing"};
  n.outputs = {"y"};
  g.nodes.push_back(n);
  g.nodes.push_back(n);
  const auto r = validate(g);
  CHECK_FALSE(r.ok());
  CHECK(has_issue(r, "duplicate node id"));
  CHECK(has_issue(r, "unknown tensor"));
}

TEST_CASE("dangling tensors are rejected") {
  auto g = gen_fixture(FixtureKind::Chain, 2);
  g.tensors["orphan"] = TensorSpec{"orphan", DType::Float32, {1, 1, 1, 1}, "nobody"};
  CHECK(has_issue(validate(g), "orphan"));
}

TEST_CASE("split sizes must sum to the input extent") {
  GraphBuilder b;
  auto x = b.input("x", {1, 6, 4, 4});
  auto parts = b.split("s", x, {2, 3});
  b.output(parts[0]);
  b.output(parts[1]);
  CHECK_THROWS_WITH_AS(b.build(), doctest::Contains("split sizes do not sum"), GraphError);
}

TEST_CASE("model round trip is the identity") {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 5);
  const auto bytes = encode_model(g);
  CHECK(decode_model(bytes) == g);
  CHECK(encode_model(decode_model(bytes)) == bytes);

  test::TempDir dir;
  save_model(g, dir.path / "m.epm");
  CHECK(load_model(dir.path / "m.epm") == g);
}

TEST_CASE("round trip preserves pruned widths and quant params") {
  const auto g = gen_fixture(FixtureKind::ToyYolo, 5);
  PruningSchedule s;
  s.k = 2;
  const auto pruned = run_schedule(g, s, [](const ModelGraph&) { return 1.0; }).graphs.back();
  CHECK(decode_model(encode_model(pruned)) == pruned);

  const auto samples = gen_samples(pruned, 4, 9);
  const auto stats = calibrate(pruned, samples);
  const auto qdq = rewrite_qdq(pruned, derive_graph_params(pruned, stats, {}));
  const auto back = decode_model(encode_model(qdq));
  CHECK(back == qdq);
  for (const auto& n : back.nodes)
    if (n.op == OpKind::DequantizeLinear) CHECK(n.attrs.quant == qdq.find_node(n.id)->attrs.quant);
}

TEST_CASE("encoding is deterministic") {
  CHECK(encode_model(gen_fixture(FixtureKind::Chain, 42)) == encode_model(gen_fixture(FixtureKind::Chain, 42)));
  CHECK(encode_model(gen_fixture(FixtureKind::Chain, 42)) != encode_model(gen_fixture(FixtureKind::Chain, 43)));
}

TEST_CASE("kernel of rank 3 is reported with its node id") {
  auto g = gen_fixture(FixtureKind::Chain, 3);
  auto& k = g.constants.at("conv0.kernel");
  k.shape = {k.shape[0], k.shape[1], k.shape[2] * k.shape[3]};
  g.tensors.at("conv0.kernel").shape = k.shape;
  CHECK_THROWS_WITH_AS(decode_model(encode_model(g)), doctest::Contains("bad kernel rank at node conv0"),
                       FormatError);
}

TEST_CASE("truncated or corrupted files fail the checksum") {
  const auto bytes = encode_model(gen_fixture(FixtureKind::Chain, 3));
  Bytes truncated(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(bytes.size() - 40));
  CHECK_THROWS_WITH_AS(decode_model(truncated), doctest::Contains("checksum mismatch"), FormatError);
  Bytes flipped = bytes;
  flipped[bytes.size() / 2] ^= 0x10;
  CHECK_THROWS_WITH_AS(decode_model(flipped), doctest::Contains("checksum mismatch"), FormatError);
}

TEST_CASE("bad magic and short files are malformed headers") {
  auto bytes = encode_model(gen_fixture(FixtureKind::Chain, 3));
  bytes[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_model(bytes), doctest::Contains("malformed header"), FormatError);
  CHECK_THROWS_AS(decode_model(Bytes{1, 2, 3}), FormatError);
}

TEST_CASE("unknown op kinds are reported at their node") {
  const auto g = gen_fixture(FixtureKind::Chain, 3);
  const auto bytes = encode_model(g);
  auto patched = test::patch_header(bytes, "\"SiLU\"", "\"Swish\"");
  CHECK_THROWS_WITH_AS(decode_model(patched), doctest::Contains("unknown op_kind 'Swish' at node conv0.act"),
                       FormatError);
}

TEST_CASE("tensor files round trip and load in sorted order") {
  test::TempDir dir;
  const auto g = gen_fixture(FixtureKind::Chain, 4);
  const auto samples = gen_samples(g, 3, 1);
  for (std::size_t i = 0; i < samples.size(); ++i)
    save_tensor(samples[i], dir.path / ("s" + std::to_string(2 - i) + ".ept"));
  const auto loaded = load_tensor_dir(dir.path);
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].data == samples[2].data);
  CHECK(loaded[2].data == samples[0].data);
  CHECK(loaded[0].spec.id == "s0");

  auto bytes = encode_tensor(samples[0]);
  CHECK(decode_tensor(bytes).data == samples[0].data);
  bytes[bytes.size() - 5] ^= 1;
  CHECK_THROWS_WITH_AS(decode_tensor(bytes), doctest::Contains("checksum mismatch"), FormatError);
}

TEST_CASE("builder rejects bias of the wrong length") {
  GraphBuilder b;
  auto x = b.input("x", {1, 2, 3, 3});
  b.output(b.conv("c", x, test::filled(4 * 2, 1.0f), {4, 2, 1, 1}, test::filled(3, 0.0f)));
  CHECK_THROWS_AS(b.build(), GraphError);
}

TEST_CASE("op kind and dtype names round trip") {
  for (auto op : {OpKind::Conv2d, OpKind::Add, OpKind::Mul, OpKind::Concat, OpKind::Split, OpKind::MaxPool,
                  OpKind::Upsample, OpKind::SiLU, OpKind::Sigmoid, OpKind::QuantizeLinear,
                  OpKind::DequantizeLinear, OpKind::Identity})
    CHECK(parse_op_kind(to_string(op)) == op);
  for (auto t : {DType::Float32, DType::Int8, DType::UInt8, DType::Int32}) CHECK(parse_dtype(to_string(t)) == t);
  CHECK_THROWS_AS(parse_op_kind("Gemm"), std::invalid_argument);
}
