// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#include "edgepress/serialize.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include "json.hpp"

#include "edgepress/validate.hpp"

namespace edgepress {

using nlohmann::json;

namespace {

constexpr std::uint8_t kModelMagic[4] = {'E', 'P', 'M', '1'};
constexpr std::uint8_t kTensorMagic[4] = {'E', 'P', 'T', '1'};
constexpr int kFormatVersion = 1;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[at + i]) << (8 * i);
  return v;
}

void put_values(Bytes& out, DType dtype, std::span<const float> values) {
  for (float v : values) {
    switch (dtype) {
      case DType::Float32:
        put_u32(out, std::bit_cast<std::uint32_t>(v));
        break;
      case DType::Int8:
        out.push_back(static_cast<std::uint8_t>(static_cast<std::int8_t>(v)));
        break;
      case DType::UInt8:
        out.push_back(static_cast<std::uint8_t>(v));
        break;
      case DType::Int32:
        put_u32(out, static_cast<std::uint32_t>(static_cast<std::int32_t>(v)));
        break;
    }
  }
}

std::vector<float> get_values(std::span<const std::uint8_t> b, DType dtype, std::size_t count) {
  std::vector<float> out(count);
  const std::size_t width = dtype_size(dtype);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t at = i * width;
    switch (dtype) {
      case DType::Float32:
        out[i] = std::bit_cast<float>(get_u32(b, at));
        break;
      case DType::Int8:
        out[i] = static_cast<float>(static_cast<std::int8_t>(b[at]));
        break;
      case DType::UInt8:
        out[i] = static_cast<float>(b[at]);
        break;
      case DType::Int32:
        out[i] = static_cast<float>(static_cast<std::int32_t>(get_u32(b, at)));
        break;
    }
  }
  return out;
}

json quant_to_json(const QuantParams& q) {
  return json{{"scale", q.scale},
              {"zero_point", q.zero_point},
              {"bits", q.bits},
              {"scheme", to_string(q.scheme)},
              {"granularity", to_string(q.granularity)},
              {"axis", q.axis},
              {"group_size", q.group_size}};
}

QuantParams quant_from_json(const json& j) {
  QuantParams q;
  q.scale = j.at("scale").get<std::vector<double>>();
  q.zero_point = j.at("zero_point").get<std::vector<double>>();
  q.bits = j.at("bits").get<int>();
  q.scheme = parse_scheme(j.at("scheme").get<std::string>());
  q.granularity = parse_granularity(j.at("granularity").get<std::string>());
  q.axis = j.at("axis").get<int>();
  q.group_size = j.at("group_size").get<int>();
  return q;
}

json attrs_to_json(const Attrs& a) {
  const Attrs d;
  json j = json::object();
  if (a.kernel != d.kernel) j["kernel"] = a.kernel;
  if (a.stride != d.stride) j["stride"] = a.stride;
  if (a.pad != d.pad) j["pad"] = a.pad;
  if (a.groups != d.groups) j["groups"] = a.groups;
  if (a.axis != d.axis) j["axis"] = a.axis;
  if (!a.split.empty()) j["split"] = a.split;
  if (a.scale != d.scale) j["scale"] = a.scale;
  if (!a.tags.empty()) j["tags"] = a.tags;
  if (a.quant) j["quant"] = quant_to_json(*a.quant);
  return j;
}

Attrs attrs_from_json(const json& j) {
  Attrs a;
  if (j.contains("kernel")) a.kernel = j["kernel"].get<std::array<std::int64_t, 2>>();
  if (j.contains("stride")) a.stride = j["stride"].get<std::array<std::int64_t, 2>>();
  if (j.contains("pad")) a.pad = j["pad"].get<std::array<std::int64_t, 2>>();
  if (j.contains("groups")) a.groups = j["groups"].get<std::int64_t>();
  if (j.contains("axis")) a.axis = j["axis"].get<std::int64_t>();
  if (j.contains("split")) a.split = j["split"].get<std::vector<std::int64_t>>();
  if (j.contains("scale")) a.scale = j["scale"].get<std::int64_t>();
  if (j.contains("tags")) a.tags = j["tags"].get<std::vector<std::string>>();
  if (j.contains("quant")) a.quant = quant_from_json(j["quant"]);
  return a;
}

Bytes frame(const std::uint8_t (&magic)[4], const std::string& header, const Bytes& payload) {
  Bytes out(magic, magic + 4);
  put_u32(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), payload.begin(), payload.end());
  put_u32(out, crc32(out));
  return out;
}

struct Unframed {
  json header;
  std::span<const std::uint8_t> payload;
  std::size_t payload_offset;
};

Unframed unframe(std::span<const std::uint8_t> bytes, const std::uint8_t (&magic)[4], const char* what) {
  if (bytes.size() < 12) throw FormatError(std::string("malformed header: ") + what + " file too short", 0);
  if (!std::equal(magic, magic + 4, bytes.begin()))
    throw FormatError(std::string("malformed header: bad ") + what + " magic", 0);
  const std::size_t body = bytes.size() - 4;
  const std::uint32_t stored = get_u32(bytes, body);
  if (crc32(bytes.first(body)) != stored)
    throw FormatError("checksum mismatch", static_cast<std::int64_t>(body));
  const std::size_t header_len = get_u32(bytes, 4);
  if (8 + header_len > body) throw FormatError("malformed header: header length exceeds file", 4);
  Unframed u;
  try {
    u.header = json::parse(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(header_len));
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 8 + static_cast<std::int64_t>(e.byte));
  }
  u.payload_offset = 8 + header_len;
  u.payload = bytes.subspan(u.payload_offset, body - u.payload_offset);
  return u;
}

}  // namespace

FormatError::FormatError(const std::string& message, std::int64_t offset)
    : std::runtime_error(offset >= 0 ? message + " (byte offset " + std::to_string(offset) + ")" : message),
      offset_(offset) {}

std::uint32_t crc32(std::span<const std::uint8_t> data) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, 1u << 30));
    c = ::crc32(c, data.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(c);
}

Bytes encode_model(const ModelGraph& g) {
  json header;
  header["format"] = "epm";
  header["version"] = kFormatVersion;
  header["metadata"] = {{"name", g.name}, {"version", g.version}};
  header["graph_inputs"] = g.inputs;
  header["graph_outputs"] = g.outputs;

  json tensors = json::array();
  for (const auto& [id, t] : g.tensors)
    tensors.push_back({{"id", id}, {"dtype", to_string(t.dtype)}, {"shape", t.shape}, {"producer", t.producer}});
  header["tensors"] = std::move(tensors);

  Bytes blob;
  json constants = json::array();
  for (const auto& [id, c] : g.constants) {
    const std::size_t offset = blob.size();
    put_values(blob, c.dtype, c.values);
    constants.push_back({{"id", id},
                         {"dtype", to_string(c.dtype)},
                         {"shape", c.shape},
                         {"offset", offset},
                         {"length", blob.size() - offset}});
  }
  header["constants"] = std::move(constants);
  header["blob_size"] = blob.size();

  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"op", to_string(n.op)},
                     {"inputs", n.inputs},
                     {"outputs", n.outputs},
                     {"attrs", attrs_to_json(n.attrs)},
                     {"weights", n.weights}});
  }
  header["nodes"] = std::move(nodes);
  return frame(kModelMagic, header.dump(), blob);
}

ModelGraph decode_model(std::span<const std::uint8_t> bytes) {
  const Unframed u = unframe(bytes, kModelMagic, "model");
  const json& h = u.header;
  ModelGraph g;
  try {
    if (h.at("format") != "epm" || h.at("version") != kFormatVersion)
      throw FormatError("malformed header: unsupported format version", 8);
    g.name = h.at("metadata").at("name").get<std::string>();
    g.version = h.at("metadata").at("version").get<std::string>();
    g.inputs = h.at("graph_inputs").get<std::vector<std::string>>();
    g.outputs = h.at("graph_outputs").get<std::vector<std::string>>();
    if (h.at("blob_size").get<std::size_t>() != u.payload.size())
      throw FormatError("malformed header: blob size disagrees with file", static_cast<std::int64_t>(u.payload_offset));
    for (const auto& t : h.at("tensors")) {
      TensorSpec spec{t.at("id").get<std::string>(), parse_dtype(t.at("dtype").get<std::string>()),
                      t.at("shape").get<Shape>(), t.at("producer").get<std::string>()};
      g.tensors[spec.id] = spec;
    }
    for (const auto& c : h.at("constants")) {
      Constant k;
      const auto id = c.at("id").get<std::string>();
      k.dtype = parse_dtype(c.at("dtype").get<std::string>());
      k.shape = c.at("shape").get<Shape>();
      const auto offset = c.at("offset").get<std::size_t>();
      const auto length = c.at("length").get<std::size_t>();
      const auto count = static_cast<std::size_t>(element_count(k.shape));
      if (length != count * dtype_size(k.dtype) || offset + length > u.payload.size())
        throw FormatError("malformed header: constant '" + id + "' extent is out of bounds",
                          static_cast<std::int64_t>(u.payload_offset + offset));
      k.values = get_values(u.payload.subspan(offset, length), k.dtype, count);
      g.constants[id] = std::move(k);
    }
    for (const auto& jn : h.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      try {
        n.op = parse_op_kind(jn.at("op").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw FormatError(std::string(e.what()) + " at node " + n.id);
      }
      n.inputs = jn.at("inputs").get<std::vector<std::string>>();
      n.outputs = jn.at("outputs").get<std::vector<std::string>>();
      n.attrs = attrs_from_json(jn.at("attrs"));
      n.weights = jn.at("weights").get<std::map<std::string, std::string>>();
      g.nodes.push_back(std::move(n));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 8);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 8);
  }
  const auto report = validate(g);
  if (!report.ok()) throw FormatError(report.issues.front().message);
  return g;
}

void save_model(const ModelGraph& g, const std::filesystem::path& path) {
  write_file_atomic(path, encode_model(g));
}

ModelGraph load_model(const std::filesystem::path& path) { return decode_model(read_file(path)); }

Bytes encode_tensor(const TensorValue& t) {
  if (static_cast<std::int64_t>(t.data.size()) != element_count(t.spec.shape))
    throw std::invalid_argument("tensor buffer length disagrees with its shape");
  json header{{"dtype", to_string(t.spec.dtype)}, {"shape", t.spec.shape}};
  Bytes payload;
  put_values(payload, t.spec.dtype, t.data);
  return frame(kTensorMagic, header.dump(), payload);
}

TensorValue decode_tensor(std::span<const std::uint8_t> bytes) {
  const Unframed u = unframe(bytes, kTensorMagic, "tensor");
  TensorValue t;
  try {
    t.spec.dtype = parse_dtype(u.header.at("dtype").get<std::string>());
    t.spec.shape = u.header.at("shape").get<Shape>();
  } catch (const std::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what(), 8);
  }
  const auto count = static_cast<std::size_t>(element_count(t.spec.shape));
  if (u.payload.size() != count * dtype_size(t.spec.dtype))
    throw FormatError("payload length disagrees with shape", static_cast<std::int64_t>(u.payload_offset));
  t.data = get_values(u.payload, t.spec.dtype, count);
  t.spec.producer = kGraphInput;
  return t;
}

void save_tensor(const TensorValue& t, const std::filesystem::path& path) {
  write_file_atomic(path, encode_tensor(t));
}

TensorValue load_tensor(const std::filesystem::path& path) {
  auto t = decode_tensor(read_file(path));
  t.spec.id = path.stem().string();
  return t;
}

std::vector<TensorValue> load_tensor_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".ept") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<TensorValue> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(load_tensor(f));
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace edgepress
