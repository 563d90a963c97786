// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"

namespace edgepress {

/// Load failure. `offset` is the byte offset into the file where the problem
/// was detected, or -1 when it does not apply (e.g. a graph-level issue).
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& message, std::int64_t offset = -1);
  std::int64_t offset() const { return offset_; }

 private:
  std::int64_t offset_;
};

using Bytes = std::vector<std::uint8_t>;

std::uint32_t crc32(std::span<const std::uint8_t> data);

/// Model container:
///   "EPM1" | u32 header length | UTF-8 JSON header | weight blob | u32 CRC32
/// All integers little-endian; the CRC covers every preceding byte. Float
/// payloads are IEEE-754 binary32, integer payloads one or four bytes each.
Bytes encode_model(const ModelGraph& g);
/// Decodes and validates; throws FormatError.
ModelGraph decode_model(std::span<const std::uint8_t> bytes);

void save_model(const ModelGraph& g, const std::filesystem::path& path);
ModelGraph load_model(const std::filesystem::path& path);

/// Tensor file: "EPT1" | u32 header length | JSON {dtype, shape} | payload | u32 CRC32.
Bytes encode_tensor(const TensorValue& t);
TensorValue decode_tensor(std::span<const std::uint8_t> bytes);

void save_tensor(const TensorValue& t, const std::filesystem::path& path);
TensorValue load_tensor(const std::filesystem::path& path);

/// Sorted `.ept` files of a directory, each loaded.
std::vector<TensorValue> load_tensor_dir(const std::filesystem::path& dir);

Bytes read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace edgepress
