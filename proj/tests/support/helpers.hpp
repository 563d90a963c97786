// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The edgepress Authors

#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "edgepress/graph.hpp"
#include "edgepress/serialize.hpp"

namespace test {

inline std::vector<float> filled(std::size_t n, float v) { return std::vector<float>(n, v); }

/// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("edgepress-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

/// Rewrites the JSON header of a framed file, replacing every occurrence of
/// `from` with `to`, and re-frames it with a fresh length and checksum.
inline edgepress::Bytes patch_header(const edgepress::Bytes& bytes, const std::string& from, const std::string& to) {
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
  std::string header(bytes.begin() + 8, bytes.begin() + 8 + len);
  for (std::size_t at = header.find(from); at != std::string::npos; at = header.find(from, at + to.size()))
    header.replace(at, from.size(), to);
  edgepress::Bytes out(bytes.begin(), bytes.begin() + 4);
  const auto n = static_cast<std::uint32_t>(header.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  out.insert(out.end(), bytes.begin() + 8 + len, bytes.end() - 4);
  const std::uint32_t crc = edgepress::crc32(out);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  return out;
}

}  // namespace test
