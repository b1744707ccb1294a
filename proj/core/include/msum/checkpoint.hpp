// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "msum/model.hpp"
#include "msum/tensor.hpp"
#include "msum/vocabulary.hpp"

namespace msum {

/// Binary checkpoint layout (all integers little-endian):
///
///   magic        8 bytes  "MSUMCKPT"
///   version      u32      kCheckpointVersion
///   echo_len     u64
///   echo         echo_len bytes of UTF-8 JSON: model config, vocabulary,
///                domain names, strategy, encoding limits and free-form
///                metadata
///   count        u32      number of tensors
///   count times: u32 name_len, name bytes, u32 rank, u64 dims[rank],
///                float32 data[prod(dims)]
///   checksum     u64      FNV-1a over every preceding byte
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  ModelConfig config;
  ParameterStore params;
  Vocabulary vocab;
  /// Real domains in tag-table order; the unknown tag is row domains.size().
  std::vector<std::string> domains;
  /// Domains the model was trained on; every other domain is scored with the
  /// unknown tag by tag-aware models.
  std::vector<std::string> source_domains;
  std::string strategy;
  EncodingLimits limits;
  std::map<std::string, std::string> metadata;
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);
/// Loads and checks that the stored tensors match the layout `expected`
/// would produce, naming the first incompatibility.
Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected);

}  // namespace msum
