// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "msum/corpus.hpp"

namespace msum::cli {

using json = nlohmann::ordered_json;

/// Git blob object id: SHA-1 of "blob <size>\0" followed by the bytes.
std::string git_blob_sha1(std::string_view bytes);
/// Blob id of the corpus in its canonical line-record serialization.
std::string corpus_hash(const Corpus& corpus);

void write_text(const std::filesystem::path& path, std::string_view text);
void write_json(const std::filesystem::path& path, const json& value);
json read_json(const std::filesystem::path& path);

/// Creates the directory and refuses paths that name an input file.
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace msum::cli
