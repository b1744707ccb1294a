// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "output.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "msum/error.hpp"

namespace msum::cli {

std::string git_blob_sha1(std::string_view bytes) {
  const std::string header = fmt::format("blob {}", bytes.size());
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  const bool ok = ctx != nullptr && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size() + 1) == 1 &&
                  EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, digest, &length) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw Error(ErrorKind::input, "SHA-1 digest failed");
  std::string out;
  for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string corpus_hash(const Corpus& corpus) {
  std::ostringstream buf;
  write_corpus(buf, corpus);
  return git_blob_sha1(buf.str());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::input, fmt::format("cannot write '{}'", path.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::input, fmt::format("failed writing '{}'", path.string()));
}

void write_json(const std::filesystem::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void prepare_output_dir(const std::filesystem::path& dir) {
  if (dir.empty()) throw Error(ErrorKind::usage, "--out is required");
  std::error_code ec;
  if (std::filesystem::exists(dir, ec) && !std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::usage, fmt::format("--out '{}' exists and is not a directory", dir.string()));
  }
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::input, fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
}

}  // namespace msum::cli
