// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <json.hpp>

#include "msum/error.hpp"

namespace msum {
namespace {

using json = nlohmann::ordered_json;

constexpr std::array<char, 8> kMagic = {'M', 'S', 'U', 'M', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint IO assumes a little-endian host");

std::uint64_t fnv1a(const std::string& bytes, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= static_cast<unsigned char>(bytes[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename U>
void put(std::string& out, U value) {
  char buf[sizeof(U)];
  std::memcpy(buf, &value, sizeof(U));
  out.append(buf, sizeof(U));
}

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end, std::string path)
      : bytes_(bytes), end_(end), path_(std::move(path)) {}

  template <typename U>
  U get() {
    need(sizeof(U));
    U value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return value;
  }

  std::string str(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void floats(float* dst, std::size_t n) {
    if (n > (end_ - pos_) / sizeof(float)) truncated();
    std::memcpy(dst, bytes_.data() + pos_, n * sizeof(float));
    pos_ += n * sizeof(float);
  }

  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) {
    if (n > end_ - pos_) truncated();
  }
  [[noreturn]] void truncated() const {
    throw Error(ErrorKind::format, fmt::format("checkpoint '{}' is truncated", path_));
  }

  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string path_;
};

json config_to_json(const ModelConfig& c) {
  json j;
  j["embed_dim"] = c.embed_dim;
  j["conv_filter_widths"] = c.conv_filter_widths;
  j["conv_filters_per_width"] = c.conv_filters_per_width;
  j["model_dim"] = c.model_dim;
  j["attention_heads"] = c.attention_heads;
  j["ffn_dim"] = c.ffn_dim;
  j["tag_embed_dim"] = c.tag_embed_dim;
  j["dropout_rate"] = c.dropout_rate;
  j["use_positional_encoding"] = c.use_positional_encoding;
  j["use_domain_tags"] = c.use_domain_tags;
  j["external_feature_dim"] = c.external_feature_dim;
  return j;
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.embed_dim = j.at("embed_dim").get<int>();
  c.conv_filter_widths = j.at("conv_filter_widths").get<std::vector<int>>();
  c.conv_filters_per_width = j.at("conv_filters_per_width").get<int>();
  c.model_dim = j.at("model_dim").get<int>();
  c.attention_heads = j.at("attention_heads").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.tag_embed_dim = j.at("tag_embed_dim").get<int>();
  c.dropout_rate = j.at("dropout_rate").get<double>();
  c.use_positional_encoding = j.at("use_positional_encoding").get<bool>();
  c.use_domain_tags = j.at("use_domain_tags").get<bool>();
  c.external_feature_dim = j.at("external_feature_dim").get<int>();
  return c;
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  json echo;
  echo["model"] = config_to_json(ckpt.config);
  echo["strategy"] = ckpt.strategy;
  echo["seed"] = ckpt.params.seed();
  echo["domains"] = ckpt.domains;
  echo["source_domains"] = ckpt.source_domains;
  echo["max_sentences"] = ckpt.limits.max_sentences;
  echo["max_tokens"] = ckpt.limits.max_tokens;
  echo["metadata"] = ckpt.metadata;
  echo["vocab"] = ckpt.vocab.real_tokens();
  const std::string echo_text = echo.dump();

  std::string out;
  out.append(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, echo_text.size());
  out += echo_text;
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.params.size()));
  for (const auto& e : ckpt.params) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.name.size()));
    out += e.name;
    put<std::uint32_t>(out, static_cast<std::uint32_t>(e.tensor.rank()));
    for (auto d : e.tensor.shape()) put<std::uint64_t>(out, d);
    out.append(reinterpret_cast<const char*>(e.tensor.data()), e.tensor.size() * sizeof(float));
  }
  put<std::uint64_t>(out, fnv1a(out, out.size()));

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::input, fmt::format("cannot write checkpoint '{}'", path.string()));
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::input, fmt::format("failed writing checkpoint '{}'", path.string()));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::input, fmt::format("cannot open checkpoint '{}'", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::string name = path.string();

  if (bytes.size() < kMagic.size() || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw Error(ErrorKind::format, fmt::format("'{}' is not an msum checkpoint", name));
  }
  if (bytes.size() < kMagic.size() + sizeof(std::uint32_t) + sizeof(std::uint64_t)) {
    throw Error(ErrorKind::format, fmt::format("checkpoint '{}' is truncated", name));
  }
  Reader header(bytes, bytes.size(), name);
  header.str(kMagic.size());
  const auto version = header.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw Error(ErrorKind::format, fmt::format("checkpoint '{}' has format version {}, expected {}",
                                               name, version, kCheckpointVersion));
  }

  const std::size_t body_end = bytes.size() - sizeof(std::uint64_t);
  std::uint64_t stored;
  std::memcpy(&stored, bytes.data() + body_end, sizeof(stored));
  if (stored != fnv1a(bytes, body_end)) {
    throw Error(ErrorKind::format,
                fmt::format("checkpoint '{}' is truncated or corrupt (checksum mismatch)", name));
  }
  Reader r(bytes, body_end, name);
  r.str(kMagic.size() + sizeof(std::uint32_t));
  const auto echo_len = r.get<std::uint64_t>();
  if (echo_len > body_end) throw Error(ErrorKind::format, fmt::format("checkpoint '{}' is truncated", name));
  const std::string echo_text = r.str(static_cast<std::size_t>(echo_len));

  Checkpoint ckpt;
  std::uint64_t seed = 0;
  try {
    const json echo = json::parse(echo_text);
    ckpt.config = config_from_json(echo.at("model"));
    ckpt.strategy = echo.at("strategy").get<std::string>();
    seed = echo.at("seed").get<std::uint64_t>();
    ckpt.domains = echo.at("domains").get<std::vector<std::string>>();
    ckpt.source_domains = echo.at("source_domains").get<std::vector<std::string>>();
    ckpt.limits.max_sentences = echo.at("max_sentences").get<std::size_t>();
    ckpt.limits.max_tokens = echo.at("max_tokens").get<std::size_t>();
    ckpt.metadata = echo.at("metadata").get<std::map<std::string, std::string>>();
    ckpt.vocab = Vocabulary(echo.at("vocab").get<std::vector<std::string>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::format, fmt::format("checkpoint '{}' has a corrupt header: {}", name, e.what()));
  }

  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto name_len = r.get<std::uint32_t>();
    std::string tensor_name = r.str(name_len);
    const auto rank = r.get<std::uint32_t>();
    if (rank > 2) throw Error(ErrorKind::format, fmt::format("checkpoint '{}' has a rank-{} tensor", name, rank));
    std::vector<std::size_t> shape;
    for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
    std::size_t n = 1;
    for (auto d : shape) n *= d;
    if (n > body_end / sizeof(float)) throw Error(ErrorKind::format, fmt::format("checkpoint '{}' is truncated", name));
    Tensor t(shape);
    r.floats(t.data(), n);
    ckpt.params.add(std::move(tensor_name), std::move(t));
  }
  ckpt.params.set_seed(seed);
  if (r.pos() != body_end) {
    throw Error(ErrorKind::format, fmt::format("checkpoint '{}' has trailing bytes", name));
  }
  return ckpt;
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig& expected) {
  Checkpoint ckpt = load_checkpoint(path);
  const bool has_tags = ckpt.params.contains("tag_embedding");
  if (has_tags && !expected.use_domain_tags) {
    throw Error(ErrorKind::config,
                fmt::format("checkpoint '{}' was trained with a domain tag table, but the target "
                            "model config has none (set use_domain_tags)",
                            path.string()));
  }
  if (!has_tags && expected.use_domain_tags) {
    throw Error(ErrorKind::config,
                fmt::format("checkpoint '{}' has no domain tag table, but the target model config "
                            "expects one",
                            path.string()));
  }
  const auto layout = expected_layout(expected, ckpt.vocab.size(), ckpt.domains.size());
  if (layout.size() != ckpt.params.size()) {
    throw Error(ErrorKind::config,
                fmt::format("checkpoint '{}' holds {} tensors, the target config expects {}",
                            path.string(), ckpt.params.size(), layout.size()));
  }
  for (const auto& [pname, shape] : layout) {
    const auto* t = ckpt.params.find(pname);
    if (t == nullptr) {
      throw Error(ErrorKind::config,
                  fmt::format("checkpoint '{}' lacks parameter '{}'", path.string(), pname));
    }
    if (t->shape() != shape) {
      throw Error(ErrorKind::config, fmt::format("checkpoint '{}': parameter '{}' has a different shape",
                                                 path.string(), pname));
    }
  }
  return ckpt;
}

}  // namespace msum
