// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "msum/error.hpp"

namespace msum {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw Error(ErrorKind::config, fmt::format("config key '{}': cannot parse '{}' as {}", key, value, expected));
}

template <typename N>
N parse_number(std::string_view key, std::string_view value) {
  N out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) bad_value(key, value, "a number");
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "a boolean");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  while (!value.empty()) {
    const auto comma = value.find(',');
    out.push_back(parse_number<int>(key, trim(value.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    value.remove_prefix(comma + 1);
  }
  if (out.empty()) bad_value(key, value, "a comma-separated integer list");
  return out;
}

Strategy parse_strategy_value(std::string_view key, std::string_view value) {
  auto s = parse_strategy(value);
  if (!s) bad_value(key, value, "one of joint, pretrained, tag, meta");
  return *s;
}

}  // namespace

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues out;
  std::set<std::string, std::less<>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::config, fmt::format("{}:{}: expected 'key = value'", source, line_no));
    }
    std::string key(trim(text.substr(0, eq)));
    std::string value(trim(text.substr(eq + 1)));
    if (key.empty()) throw Error(ErrorKind::config, fmt::format("{}:{}: empty key", source, line_no));
    if (!seen.insert(key).second) {
      throw Error(ErrorKind::config, fmt::format("{}:{}: key '{}' repeated", source, line_no, key));
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

const std::vector<std::string>& train_config_keys() {
  static const std::vector<std::string> keys = {
      "strategy", "gamma", "inner_step_size", "relabel_prob", "meta_second_order",
      "meta_normalize", "meta_base", "meta_relabel", "epochs", "batch_size", "learning_rate",
      "optimizer", "adam_beta1", "adam_beta2", "adam_epsilon", "seed", "domain_schedule",
      "patience", "eval_k", "max_valid_docs", "vocab_min_frequency", "vocab_max_size",
      "max_sentences", "max_tokens", "features_path", "embed_dim", "conv_filter_widths",
      "conv_filters_per_width", "model_dim", "attention_heads", "ffn_dim", "tag_embed_dim",
      "dropout_rate", "use_positional_encoding"};
  return keys;
}

void set_train_option(TrainConfig& c, std::string_view key, std::string_view value) {
  auto& m = c.model;
  if (key == "strategy") {
    c.strategy = parse_strategy_value(key, value);
  } else if (key == "gamma") {
    c.gamma = parse_number<double>(key, value);
  } else if (key == "inner_step_size") {
    if (value.empty() || value == "auto") {
      c.inner_step_size.reset();
    } else {
      c.inner_step_size = parse_number<double>(key, value);
    }
  } else if (key == "relabel_prob") {
    c.relabel_prob = parse_number<double>(key, value);
  } else if (key == "meta_second_order") {
    c.meta_second_order = parse_bool(key, value);
  } else if (key == "meta_normalize") {
    c.meta_normalize = parse_bool(key, value);
  } else if (key == "meta_base") {
    c.meta_base = parse_strategy_value(key, value);
  } else if (key == "meta_relabel") {
    c.meta_relabel = parse_bool(key, value);
  } else if (key == "epochs") {
    c.epochs = parse_number<int>(key, value);
  } else if (key == "batch_size") {
    c.batch_size = parse_number<int>(key, value);
  } else if (key == "learning_rate") {
    c.learning_rate = parse_number<double>(key, value);
  } else if (key == "optimizer") {
    auto k = parse_optimizer(value);
    if (!k) bad_value(key, value, "sgd or adam");
    c.optimizer.kind = *k;
  } else if (key == "adam_beta1") {
    c.optimizer.beta1 = parse_number<double>(key, value);
  } else if (key == "adam_beta2") {
    c.optimizer.beta2 = parse_number<double>(key, value);
  } else if (key == "adam_epsilon") {
    c.optimizer.epsilon = parse_number<double>(key, value);
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "domain_schedule") {
    auto s = parse_domain_schedule(value);
    if (!s) bad_value(key, value, "round_robin or proportional");
    c.domain_schedule = *s;
  } else if (key == "patience") {
    c.patience = parse_number<int>(key, value);
  } else if (key == "eval_k") {
    c.eval_k = parse_number<int>(key, value);
  } else if (key == "max_valid_docs") {
    c.max_valid_docs = parse_number<std::size_t>(key, value);
  } else if (key == "vocab_min_frequency") {
    c.vocab_min_frequency = parse_number<int>(key, value);
  } else if (key == "vocab_max_size") {
    c.vocab_max_size = parse_number<std::size_t>(key, value);
  } else if (key == "max_sentences") {
    c.limits.max_sentences = parse_number<std::size_t>(key, value);
  } else if (key == "max_tokens") {
    c.limits.max_tokens = parse_number<std::size_t>(key, value);
  } else if (key == "features_path") {
    c.features_path = std::string(value);
  } else if (key == "embed_dim") {
    m.embed_dim = parse_number<int>(key, value);
  } else if (key == "conv_filter_widths") {
    m.conv_filter_widths = parse_int_list(key, value);
  } else if (key == "conv_filters_per_width") {
    m.conv_filters_per_width = parse_number<int>(key, value);
  } else if (key == "model_dim") {
    m.model_dim = parse_number<int>(key, value);
  } else if (key == "attention_heads") {
    m.attention_heads = parse_number<int>(key, value);
  } else if (key == "ffn_dim") {
    m.ffn_dim = parse_number<int>(key, value);
  } else if (key == "tag_embed_dim") {
    m.tag_embed_dim = parse_number<int>(key, value);
  } else if (key == "dropout_rate") {
    m.dropout_rate = parse_number<double>(key, value);
  } else if (key == "use_positional_encoding") {
    m.use_positional_encoding = parse_bool(key, value);
  } else {
    throw Error(ErrorKind::config, fmt::format("unknown config key '{}'", key));
  }
}

TrainConfig parse_train_config(std::istream& in, const std::string& source, TrainConfig base) {
  for (const auto& [key, value] : parse_key_values(in, source)) {
    try {
      set_train_option(base, key, value);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("{}: {}", source, e.what()));
    }
  }
  return base;
}

TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::input, fmt::format("cannot open config file '{}'", path.string()));
  return parse_train_config(in, path.string(), std::move(base));
}

KeyValues train_config_entries(const TrainConfig& c) {
  const auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  const auto& m = c.model;
  return {
      {"strategy", std::string(to_string(c.strategy))},
      {"gamma", fmt::format("{}", c.gamma)},
      {"inner_step_size", fmt::format("{}", c.resolved_inner_step())},
      {"relabel_prob", fmt::format("{}", c.relabel_prob)},
      {"meta_second_order", b(c.meta_second_order)},
      {"meta_normalize", b(c.meta_normalize)},
      {"meta_base", std::string(to_string(c.meta_base))},
      {"meta_relabel", b(c.meta_relabel)},
      {"epochs", fmt::format("{}", c.epochs)},
      {"batch_size", fmt::format("{}", c.batch_size)},
      {"learning_rate", fmt::format("{}", c.learning_rate)},
      {"optimizer", std::string(to_string(c.optimizer.kind))},
      {"adam_beta1", fmt::format("{}", c.optimizer.beta1)},
      {"adam_beta2", fmt::format("{}", c.optimizer.beta2)},
      {"adam_epsilon", fmt::format("{}", c.optimizer.epsilon)},
      {"seed", fmt::format("{}", c.seed)},
      {"domain_schedule", std::string(to_string(c.domain_schedule))},
      {"patience", fmt::format("{}", c.patience)},
      {"eval_k", fmt::format("{}", c.eval_k)},
      {"max_valid_docs", fmt::format("{}", c.max_valid_docs)},
      {"vocab_min_frequency", fmt::format("{}", c.vocab_min_frequency)},
      {"vocab_max_size", fmt::format("{}", c.vocab_max_size)},
      {"max_sentences", fmt::format("{}", c.limits.max_sentences)},
      {"max_tokens", fmt::format("{}", c.limits.max_tokens)},
      {"features_path", c.features_path},
      {"embed_dim", fmt::format("{}", m.embed_dim)},
      {"conv_filter_widths", fmt::format("{}", fmt::join(m.conv_filter_widths, ","))},
      {"conv_filters_per_width", fmt::format("{}", m.conv_filters_per_width)},
      {"model_dim", fmt::format("{}", m.model_dim)},
      {"attention_heads", fmt::format("{}", m.attention_heads)},
      {"ffn_dim", fmt::format("{}", m.ffn_dim)},
      {"tag_embed_dim", fmt::format("{}", m.tag_embed_dim)},
      {"dropout_rate", fmt::format("{}", m.dropout_rate)},
      {"use_positional_encoding", b(m.use_positional_encoding)},
  };
}

std::string format_train_config(const TrainConfig& config) {
  std::string out;
  for (const auto& [key, value] : train_config_entries(config)) out += fmt::format("{} = {}\n", key, value);
  return out;
}

}  // namespace msum
