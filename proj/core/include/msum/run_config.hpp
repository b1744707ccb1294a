// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msum/strategies.hpp"

namespace msum {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines. Blank lines and lines starting with '#' are
/// skipped; a repeated key or a line without '=' is a config error.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");

/// Every key accepted by set_train_option, in documentation order.
const std::vector<std::string>& train_config_keys();

/// Throws a config error for an unknown key or an unparsable value.
void set_train_option(TrainConfig& config, std::string_view key, std::string_view value);

TrainConfig parse_train_config(std::istream& in, const std::string& source = "<config>",
                               TrainConfig base = {});
TrainConfig load_train_config(const std::filesystem::path& path, TrainConfig base = {});

/// Resolved values for every key, in train_config_keys() order. Feeding the
/// result back through set_train_option reproduces the config.
KeyValues train_config_entries(const TrainConfig& config);
std::string format_train_config(const TrainConfig& config);

}  // namespace msum
