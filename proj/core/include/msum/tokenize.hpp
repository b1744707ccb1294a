// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace msum {

/// Deterministic word tokenizer.
///
/// Rules, applied to each whitespace-separated chunk after ASCII lowercasing:
///   * leading and trailing characters that are not alphanumeric are split off,
///     one token per character;
///   * a trailing period is kept on the core when the result is a dotted
///     abbreviation of two or more single characters (`u.s.`, `e.g.`);
///   * bytes >= 0x80 (UTF-8 continuation and lead bytes) count as alphanumeric,
///     so non-ASCII words are kept intact;
///   * internal punctuation (`don't`, `3.5`, `a-b`) is preserved.
std::vector<std::string> tokenize(std::string_view raw);

}  // namespace msum
