// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/tokenize.hpp"

#include <cstddef>

namespace msum {
namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c >= 0x80;
}

// x.y. / u.s. / e.g. : two or more single word characters each followed by '.'
bool is_dotted_abbreviation(std::string_view s) {
  if (s.size() < 4 || s.size() % 2 != 0) return false;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!is_word_byte(c) || c >= 0x80 || s[i + 1] != '.') {
      return false;
    }
  }
  return true;
}

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && !is_word_byte(static_cast<unsigned char>(chunk[begin]))) ++begin;
  while (end > begin && !is_word_byte(static_cast<unsigned char>(chunk[end - 1]))) --end;

  for (std::size_t i = 0; i < begin; ++i) out.emplace_back(1, chunk[i]);
  if (begin == end) return;

  if (end < chunk.size() && chunk[end] == '.' &&
      is_dotted_abbreviation(chunk.substr(begin, end - begin + 1))) {
    ++end;
  }
  out.emplace_back(chunk.substr(begin, end - begin));
  for (std::size_t i = end; i < chunk.size(); ++i) out.emplace_back(1, chunk[i]);
}

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
  std::string lowered(raw);
  for (char& c : lowered) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }

  std::vector<std::string> tokens;
  std::size_t i = 0;
  const std::string_view text = lowered;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) split_chunk(text.substr(i, j - i), tokens);
    i = j;
  }
  return tokens;
}

}  // namespace msum
