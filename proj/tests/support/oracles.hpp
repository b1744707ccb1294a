// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used as test oracles. They share no
// code with the library.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace msum::oracle {

using Words = std::vector<std::string>;

inline bool is_subsequence(const Words& sub, const Words& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) {
    if (seq[i] == sub[j]) ++j;
  }
  return j == sub.size();
}

/// Longest common subsequence by enumerating every subsequence of `a`.
inline std::size_t lcs_exhaustive(const Words& a, const Words& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    Words sub;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) sub.push_back(a[i]);
    }
    if (sub.size() > best && is_subsequence(sub, b)) best = sub.size();
  }
  return best;
}

inline std::map<Words, std::size_t> ngram_counts(const Words& w, std::size_t n) {
  std::map<Words, std::size_t> out;
  for (std::size_t i = 0; i + n <= w.size(); ++i) ++out[Words(w.begin() + i, w.begin() + i + n)];
  return out;
}

struct Prf {
  double p = 0, r = 0, f = 0;
};

inline Prf prf(double overlap, double cand, double ref) {
  Prf s;
  if (cand > 0) s.p = overlap / cand;
  if (ref > 0) s.r = overlap / ref;
  if (s.p + s.r > 0) s.f = 2 * s.p * s.r / (s.p + s.r);
  return s;
}

inline Prf rouge_n(const Words& cand, const Words& ref, std::size_t n) {
  const auto c = ngram_counts(cand, n);
  const auto r = ngram_counts(ref, n);
  std::size_t overlap = 0, ct = 0, rt = 0;
  for (const auto& [g, k] : c) {
    ct += k;
    auto it = r.find(g);
    if (it != r.end()) overlap += std::min(k, it->second);
  }
  for (const auto& [g, k] : r) rt += k;
  return prf(static_cast<double>(overlap), static_cast<double>(ct), static_cast<double>(rt));
}

struct Fragment {
  std::size_t doc_start, summary_start, length;
};

/// Greedy fragments: at each summary position, try every document position
/// and keep the longest match (earliest document start on ties).
inline std::vector<Fragment> fragments_brute(const Words& doc, const Words& summary) {
  std::vector<Fragment> out;
  std::size_t i = 0;
  while (i < summary.size()) {
    std::size_t best_len = 0, best_j = 0;
    for (std::size_t j = 0; j < doc.size(); ++j) {
      std::size_t len = 0;
      while (i + len < summary.size() && j + len < doc.size() && summary[i + len] == doc[j + len]) ++len;
      if (len > best_len) {
        best_len = len;
        best_j = j;
      }
    }
    if (best_len == 0) {
      ++i;
    } else {
      out.push_back({best_j, i, best_len});
      i += best_len;
    }
  }
  return out;
}

/// Objective used by the oracle labeler: mean of ROUGE-1 and ROUGE-2 F1 of
/// the selected sentences (document order) against the flat reference.
inline double rouge12(const std::vector<Words>& sentences, const Words& ref, std::vector<std::size_t> pick) {
  std::sort(pick.begin(), pick.end());
  Words cand;
  for (auto i : pick) cand.insert(cand.end(), sentences[i].begin(), sentences[i].end());
  return (rouge_n(cand, ref, 1).f + rouge_n(cand, ref, 2).f) / 2.0;
}

/// Independent greedy: add the best strictly improving sentence, lowest
/// index on ties, at most `budget` picks. Returns the pick order and value.
inline std::pair<std::vector<std::size_t>, double> greedy(const std::vector<Words>& sentences, const Words& ref,
                                                          std::size_t budget) {
  std::vector<std::size_t> picked;
  double value = 0;
  while (picked.size() < std::min(budget, sentences.size())) {
    double best = value;
    std::size_t arg = sentences.size();
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (std::find(picked.begin(), picked.end(), i) != picked.end()) continue;
      auto trial = picked;
      trial.push_back(i);
      const double v = rouge12(sentences, ref, trial);
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (arg == sentences.size()) break;
    picked.push_back(arg);
    value = best;
  }
  return {picked, value};
}

/// Best objective over every subset of at most `budget` sentences.
inline double exhaustive_best(const std::vector<Words>& sentences, const Words& ref, std::size_t budget) {
  double best = 0;
  const std::size_t n = sentences.size();
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) pick.push_back(i);
    }
    if (pick.size() > budget) continue;
    best = std::max(best, rouge12(sentences, ref, pick));
  }
  return best;
}

}  // namespace msum::oracle
