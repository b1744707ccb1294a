// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "msum/error.hpp"
#include "msum/metrics.hpp"
#include "oracles.hpp"

namespace msum {
namespace {

using Words = std::vector<std::string>;

Words random_words(std::mt19937_64& rng, std::size_t max_len, std::size_t vocab, std::size_t min_len = 0) {
  Words w(min_len + rng() % (max_len - min_len + 1));
  for (auto& t : w) t = std::string(1, static_cast<char>('a' + rng() % vocab));
  return w;
}

TEST(RougeN, Identity) {
  const Words s{"the", "cat", "sat"};
  const auto r = rouge_n(s, s, 1);
  EXPECT_DOUBLE_EQ(r.precision, 1.0);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.f1, 1.0);
}

TEST(RougeN, PartialUnigramOverlap) {
  const auto r = rouge_n(Words{"a", "b", "c"}, Words{"a", "b", "d"}, 1);
  EXPECT_DOUBLE_EQ(r.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.precision, 2.0 / 3.0);
}

TEST(RougeN, DisjointBigrams) {
  const auto r = rouge_n(Words{"a", "b"}, Words{"c", "d"}, 2);
  EXPECT_EQ(r.precision, 0.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(RougeN, ClipsRepeatedNgrams) {
  const auto r = rouge_n(Words{"a", "a", "a"}, Words{"a", "b"}, 1);
  EXPECT_DOUBLE_EQ(r.precision, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.recall, 0.5);
}

TEST(RougeN, RejectsZeroOrder) { EXPECT_THROW(rouge_n(Words{"a"}, Words{"a"}, 0), Error); }

TEST(RougeN, MatchesCountingOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const auto c = random_words(rng, 12, 4), r = random_words(rng, 12, 4);
    for (std::size_t n : {1u, 2u}) {
      const auto got = rouge_n(c, r, static_cast<int>(n));
      const auto want = oracle::rouge_n(c, r, n);
      EXPECT_NEAR(got.precision, want.p, 1e-12);
      EXPECT_NEAR(got.recall, want.r, 1e-12);
      EXPECT_NEAR(got.f1, want.f, 1e-12);
    }
  }
}

TEST(RougeL, Subsequence) {
  const auto r = rouge_l(Words{"a", "x", "b", "y"}, Words{"a", "b"});
  EXPECT_EQ(lcs_length(Words{"a", "x", "b", "y"}, Words{"a", "b"}), 2u);
  EXPECT_DOUBLE_EQ(r.recall, 1.0);
  EXPECT_DOUBLE_EQ(r.precision, 0.5);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-12);
}

TEST(RougeL, EmptyCandidate) {
  const auto r = rouge_l(Words{}, Words{"a"});
  EXPECT_EQ(r.f1, 0.0);
  EXPECT_EQ(r.recall, 0.0);
}

TEST(RougeL, LcsMatchesExhaustiveSearch) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = random_words(rng, 8, 3), b = random_words(rng, 8, 3);
    EXPECT_EQ(lcs_length(a, b), oracle::lcs_exhaustive(a, b));
  }
}

TEST(RougeAll, IdentityAndMean) {
  const Words s{"x", "y", "z"};
  const auto t = rouge_all(s, s);
  EXPECT_DOUBLE_EQ(t.rouge1.f1, 1.0);
  EXPECT_DOUBLE_EQ(t.rouge2.f1, 1.0);
  EXPECT_DOUBLE_EQ(t.rougeL.f1, 1.0);
  EXPECT_DOUBLE_EQ(rouge_mean(s, s), 1.0);
  RougeTriple m;
  m.rouge1.f1 = 0.6;
  m.rouge2.f1 = 0.3;
  m.rougeL.f1 = 0.6;
  EXPECT_DOUBLE_EQ(m.mean_f1(), 0.5);
}

TEST(RougeAll, MeanConsistentWithSingleOps) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const auto c = random_words(rng, 10, 4), r = random_words(rng, 10, 4);
    const double want = (rouge_n(c, r, 1).f1 + rouge_n(c, r, 2).f1 + rouge_l(c, r).f1) / 3.0;
    EXPECT_NEAR(rouge_mean(c, r), want, 1e-15);
  }
}

TEST(Fragments, Prefix) {
  Words doc;
  for (int i = 0; i < 20; ++i) doc.push_back("t" + std::to_string(i));
  const Words summary(doc.begin(), doc.begin() + 5);
  const auto f = extractive_fragments(doc, summary);
  ASSERT_EQ(f.fragments.size(), 1u);
  EXPECT_EQ(f.fragments[0].length, 5u);
  EXPECT_DOUBLE_EQ(f.coverage, 1.0);
  EXPECT_DOUBLE_EQ(f.density, 5.0);
  EXPECT_DOUBLE_EQ(f.compression, 4.0);
}

TEST(Fragments, TwoPieces) {
  const auto f = extractive_fragments(Words{"a", "b", "c", "d", "e", "f"}, Words{"b", "c", "e"});
  ASSERT_EQ(f.fragments.size(), 2u);
  EXPECT_EQ(f.fragments[0], (Fragment{1, 0, 2}));
  EXPECT_EQ(f.fragments[1], (Fragment{4, 2, 1}));
  EXPECT_DOUBLE_EQ(f.coverage, 1.0);
  EXPECT_NEAR(f.density, 5.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.compression, 2.0);
}

TEST(Fragments, NoOverlap) {
  const auto f = extractive_fragments(Words{"a", "b"}, Words{"z"});
  EXPECT_TRUE(f.fragments.empty());
  EXPECT_EQ(f.coverage, 0.0);
  EXPECT_EQ(f.density, 0.0);
  EXPECT_DOUBLE_EQ(f.compression, 2.0);
}

TEST(Fragments, EmptyInputsThrow) {
  EXPECT_THROW(extractive_fragments(Words{}, Words{"a"}), Error);
  EXPECT_THROW(extractive_fragments(Words{"a"}, Words{}), Error);
}

TEST(Fragments, MatchBruteForce) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    const auto doc = random_words(rng, 30, 4, 1), summary = random_words(rng, 10, 5, 1);
    const auto got = extractive_fragments(doc, summary);
    const auto want = oracle::fragments_brute(doc, summary);
    ASSERT_EQ(got.fragments.size(), want.size());
    double sum = 0, sq = 0;
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(got.fragments[i].doc_start, want[i].doc_start);
      EXPECT_EQ(got.fragments[i].summary_start, want[i].summary_start);
      EXPECT_EQ(got.fragments[i].length, want[i].length);
      sum += static_cast<double>(want[i].length);
      sq += static_cast<double>(want[i].length * want[i].length);
    }
    const double s = static_cast<double>(summary.size());
    EXPECT_NEAR(got.coverage, sum / s, 1e-12);
    EXPECT_NEAR(got.density, sq / s, 1e-12);
    EXPECT_NEAR(got.compression, static_cast<double>(doc.size()) / s, 1e-12);
  }
}

}  // namespace
}  // namespace msum
