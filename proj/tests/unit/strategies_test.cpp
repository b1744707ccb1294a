// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "msum/error.hpp"
#include "msum/features.hpp"
#include "msum/optimizer.hpp"
#include "msum/strategies.hpp"

namespace msum {
namespace {

using testing::randomize;
using testing::tiny_model;

constexpr std::size_t kVocab = 12;

std::vector<EncodedDocument> toy_docs(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EncodedDocument> docs(count);
  for (std::size_t d = 0; d < count; ++d) {
    docs[d].doc_id = "doc" + std::to_string(d);
    docs[d].domain = static_cast<int>(d % 2);
    const std::size_t n = 2 + rng() % 3;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::int32_t> s(1 + rng() % 4);
      for (auto& t : s) t = static_cast<std::int32_t>(1 + rng() % (kVocab - 1));
      docs[d].sentences.push_back(s);
      docs[d].labels.push_back(static_cast<int>(rng() % 2));
    }
  }
  return docs;
}

std::vector<const EncodedDocument*> pointers(const std::vector<EncodedDocument>& docs, std::size_t begin = 0,
                                             std::size_t end = SIZE_MAX) {
  std::vector<const EncodedDocument*> out;
  for (std::size_t i = begin; i < std::min(end, docs.size()); ++i) out.push_back(&docs[i]);
  return out;
}

ModelConfig tagged() {
  auto c = tiny_model();
  c.use_domain_tags = true;
  return c;
}

ExternalFeatures toy_features(const std::vector<EncodedDocument>& docs, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ExternalFeatures f(dim);
  for (const auto& d : docs) {
    std::vector<std::vector<float>> rows(d.sentences.size(), std::vector<float>(dim));
    for (auto& r : rows) {
      for (auto& v : r) v = static_cast<float>(static_cast<double>(rng() % 2000) / 1000.0 - 1.0);
    }
    f.add(d.doc_id, rows);
  }
  return f;
}

TEST(JointStep, BatchLossIsDocumentWeightedMean) {
  const auto docs = toy_docs(5, 1);
  auto p = init_params(tiny_model(), kVocab, 2, 1).cast<double>();
  randomize(p, 2);
  const auto all = pointers(docs), a = pointers(docs, 0, 2), b = pointers(docs, 2);
  const double la = joint_step<double>(tiny_model(), p, a, nullptr);
  const double lb = joint_step<double>(tiny_model(), p, b, nullptr);
  EXPECT_NEAR(joint_step<double>(tiny_model(), p, all, nullptr), (2 * la + 3 * lb) / 5, 1e-12);
}

TEST(JointStep, SmallStepDecreasesLoss) {
  const auto docs = toy_docs(4, 3);
  auto p = init_params(tiny_model(), kVocab, 2, 1);
  randomize(p, 4, 0.2);
  const auto batch = pointers(docs);
  auto g = p.zeros_like();
  const float before = joint_step<float>(tiny_model(), p, batch, &g);
  Optimizer<float> opt;
  opt.apply(p, g, 1e-2);
  EXPECT_LT(joint_step<float>(tiny_model(), p, batch, nullptr), before);
}

TEST(JointStep, IgnoresDocumentDomain) {
  auto docs = toy_docs(3, 5);
  auto p = init_params(tiny_model(), kVocab, 2, 1);
  randomize(p, 6);
  const float base = joint_step<float>(tiny_model(), p, pointers(docs), nullptr);
  for (auto& d : docs) d.domain = 1 - d.domain;
  EXPECT_EQ(joint_step<float>(tiny_model(), p, pointers(docs), nullptr), base);
}

TEST(TagRelabel, Bounds) {
  std::mt19937_64 rng(7);
  const std::vector<int> ids{0, 1, 0, 1, 1};
  EXPECT_EQ(tag_relabel(ids, 0.0, 2, rng), ids);
  EXPECT_EQ(tag_relabel(ids, 1.0, 2, rng), std::vector<int>(5, 2));
  const std::vector<int> many(10000, 0);
  const auto out = tag_relabel(many, 0.5, 2, rng);
  const double frac = static_cast<double>(std::count(out.begin(), out.end(), 2)) / 10000.0;
  EXPECT_GE(frac, 0.48);
  EXPECT_LE(frac, 0.52);
  EXPECT_THROW(tag_relabel(std::vector<int>{2}, 0.5, 2, rng), Error);
  EXPECT_THROW(tag_relabel(ids, 1.5, 2, rng), Error);
}

TEST(TagStep, ZeroTagTableMatchesJoint) {
  const auto docs = toy_docs(3, 8);
  auto tp = init_params(tagged(), kVocab, 2, 1);
  randomize(tp, 9);
  tp.at("tag_embedding").fill(0.0f);
  ParameterStore jp;
  for (const auto& e : tp) {
    if (e.name == "tag_embedding") continue;
    if (e.name == "sentence_proj.weight") {
      const auto& w = e.tensor;
      const std::size_t rows = w.rows() - static_cast<std::size_t>(tagged().tag_embed_dim);
      Tensor cut = Tensor::matrix(rows, w.cols());
      std::copy(w.data(), w.data() + cut.size(), cut.data());
      jp.add(e.name, cut);
    } else {
      jp.add(e.name, e.tensor);
    }
  }
  const auto batch = pointers(docs);
  const std::vector<int> tags{0, 1, 2};
  EXPECT_NEAR(tag_step<float>(tagged(), tp, batch, tags, nullptr), joint_step<float>(tiny_model(), jp, batch, nullptr),
              1e-6);
}

TEST(TagStep, RequiresOneTagPerDocument) {
  const auto docs = toy_docs(2, 8);
  const auto p = init_params(tagged(), kVocab, 2, 1);
  EXPECT_THROW(tag_step<float>(tagged(), p, pointers(docs), std::vector<int>{0}, nullptr), Error);
  EXPECT_THROW(tag_step<float>(tagged(), p, pointers(docs), std::vector<int>{0, 3}, nullptr), Error);
}

ModelConfig featured(int dim) {
  auto c = tiny_model();
  c.external_feature_dim = dim;
  return c;
}

TEST(PretrainedStep, ZeroFeaturesGiveIdenticalSentences) {
  auto p = init_params(featured(5), kVocab, 2, 1);
  randomize(p, 10);
  const std::vector<float> zero(5, 0.0f);
  const std::vector<std::int32_t> a{2, 3}, b{7};
  EXPECT_EQ(encode_sentence(featured(5), p, a, std::nullopt, zero),
            encode_sentence(featured(5), p, b, std::nullopt, zero));
}

TEST(PretrainedStep, ProviderIsNotAParameter) {
  const auto docs = toy_docs(2, 11);
  const auto f = toy_features(docs, 5, 1);
  auto p = init_params(featured(5), kVocab, 2, 1);
  EXPECT_FALSE(p.contains("embedding"));
  auto g = p.zeros_like();
  pretrained_step<float>(featured(5), p, pointers(docs), f, &g);
  EXPECT_TRUE(g.same_layout(p));
}

TEST(PretrainedStep, ProviderFileDeterminesLoss) {
  const auto docs = toy_docs(3, 12);
  auto p = init_params(featured(5), kVocab, 2, 1);
  randomize(p, 13);
  const auto f1 = toy_features(docs, 5, 1), f1_again = toy_features(docs, 5, 1), f2 = toy_features(docs, 5, 2);
  const float l1 = pretrained_step<float>(featured(5), p, pointers(docs), f1, nullptr);
  EXPECT_EQ(pretrained_step<float>(featured(5), p, pointers(docs), f1_again, nullptr), l1);
  EXPECT_NE(pretrained_step<float>(featured(5), p, pointers(docs), f2, nullptr), l1);
}

TEST(PretrainedStep, MissingFeatureNamesDocument) {
  const auto docs = toy_docs(2, 12);
  const auto p = init_params(featured(5), kVocab, 2, 1);
  ExternalFeatures empty(5);
  try {
    pretrained_step<float>(featured(5), p, pointers(docs), empty, nullptr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("doc0"), std::string::npos) << e.what();
  }
}

// Full-model finite differences in double with every parameter randomized.
class StrategyGradients : public ::testing::Test {
 protected:
  std::vector<EncodedDocument> docs = toy_docs(2, 21);
  ForwardOptions options{true, 99, nullptr};
};

TEST_F(StrategyGradients, Joint) {
  auto config = tiny_model();
  config.dropout_rate = 0.2;
  auto p = init_params(config, kVocab, 2, 1).cast<double>();
  randomize(p, 22);
  auto g = p.zeros_like();
  const auto batch = pointers(docs);
  joint_step<double>(config, p, batch, &g, options);
  auto loss = [&](const BasicParameterStore<double>& q) { return joint_step<double>(config, q, batch, nullptr, options); };
  EXPECT_LE(testing::max_relative_error(p, g, loss, 1e-6), 1e-4);
}

TEST_F(StrategyGradients, Tag) {
  auto p = init_params(tagged(), kVocab, 2, 1).cast<double>();
  randomize(p, 23);
  auto g = p.zeros_like();
  const auto batch = pointers(docs);
  const std::vector<int> tags{1, 2};
  tag_step<double>(tagged(), p, batch, tags, &g, options);
  auto loss = [&](const BasicParameterStore<double>& q) {
    return tag_step<double>(tagged(), q, batch, tags, nullptr, options);
  };
  EXPECT_LE(testing::max_relative_error(p, g, loss, 1e-6), 1e-4);
  EXPECT_NE(g.at("tag_embedding")(2, 0), 0.0);
  EXPECT_EQ(g.at("tag_embedding")(0, 0), 0.0);
}

TEST_F(StrategyGradients, Pretrained) {
  const auto f = toy_features(docs, 4, 3);
  auto p = init_params(featured(4), kVocab, 2, 1).cast<double>();
  randomize(p, 24);
  auto g = p.zeros_like();
  const auto batch = pointers(docs);
  pretrained_step<double>(featured(4), p, batch, f, &g, options);
  auto loss = [&](const BasicParameterStore<double>& q) {
    return pretrained_step<double>(featured(4), q, batch, f, nullptr, options);
  };
  EXPECT_LE(testing::max_relative_error(p, g, loss, 1e-6), 1e-4);
}

// One-parameter quadratic objectives: L(θ) = (θ - c)².
Objective<double> quadratic(double c) {
  return [c](const BasicParameterStore<double>& p, BasicGradientStore<double>* g) {
    const double t = p.at("theta")[0];
    if (g) g->at("theta")[0] = 2 * (t - c);
    return (t - c) * (t - c);
  };
}

BasicParameterStore<double> scalar(double v) {
  BasicParameterStore<double> p;
  p.add("theta", BasicTensor<double>({1}, std::vector<double>{v}));
  return p;
}

TEST(MetaStep, FirstOrderToy) {
  const auto p = scalar(0.0);
  auto g = p.zeros_like();
  const std::vector<Objective<double>> aux{quadratic(-1.0)};
  MetaOptions o;
  o.gamma = 0.5;
  o.inner_step_size = 0.1;
  MetaLosses losses;
  const double total = meta_step<double>(p, quadratic(1.0), aux, o, &g, &losses);
  EXPECT_NEAR(g.at("theta")[0], 0.2, 1e-9);
  EXPECT_NEAR(losses.main, 1.0, 1e-12);
  ASSERT_EQ(losses.auxiliary.size(), 1u);
  EXPECT_NEAR(losses.auxiliary[0], 1.44, 1e-12);
  EXPECT_NEAR(total, 0.5 * 1.0 + 0.5 * 1.44, 1e-12);
}

TEST(MetaStep, SecondOrderToy) {
  const auto p = scalar(0.0);
  auto g = p.zeros_like();
  const std::vector<Objective<double>> aux{quadratic(-1.0)};
  MetaOptions o;
  o.gamma = 0.5;
  o.inner_step_size = 0.1;
  o.second_order = true;
  meta_step<double>(p, quadratic(1.0), aux, o, &g);
  // d/dθ [γ(θ-1)² + (1-γ)(θ - 2α(θ-1) + 1)²] at θ = 0.
  EXPECT_NEAR(g.at("theta")[0], -1.0 + 0.5 * 2 * 1.2 * 0.8, 1e-6);
}

TEST(MetaStep, NormalizeAveragesAuxiliaryDomains) {
  const auto p = scalar(0.0);
  const std::vector<Objective<double>> aux{quadratic(-1.0), quadratic(-1.0)};
  MetaOptions o;
  o.gamma = 0.5;
  o.inner_step_size = 0.1;
  o.normalize = true;
  auto g = p.zeros_like();
  meta_step<double>(p, quadratic(1.0), aux, o, &g);
  EXPECT_NEAR(g.at("theta")[0], 0.2, 1e-9);
  o.normalize = false;
  meta_step<double>(p, quadratic(1.0), aux, o, &g);
  EXPECT_NEAR(g.at("theta")[0], -1.0 + 2 * 1.2, 1e-9);
}

TEST(MetaStep, GammaOneSkipsAuxiliary) {
  const auto p = scalar(0.3);
  int calls = 0;
  const std::vector<Objective<double>> aux{[&](const BasicParameterStore<double>&, BasicGradientStore<double>*) {
    ++calls;
    return 0.0;
  }};
  MetaOptions o;
  o.gamma = 1.0;
  auto g = p.zeros_like();
  meta_step<double>(p, quadratic(1.0), aux, o, &g);
  EXPECT_EQ(calls, 0);
  EXPECT_EQ(g.at("theta")[0], 2 * (0.3 - 1.0));
}

TEST(MetaStep, NeedsAuxiliaryBelowGammaOne) {
  const auto p = scalar(0.0);
  auto g = p.zeros_like();
  MetaOptions o;
  o.gamma = 0.5;
  EXPECT_THROW(meta_step<double>(p, quadratic(1.0), {}, o, &g), Error);
}

TEST(MetaStep, GammaOneIsBitIdenticalToTagStep) {
  const auto docs = toy_docs(4, 31);
  auto p = init_params(tagged(), kVocab, 2, 1);
  randomize(p, 32);
  const auto main_batch = pointers(docs, 0, 2), aux_batch = pointers(docs, 2);
  const std::vector<int> tags{0, 2};
  const ForwardOptions fo{true, 5, nullptr};
  auto expected = p.zeros_like();
  const float want = tag_step<float>(tagged(), p, main_batch, tags, &expected, fo);
  Objective<float> main = [&](const ParameterStore& q, GradientStore* g) {
    return tag_step<float>(tagged(), q, main_batch, tags, g, fo);
  };
  const std::vector<Objective<float>> aux{[&](const ParameterStore& q, GradientStore* g) {
    return tag_step<float>(tagged(), q, aux_batch, std::vector<int>{1, 1}, g, fo);
  }};
  MetaOptions o;
  o.gamma = 1.0;
  auto got = p.zeros_like();
  EXPECT_EQ(meta_step<float>(p, main, aux, o, &got), want);
  EXPECT_TRUE(got == expected);
}

TEST(MetaStep, ZeroInnerStepIsGammaMixture) {
  const auto docs = toy_docs(6, 33);
  auto p = init_params(tiny_model(), kVocab, 2, 1).cast<double>();
  randomize(p, 34);
  const auto b0 = pointers(docs, 0, 2), b1 = pointers(docs, 2, 4), b2 = pointers(docs, 4);
  auto objective = [&](std::vector<const EncodedDocument*> b) -> Objective<double> {
    return [&, b](const BasicParameterStore<double>& q, BasicGradientStore<double>* g) {
      return joint_step<double>(tiny_model(), q, b, g);
    };
  };
  const std::vector<Objective<double>> aux{objective(b1), objective(b2)};
  MetaOptions o;
  o.gamma = 0.3;
  o.inner_step_size = 0.0;
  auto got = p.zeros_like();
  meta_step<double>(p, objective(b0), aux, o, &got);
  auto g0 = p.zeros_like(), g1 = p.zeros_like(), g2 = p.zeros_like();
  joint_step<double>(tiny_model(), p, b0, &g0);
  joint_step<double>(tiny_model(), p, b1, &g1);
  joint_step<double>(tiny_model(), p, b2, &g2);
  auto want = p.zeros_like();
  want.axpy(0.3, g0);
  want.axpy(0.7, g1);
  want.axpy(0.7, g2);
  for (const auto& e : want) {
    for (std::size_t i = 0; i < e.tensor.size(); ++i) EXPECT_NEAR(got.at(e.name)[i], e.tensor[i], 1e-9) << e.name;
  }
}

TEST(MetaStep, SecondOrderMatchesFiniteDifferenceOfMetaObjective) {
  const auto docs = toy_docs(4, 35);
  auto p = init_params(tiny_model(), kVocab, 2, 1).cast<double>();
  randomize(p, 36, 0.3);
  const auto b0 = pointers(docs, 0, 2), b1 = pointers(docs, 2);
  Objective<double> main = [&](const BasicParameterStore<double>& q, BasicGradientStore<double>* g) {
    return joint_step<double>(tiny_model(), q, b0, g);
  };
  const std::vector<Objective<double>> aux{[&](const BasicParameterStore<double>& q, BasicGradientStore<double>* g) {
    return joint_step<double>(tiny_model(), q, b1, g);
  }};
  MetaOptions o;
  o.gamma = 0.5;
  o.inner_step_size = 0.05;
  o.second_order = true;
  auto g = p.zeros_like();
  meta_step<double>(p, main, aux, o, &g);
  // The meta objective itself, differentiated numerically.
  auto total = [&](const BasicParameterStore<double>& q) {
    auto gk = q.zeros_like();
    const double lk = main(q, &gk);
    auto adapted = q;
    adapted.axpy(-o.inner_step_size, gk);
    return o.gamma * lk + (1 - o.gamma) * aux[0](adapted, nullptr);
  };
  EXPECT_LE(testing::max_relative_error(p, g, total, 1e-5, 1e-5), 1e-3);
}

}  // namespace
}  // namespace msum
