// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "msum/error.hpp"

namespace msum {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::config, "synthetic spec: " + msg); }

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t uniform_int(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

/// Index drawn with probability proportional to weights; -1 when all zero.
std::ptrdiff_t weighted_pick(const std::vector<double>& weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return -1;
  const double u = uniform(rng) * total;
  double acc = 0.0;
  std::ptrdiff_t last = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = static_cast<std::ptrdiff_t>(i);
    acc += weights[i];
    if (u < acc) return last;
  }
  return last;
}

std::vector<double> position_weights(const SynthDomain& d, std::size_t n) {
  std::vector<double> w(n, 0.0);
  auto pos = [n](std::size_t i) { return n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0; };
  if (d.position == "uniform") {
    std::fill(w.begin(), w.end(), 1.0);
  } else if (d.position == "weights") {
    const std::size_t B = d.weights.size();
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = d.weights[std::min(static_cast<std::size_t>(pos(i) * static_cast<double>(B)), B - 1)];
    }
  } else {
    const double c = d.position == "first" ? 0.0 : d.position == "middle" ? 0.5 : 1.0;
    if (d.spread == 0.0) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (std::abs(pos(i) - c) < std::abs(pos(best) - c)) best = i;
      }
      w[best] = 1.0;
    } else {
      for (std::size_t i = 0; i < n; ++i) w[i] = std::exp(-std::abs(pos(i) - c) / d.spread);
    }
  }
  return w;
}

class ZipfSampler {
 public:
  explicit ZipfSampler(std::size_t n) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) cdf_[r] = acc += 1.0 / static_cast<double>(r + 1);
    for (auto& c : cdf_) c /= acc;
  }
  std::size_t operator()(std::mt19937_64& rng) const {
    const double u = uniform(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void SynthSpec::validate() const {
  if (domains.size() < 2) invalid("needs at least two domains");
  std::set<std::string> names;
  for (const auto& d : domains) {
    if (d.name.empty()) invalid("domain without a name");
    if (!names.insert(d.name).second) invalid(fmt::format("domain '{}' listed twice", d.name));
    if (d.docs < 1) invalid(fmt::format("domain '{}' needs at least one document", d.name));
    static const std::set<std::string> kinds = {"first", "middle", "last", "uniform", "weights"};
    if (kinds.count(d.position) == 0) invalid(fmt::format("domain '{}': unknown position '{}'", d.name, d.position));
    if (!(d.spread >= 0.0) || !std::isfinite(d.spread)) invalid(fmt::format("domain '{}': spread must be >= 0", d.name));
    if (d.position == "weights") {
      if (d.weights.empty()) invalid(fmt::format("domain '{}': weights list is empty", d.name));
      double total = 0.0;
      for (double w : d.weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) invalid(fmt::format("domain '{}': weights must be finite and >= 0", d.name));
        total += w;
      }
      if (!(total > 0.0)) invalid(fmt::format("domain '{}': weights sum to zero", d.name));
    }
    if (!is_probability(d.marker_rate)) invalid(fmt::format("domain '{}': marker_rate must be in [0, 1]", d.name));
    if (d.marker_rate > 0.0 && d.markers.empty()) invalid(fmt::format("domain '{}': marker_rate without markers", d.name));
  }
  for (const auto* list : {&source, &heldout}) {
    for (const auto& n : *list) {
      if (names.count(n) == 0) invalid(fmt::format("partition names unknown domain '{}'", n));
    }
  }
  if (min_sentences < 1 || max_sentences < min_sentences) invalid("need 1 <= min_sentences <= max_sentences");
  if (min_tokens < 1 || max_tokens < min_tokens) invalid("need 1 <= min_tokens <= max_tokens");
  if (vocab_size < 1) invalid("vocab_size must be >= 1");
  if (summary_sentences < 1 || summary_sentences > min_sentences) invalid("need 1 <= summary_sentences <= min_sentences");
  if (cue_words < 1 && (cue_rate > 0.0 || cue_noise > 0.0)) invalid("cue rates need cue_words >= 1");
  if (!is_probability(cue_rate) || !is_probability(cue_noise)) invalid("cue_rate and cue_noise must be in [0, 1]");
  if (!is_probability(train_fraction) || !is_probability(valid_fraction) || train_fraction + valid_fraction > 1.0) {
    invalid("train_fraction and valid_fraction must be in [0, 1] with sum <= 1");
  }
}

const std::vector<std::string>& synth_preset_names() {
  static const std::vector<std::string> names = {"demo", "shift3", "markers5"};
  return names;
}

SynthSpec synth_preset(std::string_view name) {
  SynthSpec s;
  if (name == "demo") {
    s.domains = {{"alpha", "first", {}, 0.15, {}, 0.0, 60},
                 {"beta", "last", {}, 0.15, {}, 0.0, 60},
                 {"gamma", "middle", {}, 0.15, {}, 0.0, 60}};
    s.source = {"alpha", "beta"};
    s.heldout = {"gamma"};
    s.min_sentences = 5;
    s.max_sentences = 8;
    s.vocab_size = 200;
  } else if (name == "shift3") {
    s.domains = {{"first", "first", {}, 0.15, {}, 0.0, 2000},
                 {"middle", "middle", {}, 0.15, {}, 0.0, 2000},
                 {"last", "last", {}, 0.15, {}, 0.0, 2000}};
    s.source = {"first", "last"};
    s.heldout = {"middle"};
  } else if (name == "markers5") {
    const char* names[] = {"ap", "bbc", "cnn", "dw", "eco"};
    for (const char* n : names) {
      SynthDomain d;
      d.name = n;
      d.markers = {fmt::format("{}_m0", n), fmt::format("{}_m1", n), fmt::format("{}_m2", n)};
      d.marker_rate = 1.0;
      d.docs = 1000;
      s.domains.push_back(std::move(d));
    }
  } else {
    throw Error(ErrorKind::config, fmt::format("unknown synthetic preset '{}'", name));
  }
  return s;
}

SynthSpec parse_synth_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    invalid(fmt::format("not valid JSON: {}", e.what()));
  }
  if (!j.is_object()) invalid("top level must be an object");
  SynthSpec s;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "domains") {
        for (const auto& dj : v) {
          SynthDomain d;
          for (const auto& [dk, dv] : dj.items()) {
            if (dk == "name") d.name = dv.get<std::string>();
            else if (dk == "position") d.position = dv.get<std::string>();
            else if (dk == "weights") d.weights = dv.get<std::vector<double>>();
            else if (dk == "spread") d.spread = dv.get<double>();
            else if (dk == "markers") d.markers = dv.get<std::vector<std::string>>();
            else if (dk == "marker_rate") d.marker_rate = dv.get<double>();
            else if (dk == "docs") d.docs = dv.get<std::size_t>();
            else invalid(fmt::format("unknown domain key '{}'", dk));
          }
          s.domains.push_back(std::move(d));
        }
      } else if (key == "source") s.source = v.get<std::vector<std::string>>();
      else if (key == "heldout") s.heldout = v.get<std::vector<std::string>>();
      else if (key == "min_sentences") s.min_sentences = v.get<std::size_t>();
      else if (key == "max_sentences") s.max_sentences = v.get<std::size_t>();
      else if (key == "min_tokens") s.min_tokens = v.get<std::size_t>();
      else if (key == "max_tokens") s.max_tokens = v.get<std::size_t>();
      else if (key == "vocab_size") s.vocab_size = v.get<std::size_t>();
      else if (key == "summary_sentences") s.summary_sentences = v.get<std::size_t>();
      else if (key == "cue_words") s.cue_words = v.get<std::size_t>();
      else if (key == "cue_rate") s.cue_rate = v.get<double>();
      else if (key == "cue_noise") s.cue_noise = v.get<double>();
      else if (key == "train_fraction") s.train_fraction = v.get<double>();
      else if (key == "valid_fraction") s.valid_fraction = v.get<double>();
      else invalid(fmt::format("unknown key '{}'", key));
    }
  } catch (const json::exception& e) {
    invalid(e.what());
  }
  s.validate();
  return s;
}

SynthSpec resolve_synth_spec(const std::string& preset_or_path) {
  const auto& presets = synth_preset_names();
  if (std::find(presets.begin(), presets.end(), preset_or_path) != presets.end()) return synth_preset(preset_or_path);
  std::ifstream in(preset_or_path);
  if (!in) {
    throw Error(ErrorKind::input,
                fmt::format("'{}' is neither a preset ({}) nor a readable spec file", preset_or_path,
                            fmt::join(presets, ", ")));
  }
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_synth_spec(text);
}

std::string synth_spec_json(const SynthSpec& s) {
  json j;
  j["domains"] = json::array();
  for (const auto& d : s.domains) {
    json dj;
    dj["name"] = d.name;
    dj["position"] = d.position;
    dj["weights"] = d.weights;
    dj["spread"] = d.spread;
    dj["markers"] = d.markers;
    dj["marker_rate"] = d.marker_rate;
    dj["docs"] = d.docs;
    j["domains"].push_back(std::move(dj));
  }
  j["source"] = s.source;
  j["heldout"] = s.heldout;
  j["min_sentences"] = s.min_sentences;
  j["max_sentences"] = s.max_sentences;
  j["min_tokens"] = s.min_tokens;
  j["max_tokens"] = s.max_tokens;
  j["vocab_size"] = s.vocab_size;
  j["summary_sentences"] = s.summary_sentences;
  j["cue_words"] = s.cue_words;
  j["cue_rate"] = s.cue_rate;
  j["cue_noise"] = s.cue_noise;
  j["train_fraction"] = s.train_fraction;
  j["valid_fraction"] = s.valid_fraction;
  return j.dump(2);
}

Corpus make_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed) {
  spec.validate();
  const ZipfSampler zipf(spec.vocab_size);
  std::vector<std::string> names;
  std::vector<Document> docs;
  for (std::size_t di = 0; di < spec.domains.size(); ++di) {
    const auto& dom = spec.domains[di];
    names.push_back(dom.name);
    std::mt19937_64 rng(mix(seed, di));
    const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(dom.docs)));
    const auto n_valid = static_cast<std::size_t>(std::floor(spec.valid_fraction * static_cast<double>(dom.docs)));
    for (std::size_t k = 0; k < dom.docs; ++k) {
      const std::size_t n = uniform_int(rng, spec.min_sentences, spec.max_sentences);
      auto weights = position_weights(dom, n);
      std::vector<bool> salient(n, false);
      for (std::size_t m = 0; m < spec.summary_sentences; ++m) {
        const auto pick = weighted_pick(weights, rng);
        if (pick < 0) {
          throw Error(ErrorKind::config,
                      fmt::format("synthetic spec: domain '{}' has no position mass for {}-sentence documents",
                                  dom.name, n));
        }
        salient[static_cast<std::size_t>(pick)] = true;
        weights[static_cast<std::size_t>(pick)] = 0.0;
      }
      Document doc;
      doc.doc_id = fmt::format("{}-{:05d}", dom.name, k);
      doc.domain = static_cast<int>(di);
      doc.split = k < n_train ? Split::train : k < n_train + n_valid ? Split::valid : Split::test;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t len = uniform_int(rng, spec.min_tokens, spec.max_tokens);
        std::vector<std::string> words;
        for (std::size_t t = 0; t < len; ++t) words.push_back(fmt::format("w{}", zipf(rng)));
        const double cue_p = salient[i] ? spec.cue_rate : spec.cue_noise;
        if (spec.cue_words > 0 && uniform(rng) < cue_p) {
          words[rng() % len] = fmt::format("cue{}", rng() % spec.cue_words);
        }
        if (!dom.markers.empty() && uniform(rng) < dom.marker_rate) {
          words[rng() % len] = dom.markers[rng() % dom.markers.size()];
        }
        std::string raw = fmt::format("{} .", fmt::join(words, " "));
        if (salient[i]) doc.reference.push_back(Sentence::from_raw(raw));
        doc.sentences.push_back(Sentence::from_raw(std::move(raw)));
      }
      docs.push_back(std::move(doc));
    }
  }
  DomainPartition partition{spec.source, spec.heldout};
  return Corpus(DomainRegistry(names), std::move(docs), partition);
}

}  // namespace msum
