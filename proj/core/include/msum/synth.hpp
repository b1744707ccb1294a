// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "msum/corpus.hpp"

namespace msum {

/// Where a domain's summary sentences come from. For first/middle/last the
/// weight of sentence i is exp(-|i/(n-1) - c| / spread) with c = 0, 0.5, 1;
/// spread 0 puts all mass on the sentence nearest c. `weights` gives one
/// weight per equal-width bin of relative position.
struct SynthDomain {
  std::string name;
  std::string position = "uniform";
  std::vector<double> weights;
  double spread = 0.1;
  std::vector<std::string> markers;
  /// Chance that a sentence carries one of the domain's marker tokens.
  double marker_rate = 0.0;
  std::size_t docs = 100;
};

struct SynthSpec {
  std::vector<SynthDomain> domains;
  std::vector<std::string> source;
  std::vector<std::string> heldout;
  std::size_t min_sentences = 6;
  std::size_t max_sentences = 10;
  std::size_t min_tokens = 6;
  std::size_t max_tokens = 12;
  /// Background words, drawn with Zipf(1) frequencies.
  std::size_t vocab_size = 400;
  /// Sentences copied verbatim into each summary.
  std::size_t summary_sentences = 2;
  /// Cue words shared by every domain.
  std::size_t cue_words = 4;
  /// Chance that a summary sentence carries a cue word.
  double cue_rate = 0.5;
  /// Chance that any other sentence carries one.
  double cue_noise = 0.1;
  double train_fraction = 0.8;
  double valid_fraction = 0.1;

  void validate() const;
};

/// "demo" (three small domains), "shift3" (first/middle/last position
/// biases, 2000 documents each, middle held out) and "markers5" (five
/// domains with distinct marker tokens).
SynthSpec synth_preset(std::string_view name);
const std::vector<std::string>& synth_preset_names();

/// JSON object with the SynthSpec field names; `domains` entries use the
/// SynthDomain field names. Unknown keys are config errors.
SynthSpec parse_synth_spec(std::string_view json_text);
/// Preset name or path to a JSON spec file.
SynthSpec resolve_synth_spec(const std::string& preset_or_path);
std::string synth_spec_json(const SynthSpec& spec);

/// Deterministic in (spec, seed).
Corpus make_synthetic_corpus(const SynthSpec& spec, std::uint64_t seed);

}  // namespace msum
