// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace msum::cli {

struct CommonArgs {
  std::string corpus;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  /// Training config overrides from flags, applied after --config.
  std::vector<std::pair<std::string, std::string>> overrides;
};

struct IngestArgs {
  std::vector<std::string> source;
  std::vector<std::string> heldout;
};

struct StatsArgs {
  std::size_t lead_k = 3;
  std::size_t budget = 3;
  std::string metric = "rouge12";
  bool classifier = false;
};

struct LabelArgs {
  std::size_t budget = 3;
  std::string metric = "rouge12";
};

struct TrainArgs {
  std::vector<std::string> domains;
};

struct EvalArgs {
  std::string checkpoint;
  std::size_t k = 2;
  std::size_t bins = 20;
  std::string cross_corpus;
  std::string features;
};

struct MatrixArgs {
  std::vector<std::string> checkpoints;
  std::vector<std::string> domains;
  std::size_t k = 2;
};

struct SweepArgs {
  std::vector<double> gammas{0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t k = 2;
  std::string cross_corpus;
};

struct SynthArgs {
  std::string spec = "demo";
};

struct ReportArgs {
  std::vector<std::string> runs;
  std::string cross_corpus;
  std::size_t lead_k = 3;
};

void cmd_ingest(const CommonArgs& common, const IngestArgs& args, std::ostream& out);
void cmd_stats(const CommonArgs& common, const StatsArgs& args, std::ostream& out);
void cmd_label(const CommonArgs& common, const LabelArgs& args, std::ostream& out);
void cmd_train(const CommonArgs& common, const TrainArgs& args, std::ostream& out, std::ostream& log);
void cmd_eval(const CommonArgs& common, const EvalArgs& args, std::ostream& out);
void cmd_matrix(const CommonArgs& common, const MatrixArgs& args, std::ostream& out, std::ostream& log);
void cmd_sweep(const CommonArgs& common, const SweepArgs& args, std::ostream& out, std::ostream& log);
void cmd_synth(const CommonArgs& common, const SynthArgs& args, std::ostream& out);
void cmd_report(const CommonArgs& common, const ReportArgs& args, std::ostream& out);

}  // namespace msum::cli
