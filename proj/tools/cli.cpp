// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <exception>
#include <functional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "msum/error.hpp"
#include "msum/strategies.hpp"

namespace msum::cli {
namespace {

struct SharedFlags {
  std::string corpus;
  std::string out;
  std::string config;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

CLI::Option* add_shared(CLI::App* cmd, SharedFlags& flags, bool corpus, bool seed, bool config) {
  if (corpus) cmd->add_option("--corpus", flags.corpus, "Input corpus file or bundle directory")->required();
  cmd->add_option("--out", flags.out, "Output directory")->required();
  CLI::Option* seed_opt = nullptr;
  if (seed) seed_opt = cmd->add_option("--seed", flags.seed, "Random seed")->default_str("");
  if (config) cmd->add_option("--config", flags.config, "Training config file (key = value lines)");
  cmd->add_option("--workers", flags.workers, "Worker threads")->check(CLI::Range(1, 256));
  return seed_opt;
}

/// Training flags that map onto config keys; only flags given on the command
/// line become overrides.
struct TrainFlags {
  std::string strategy;
  std::string gamma;
  std::string relabel_prob;
  std::string inner_step = "auto";
  bool second_order = false;
  std::string epochs;
  std::string features;
  std::vector<std::string> set;

  TrainFlags() {
    const TrainConfig defaults;
    strategy = std::string(to_string(defaults.strategy));
    gamma = fmt::format("{}", defaults.gamma);
    relabel_prob = fmt::format("{}", defaults.relabel_prob);
    epochs = fmt::format("{}", defaults.epochs);
    second_order = defaults.meta_second_order;
  }
};

struct OverrideOption {
  CLI::Option* option;
  std::string key;
  std::function<std::string()> value;
};

std::vector<OverrideOption> add_train_flags(CLI::App* cmd, TrainFlags& f, bool strategy) {
  std::vector<OverrideOption> opts;
  auto str = [](const std::string& s) { return [&s] { return s; }; };
  if (strategy) {
    opts.push_back({cmd->add_option("--strategy", f.strategy, "Training strategy: joint, pretrained, tag or meta")
                        ->check(CLI::IsMember({"joint", "pretrained", "tag", "meta"})),
                    "strategy", str(f.strategy)});
    opts.push_back({cmd->add_option("--gamma", f.gamma, "Meta loss weight on the main domain in [0, 1]"), "gamma",
                    str(f.gamma)});
  }
  opts.push_back({cmd->add_option("--relabel-prob", f.relabel_prob, "Probability of replacing a tag with the unknown tag"),
                  "relabel_prob", str(f.relabel_prob)});
  opts.push_back({cmd->add_option("--inner-step", f.inner_step, "Meta inner step size (default: the learning rate)"),
                  "inner_step_size", str(f.inner_step)});
  opts.push_back({cmd->add_flag("--second-order", f.second_order, "Include the second-order meta term"),
                  "meta_second_order", [] { return std::string("true"); }});
  opts.push_back({cmd->add_option("--epochs", f.epochs, "Training epochs"), "epochs", str(f.epochs)});
  opts.push_back({cmd->add_option("--features", f.features, "External sentence features (JSONL) for pretrained"),
                  "features_path", str(f.features)});
  cmd->add_option("--set", f.set, "Extra training config entry KEY=VALUE (repeatable)")->default_str("");
  return opts;
}

void collect_overrides(const std::vector<OverrideOption>& opts, const TrainFlags& f, CommonArgs& common) {
  for (const auto& o : opts) {
    if (o.option->count() > 0) common.overrides.emplace_back(o.key, o.value());
  }
  for (const auto& entry : f.set) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::usage, fmt::format("--set '{}' is not KEY=VALUE", entry));
    }
    common.overrides.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-domain extractive summarization toolkit", "msum"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", "0.1.0");

  SharedFlags shared;
  TrainFlags tflags;
  std::vector<CLI::Option*> seed_opts;
  auto shared_for = [&](CLI::App* cmd, bool corpus, bool seed, bool config) {
    if (auto* opt = add_shared(cmd, shared, corpus, seed, config)) seed_opts.push_back(opt);
  };

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Read a line-record corpus and write a normalized bundle");
  shared_for(ingest_cmd, true, false, false);
  ingest_cmd->add_option("--source", ingest.source, "Source (training) domains")->default_str("");
  ingest_cmd->add_option("--heldout", ingest.heldout, "Held-out domains")->default_str("");

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Per-domain corpus statistics and baselines");
  shared_for(stats_cmd, true, true, false);
  stats_cmd->add_option("--lead-k", stats.lead_k, "Sentences in the Lead-k baseline");
  stats_cmd->add_option("--budget", stats.budget, "Sentence budget of the oracle");
  stats_cmd->add_option("--metric", stats.metric, "Oracle objective")->check(CLI::IsMember({"rouge1", "rouge2", "rouge12"}));
  stats_cmd->add_flag("--classifier", stats.classifier, "Also train the domain classifier probe (needs --seed)");

  LabelArgs label;
  auto* label_cmd = app.add_subcommand("label", "Add greedy oracle extractive labels");
  shared_for(label_cmd, true, false, false);
  label_cmd->add_option("--budget", label.budget, "Maximum sentences per document");
  label_cmd->add_option("--metric", label.metric, "Oracle objective")->check(CLI::IsMember({"rouge1", "rouge2", "rouge12"}));

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a summarizer with one strategy");
  shared_for(train_cmd, true, true, true);
  const auto train_overrides = add_train_flags(train_cmd, tflags, true);
  train_cmd->add_option("--domain", train.domains, "Restrict the source domains")->default_str("");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint in-domain, out-of-domain and cross-dataset");
  shared_for(eval_cmd, true, false, false);
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Model checkpoint")->required();
  eval_cmd->add_option("--k", eval.k, "Sentences selected per document");
  eval_cmd->add_option("--bins", eval.bins, "Position histogram bins");
  eval_cmd->add_option("--cross-corpus", eval.cross_corpus, "Corpus for the cross-dataset setting");
  eval_cmd->add_option("--features", eval.features, "External sentence features (JSONL) for pretrained");

  MatrixArgs matrix;
  auto* matrix_cmd = app.add_subcommand("matrix", "Cross-domain R and V matrices");
  shared_for(matrix_cmd, true, true, true);
  matrix_cmd->add_option("--checkpoint", matrix.checkpoints, "Single-domain checkpoints (skips training)")->default_str("");
  matrix_cmd->add_option("--domain", matrix.domains, "Domains to train on (default: all)")->default_str("");
  matrix_cmd->add_option("--k", matrix.k, "Sentences selected per document");
  const auto matrix_overrides = add_train_flags(matrix_cmd, tflags, false);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep-gamma", "Train and evaluate meta models over gamma values");
  shared_for(sweep_cmd, true, true, true);
  sweep_cmd->add_option("--gamma", sweep.gammas, "Gamma values (default: 0 0.25 0.5 0.75 1)")->default_str("");
  sweep_cmd->add_option("--k", sweep.k, "Sentences selected per document");
  sweep_cmd->add_option("--cross-corpus", sweep.cross_corpus, "Corpus for the cross-dataset setting");
  const auto sweep_overrides = add_train_flags(sweep_cmd, tflags, false);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic multi-domain corpus");
  shared_for(synth_cmd, false, true, false);
  synth_cmd->add_option("--spec", synth.spec, "Preset (demo, shift3, markers5) or JSON spec file");

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Collect eval runs into comparison tables");
  report_cmd->add_option("--out", shared.out, "Output directory")->required();
  report_cmd->add_option("--run", report.runs, "Eval output NAME=DIR (repeatable)")->default_str("")->required();
  report_cmd->add_option("--cross-corpus", report.cross_corpus, "Corpus for the cross-dataset Lead-k row");
  report_cmd->add_option("--lead-k", report.lead_k, "Sentences in the Lead-k baseline");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e, out, err);
    }
    std::string message = e.what();
    for (char& c : message) {
      if (c == '\n') c = ' ';
    }
    err << fmt::format("msum: error: usage: {}\n", message);
    return 2;
  }

  try {
    CommonArgs common;
    common.corpus = shared.corpus;
    common.out = shared.out;
    common.config = shared.config;
    common.workers = shared.workers;
    for (auto* opt : seed_opts) {
      if (opt->count() > 0) common.seed = shared.seed;
    }
    if (*ingest_cmd) {
      cmd_ingest(common, ingest, out);
    } else if (*stats_cmd) {
      cmd_stats(common, stats, out);
    } else if (*label_cmd) {
      cmd_label(common, label, out);
    } else if (*train_cmd) {
      collect_overrides(train_overrides, tflags, common);
      cmd_train(common, train, out, err);
    } else if (*eval_cmd) {
      cmd_eval(common, eval, out);
    } else if (*matrix_cmd) {
      collect_overrides(matrix_overrides, tflags, common);
      cmd_matrix(common, matrix, out, err);
    } else if (*sweep_cmd) {
      collect_overrides(sweep_overrides, tflags, common);
      cmd_sweep(common, sweep, out, err);
    } else if (*synth_cmd) {
      cmd_synth(common, synth, out);
    } else if (*report_cmd) {
      cmd_report(common, report, out);
    }
  } catch (const Error& e) {
    err << fmt::format("msum: error: {}: {}\n", to_string(e.kind()), e.what());
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << fmt::format("msum: error: internal: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace msum::cli
