// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "msum/checkpoint.hpp"
#include "msum/classifier.hpp"
#include "msum/error.hpp"
#include "msum/eval.hpp"
#include "msum/features.hpp"
#include "msum/labeling.hpp"
#include "msum/run_config.hpp"
#include "msum/stats.hpp"
#include "msum/synth.hpp"
#include "msum/train.hpp"
#include "output.hpp"

namespace msum::cli {
namespace fs = std::filesystem;

namespace {

Corpus load_corpus(const std::string& path) {
  if (path.empty()) throw Error(ErrorKind::usage, "--corpus is required");
  if (!fs::exists(path)) throw Error(ErrorKind::input, fmt::format("corpus '{}' does not exist", path));
  return load_bundle(path);
}

std::uint64_t require_seed(const CommonArgs& common, std::string_view command) {
  if (!common.seed) throw Error(ErrorKind::usage, fmt::format("{} needs --seed", command));
  return *common.seed;
}

/// Refuses to write a bundle over the bundle (or file) it was read from.
void guard_bundle_output(const std::string& input, const fs::path& out_dir) {
  std::error_code ec;
  const fs::path in(input);
  const fs::path in_file = fs::is_directory(in, ec) ? in / "corpus.jsonl" : in;
  const fs::path out_file = out_dir / "corpus.jsonl";
  if (fs::exists(out_file, ec) && fs::exists(in_file, ec) && fs::equivalent(in_file, out_file, ec)) {
    throw Error(ErrorKind::usage, fmt::format("--out '{}' would overwrite the input corpus", out_dir.string()));
  }
}

TrainConfig resolve_train_config(const CommonArgs& common) {
  TrainConfig config;
  if (!common.config.empty()) config = load_train_config(common.config);
  for (const auto& [key, value] : common.overrides) set_train_option(config, key, value);
  if (common.seed) config.seed = *common.seed;
  config.validate();
  return config;
}

json config_json(const TrainConfig& config) {
  json j = json::object();
  for (const auto& [key, value] : train_config_entries(config)) j[key] = value;
  return j;
}

std::optional<ExternalFeatures> load_features(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return ExternalFeatures::load(path);
}

json role_of(const Corpus& corpus, int id) {
  if (corpus.is_source(id)) return "source";
  if (corpus.is_heldout(id)) return "heldout";
  return "unassigned";
}

double points(double v) { return 100.0 * v; }

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }

json triple_json(const RougeTriple& t) {
  return json{{"rouge1", points(t.rouge1.f1)}, {"rouge2", points(t.rouge2.f1)}, {"rougeL", points(t.rougeL.f1)}};
}

void train_progress(std::ostream& log, const std::string& prefix, const EpochRecord& r) {
  log << fmt::format("{}epoch {} valid_rouge1 {:.4f}{}\n", prefix, r.epoch, r.valid_rouge1,
                     r.improved ? " *" : "");
  log.flush();
}

json epochs_json(const TrainReport& report) {
  json epochs = json::array();
  for (const auto& e : report.epochs) {
    json row;
    row["epoch"] = e.epoch;
    json train = json::object(), valid = json::object();
    for (std::size_t i = 0; i < report.source_domains.size(); ++i) {
      train[report.source_domains[i]] = std::isfinite(e.train_loss[i]) ? json(e.train_loss[i]) : json(nullptr);
      valid[report.source_domains[i]] = std::isfinite(e.valid_loss[i]) ? json(e.valid_loss[i]) : json(nullptr);
    }
    row["train_loss"] = train;
    row["valid_loss"] = valid;
    row["valid_rouge1"] = std::isfinite(e.valid_rouge1) ? json(e.valid_rouge1) : json(nullptr);
    row["improved"] = e.improved;
    epochs.push_back(row);
  }
  return epochs;
}

}  // namespace

void cmd_ingest(const CommonArgs& common, const IngestArgs& args, std::ostream& out) {
  if (common.corpus.empty()) throw Error(ErrorKind::usage, "--corpus is required");
  const DomainPartition partition{args.source, args.heldout};
  const Corpus corpus = ingest(common.corpus, partition);
  prepare_output_dir(common.out);
  guard_bundle_output(common.corpus, common.out);
  write_bundle(common.out, corpus);

  json summary;
  summary["command"] = "ingest";
  summary["input"] = common.corpus;
  summary["partition"] = {{"source", args.source}, {"heldout", args.heldout}};
  summary["corpus_hash"] = corpus_hash(corpus);
  summary["documents"] = corpus.documents().size();
  json domains = json::array();
  for (std::size_t id = 0; id < corpus.domains().size(); ++id) {
    const auto c = corpus.counts(static_cast<int>(id));
    domains.push_back({{"name", corpus.domains().at(static_cast<int>(id)).name},
                       {"role", role_of(corpus, static_cast<int>(id))},
                       {"train", c.train},
                       {"valid", c.valid},
                       {"test", c.test}});
  }
  summary["domains"] = domains;
  write_json(fs::path(common.out) / "ingest.json", summary);
  out << fmt::format("ingested {} documents in {} domains into {}\n", corpus.documents().size(),
                     corpus.domains().size(), common.out);
}

void cmd_stats(const CommonArgs& common, const StatsArgs& args, std::ostream& out) {
  const Corpus corpus = load_corpus(common.corpus);
  StatsOptions options;
  options.lead_k = args.lead_k;
  options.oracle_budget = args.budget;
  const auto metric = parse_oracle_metric(args.metric);
  if (!metric) throw Error(ErrorKind::usage, fmt::format("unknown oracle metric '{}'", args.metric));
  options.oracle_metric = *metric;
  options.workers = common.workers;
  if (args.lead_k < 1 || args.budget < 1) throw Error(ErrorKind::usage, "--lead-k and --budget must be >= 1");
  std::optional<std::uint64_t> seed;
  if (args.classifier) seed = require_seed(common, "stats --classifier");
  prepare_output_dir(common.out);

  const CorpusStats stats = corpus_stats(corpus, options);
  std::ostringstream csv;
  write_stats_csv(csv, stats);
  write_text(fs::path(common.out) / "stats.csv", csv.str());

  json summary;
  summary["command"] = "stats";
  summary["corpus"] = common.corpus;
  summary["corpus_hash"] = corpus_hash(corpus);
  summary["config"] = {{"lead_k", args.lead_k}, {"oracle_budget", args.budget}, {"oracle_metric", args.metric},
                       {"split", "test"}};
  json roles = json::object();
  for (std::size_t id = 0; id < corpus.domains().size(); ++id) {
    roles[corpus.domains().at(static_cast<int>(id)).name] = role_of(corpus, static_cast<int>(id));
  }
  summary["roles"] = roles;
  if (seed) {
    const auto real = domain_classifier(corpus, *seed);
    ClassifierConfig control_config;
    control_config.permute_labels = true;
    const auto control = domain_classifier(corpus, *seed, control_config);
    summary["classifier"] = {{"seed", *seed},
                             {"domains", real.domains},
                             {"train_documents", real.train_documents},
                             {"test_documents", real.test_documents},
                             {"accuracy", points(real.accuracy)},
                             {"chance", points(real.chance)},
                             {"permuted_label_accuracy", points(control.accuracy)}};
    out << fmt::format("domain classifier accuracy {:.2f}% (chance {:.2f}%, permuted labels {:.2f}%)\n",
                       points(real.accuracy), points(real.chance), points(control.accuracy));
  }
  write_json(fs::path(common.out) / "stats.json", summary);
  out << fmt::format("wrote statistics for {} domains to {}\n", stats.domains.size(), common.out);
}

void cmd_label(const CommonArgs& common, const LabelArgs& args, std::ostream& out) {
  const Corpus corpus = load_corpus(common.corpus);
  const auto metric = parse_oracle_metric(args.metric);
  if (!metric) throw Error(ErrorKind::usage, fmt::format("unknown oracle metric '{}'", args.metric));
  if (args.budget < 1) throw Error(ErrorKind::usage, "--budget must be >= 1");
  prepare_output_dir(common.out);
  guard_bundle_output(common.corpus, common.out);

  const auto docs = corpus.documents();
  std::vector<std::vector<int>> labels(docs.size());
  const std::size_t workers = std::clamp<std::size_t>(common.workers, 1, std::max<std::size_t>(docs.size(), 1));
  std::vector<std::exception_ptr> errors(workers);
  auto run = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < docs.size(); i += workers) labels[i] = greedy_oracle(docs[i], args.budget, *metric).labels;
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run, w);
  run(0);
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::size_t positives = 0;
  for (const auto& l : labels) positives += static_cast<std::size_t>(std::count(l.begin(), l.end(), 1));

  const Corpus labeled = corpus.with_labels(std::move(labels));
  write_bundle(common.out, labeled);
  json summary;
  summary["command"] = "label";
  summary["corpus"] = common.corpus;
  summary["input_hash"] = corpus_hash(corpus);
  summary["corpus_hash"] = corpus_hash(labeled);
  summary["config"] = {{"budget", args.budget}, {"metric", args.metric}};
  summary["documents"] = docs.size();
  summary["selected_sentences"] = positives;
  write_json(fs::path(common.out) / "label.json", summary);
  out << fmt::format("labeled {} documents ({} sentences selected) into {}\n", docs.size(), positives, common.out);
}

void cmd_train(const CommonArgs& common, const TrainArgs& args, std::ostream& out, std::ostream& log) {
  require_seed(common, "train");
  const TrainConfig config = resolve_train_config(common);
  Corpus corpus = load_corpus(common.corpus);
  if (!args.domains.empty()) {
    std::vector<std::string> heldout;
    for (const auto& name : corpus.domains().names()) {
      if (std::find(args.domains.begin(), args.domains.end(), name) == args.domains.end()) heldout.push_back(name);
    }
    corpus = corpus.with_partition({args.domains, heldout});
  }
  const auto features = load_features(config.features_path);
  prepare_output_dir(common.out);

  TrainOptions options;
  options.features = features ? &*features : nullptr;
  options.checkpoint_path = fs::path(common.out) / "model.ckpt";
  options.workers = common.workers;
  options.on_epoch = [&](const EpochRecord& r) { train_progress(log, "", r); };
  const auto result = train(corpus, config, options);
  const auto& report = result.report;

  std::string csv = "epoch,domain,train_loss,valid_loss,valid_rouge1\n";
  for (const auto& e : report.epochs) {
    for (std::size_t i = 0; i < report.source_domains.size(); ++i) {
      auto num = [](double v) { return std::isfinite(v) ? fmt::format("{:.6f}", v) : std::string("NA"); };
      csv += fmt::format("{},{},{},{},{}\n", e.epoch, report.source_domains[i], num(e.train_loss[i]),
                         num(e.valid_loss[i]), num(e.valid_rouge1));
    }
  }
  write_text(fs::path(common.out) / "train_log.csv", csv);

  json summary;
  summary["command"] = "train";
  summary["corpus"] = common.corpus;
  summary["corpus_hash"] = corpus_hash(corpus);
  summary["config"] = config_json(config);
  summary["source_domains"] = report.source_domains;
  summary["epochs"] = epochs_json(report);
  summary["best_epoch"] = report.best_epoch;
  summary["best_valid_rouge1"] = std::isfinite(report.best_valid_rouge1) ? json(report.best_valid_rouge1) : json(nullptr);
  summary["early_stopped"] = report.early_stopped;
  summary["steps"] = report.steps;
  summary["checkpoint"] = "model.ckpt";
  write_json(fs::path(common.out) / "train.json", summary);
  log << fmt::format("trained in {:.1f}s\n", report.wall_seconds);
  out << fmt::format("trained {} model for {} epochs (best epoch {}) into {}\n", to_string(config.strategy),
                     report.epochs.size(), report.best_epoch, common.out);
}

namespace {

json setting_json(const SettingScores& s) {
  json j;
  json domains = json::array();
  for (const auto& d : s.domains) {
    json row = triple_json(d.mean);
    row["domain"] = d.domain;
    row["documents"] = d.documents;
    domains.push_back(row);
  }
  j["domains"] = domains;
  j["average"] = s.empty() ? json(nullptr) : triple_json(s.average);
  return j;
}

void setting_csv(std::string& csv, std::string_view name, const SettingScores& s) {
  if (s.empty()) return;
  for (const auto& d : s.domains) {
    csv += fmt::format("{},{},{},{},{},{}\n", name, d.domain, d.documents, fixed2(points(d.mean.rouge1.f1)),
                       fixed2(points(d.mean.rouge2.f1)), fixed2(points(d.mean.rougeL.f1)));
  }
  std::size_t n = 0;
  for (const auto& d : s.domains) n += d.documents;
  csv += fmt::format("{},avg,{},{},{},{}\n", name, n, fixed2(points(s.average.rouge1.f1)),
                     fixed2(points(s.average.rouge2.f1)), fixed2(points(s.average.rougeL.f1)));
}

std::string histogram_csv(const PositionHistogram& h) {
  std::string csv = "bin_lo,bin_hi,truth_mass,model_mass\n";
  for (std::size_t b = 0; b < h.bins; ++b) {
    const double lo = static_cast<double>(b) / static_cast<double>(h.bins);
    const double hi = static_cast<double>(b + 1) / static_cast<double>(h.bins);
    csv += fmt::format("{:.4f},{:.4f},{:.6f},{:.6f}\n", lo, hi, h.truth[b], h.model[b]);
  }
  return csv;
}

}  // namespace

void cmd_eval(const CommonArgs& common, const EvalArgs& args, std::ostream& out) {
  if (args.checkpoint.empty()) throw Error(ErrorKind::usage, "--checkpoint is required");
  if (args.k < 1) throw Error(ErrorKind::usage, "--k must be >= 1");
  if (args.bins < 2) throw Error(ErrorKind::usage, "--bins must be >= 2");
  const Corpus corpus = load_corpus(common.corpus);
  const Checkpoint model = load_checkpoint(args.checkpoint);
  std::optional<Corpus> cross;
  if (!args.cross_corpus.empty()) cross = load_corpus(args.cross_corpus);
  const auto features = load_features(args.features);
  prepare_output_dir(common.out);

  EvalOptions options;
  options.k = args.k;
  options.workers = common.workers;
  options.features = features ? &*features : nullptr;
  const EvalReport report = evaluate_settings(model, corpus, options, cross ? &*cross : nullptr);

  std::string csv = "setting,domain,documents,rouge1,rouge2,rougeL\n";
  setting_csv(csv, "in_domain", report.in_domain);
  setting_csv(csv, "out_of_domain", report.out_of_domain);
  if (report.cross_dataset) setting_csv(csv, "cross_dataset", *report.cross_dataset);
  write_text(fs::path(common.out) / "eval.csv", csv);

  std::map<std::string, const Document*> by_id;
  for (const auto& d : corpus.documents()) by_id[d.doc_id] = &d;
  std::map<std::string, std::vector<std::vector<std::size_t>>> truth, chosen;
  std::map<std::string, std::vector<std::size_t>> lengths;
  for (const auto& d : report.documents) {
    const auto it = by_id.find(d.doc_id);
    if (it == by_id.end()) continue;  // cross-dataset documents
    const Document& doc = *it->second;
    std::vector<std::size_t> t;
    if (doc.labels) {
      for (std::size_t i = 0; i < doc.labels->size(); ++i) {
        if ((*doc.labels)[i] != 0) t.push_back(i);
      }
    } else {
      t = greedy_oracle(doc).selection_order;
    }
    for (const std::string& key : {std::string("all"), d.domain}) {
      truth[key].push_back(t);
      chosen[key].push_back(d.selected);
      lengths[key].push_back(d.sentences);
    }
  }
  json histograms = json::object();
  for (const auto& [key, t] : truth) {
    const auto h = position_histogram(t, chosen[key], lengths[key], args.bins);
    const std::string file = key == "all" ? "histogram.csv" : fmt::format("histogram_{}.csv", key);
    write_text(fs::path(common.out) / file, histogram_csv(h));
    histograms[key] = file;
  }

  json summary;
  summary["command"] = "eval";
  summary["checkpoint"] = args.checkpoint;
  summary["strategy"] = model.strategy;
  summary["model_config"] = model.metadata;
  summary["corpus"] = common.corpus;
  summary["corpus_hash"] = corpus_hash(corpus);
  if (cross) {
    summary["cross_corpus"] = args.cross_corpus;
    summary["cross_corpus_hash"] = corpus_hash(*cross);
  }
  summary["config"] = {{"k", args.k}, {"bins", args.bins}, {"features", args.features}};
  summary["in_domain"] = setting_json(report.in_domain);
  summary["out_of_domain"] = setting_json(report.out_of_domain);
  summary["cross_dataset"] = report.cross_dataset ? setting_json(*report.cross_dataset) : json(nullptr);
  summary["delta_r"] = report.delta_r ? json(points(*report.delta_r)) : json(nullptr);
  json tags = json::object();
  for (const auto& [domain, ids] : report.tags_used) tags[domain] = std::vector<int>(ids.begin(), ids.end());
  summary["tags_used"] = tags;
  summary["histograms"] = histograms;
  write_json(fs::path(common.out) / "eval.json", summary);

  out << fmt::format("in-domain R-1 {}", report.in_domain.empty() ? "NA" : fixed2(points(report.in_domain.average.rouge1.f1)));
  if (!report.out_of_domain.empty()) out << fmt::format(", out-of-domain R-1 {}", fixed2(points(report.out_of_domain.average.rouge1.f1)));
  if (report.delta_r) out << fmt::format(", delta R {}", fixed2(points(*report.delta_r)));
  if (report.cross_dataset && !report.cross_dataset->empty()) {
    out << fmt::format(", cross-dataset R-1 {}", fixed2(points(report.cross_dataset->average.rouge1.f1)));
  }
  out << '\n';
}

void cmd_matrix(const CommonArgs& common, const MatrixArgs& args, std::ostream& out, std::ostream& log) {
  if (args.k < 1) throw Error(ErrorKind::usage, "--k must be >= 1");
  const Corpus corpus = load_corpus(common.corpus);
  std::vector<Checkpoint> models;
  json provenance = json::array();
  json config = nullptr;
  if (!args.checkpoints.empty()) {
    for (const auto& path : args.checkpoints) {
      if (!fs::exists(path)) throw Error(ErrorKind::input, fmt::format("checkpoint '{}' does not exist", path));
      models.push_back(load_checkpoint(path));
      provenance.push_back(path);
    }
    prepare_output_dir(common.out);
  } else {
    require_seed(common, "matrix (without --checkpoint)");
    const TrainConfig train_config = resolve_train_config(common);
    config = config_json(train_config);
    std::vector<std::string> domains = args.domains.empty() ? corpus.domains().names() : args.domains;
    prepare_output_dir(common.out);
    for (const auto& name : domains) {
      if (!corpus.domains().find(name)) throw Error(ErrorKind::input, fmt::format("unknown domain '{}'", name));
      std::vector<std::string> others;
      for (const auto& n : corpus.domains().names()) {
        if (n != name) others.push_back(n);
      }
      TrainOptions options;
      options.checkpoint_path = fs::path(common.out) / fmt::format("model_{}.ckpt", name);
      options.workers = common.workers;
      options.on_epoch = [&](const EpochRecord& r) { train_progress(log, name + " ", r); };
      models.push_back(train(corpus.with_partition({{name}, others}), train_config, options).checkpoint);
      provenance.push_back(options.checkpoint_path.filename().string());
    }
  }
  EvalOptions options;
  options.k = args.k;
  options.workers = common.workers;
  const EvalMatrix m = cross_domain_matrix(models, corpus, options);

  std::string csv = fmt::format("block,train_domain,{}\n", fmt::join(m.domains, ","));
  for (const auto& [block, grid] : {std::pair{"R", &m.R}, std::pair{"V", &m.V}}) {
    for (std::size_t i = 0; i < m.domains.size(); ++i) {
      std::vector<std::string> cells;
      for (double v : (*grid)[i]) cells.push_back(fixed2(v));
      csv += fmt::format("{},{},{}\n", block, m.domains[i], fmt::join(cells, ","));
    }
  }
  write_text(fs::path(common.out) / "matrix.csv", csv);

  json summary;
  summary["command"] = "matrix";
  summary["corpus"] = common.corpus;
  summary["corpus_hash"] = corpus_hash(corpus);
  summary["seed"] = common.seed ? json(*common.seed) : json(nullptr);
  summary["config"] = config;
  summary["k"] = args.k;
  summary["checkpoints"] = provenance;
  summary["domains"] = m.domains;
  summary["R"] = m.R;
  summary["V"] = m.V;
  write_json(fs::path(common.out) / "matrix.json", summary);

  std::size_t negative = 0, off = 0;
  for (std::size_t i = 0; i < m.domains.size(); ++i) {
    for (std::size_t j = 0; j < m.domains.size(); ++j) {
      if (i == j) continue;
      ++off;
      negative += m.V[i][j] < 0 ? 1 : 0;
    }
  }
  out << fmt::format("{}x{} matrix: {} of {} off-diagonal V entries negative\n", m.domains.size(), m.domains.size(),
                     negative, off);
}

void cmd_sweep(const CommonArgs& common, const SweepArgs& args, std::ostream& out, std::ostream& log) {
  require_seed(common, "sweep-gamma");
  if (args.gammas.empty()) throw Error(ErrorKind::usage, "--gamma needs at least one value");
  if (args.k < 1) throw Error(ErrorKind::usage, "--k must be >= 1");
  TrainConfig config = resolve_train_config(common);
  config.strategy = Strategy::meta;
  for (double g : args.gammas) {
    if (!(g >= 0.0 && g <= 1.0)) throw Error(ErrorKind::usage, fmt::format("gamma {} is outside [0, 1]", g));
  }
  const Corpus corpus = load_corpus(common.corpus);
  std::optional<Corpus> cross;
  if (!args.cross_corpus.empty()) cross = load_corpus(args.cross_corpus);
  const auto features = load_features(config.features_path);
  prepare_output_dir(common.out);

  EvalOptions options;
  options.k = args.k;
  options.workers = common.workers;
  options.features = features ? &*features : nullptr;
  log << fmt::format("sweeping {} gamma values\n", args.gammas.size());
  const auto rows = gamma_sweep(corpus, config, args.gammas, options, cross ? &*cross : nullptr);

  auto cell = [](const std::optional<double>& v) { return v ? fixed2(points(*v)) : std::string("NA"); };
  std::string csv = "gamma,in_domain,out_of_domain,cross_dataset,delta_r1\n";
  json table = json::array();
  for (const auto& r : rows) {
    csv += fmt::format("{},{},{},{},{}\n", r.gamma, fixed2(points(r.in_domain)), cell(r.out_of_domain),
                       cell(r.cross_dataset), cell(r.delta_r));
    auto opt = [](const std::optional<double>& v) { return v ? json(points(*v)) : json(nullptr); };
    table.push_back({{"gamma", r.gamma},
                     {"in_domain", points(r.in_domain)},
                     {"out_of_domain", opt(r.out_of_domain)},
                     {"cross_dataset", opt(r.cross_dataset)},
                     {"delta_r1", opt(r.delta_r)}});
  }
  write_text(fs::path(common.out) / "gamma_sweep.csv", csv);
  json summary;
  summary["command"] = "sweep-gamma";
  summary["corpus"] = common.corpus;
  summary["corpus_hash"] = corpus_hash(corpus);
  if (cross) summary["cross_corpus_hash"] = corpus_hash(*cross);
  summary["config"] = config_json(config);
  summary["k"] = args.k;
  summary["rows"] = table;
  write_json(fs::path(common.out) / "gamma_sweep.json", summary);
  out << fmt::format("wrote {} gamma rows to {}\n", rows.size(), common.out);
}

void cmd_synth(const CommonArgs& common, const SynthArgs& args, std::ostream& out) {
  const std::uint64_t seed = require_seed(common, "synth");
  const SynthSpec spec = resolve_synth_spec(args.spec);
  const Corpus corpus = make_synthetic_corpus(spec, seed);
  prepare_output_dir(common.out);
  write_bundle(common.out, corpus);
  json summary;
  summary["command"] = "synth";
  summary["spec_source"] = args.spec;
  summary["seed"] = seed;
  summary["spec"] = json::parse(synth_spec_json(spec));
  summary["corpus_hash"] = corpus_hash(corpus);
  summary["documents"] = corpus.documents().size();
  write_json(fs::path(common.out) / "synth.json", summary);
  out << fmt::format("generated {} documents in {} domains into {}\n", corpus.documents().size(),
                     corpus.domains().size(), common.out);
}

void cmd_report(const CommonArgs& common, const ReportArgs& args, std::ostream& out) {
  if (args.runs.empty()) throw Error(ErrorKind::usage, "report needs at least one --run NAME=DIR");
  std::vector<std::string> names;
  std::vector<json> evals;
  for (const auto& run : args.runs) {
    const auto eq = run.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == run.size()) {
      throw Error(ErrorKind::usage, fmt::format("--run '{}' is not NAME=DIR", run));
    }
    names.push_back(run.substr(0, eq));
    evals.push_back(read_json(fs::path(run.substr(eq + 1)) / "eval.json"));
  }
  std::optional<Corpus> cross;
  if (!args.cross_corpus.empty()) cross = load_corpus(args.cross_corpus);
  prepare_output_dir(common.out);

  auto r1_cell = [](const json& v) {
    return v.is_null() ? std::string("NA") : fixed2(v.at("rouge1").get<double>());
  };
  std::string csv = fmt::format("setting,domain,{}\n", fmt::join(names, ","));
  json table = json::array();
  for (const char* setting : {"in_domain", "out_of_domain", "cross_dataset"}) {
    std::vector<std::string> domains;
    for (const auto& e : evals) {
      if (e.at(setting).is_null()) continue;
      for (const auto& d : e.at(setting).at("domains")) {
        const auto name = d.at("domain").get<std::string>();
        if (std::find(domains.begin(), domains.end(), name) == domains.end()) domains.push_back(name);
      }
    }
    if (domains.empty()) continue;
    domains.push_back("avg");
    for (const auto& domain : domains) {
      std::vector<std::string> cells;
      json row = {{"setting", setting}, {"domain", domain}};
      for (std::size_t r = 0; r < evals.size(); ++r) {
        const auto& s = evals[r].at(setting);
        json value = nullptr;
        if (!s.is_null()) {
          if (domain == "avg") {
            value = s.at("average");
          } else {
            for (const auto& d : s.at("domains")) {
              if (d.at("domain") == domain) value = d;
            }
          }
        }
        cells.push_back(r1_cell(value));
        row[names[r]] = value.is_null() ? json(nullptr) : value.at("rouge1");
      }
      csv += fmt::format("{},{},{}\n", setting, domain, fmt::join(cells, ","));
      table.push_back(row);
    }
  }
  std::vector<std::string> deltas;
  json delta_row = {{"setting", "delta_r"}, {"domain", ""}};
  for (std::size_t r = 0; r < evals.size(); ++r) {
    const auto& d = evals[r].at("delta_r");
    deltas.push_back(d.is_null() ? "NA" : fixed2(d.get<double>()));
    delta_row[names[r]] = d;
  }
  csv += fmt::format("delta_r,,{}\n", fmt::join(deltas, ","));
  table.push_back(delta_row);
  write_text(fs::path(common.out) / "report.csv", csv);

  json summary;
  summary["command"] = "report";
  summary["runs"] = args.runs;
  summary["table"] = table;
  if (cross) {
    std::string cross_csv = "model,rouge1,rouge2,rougeL\n";
    std::vector<RougeTriple> lead;
    for (const auto& doc : cross->documents()) {
      if (doc.split != Split::test) continue;
      lead.push_back(score_selection(doc, lead_k(doc.sentences.size(), args.lead_k).selection_order));
    }
    if (!lead.empty()) {
      const auto m = mean_triple(lead);
      cross_csv += fmt::format("lead{},{},{},{}\n", args.lead_k, fixed2(points(m.rouge1.f1)),
                               fixed2(points(m.rouge2.f1)), fixed2(points(m.rougeL.f1)));
      summary["cross_lead"] = triple_json(m);
    }
    for (std::size_t r = 0; r < evals.size(); ++r) {
      const auto& s = evals[r].at("cross_dataset");
      if (s.is_null() || s.at("average").is_null()) continue;
      const auto& a = s.at("average");
      cross_csv += fmt::format("{},{},{},{}\n", names[r], fixed2(a.at("rouge1").get<double>()),
                               fixed2(a.at("rouge2").get<double>()), fixed2(a.at("rougeL").get<double>()));
    }
    write_text(fs::path(common.out) / "report_cross.csv", cross_csv);
    summary["cross_corpus_hash"] = corpus_hash(*cross);
    summary["lead_k"] = args.lead_k;
  }
  write_json(fs::path(common.out) / "report.json", summary);
  out << fmt::format("wrote a {}-model report to {}\n", names.size(), common.out);
}

}  // namespace msum::cli
