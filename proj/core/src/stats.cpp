// Copyright 2026 The msum Authors
// SPDX-License-Identifier: Apache-2.0

#include "msum/stats.hpp"

#include <algorithm>
#include <exception>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace msum {
namespace {

struct DocMeasures {
  FragmentStats fragments;
  RougeTriple lead;
  RougeTriple oracle;
};

DocMeasures measure(const Document& doc, const StatsOptions& options) {
  std::vector<std::string> tokens;
  for (const auto& s : doc.sentences) tokens.insert(tokens.end(), s.tokens.begin(), s.tokens.end());
  DocMeasures m;
  m.fragments = extractive_fragments(tokens, doc.flat_reference());
  const auto lead = lead_k(doc.sentences.size(), options.lead_k);
  m.lead = score_selection(doc, lead.selection_order);
  m.oracle = ext_oracle_eval(doc, options.oracle_budget, options.oracle_metric);
  return m;
}

void add(RougeTriple& dst, const RougeTriple& s, double w) {
  for (auto [d, x] : {std::pair{&dst.rouge1, &s.rouge1}, std::pair{&dst.rouge2, &s.rouge2},
                      std::pair{&dst.rougeL, &s.rougeL}}) {
    d->precision += w * x->precision;
    d->recall += w * x->recall;
    d->f1 += w * x->f1;
  }
}

std::optional<StatsRow> average(std::string name, const std::vector<const StatsRow*>& rows) {
  std::vector<const StatsRow*> measured;
  for (const auto* r : rows) {
    if (r->coverage) measured.push_back(r);
  }
  if (measured.empty()) return std::nullopt;
  StatsRow out;
  out.name = std::move(name);
  const double w = 1.0 / static_cast<double>(measured.size());
  double cov = 0, den = 0, comp = 0;
  RougeTriple lead, oracle;
  for (const auto* r : measured) {
    out.n_train += w * r->n_train;
    out.n_valid += w * r->n_valid;
    out.n_test += w * r->n_test;
    cov += w * *r->coverage;
    den += w * *r->density;
    comp += w * *r->compression;
    add(lead, *r->lead, w);
    add(oracle, *r->oracle, w);
  }
  out.coverage = cov;
  out.density = den;
  out.compression = comp;
  out.lead = lead;
  out.oracle = oracle;
  return out;
}

}  // namespace

CorpusStats corpus_stats(const Corpus& corpus, const StatsOptions& options) {
  CorpusStats stats;
  const auto& reg = corpus.domains();
  for (std::size_t id = 0; id < reg.size(); ++id) {
    const int d = static_cast<int>(id);
    StatsRow row;
    row.name = reg.at(d).name;
    const auto counts = corpus.counts(d);
    row.n_train = static_cast<double>(counts.train);
    row.n_valid = static_cast<double>(counts.valid);
    row.n_test = static_cast<double>(counts.test);

    const auto docs = corpus.select(d, Split::test);
    if (!docs.empty()) {
      std::vector<DocMeasures> per_doc(docs.size());
      const std::size_t workers = std::clamp<std::size_t>(options.workers, 1, docs.size());
      std::vector<std::exception_ptr> errors(workers);
      auto run = [&](std::size_t w) {
        try {
          for (std::size_t i = w; i < docs.size(); i += workers) per_doc[i] = measure(*docs[i], options);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      };
      if (workers == 1) {
        run(0);
      } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      const double w = 1.0 / static_cast<double>(docs.size());
      double cov = 0, den = 0, comp = 0;
      RougeTriple lead, oracle;
      for (const auto& m : per_doc) {
        cov += w * m.fragments.coverage;
        den += w * m.fragments.density;
        comp += w * m.fragments.compression;
        add(lead, m.lead, w);
        add(oracle, m.oracle, w);
      }
      row.coverage = cov;
      row.density = den;
      row.compression = comp;
      row.lead = lead;
      row.oracle = oracle;
    }
    stats.domains.push_back(std::move(row));
  }

  std::vector<const StatsRow*> all, source, heldout;
  for (std::size_t id = 0; id < stats.domains.size(); ++id) {
    all.push_back(&stats.domains[id]);
    if (corpus.is_source(static_cast<int>(id))) source.push_back(&stats.domains[id]);
    if (corpus.is_heldout(static_cast<int>(id))) heldout.push_back(&stats.domains[id]);
  }
  for (auto& [name, rows] : {std::pair{"avg", &all}, std::pair{"avg_source", &source}, std::pair{"avg_heldout", &heldout}}) {
    if (auto row = average(name, *rows)) stats.averages.push_back(std::move(*row));
  }
  return stats;
}

void write_stats_csv(std::ostream& out, const CorpusStats& stats) {
  out << kStatsHeader << '\n';
  auto write_row = [&](const StatsRow& r, bool average_row) {
    if (average_row) {
      out << fmt::format("{},{:.2f},{:.2f},{:.2f}", r.name, r.n_train, r.n_valid, r.n_test);
    } else {
      out << fmt::format("{},{:.0f},{:.0f},{:.0f}", r.name, r.n_train, r.n_valid, r.n_test);
    }
    if (!r.coverage) {
      out << ",NA,NA,NA,NA,NA,NA,NA,NA,NA\n";
      return;
    }
    out << fmt::format(",{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f},{:.2f}\n", *r.coverage,
                       *r.density, *r.compression, 100.0 * r.lead->rouge1.f1, 100.0 * r.lead->rouge2.f1,
                       100.0 * r.lead->rougeL.f1, 100.0 * r.oracle->rouge1.f1, 100.0 * r.oracle->rouge2.f1,
                       100.0 * r.oracle->rougeL.f1);
  };
  for (const auto& r : stats.domains) write_row(r, false);
  for (const auto& r : stats.averages) write_row(r, true);
}

}  // namespace msum
