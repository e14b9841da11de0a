#pragma once

// Batch commands over line-delimited records. Each command has a stream form
// (run_*) and a path form (cmd_*) returning the process exit status:
// 0 success, 1 schema or I/O error, 2 verification mismatch.
//
// Records that fail schema checks are logged with their line number and
// skipped; the run still finishes but exits 1. Records whose graphs fail to
// parse or score, and records with no answer-bearing document or more than
// k_max of them, are skipped and counted without affecting the exit status.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "amrcc/config.hpp"
#include "amrcc/corpus.hpp"
#include "amrcc/distill.hpp"
#include "amrcc/entropy.hpp"
#include "amrcc/error.hpp"
#include "amrcc/eval.hpp"
#include "amrcc/penman.hpp"
#include "amrcc/stats.hpp"
#include "amrcc/tables.hpp"
#include "amrcc/tfidf.hpp"

namespace amrcc::pipeline {

using nlohmann::json;

enum exit_status : int { exit_ok = 0, exit_schema = 1, exit_mismatch = 2 };

struct RunCounters {
  std::atomic<std::size_t> records{0};
  std::atomic<std::size_t> emitted{0};
  std::atomic<std::size_t> schema_errors{0};
  std::atomic<std::size_t> record_failures{0};
  std::atomic<std::size_t> skipped_k{0};
};

struct RunSummary {
  std::size_t records = 0;
  std::size_t emitted = 0;
  std::size_t schema_errors = 0;
  std::size_t record_failures = 0;
  std::size_t skipped_k = 0;

  static RunSummary of(const RunCounters& c) {
    return {c.records.load(), c.emitted.load(), c.schema_errors.load(), c.record_failures.load(),
            c.skipped_k.load()};
  }
  int exit_code() const { return schema_errors > 0 ? exit_schema : exit_ok; }
  std::string line() const {
    return "summary: records=" + std::to_string(records) + " emitted=" + std::to_string(emitted) +
           " schema_errors=" + std::to_string(schema_errors) + " failed=" + std::to_string(record_failures) +
           " skipped_k=" + std::to_string(skipped_k);
  }
};

// Runs fn(i) for i in [0, n) on up to `workers` threads and hands the results
// to sink in index order.
template <class Fn, class Sink>
void ordered_map(std::size_t n, std::size_t workers, Fn&& fn, Sink&& sink) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    sink(i, std::move(*slots[i]));
  }
}

struct Line {
  std::size_t number = 0;
  std::string text;
};

// Answer-bearing documents within range, or nullopt when the record is skipped.
inline std::optional<eval::QaInstance> prepare(const eval::QaInstance& raw, const PipelineConfig& cfg) {
  auto inst = eval::filter_hasanswer(raw);
  if (!eval::k_in_range(inst, cfg.k_max)) return std::nullopt;
  return inst;
}

struct DocumentAnalysis {
  std::vector<penman::AmrGraph> graphs;
  std::vector<entropy::ConceptEntropy> concepts;
  std::vector<entropy::Diagnostic> unmatched;
  stats::Selection selection;
};

inline DocumentAnalysis analyze_document(const eval::Document& doc, const PipelineConfig& cfg) {
  DocumentAnalysis a;
  for (std::size_t s = 0; s < doc.graphs.size(); ++s) {
    a.graphs.push_back(penman::parse_penman(doc.graphs[s].penman, s));
    auto scores = entropy::score_graph_concepts(a.graphs.back(), doc.graphs[s].tokens, cfg.boundary_prefix);
    for (auto& c : scores.concepts) a.concepts.push_back(std::move(c));
    for (auto& d : scores.unmatched) a.unmatched.push_back(std::move(d));
  }
  if (a.concepts.empty()) {
    a.selection.degenerate = true;
  } else {
    a.selection = stats::select_significant(a.concepts, cfg.selection());
  }
  return a;
}

inline json compress_record(const eval::QaInstance& inst, const PipelineConfig& cfg) {
  json docs = json::array();
  json diagnostics = json::array();
  std::vector<distill::CompressedDocument> compressed;
  std::vector<std::string> sources;
  for (std::size_t d = 0; d < inst.documents.size(); ++d) {
    const auto& doc = inst.documents[d];
    const auto a = analyze_document(doc, cfg);
    auto c = distill::compress_document(inst.query_id + "#" + std::to_string(d), a.graphs, a.selection.results,
                                        doc.text);
    docs.push_back({{"text", c.text},
                    {"source_tokens", text::count_tokens(doc.text)},
                    {"compressed_tokens", text::count_tokens(c.text)},
                    {"concepts", a.concepts.size()},
                    {"selected", a.selection.selected_count()},
                    {"unmatched_nodes", a.unmatched.size()},
                    {"degenerate", a.selection.degenerate},
                    {"truncated", c.truncated}});
    for (const auto& u : a.unmatched)
      diagnostics.push_back({{"document", d}, {"sentence", u.sentence_index}, {"variable", u.variable},
                             {"label", u.label}, {"reason", "unmatched node"}});
    sources.push_back(doc.text);
    compressed.push_back(std::move(c));
  }
  const auto ctx = distill::compress_context(std::move(compressed));
  return {{"schema_version", corpus::kSchemaVersion},
          {"query_id", inst.query_id},
          {"k", inst.k},
          {"documents", std::move(docs)},
          {"context", ctx.text},
          {"tau", eval::compression_ratio(text::join(sources, "\n"), ctx.text)},
          {"diagnostics", std::move(diagnostics)}};
}

// One row per scored concept; t and p are null for degenerate documents.
inline std::string score_record(const eval::QaInstance& inst, const PipelineConfig& cfg) {
  std::string out;
  for (std::size_t d = 0; d < inst.documents.size(); ++d) {
    const auto a = analyze_document(inst.documents[d], cfg);
    for (std::size_t i = 0; i < a.concepts.size(); ++i) {
      const auto& c = a.concepts[i];
      const auto& r = a.selection.results[i];
      json row{{"query_id", inst.query_id},
               {"document", d},
               {"sentence", c.sentence_index},
               {"variable", c.variable ? json(*c.variable) : json(nullptr)},
               {"label", c.concept_label},
               {"entropy", c.entropy},
               {"subwords", c.subword_count},
               {"t", a.selection.degenerate ? json(nullptr) : json(r.t_stat)},
               {"p", a.selection.degenerate ? json(nullptr) : json(r.p_value)},
               {"selected", r.selected},
               {"degenerate", a.selection.degenerate}};
      out += row.dump() + "\n";
    }
  }
  return out;
}

inline json tfidf_record(const eval::QaInstance& inst, const tfidf::IdfTable& idf, const PipelineConfig& cfg) {
  json docs = json::array();
  std::vector<std::string> sources, kept;
  for (const auto& doc : inst.documents) {
    auto c = tfidf::compress_tfidf(doc.text, idf, cfg.keep_fraction);
    docs.push_back({{"text", c},
                    {"source_tokens", text::count_tokens(doc.text)},
                    {"compressed_tokens", text::count_tokens(c)}});
    sources.push_back(doc.text);
    kept.push_back(std::move(c));
  }
  const std::string context = text::join(kept, "\n");
  return {{"schema_version", corpus::kSchemaVersion},
          {"query_id", inst.query_id},
          {"k", inst.k},
          {"documents", std::move(docs)},
          {"context", context},
          {"tau", eval::compression_ratio(text::join(sources, "\n"), context)}};
}

namespace detail {

inline std::string log_line(std::size_t lineno, const std::string& kind, const std::string& what) {
  return "line " + std::to_string(lineno) + ": " + kind + ": " + what + "\n";
}

// Parses, filters and renders one line; failures become log text.
template <class Render>
std::pair<std::string, std::string> handle_line(const Line& line, const PipelineConfig& cfg,
                                                corpus::graphs_policy graphs, RunCounters& counters,
                                                Render&& render) {
  ++counters.records;
  std::optional<eval::QaInstance> inst;
  try {
    inst = prepare(corpus::parse_record_line(line.text, graphs), cfg);
  } catch (const error& e) {
    ++counters.schema_errors;
    return {"", log_line(line.number, "schema error", e.what())};
  }
  if (!inst) {
    ++counters.skipped_k;
    return {"", ""};
  }
  try {
    std::string out = render(*inst);
    ++counters.emitted;
    return {std::move(out), ""};
  } catch (const error& e) {
    ++counters.record_failures;
    return {"", log_line(line.number, "skipped " + inst->query_id, e.what())};
  }
}

template <class Render>
RunSummary run_lines(std::istream& in, std::ostream& out, std::ostream& log, const PipelineConfig& cfg,
                     corpus::graphs_policy graphs, Render&& render) {
  RunCounters counters;
  const std::size_t window = 64 * std::max<std::size_t>(cfg.workers, 1);
  std::vector<Line> batch;
  auto flush = [&] {
    ordered_map(
        batch.size(), cfg.workers,
        [&](std::size_t i) { return handle_line(batch[i], cfg, graphs, counters, render); },
        [&](std::size_t, std::pair<std::string, std::string> r) {
          out << r.first;
          log << r.second;
        });
    batch.clear();
  };
  std::size_t lineno = 0;
  std::string text;
  while (std::getline(in, text)) {
    ++lineno;
    if (corpus::is_blank(text)) continue;
    batch.push_back({lineno, std::move(text)});
    if (batch.size() == window) flush();
  }
  flush();
  out.flush();
  const auto summary = RunSummary::of(counters);
  log << summary.line() << "\n";
  return summary;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw error(errc::io, "cannot open " + p.string());
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw error(errc::io, "cannot write " + p.string());
  return out;
}

template <class Run>
int with_files(const std::filesystem::path& input, const std::filesystem::path& output, std::ostream& log,
               Run&& run) {
  try {
    auto in = open_in(input);
    auto out = open_out(output);
    const RunSummary s = run(in, out);
    out.close();
    if (!out) throw error(errc::io, "failed writing " + output.string());
    return s.exit_code();
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return exit_schema;
  }
}

}  // namespace detail

inline RunSummary run_compress(std::istream& in, std::ostream& out, std::ostream& log, const PipelineConfig& cfg) {
  return detail::run_lines(in, out, log, cfg, corpus::graphs_policy::required,
                           [&](const eval::QaInstance& inst) { return compress_record(inst, cfg).dump() + "\n"; });
}

inline RunSummary run_score(std::istream& in, std::ostream& out, std::ostream& log, const PipelineConfig& cfg) {
  return detail::run_lines(in, out, log, cfg, corpus::graphs_policy::required,
                           [&](const eval::QaInstance& inst) { return score_record(inst, cfg); });
}

// IDF statistics come from every answer-bearing, in-range document of the
// input, so the whole file is read before any record is compressed.
inline RunSummary run_tfidf(std::istream& in, std::ostream& out, std::ostream& log, const PipelineConfig& cfg) {
  std::vector<Line> lines;
  std::string text;
  std::size_t lineno = 0;
  while (std::getline(in, text)) {
    ++lineno;
    if (!corpus::is_blank(text)) lines.push_back({lineno, std::move(text)});
  }

  std::vector<std::string> all_docs;
  for (const auto& l : lines) {
    try {
      if (auto inst = prepare(corpus::parse_record_line(l.text, corpus::graphs_policy::optional), cfg))
        for (const auto& d : inst->documents) all_docs.push_back(d.text);
    } catch (const error&) {
      // reported in the main pass
    }
  }
  const auto idf = all_docs.empty() ? tfidf::IdfTable(1, {}) : tfidf::build_idf(all_docs);

  RunCounters counters;
  ordered_map(
      lines.size(), cfg.workers,
      [&](std::size_t i) {
        return detail::handle_line(lines[i], cfg, corpus::graphs_policy::optional, counters,
                                   [&](const eval::QaInstance& inst) { return tfidf_record(inst, idf, cfg).dump() + "\n"; });
      },
      [&](std::size_t, std::pair<std::string, std::string> r) {
        out << r.first;
        log << r.second;
      });
  out.flush();
  const auto summary = RunSummary::of(counters);
  log << summary.line() << "\n";
  return summary;
}

inline int cmd_compress(const std::filesystem::path& input, const std::filesystem::path& output,
                        const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  return detail::with_files(input, output, log,
                            [&](std::istream& in, std::ostream& out) { return run_compress(in, out, log, cfg); });
}

inline int cmd_score(const std::filesystem::path& input, const std::filesystem::path& output,
                     const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  return detail::with_files(input, output, log,
                            [&](std::istream& in, std::ostream& out) { return run_score(in, out, log, cfg); });
}

inline int cmd_tfidf(const std::filesystem::path& input, const std::filesystem::path& output,
                     const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  return detail::with_files(input, output, log,
                            [&](std::istream& in, std::ostream& out) { return run_tfidf(in, out, log, cfg); });
}

// ---- eval -------------------------------------------------------------------

struct EvalReport {
  std::vector<eval::AccuracyTable> tables;
  std::vector<std::string> methods;  // first-appearance order
  std::vector<eval::AucReport> aucs;
  std::vector<eval::AucReport> deltas;  // method minus Vanilla
  bool standard_in_range = false;
  bool long_in_range = false;
};

inline EvalReport evaluate(const std::vector<eval::QaInstance>& gold, const std::vector<eval::PredictionRecord>& preds,
                           const PipelineConfig& cfg) {
  EvalReport r;
  std::vector<eval::QaInstance> filtered;
  filtered.reserve(gold.size());
  for (const auto& g : gold) filtered.push_back(eval::filter_hasanswer(g));
  r.tables = eval::accuracy_by_k(preds, filtered, cfg.match_policy, cfg.k_max);
  for (const auto& t : r.tables)
    if (std::find(r.methods.begin(), r.methods.end(), t.method_id) == r.methods.end())
      r.methods.push_back(t.method_id);

  const int k_max = static_cast<int>(cfg.k_max);
  r.standard_in_range = cfg.interval_standard.hi <= k_max;
  r.long_in_range = cfg.interval_long.hi <= k_max;
  if (!r.standard_in_range && !r.long_in_range) return r;
  // An interval beyond k_max is reported as zero area and flagged out of range.
  auto clip = [&](eval::Interval iv, bool ok) { return ok ? iv : eval::Interval{1, 1}; };
  const auto s = clip(cfg.interval_standard, r.standard_in_range);
  const auto l = clip(cfg.interval_long, r.long_in_range);
  for (const auto& m : r.methods) r.aucs.push_back(eval::auc_report(m, r.tables, s, l));
  const auto vanilla = std::find_if(r.aucs.begin(), r.aucs.end(), [](const auto& a) { return a.method_id == "Vanilla"; });
  if (vanilla != r.aucs.end())
    for (const auto& a : r.aucs)
      if (a.method_id != "Vanilla") r.deltas.push_back(eval::delta_rows(a, *vanilla));
  return r;
}

namespace detail {

inline std::string fixed(double v, int places = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(places) << v;
  return s.str();
}

inline void print_auc_block(std::ostream& os, const std::vector<eval::AucReport>& reports, const EvalReport& r,
                            const std::string& title) {
  if (reports.empty()) return;
  os << "\n" << title << "\n";
  for (const auto& a : reports) {
    for (const auto& [model, pair] : a.per_model) {
      os << "  " << std::left << std::setw(24) << a.method_id << std::setw(28) << model;
      if (r.standard_in_range) os << " I_s=" << fixed(pair.standard);
      if (r.long_in_range) os << " I_l=" << fixed(pair.long_context);
      os << "\n";
    }
    if (a.sigma_standard) {
      os << "  " << std::left << std::setw(24) << a.method_id << std::setw(28) << "sigma";
      if (r.standard_in_range) os << " I_s=" << fixed(*a.sigma_standard);
      if (r.long_in_range) os << " I_l=" << fixed(*a.sigma_long);
      os << "\n";
    } else {
      os << "  " << a.method_id << ": sigma omitted, fewer than two models\n";
    }
  }
}

inline json auc_json(const eval::AucReport& a, const EvalReport& r, const std::string& type) {
  json models = json::array();
  for (const auto& [model, pair] : a.per_model)
    models.push_back({{"model_id", model},
                      {"auc_standard", r.standard_in_range ? json(pair.standard) : json(nullptr)},
                      {"auc_long", r.long_in_range ? json(pair.long_context) : json(nullptr)}});
  auto opt = [](const std::optional<double>& v, bool ok) { return v && ok ? json(*v) : json(nullptr); };
  return {{"type", type},
          {"method_id", a.method_id},
          {"models", std::move(models)},
          {"sigma_standard", opt(a.sigma_standard, r.standard_in_range)},
          {"sigma_long", opt(a.sigma_long, r.long_in_range)}};
}

}  // namespace detail

inline void print_report(std::ostream& os, const EvalReport& r, const PipelineConfig& cfg) {
  os << "Accuracy (%) by K\n";
  os << "  " << std::left << std::setw(24) << "method" << std::setw(28) << "model";
  for (std::size_t k = 1; k <= cfg.k_max; ++k) os << std::right << std::setw(8) << ("K=" + std::to_string(k));
  os << "\n";
  for (const auto& t : r.tables) {
    os << "  " << std::left << std::setw(24) << t.method_id << std::setw(28) << t.model_id;
    for (const auto& [k, v] : t.acc_by_k) os << std::right << std::setw(8) << detail::fixed(v);
    os << "\n";
  }
  if (!r.standard_in_range) os << "\nI_s beyond k_max; not reported\n";
  if (!r.long_in_range) os << "\nI_l beyond k_max; not reported\n";
  detail::print_auc_block(os, r.aucs, r, "AUC");
  detail::print_auc_block(os, r.deltas, r, "Delta vs Vanilla");
}

inline std::vector<json> report_records(const EvalReport& r) {
  std::vector<json> out;
  for (const auto& t : r.tables) {
    json acc = json::object();
    for (const auto& [k, v] : t.acc_by_k) acc[std::to_string(k)] = v;
    json n = json::object();
    for (const auto& [k, v] : t.instances) n[std::to_string(k)] = v;
    out.push_back({{"type", "accuracy"}, {"model_id", t.model_id}, {"method_id", t.method_id},
                   {"acc_by_k", std::move(acc)}, {"instances", std::move(n)}});
  }
  for (const auto& a : r.aucs) out.push_back(detail::auc_json(a, r, "auc"));
  for (const auto& a : r.deltas) out.push_back(detail::auc_json(a, r, "delta"));
  return out;
}

// Gold is a corpus file (graphs optional); predictions are one record per line.
inline int cmd_eval(const std::filesystem::path& gold_path, const std::filesystem::path& predictions_path,
                    const std::optional<std::filesystem::path>& output_path, const PipelineConfig& cfg,
                    std::ostream& report = std::cout, std::ostream& log = std::cerr) {
  try {
    std::vector<eval::QaInstance> gold;
    std::vector<eval::PredictionRecord> preds;
    bool schema_ok = true;
    auto read = [&](const std::filesystem::path& p, auto&& parse) {
      auto in = detail::open_in(p);
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        if (corpus::is_blank(line)) continue;
        try {
          parse(line);
        } catch (const error& e) {
          schema_ok = false;
          log << p.string() << ":" << lineno << ": schema error: " << e.what() << "\n";
        }
      }
    };
    read(gold_path, [&](const std::string& l) {
      gold.push_back(corpus::parse_record_line(l, corpus::graphs_policy::optional));
    });
    read(predictions_path, [&](const std::string& l) { preds.push_back(corpus::parse_prediction(l)); });
    if (!schema_ok) return exit_schema;

    const auto r = evaluate(gold, preds, cfg);
    print_report(report, r, cfg);
    if (output_path) {
      auto out = detail::open_out(*output_path);
      for (const auto& rec : report_records(r)) out << rec.dump() << "\n";
    }
    return exit_ok;
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return exit_schema;
  }
}

// ---- verify-tables ----------------------------------------------------------

inline int cmd_verify_tables(const std::filesystem::path& fixture_root, std::ostream& report = std::cout,
                             std::ostream& log = std::cerr) {
  try {
    bool all_ok = true;
    for (const auto& dir : tables::dataset_dirs(fixture_root)) {
      const auto r = tables::verify_dataset(dir);
      report << dir.filename().string() << ": " << r.checks.size() - r.failures() << "/" << r.checks.size()
             << " cells match\n";
      for (const auto& c : r.checks)
        if (!c.pass)
          report << "  MISMATCH " << std::filesystem::path(c.table).filename().string() << " " << c.method << " "
                 << c.interval << " " << c.column << ": expected " << detail::fixed(c.expected) << ", got "
                 << detail::fixed(c.actual, 4) << "\n";
      all_ok = all_ok && r.ok();
    }
    return all_ok ? exit_ok : exit_mismatch;
  } catch (const error& e) {
    log << "error: " << e.what() << "\n";
    return exit_schema;
  }
}

}  // namespace amrcc::pipeline
