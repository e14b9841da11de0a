#pragma once

// QA evaluation: answer filtering, prompt construction, exact match,
// accuracy-by-K, trapezoidal AUC, cross-model spread and compression ratio.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "amrcc/entropy.hpp"
#include "amrcc/error.hpp"
#include "amrcc/text.hpp"

namespace amrcc::eval {

struct GraphRecord {
  std::string penman;
  std::vector<entropy::ScoredToken> tokens;
};

struct Document {
  std::string text;
  bool hasanswer = false;
  std::vector<GraphRecord> graphs;
};

struct QaInstance {
  std::string query_id;
  std::string query;
  std::vector<std::string> answers;
  std::vector<Document> documents;
  std::size_t k = 0;
};

struct PredictionRecord {
  std::string query_id;
  std::string model_id;
  std::string method_id;
  std::string generated;
};

enum class match_policy { substring, strict };

struct Interval {
  int lo = 1;
  int hi = 10;

  bool operator==(const Interval&) const = default;
};

inline constexpr Interval kStandardInterval{1, 10};
inline constexpr Interval kLongInterval{6, 10};
inline constexpr std::size_t kDefaultKMax = 10;

// Keeps answer-bearing documents only. Callers drop instances whose k ends up
// 0 or above k_max.
inline QaInstance filter_hasanswer(QaInstance instance) {
  std::erase_if(instance.documents, [](const Document& d) { return !d.hasanswer; });
  instance.k = instance.documents.size();
  return instance;
}

inline bool k_in_range(const QaInstance& instance, std::size_t k_max) {
  return instance.k >= 1 && instance.k <= k_max;
}

inline std::string build_prompt(std::string_view compressed, std::string_view query) {
  std::string out = "Refer to the following facts to answer the question. Facts: ";
  out += compressed;
  out += ". Question: ";
  out += query;
  return out;
}

// Lowercase, collapse runs of whitespace, strip punctuation at both ends.
inline std::string normalize_answer(std::string_view s) {
  std::string collapsed;
  for (auto tok : text::split_whitespace(s)) {
    if (!collapsed.empty()) collapsed += ' ';
    collapsed += text::to_lower(tok);
  }
  return std::string(text::trim_space(text::trim_punct(collapsed)));
}

inline bool exact_match(std::string_view generated, const std::vector<std::string>& answers,
                        match_policy policy = match_policy::substring) {
  if (answers.empty()) throw error(errc::domain_error, "no gold answers");
  const std::string gen = normalize_answer(generated);
  for (const auto& a : answers) {
    const std::string ans = normalize_answer(a);
    if (ans.empty()) continue;
    if (policy == match_policy::strict ? gen == ans : gen.find(ans) != std::string::npos) return true;
  }
  return false;
}

struct AccuracyTable {
  std::string model_id;
  std::string method_id;
  std::map<int, double> acc_by_k;        // percent
  std::map<int, std::size_t> instances;  // bucket sizes behind each entry
};

// One table per (model, method) in first-appearance order. Predictions whose
// instance has k outside [1, k_max] are ignored.
inline std::vector<AccuracyTable> accuracy_by_k(const std::vector<PredictionRecord>& preds,
                                                const std::vector<QaInstance>& gold,
                                                match_policy policy = match_policy::substring,
                                                std::size_t k_max = kDefaultKMax) {
  std::unordered_map<std::string, const QaInstance*> by_id;
  for (const auto& g : gold) by_id.emplace(g.query_id, &g);

  struct Tally {
    std::map<int, std::size_t> total, hits;
  };
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, Tally> tallies;
  std::map<std::tuple<std::string, std::string, std::string>, bool> seen;

  for (const auto& p : preds) {
    const auto it = by_id.find(p.query_id);
    if (it == by_id.end()) throw error(errc::unresolved_query, p.query_id);
    if (!seen.emplace(std::tuple(p.query_id, p.model_id, p.method_id), true).second)
      throw error(errc::duplicate_prediction, p.query_id + " / " + p.model_id + " / " + p.method_id);
    const QaInstance& inst = *it->second;
    if (!k_in_range(inst, k_max)) continue;
    auto key = std::pair(p.model_id, p.method_id);
    auto [slot, fresh] = tallies.try_emplace(key);
    if (fresh) keys.push_back(key);
    const int k = static_cast<int>(inst.k);
    ++slot->second.total[k];
    if (exact_match(p.generated, inst.answers, policy)) ++slot->second.hits[k];
  }

  std::vector<AccuracyTable> out;
  for (const auto& key : keys) {
    const Tally& t = tallies.at(key);
    AccuracyTable table{key.first, key.second, {}, {}};
    for (int k = 1; k <= static_cast<int>(k_max); ++k) {
      const auto n = t.total.find(k);
      if (n == t.total.end())
        throw error(errc::missing_bucket,
                    "k=" + std::to_string(k) + " for model " + key.first + ", method " + key.second);
      const auto h = t.hits.find(k);
      const double hits = h == t.hits.end() ? 0.0 : static_cast<double>(h->second);
      table.acc_by_k[k] = 100.0 * hits / static_cast<double>(n->second);
      table.instances[k] = n->second;
    }
    out.push_back(std::move(table));
  }
  return out;
}

// Trapezoidal area under acc(k) with unit spacing over [lo, hi].
inline double auc(const std::map<int, double>& acc_by_k, Interval interval) {
  if (interval.lo > interval.hi) throw error(errc::domain_error, "interval lo > hi");
  auto at = [&](int k) {
    const auto it = acc_by_k.find(k);
    if (it == acc_by_k.end()) throw error(errc::missing_bucket, "k=" + std::to_string(k));
    return it->second;
  };
  double area = 0.0;
  double prev = at(interval.lo);
  for (int k = interval.lo + 1; k <= interval.hi; ++k) {
    const double cur = at(k);
    area += 0.5 * (prev + cur);
    prev = cur;
  }
  return area;
}

inline double auc(const std::vector<double>& acc_from_k1, Interval interval) {
  std::map<int, double> m;
  for (std::size_t i = 0; i < acc_from_k1.size(); ++i) m[static_cast<int>(i) + 1] = acc_from_k1[i];
  return auc(m, interval);
}

// Sample standard deviation (n - 1 denominator).
inline double sigma_across_models(const std::vector<double>& aucs) {
  if (aucs.size() < 2) throw error(errc::too_few_models, std::to_string(aucs.size()) + " value(s)");
  double mean = 0.0;
  for (double a : aucs) mean += a;
  mean /= static_cast<double>(aucs.size());
  double ss = 0.0;
  for (double a : aucs) ss += (a - mean) * (a - mean);
  return std::sqrt(ss / static_cast<double>(aucs.size() - 1));
}

struct AucPair {
  double standard = 0.0;
  double long_context = 0.0;
};

struct AucReport {
  std::string method_id;
  std::vector<std::pair<std::string, AucPair>> per_model;  // model order as given
  double mean_standard = 0.0;
  double mean_long = 0.0;
  std::optional<double> sigma_standard;  // absent with fewer than two models
  std::optional<double> sigma_long;
};

inline AucReport finish_report(AucReport r) {
  std::vector<double> s, l;
  for (const auto& [model, pair] : r.per_model) {
    s.push_back(pair.standard);
    l.push_back(pair.long_context);
  }
  r.mean_standard = r.mean_long = 0.0;
  if (!s.empty()) {
    for (double v : s) r.mean_standard += v;
    for (double v : l) r.mean_long += v;
    r.mean_standard /= static_cast<double>(s.size());
    r.mean_long /= static_cast<double>(l.size());
  }
  r.sigma_standard.reset();
  r.sigma_long.reset();
  if (s.size() >= 2) {
    r.sigma_standard = sigma_across_models(s);
    r.sigma_long = sigma_across_models(l);
  }
  return r;
}

// AUC summary of every table belonging to one method.
inline AucReport auc_report(const std::string& method_id, const std::vector<AccuracyTable>& tables,
                            Interval standard = kStandardInterval, Interval long_context = kLongInterval) {
  AucReport r;
  r.method_id = method_id;
  for (const auto& t : tables) {
    if (t.method_id != method_id) continue;
    r.per_model.emplace_back(t.model_id, AucPair{auc(t.acc_by_k, standard), auc(t.acc_by_k, long_context)});
  }
  return finish_report(std::move(r));
}

inline AccuracyTable delta_rows(const AccuracyTable& ours, const AccuracyTable& vanilla) {
  if (ours.acc_by_k.size() != vanilla.acc_by_k.size())
    throw error(errc::shape_mismatch, "accuracy tables cover different K ranges");
  AccuracyTable out{ours.model_id, ours.method_id + " - " + vanilla.method_id, {}, {}};
  for (const auto& [k, v] : ours.acc_by_k) {
    const auto it = vanilla.acc_by_k.find(k);
    if (it == vanilla.acc_by_k.end()) throw error(errc::shape_mismatch, "k=" + std::to_string(k));
    out.acc_by_k[k] = v - it->second;
  }
  return out;
}

// Per-model differences; the spread is recomputed over the differences.
inline AucReport delta_rows(const AucReport& ours, const AucReport& vanilla) {
  if (ours.per_model.size() != vanilla.per_model.size())
    throw error(errc::shape_mismatch, "reports cover different model sets");
  AucReport out;
  out.method_id = ours.method_id + " - " + vanilla.method_id;
  for (std::size_t i = 0; i < ours.per_model.size(); ++i) {
    const auto& [model, a] = ours.per_model[i];
    const auto& [vmodel, b] = vanilla.per_model[i];
    if (model != vmodel) throw error(errc::shape_mismatch, model + " vs " + vmodel);
    out.per_model.emplace_back(model, AucPair{a.standard - b.standard, a.long_context - b.long_context});
  }
  return finish_report(std::move(out));
}

// Whitespace-token ratio compressed / original.
inline double compression_ratio(std::string_view original, std::string_view compressed) {
  const std::size_t n = text::count_tokens(original);
  if (n == 0) throw error(errc::empty_original, "original text has no tokens");
  return static_cast<double>(text::count_tokens(compressed)) / static_cast<double>(n);
}

}  // namespace amrcc::eval
