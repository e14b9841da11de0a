#pragma once

// TF-IDF term retention, the statistical baseline compressor.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "amrcc/error.hpp"
#include "amrcc/text.hpp"

namespace amrcc::tfidf {

// Lowercased words of s, split on whitespace and punctuation.
inline std::vector<std::string> terms(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && !text::is_alnum(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && text::is_alnum(s[j])) ++j;
    if (j > i) out.push_back(text::to_lower(s.substr(i, j - i)));
    i = j;
  }
  return out;
}

class IdfTable {
 public:
  IdfTable(std::size_t document_count, std::unordered_map<std::string, std::size_t> term_df)
      : document_count_(document_count), term_df_(std::move(term_df)) {}

  std::size_t document_count() const noexcept { return document_count_; }

  std::size_t df(const std::string& term) const {
    const auto it = term_df_.find(term);
    return it == term_df_.end() ? 0 : it->second;
  }

  // ln(N / df); terms never seen get the ceiling ln(N), as if df were 1.
  double idf(const std::string& term) const {
    const std::size_t d = std::max<std::size_t>(df(term), 1);
    return std::log(static_cast<double>(document_count_) / static_cast<double>(d));
  }

  const std::unordered_map<std::string, std::size_t>& term_df() const noexcept { return term_df_; }

 private:
  std::size_t document_count_;
  std::unordered_map<std::string, std::size_t> term_df_;
};

inline IdfTable build_idf(const std::vector<std::string>& corpus) {
  if (corpus.empty()) throw error(errc::empty_corpus, "no documents");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    const auto words = terms(doc);
    std::unordered_set<std::string> seen(words.begin(), words.end());
    for (const auto& w : seen) ++df[w];
  }
  return IdfTable(corpus.size(), std::move(df));
}

// Number of tokens kept for a budget; the small slack absorbs products such
// as (1/3) * 3 landing a hair above an integer.
inline std::size_t retained_count(std::size_t n, double keep_fraction) {
  const double want = std::ceil(keep_fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, want)));
}

// Keeps the ceil(keep_fraction * n) highest-scoring whitespace tokens in
// their original order. A token scores the best tf * idf of its terms; ties
// go to the earlier position.
inline std::string compress_tfidf(std::string_view doc, const IdfTable& idf, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw error(errc::domain_error, "keep_fraction must lie in (0, 1]");
  const auto tokens = text::split_whitespace(doc);
  if (tokens.empty()) throw error(errc::empty_document, "document has no tokens");

  std::vector<std::vector<std::string>> token_terms;
  token_terms.reserve(tokens.size());
  std::unordered_map<std::string, std::size_t> tf;
  for (auto tok : tokens) {
    token_terms.push_back(terms(tok));
    for (const auto& t : token_terms.back()) ++tf[t];
  }

  std::vector<double> score(tokens.size(), 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    for (const auto& t : token_terms[i])
      score[i] = std::max(score[i], static_cast<double>(tf[t]) * idf.idf(t));

  std::vector<std::size_t> order(tokens.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  const std::size_t keep = retained_count(tokens.size(), keep_fraction);
  std::vector<std::size_t> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());

  std::string out;
  for (std::size_t i : kept) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace amrcc::tfidf
