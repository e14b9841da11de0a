#pragma once

// Concept-level entropy from parser token log-probabilities.
//
// A token's entropy is exp(-logprob) = 1/P. Tokens are grouped into units at
// every token carrying the word-boundary prefix, a unit's entropy is the mean
// over its tokens, and units are aligned to graph nodes by label.

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "amrcc/error.hpp"
#include "amrcc/penman.hpp"
#include "amrcc/text.hpp"

namespace amrcc::entropy {

inline constexpr std::string_view kDefaultBoundaryPrefix = "\xC4\xA0";  // "Ġ"

struct ScoredToken {
  std::string text;
  double logprob = 0.0;  // natural log
  std::size_t index = 0;
};

struct ConceptUnit {
  std::vector<std::size_t> token_indices;
  std::string detokenized;
  bool is_structural = false;
};

struct ConceptEntropy {
  std::string concept_label;
  std::optional<penman::variable_id> variable;
  double entropy = 0.0;
  std::size_t subword_count = 0;
  std::size_t sentence_index = 0;
};

struct Diagnostic {
  std::size_t sentence_index = 0;
  penman::variable_id variable;
  std::string label;
};

struct GraphScores {
  std::vector<ConceptEntropy> concepts;
  std::vector<Diagnostic> unmatched;  // nodes with no aligned unit
};

inline double token_entropy(double logprob) {
  if (!std::isfinite(logprob)) throw error(errc::non_finite_logprob, std::to_string(logprob));
  return std::exp(-logprob);
}

inline double token_entropy(const ScoredToken& t) { return token_entropy(t.logprob); }

// Graph syntax, not content: roles, brackets, slashes, variables, string
// delimiters and special markup such as "<pointer:3>" or "</s>".
inline bool is_structural_form(std::string_view s) {
  if (s.empty()) return true;
  if (s[0] == ':') return true;
  if (s == "(" || s == ")" || s == "/" || s == "\"") return true;
  if (s.size() >= 2 && s.front() == '<' && s.back() == '>') return true;
  return penman::detail::looks_like_variable(s);
}

inline std::vector<ConceptUnit> segment_units(const std::vector<ScoredToken>& tokens,
                                              std::string_view boundary_prefix = kDefaultBoundaryPrefix) {
  if (tokens.empty()) throw error(errc::empty_sequence, "no tokens");
  if (boundary_prefix.empty()) throw error(errc::domain_error, "boundary prefix must be non-empty");
  std::vector<ConceptUnit> units;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string_view piece = tokens[i].text;
    const bool boundary = text::starts_with(piece, boundary_prefix);
    if (boundary) piece.remove_prefix(boundary_prefix.size());
    if (boundary || units.empty()) units.emplace_back();
    units.back().token_indices.push_back(i);
    units.back().detokenized += piece;
  }
  for (auto& u : units) u.is_structural = is_structural_form(u.detokenized);
  return units;
}

inline double concept_entropy(const ConceptUnit& unit, const std::vector<ScoredToken>& tokens) {
  if (unit.token_indices.empty()) throw error(errc::index_out_of_range, "unit has no tokens");
  double sum = 0.0;
  for (std::size_t i : unit.token_indices) {
    if (i >= tokens.size())
      throw error(errc::index_out_of_range, std::to_string(i) + " >= " + std::to_string(tokens.size()));
    sum += token_entropy(tokens[i]);
  }
  return sum / static_cast<double>(unit.token_indices.size());
}

// Nodes are visited in first-appearance order. Each takes the first unused
// content unit whose text equals its label (case-insensitive); failing that,
// the first unused unit equal to the label with its sense suffix removed.
inline GraphScores score_graph_concepts(const penman::AmrGraph& g, const std::vector<ScoredToken>& tokens,
                                        std::string_view boundary_prefix = kDefaultBoundaryPrefix) {
  const auto units = segment_units(tokens, boundary_prefix);
  std::vector<bool> used(units.size(), false);

  auto find_unit = [&](std::string_view wanted) -> std::optional<std::size_t> {
    for (std::size_t u = 0; u < units.size(); ++u)
      if (!used[u] && !units[u].is_structural && text::iequals(units[u].detokenized, wanted)) return u;
    return std::nullopt;
  };

  GraphScores out;
  for (const auto& node : g.nodes()) {
    auto hit = find_unit(node.label);
    if (!hit) {
      const std::string stripped = penman::strip_sense(node.label);
      if (stripped != node.label) hit = find_unit(stripped);
    }
    if (!hit) {
      out.unmatched.push_back({g.source_sentence_index(), node.variable, node.label});
      continue;
    }
    used[*hit] = true;
    const auto& unit = units[*hit];
    out.concepts.push_back({node.label, node.variable, concept_entropy(unit, tokens),
                            unit.token_indices.size(), g.source_sentence_index()});
  }
  return out;
}

}  // namespace amrcc::entropy
