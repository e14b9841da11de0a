#pragma once

// Turns the significant concepts of a document back into text.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "amrcc/error.hpp"
#include "amrcc/penman.hpp"
#include "amrcc/stats.hpp"
#include "amrcc/text.hpp"

namespace amrcc::distill {

struct CompressedDocument {
  std::string document_id;
  std::vector<std::string> concepts;
  std::string text;
  // Set when trailing concepts were dropped to stay within the source length.
  bool truncated = false;
};

struct CompressedContext {
  std::vector<CompressedDocument> per_document;
  std::string text;
};

inline constexpr std::array<std::string_view, 12> kMonthNames = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

// Renders a date-entity from its :day/:month/:year attributes. Returns
// nullopt for other nodes and for dates carrying none of the three.
inline std::optional<std::string> reconstruct_temporal(const penman::AmrGraph& g,
                                                       const penman::variable_id& v) {
  const auto& node = g.node(v);
  if (node.label != "date-entity") return std::nullopt;

  std::optional<std::string> day, month, year;
  for (const auto& [role, value] : penman::attributes_of(g, v)) {
    if (role == ":month") {
      if (!value.is_integer() || value.as_integer() < 1 || value.as_integer() > 12)
        throw error(errc::month_out_of_range, value.to_penman());
      if (!month) month = std::string(kMonthNames[static_cast<std::size_t>(value.as_integer() - 1)]);
    } else if (role == ":day") {
      if (!day) day = value.text();
    } else if (role == ":year") {
      if (!year) year = value.text();
    }
  }

  if (month && day && year) return *month + " " + *day + ", " + *year;
  if (month && year) return *month + " " + *year;
  if (month && day) return *month + " " + *day;
  if (month) return *month;
  if (year) return *year;
  return std::nullopt;
}

inline std::vector<std::string> dedup_adjacent(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& s : items)
    if (out.empty() || out.back() != s) out.push_back(s);
  return out;
}

namespace detail {

inline bool inflects(std::string_view word, std::string_view stem) {
  static constexpr std::string_view kSuffixes[] = {"", "s", "es", "d", "ed", "ing"};
  if (stem.empty() || !text::starts_with(word, stem)) return false;
  const auto rest = word.substr(stem.size());
  for (auto s : kSuffixes)
    if (rest == s) return true;
  // Doubled final consonant: "stop" -> "stopped", "run" -> "running".
  if (!rest.empty() && rest[0] == stem.back()) {
    const auto tail = rest.substr(1);
    return tail == "ed" || tail == "ing";
  }
  return false;
}

}  // namespace detail

// Maps a concept label back to the word the source document used for it.
// Candidate stems are the sense-stripped lemma plus that lemma minus a
// trailing "e", "s", "ed" or "ing"; a source word matches when it is a stem
// followed by a regular inflection. The longest matching word wins (earliest
// on ties) and is returned with its original casing.
inline std::string realize_surface(std::string_view label, std::string_view source_text) {
  const std::string lemma = penman::strip_sense(label);
  const std::string lower = text::to_lower(lemma);

  std::vector<std::string> stems{lower};
  for (std::string_view suffix : {"e", "s", "ed", "ing"}) {
    if (lower.size() > suffix.size() + 1 && text::ends_with(lower, suffix))
      stems.push_back(lower.substr(0, lower.size() - suffix.size()));
  }

  std::string_view best;
  for (auto token : text::split_whitespace(source_text)) {
    const auto core = text::trim_punct(token);
    if (core.size() <= best.size()) continue;
    const std::string lc = text::to_lower(core);
    for (const auto& stem : stems) {
      if (detail::inflects(lc, stem)) {
        best = core;
        break;
      }
    }
  }
  return best.empty() ? lemma : std::string(best);
}

// A "name" node is realized as its :opN literals, which already carry the
// document's spelling.
inline std::optional<std::string> realize_name(const penman::AmrGraph& g, const penman::variable_id& v) {
  if (g.node(v).label != "name") return std::nullopt;
  std::vector<std::string> parts;
  for (const auto& [role, value] : penman::attributes_of(g, v))
    if (text::starts_with(role, ":op")) parts.push_back(value.text());
  if (parts.empty()) return std::nullopt;
  return text::join(parts, " ");
}

inline std::string realize_node(const penman::AmrGraph& g, const penman::variable_id& v,
                                std::string_view source_text) {
  if (auto date = reconstruct_temporal(g, v)) return *date;
  if (auto name = realize_name(g, v)) return *name;
  return realize_surface(g.node(v).label, source_text);
}

// graphs[i] must be the graph of sentence i of the document.
inline CompressedDocument compress_document(std::string document_id,
                                            const std::vector<penman::AmrGraph>& graphs,
                                            const std::vector<stats::SignificanceResult>& selection,
                                            std::string_view source_text) {
  struct Slot {
    std::size_t sentence;
    std::size_t position;
    std::string surface;
  };
  std::vector<Slot> slots;
  for (const auto& r : selection) {
    if (!r.selected) continue;
    if (r.sentence_index >= graphs.size())
      throw error(errc::index_out_of_range, "sentence " + std::to_string(r.sentence_index));
    const auto& g = graphs[r.sentence_index];
    if (r.variable) {
      slots.push_back({r.sentence_index, g.position(*r.variable), realize_node(g, *r.variable, source_text)});
    } else {
      slots.push_back({r.sentence_index, g.size(), realize_surface(r.concept_label, source_text)});
    }
  }
  std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
    return std::pair(a.sentence, a.position) < std::pair(b.sentence, b.position);
  });

  std::vector<std::string> realized;
  realized.reserve(slots.size());
  for (auto& s : slots) realized.push_back(std::move(s.surface));

  CompressedDocument doc;
  doc.document_id = std::move(document_id);
  doc.concepts = dedup_adjacent(realized);

  const std::size_t limit = text::count_tokens(source_text);
  std::size_t total = 0;
  for (const auto& c : doc.concepts) total += text::count_tokens(c);
  while (total > limit) {
    total -= text::count_tokens(doc.concepts.back());
    doc.concepts.pop_back();
    doc.truncated = true;
  }
  doc.text = text::join(doc.concepts, " ");
  return doc;
}

// Documents that compressed to nothing contribute no line.
inline CompressedContext compress_context(std::vector<CompressedDocument> docs) {
  CompressedContext ctx;
  std::vector<std::string_view> lines;
  for (const auto& d : docs)
    if (!d.text.empty()) lines.push_back(d.text);
  ctx.text = text::join(lines, "\n");
  ctx.per_document = std::move(docs);
  return ctx;
}

}  // namespace amrcc::distill
