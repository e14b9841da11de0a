#pragma once

// Sentence-level AMR graphs in PENMAN notation: a value type, a strict parser
// and a deterministic single-line serializer.

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "amrcc/error.hpp"
#include "amrcc/text.hpp"

namespace amrcc::penman {

using variable_id = std::string;

enum class node_kind { predicate, entity, modifier, special };

constexpr std::string_view to_string(node_kind k) noexcept {
  switch (k) {
    case node_kind::predicate: return "predicate";
    case node_kind::entity: return "entity";
    case node_kind::modifier: return "modifier";
    case node_kind::special: return "special";
  }
  return "entity";
}

struct ConceptNode {
  variable_id variable;
  std::string label;
  node_kind kind = node_kind::entity;
  // Token indices from an ISI alignment marker ("boy~e.2"), if any.
  std::vector<int> alignment;

  bool operator==(const ConceptNode&) const = default;
};

class Constant {
 public:
  enum class kind_t { symbol, integer, quoted };

  static Constant symbol(std::string s) { return Constant(kind_t::symbol, std::move(s), 0); }
  static Constant integer(std::int64_t v) { return Constant(kind_t::integer, std::to_string(v), v); }
  static Constant quoted(std::string s) { return Constant(kind_t::quoted, std::move(s), 0); }

  kind_t kind() const noexcept { return kind_; }
  bool is_integer() const noexcept { return kind_ == kind_t::integer; }
  bool is_quoted() const noexcept { return kind_ == kind_t::quoted; }
  std::int64_t as_integer() const noexcept { return int_value_; }

  // Symbol text, decimal digits, or the verbatim interior of a quoted literal.
  const std::string& text() const noexcept { return text_; }

  std::string to_penman() const {
    return kind_ == kind_t::quoted ? "\"" + text_ + "\"" : text_;
  }

  bool operator==(const Constant&) const = default;

 private:
  Constant(kind_t k, std::string t, std::int64_t v) : kind_(k), text_(std::move(t)), int_value_(v) {}

  kind_t kind_;
  std::string text_;
  std::int64_t int_value_;
};

struct Relation {
  variable_id source;
  std::string role;
  std::variant<variable_id, Constant> target;

  bool is_edge() const noexcept { return std::holds_alternative<variable_id>(target); }
  const variable_id& target_variable() const { return std::get<variable_id>(target); }
  const Constant& target_constant() const { return std::get<Constant>(target); }

  bool operator==(const Relation&) const = default;
};

namespace detail {

inline bool has_sense_suffix(std::string_view label) noexcept {
  if (label.size() < 4) return false;
  const auto tail = label.substr(label.size() - 3);
  return tail[0] == '-' && std::isdigit(static_cast<unsigned char>(tail[1])) &&
         std::isdigit(static_cast<unsigned char>(tail[2]));
}

inline bool looks_like_variable(std::string_view s) noexcept {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin() + 1, s.end(),
                     [](unsigned char c) { return std::isdigit(c) != 0; });
}

inline bool is_special_label(std::string_view label) noexcept {
  static constexpr std::string_view kSpecial[] = {"name", "and", "or", "multi-sentence",
                                                  "amr-unknown", "amr-choice"};
  if (text::ends_with(label, "-entity") || text::ends_with(label, "-quantity")) return true;
  return std::find(std::begin(kSpecial), std::end(kSpecial), label) != std::end(kSpecial);
}

inline bool is_modifier_role(std::string_view role) noexcept {
  return role == ":mod" || role == ":manner" || role == ":degree" || role == ":frequency";
}

}  // namespace detail

// Strips a trailing sense suffix: "establish-01" -> "establish".
inline std::string strip_sense(std::string_view label) {
  std::size_t end = label.size();
  std::size_t i = end;
  while (i > 0 && std::isdigit(static_cast<unsigned char>(label[i - 1]))) --i;
  if (i < end && i > 1 && label[i - 1] == '-' && end - i >= 2) return std::string(label.substr(0, i - 1));
  return std::string(label);
}

// Immutable graph. The constructor validates every invariant and puts the
// relation list into serialization order (per-source order is preserved), so
// two graphs describing the same structure compare equal regardless of where
// a re-entrant node happened to be expanded in the source text.
class AmrGraph {
 public:
  AmrGraph(variable_id root, std::vector<ConceptNode> nodes, std::vector<Relation> relations,
           std::size_t source_sentence_index = 0)
      : root_(std::move(root)), sentence_index_(source_sentence_index) {
    if (nodes.empty()) throw error(errc::empty_input, "graph has no nodes");
    std::unordered_map<variable_id, std::size_t> input_index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].label.empty())
        throw error(errc::syntax, "empty concept label for variable " + nodes[i].variable);
      if (!input_index.emplace(nodes[i].variable, i).second)
        throw error(errc::duplicate_variable, nodes[i].variable);
    }
    if (!input_index.count(root_)) throw error(errc::dangling_reference, "root " + root_);

    std::unordered_map<variable_id, std::vector<std::size_t>> outgoing;
    for (std::size_t i = 0; i < relations.size(); ++i) {
      const auto& r = relations[i];
      if (r.role.size() < 2 || r.role[0] != ':') throw error(errc::malformed_role, r.role);
      if (!input_index.count(r.source)) throw error(errc::dangling_reference, r.source);
      if (r.is_edge() && !input_index.count(r.target_variable()))
        throw error(errc::dangling_reference, r.target_variable());
      outgoing[r.source].push_back(i);
    }

    // Depth-first walk mirroring serialize_penman.
    std::unordered_set<variable_id> expanded;
    std::vector<Relation> ordered;
    ordered.reserve(relations.size());
    std::vector<std::pair<variable_id, std::size_t>> stack;  // (node, next outgoing slot)
    auto expand = [&](const variable_id& v) {
      expanded.insert(v);
      order_.push_back(v);
      stack.emplace_back(v, 0);
    };
    expand(root_);
    while (!stack.empty()) {
      auto& [v, slot] = stack.back();
      const auto it = outgoing.find(v);
      if (it == outgoing.end() || slot >= it->second.size()) {
        stack.pop_back();
        continue;
      }
      const Relation& r = relations[it->second[slot++]];
      ordered.push_back(r);
      if (r.is_edge() && !expanded.count(r.target_variable())) expand(r.target_variable());
    }
    if (order_.size() != nodes.size()) {
      for (const auto& n : nodes)
        if (!expanded.count(n.variable))
          throw error(errc::syntax, "node " + n.variable + " is unreachable from root");
    }
    relations_ = std::move(ordered);

    std::unordered_map<variable_id, std::string_view> first_incoming;
    for (const auto& r : relations_)
      if (r.is_edge()) first_incoming.emplace(r.target_variable(), r.role);

    for (const auto& v : order_) {
      ConceptNode n = std::move(nodes[input_index.at(v)]);
      if (detail::is_special_label(n.label)) {
        n.kind = node_kind::special;
      } else if (detail::has_sense_suffix(n.label)) {
        n.kind = node_kind::predicate;
      } else if (auto in = first_incoming.find(v);
                 in != first_incoming.end() && detail::is_modifier_role(in->second)) {
        n.kind = node_kind::modifier;
      } else {
        n.kind = node_kind::entity;
      }
      index_.emplace(v, nodes_.size());
      nodes_.push_back(std::move(n));
    }
  }

  const variable_id& root() const noexcept { return root_; }
  std::size_t source_sentence_index() const noexcept { return sentence_index_; }
  const std::vector<Relation>& relations() const noexcept { return relations_; }
  // Nodes in first-appearance (serialization) order.
  const std::vector<ConceptNode>& nodes() const noexcept { return nodes_; }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(const variable_id& v) const { return index_.count(v) != 0; }

  const ConceptNode& node(const variable_id& v) const {
    const auto it = index_.find(v);
    if (it == index_.end()) throw error(errc::unknown_variable, v);
    return nodes_[it->second];
  }

  // Position of v in first-appearance order.
  std::size_t position(const variable_id& v) const {
    const auto it = index_.find(v);
    if (it == index_.end()) throw error(errc::unknown_variable, v);
    return it->second;
  }

  AmrGraph with_sentence_index(std::size_t index) const {
    AmrGraph copy = *this;
    copy.sentence_index_ = index;
    return copy;
  }

  bool operator==(const AmrGraph& other) const {
    return root_ == other.root_ && sentence_index_ == other.sentence_index_ &&
           nodes_ == other.nodes_ && relations_ == other.relations_;
  }

 private:
  variable_id root_;
  std::size_t sentence_index_;
  std::vector<ConceptNode> nodes_;
  std::vector<Relation> relations_;
  std::vector<variable_id> order_;
  std::unordered_map<variable_id, std::size_t> index_;
};

namespace detail {

struct RawTarget {
  std::string symbol;
  bool quoted = false;
  std::size_t position = 0;
};

struct RawRelation {
  variable_id source;
  std::string role;
  std::variant<variable_id, RawTarget> target;  // variable for nested nodes
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  AmrGraph run(std::size_t sentence_index) {
    skip_trivia();
    if (pos_ >= s_.size()) throw parse_error(errc::empty_input, "no PENMAN expression", pos_);
    if (s_[pos_] == ')') throw parse_error(errc::unbalanced_parens, "unexpected ')'", pos_);
    if (s_[pos_] != '(') throw parse_error(errc::syntax, "expected '('", pos_);
    const variable_id root = parse_node();
    skip_trivia();
    if (pos_ < s_.size()) {
      if (s_[pos_] == ')') throw parse_error(errc::unbalanced_parens, "unexpected ')'", pos_);
      throw parse_error(errc::syntax, "trailing content after graph", pos_);
    }

    std::unordered_set<variable_id> defined;
    for (const auto& n : nodes_) defined.insert(n.variable);

    std::vector<Relation> relations;
    relations.reserve(raw_.size());
    for (auto& r : raw_) {
      if (auto* v = std::get_if<variable_id>(&r.target)) {
        relations.push_back({r.source, r.role, *v});
        continue;
      }
      auto& t = std::get<RawTarget>(r.target);
      if (t.quoted) {
        relations.push_back({r.source, r.role, Constant::quoted(std::move(t.symbol))});
      } else if (defined.count(t.symbol)) {
        relations.push_back({r.source, r.role, t.symbol});
      } else if (auto n = as_integer(t.symbol)) {
        relations.push_back({r.source, r.role, Constant::integer(*n)});
      } else if (looks_like_variable(t.symbol)) {
        throw parse_error(errc::dangling_reference, t.symbol, t.position);
      } else {
        relations.push_back({r.source, r.role, Constant::symbol(std::move(t.symbol))});
      }
    }
    return AmrGraph(root, std::move(nodes_), std::move(relations), sentence_index);
  }

 private:
  static std::optional<std::int64_t> as_integer(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    // Keep the original spelling for things like "+5" or "007".
    if (std::to_string(v) != s) return std::nullopt;
    return v;
  }

  static bool is_delim(char c) noexcept {
    return text::is_space(c) || c == '(' || c == ')' || c == '"';
  }

  void skip_trivia() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (text::is_space(c)) {
        ++pos_;
      } else if (c == '#' && at_line_start()) {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_line_start() const noexcept {
    for (std::size_t i = pos_; i > 0; --i) {
      const char c = s_[i - 1];
      if (c == '\n') return true;
      if (!text::is_space(c)) return false;
    }
    return true;
  }

  std::string read_symbol(bool stop_at_slash) {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && !is_delim(s_[pos_]) && !(stop_at_slash && s_[pos_] == '/')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  // "boy~e.2,3" -> ("boy", {2, 3}); markers without digits are dropped.
  static std::string split_alignment(std::string sym, std::vector<int>* out) {
    const auto tilde = sym.find('~');
    if (tilde == std::string::npos || tilde == 0) return sym;
    if (out) {
      std::string_view marker = std::string_view(sym).substr(tilde + 1);
      if (const auto dot = marker.find('.'); dot != std::string_view::npos) marker = marker.substr(dot + 1);
      std::size_t i = 0;
      while (i < marker.size()) {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(marker.data() + i, marker.data() + marker.size(), v);
        if (ec != std::errc()) break;
        out->push_back(v);
        i = static_cast<std::size_t>(ptr - marker.data());
        if (i < marker.size() && marker[i] == ',') ++i;
      }
    }
    sym.resize(tilde);
    return sym;
  }

  [[noreturn]] void unterminated(std::size_t open) const {
    throw parse_error(errc::unbalanced_parens, "unclosed '('", open);
  }

  variable_id parse_node() {
    const std::size_t open = pos_++;
    skip_trivia();
    if (pos_ >= s_.size()) unterminated(open);
    const std::size_t var_pos = pos_;
    variable_id var = read_symbol(true);
    if (var.empty()) throw parse_error(errc::syntax, "expected variable", var_pos);
    skip_trivia();
    if (pos_ >= s_.size()) unterminated(open);
    if (s_[pos_] != '/') throw parse_error(errc::syntax, "expected '/' after variable " + var, pos_);
    ++pos_;
    skip_trivia();
    if (pos_ >= s_.size()) unterminated(open);
    const std::size_t label_pos = pos_;
    ConceptNode node;
    node.variable = var;
    node.label = split_alignment(read_symbol(false), &node.alignment);
    if (node.label.empty()) throw parse_error(errc::syntax, "expected concept label", label_pos);
    for (const auto& n : nodes_)
      if (n.variable == var) throw parse_error(errc::duplicate_variable, var, var_pos);
    nodes_.push_back(std::move(node));

    for (;;) {
      skip_trivia();
      if (pos_ >= s_.size()) unterminated(open);
      const char c = s_[pos_];
      if (c == ')') {
        ++pos_;
        return var;
      }
      if (c != ':') throw parse_error(errc::malformed_role, "role must begin with ':'", pos_);
      const std::size_t role_pos = pos_;
      std::string role = read_symbol(false);
      if (role.size() < 2) throw parse_error(errc::malformed_role, "empty role", role_pos);
      skip_trivia();
      if (pos_ >= s_.size()) unterminated(open);
      const char t = s_[pos_];
      if (t == '(') {
        variable_id child = parse_node();
        raw_.push_back({var, std::move(role), std::move(child)});
      } else if (t == '"') {
        const std::size_t qpos = pos_++;
        const std::size_t start = pos_;
        while (pos_ < s_.size() && s_[pos_] != '"') pos_ += (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ? 2 : 1;
        if (pos_ >= s_.size()) throw parse_error(errc::syntax, "unterminated string literal", qpos);
        std::string literal(s_.substr(start, pos_ - start));
        ++pos_;
        if (pos_ < s_.size() && s_[pos_] == '~') read_symbol(false);  // alignment on a literal
        raw_.push_back({var, std::move(role), RawTarget{std::move(literal), true, qpos}});
      } else if (t == ')') {
        throw parse_error(errc::syntax, "role " + role + " has no value", pos_);
      } else {
        const std::size_t spos = pos_;
        std::string sym = split_alignment(read_symbol(false), nullptr);
        if (sym.empty()) throw parse_error(errc::syntax, "expected value", spos);
        if (sym[0] == ':') throw parse_error(errc::syntax, "role " + role + " has no value", spos);
        raw_.push_back({var, std::move(role), RawTarget{std::move(sym), false, spos}});
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<ConceptNode> nodes_;
  std::vector<RawRelation> raw_;
};

}  // namespace detail

inline AmrGraph parse_penman(std::string_view text, std::size_t sentence_index = 0) {
  return detail::Parser(text).run(sentence_index);
}

// Single line, first occurrence of a variable expands the node, later ones
// emit the bare variable.
inline std::string serialize_penman(const AmrGraph& g) {
  std::unordered_map<std::string_view, std::vector<const Relation*>> outgoing;
  for (const auto& r : g.relations()) outgoing[r.source].push_back(&r);

  std::string out;
  std::unordered_set<std::string_view> expanded;
  auto emit = [&](auto& self, const ConceptNode& n) -> void {
    expanded.insert(n.variable);
    out += '(';
    out += n.variable;
    out += " / ";
    out += n.label;
    if (!n.alignment.empty()) {
      out += "~e.";
      for (std::size_t i = 0; i < n.alignment.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(n.alignment[i]);
      }
    }
    if (const auto it = outgoing.find(n.variable); it != outgoing.end()) {
      for (const Relation* r : it->second) {
        out += ' ';
        out += r->role;
        out += ' ';
        if (!r->is_edge()) {
          out += r->target_constant().to_penman();
        } else if (expanded.count(r->target_variable())) {
          out += r->target_variable();
        } else {
          self(self, g.node(r->target_variable()));
        }
      }
    }
    out += ')';
  };
  emit(emit, g.node(g.root()));
  return out;
}

inline std::vector<ConceptNode> concept_nodes(const AmrGraph& g) { return g.nodes(); }

inline std::vector<std::pair<std::string, Constant>> attributes_of(const AmrGraph& g,
                                                                   const variable_id& v) {
  if (!g.contains(v)) throw error(errc::unknown_variable, v);
  std::vector<std::pair<std::string, Constant>> out;
  for (const auto& r : g.relations())
    if (r.source == v && !r.is_edge()) out.emplace_back(r.role, r.target_constant());
  return out;
}

}  // namespace amrcc::penman
