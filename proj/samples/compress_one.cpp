// Compresses one hand-built document through the library API and prints each
// concept's entropy, t, p and verdict, then the compressed text.

#include <cmath>
#include <cstdio>
#include <vector>

#include "amrcc/distill.hpp"
#include "amrcc/entropy.hpp"
#include "amrcc/penman.hpp"
#include "amrcc/stats.hpp"

using namespace amrcc;

int main() {
  const std::string source = "The Eiffel Tower was completed in March 1889 in Paris.";
  const auto g = penman::parse_penman(
      "(c / complete-01 :ARG1 (t / tower :name (n / name :op1 \"Eiffel\" :op2 \"Tower\"))"
      " :time (d / date-entity :month 3 :year 1889) :location (p / city :name (n2 / name :op1 \"Paris\")))");

  // Parser token scores: natural-log probabilities, "Ġ" marks a new word.
  auto lp = [](double p) { return std::log(p); };
  const std::vector<entropy::ScoredToken> tokens{
      {"Ġ(", lp(0.99), 0},      {"Ġc", lp(0.98), 1},       {"Ġ/", lp(0.99), 2},   {"Ġcomplete", lp(0.6), 3},
      {"-01", lp(0.9), 4},      {"Ġ:ARG1", lp(0.95), 5},   {"Ġtower", lp(0.5), 6}, {"Ġname", lp(0.15), 7},
      {"Ġdate", lp(0.2), 8},    {"-entity", lp(0.25), 9},  {"Ġcity", lp(0.7), 10}, {"Ġname", lp(0.12), 11},
      {"Ġ)", lp(0.99), 12}};

  const auto scores = entropy::score_graph_concepts(g, tokens);
  const auto sel = stats::select_significant(scores.concepts);
  for (const auto& r : sel.results)
    std::printf("%-14s H=%6.3f t=%+6.3f p=%.4f %s\n", r.concept_label.c_str(), r.entropy, r.t_stat, r.p_value,
                r.selected ? "keep" : "-");
  for (const auto& u : scores.unmatched) std::printf("unmatched: %s\n", u.label.c_str());

  const auto doc = distill::compress_document("eiffel", {g}, sel.results, source);
  std::printf("compressed: %s\n", doc.text.c_str());
  return doc.text.empty() ? 1 : 0;
}
