#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "amrcc/entropy.hpp"

using namespace amrcc;
using namespace amrcc::entropy;
using Catch::Approx;

namespace {

std::vector<ScoredToken> toks(std::initializer_list<std::pair<const char*, double>> list) {
  std::vector<ScoredToken> out;
  for (const auto& [t, lp] : list) out.push_back({t, lp, out.size()});
  return out;
}

}  // namespace

TEST_CASE("token entropy") {
  CHECK(token_entropy(0.0) == 1.0);
  CHECK(token_entropy(-std::log(2.0)) == Approx(2.0).epsilon(1e-15));
  CHECK(token_entropy(-std::log(10.0)) == Approx(10.0).epsilon(1e-15));
  CHECK_THROWS_AS(token_entropy(NAN), error);
  CHECK_THROWS_AS(token_entropy(-INFINITY), error);
}

TEST_CASE("segment units") {
  const auto one = segment_units(toks({{"Ġboy", 0}}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].detokenized == "boy");

  const auto est = segment_units(toks({{"Ġestab", 0}, {"lish", 0}, {"-01", 0}}));
  REQUIRE(est.size() == 1);
  CHECK(est[0].detokenized == "establish-01");
  CHECK(est[0].token_indices.size() == 3);

  const auto mixed = segment_units(toks({{"Ġwant", 0}, {"-01", 0}, {"Ġ:ARG0", 0}, {"Ġboy", 0}}));
  REQUIRE(mixed.size() == 3);
  CHECK_FALSE(mixed[0].is_structural);
  CHECK(mixed[1].is_structural);
  CHECK_FALSE(mixed[2].is_structural);

  // A leading piece without the marker still opens a unit.
  CHECK(segment_units(toks({{"(", 0}, {"Ġw", 0}})).size() == 2);
  CHECK(segment_units(toks({{"##x", 0}}), "##")[0].detokenized == "x");
  CHECK_THROWS_AS(segment_units({}), error);
}

TEST_CASE("structural forms") {
  for (const char* s : {":ARG0", "(", ")", "/", "\"", "b", "x12", "<pointer:3>", "</s>", ""})
    CHECK(is_structural_form(s));
  for (const char* s : {"boy", "want-01", "2025", "-", "New"}) CHECK_FALSE(is_structural_form(s));
}

TEST_CASE("concept entropy") {
  const auto t = toks({{"Ġa", -std::log(2.0)}, {"b", -std::log(4.0)}, {"Ġc", 0.0}, {"d", 0.0}, {"e", -std::log(10.0)}});
  CHECK(concept_entropy({{0, 1}, "ab", false}, t) == Approx(3.0).epsilon(1e-14));
  CHECK(concept_entropy({{0}, "a", false}, t) == Approx(2.0).epsilon(1e-14));
  CHECK(concept_entropy({{2, 3, 4}, "cde", false}, t) == Approx(4.0).epsilon(1e-14));
  CHECK_THROWS_AS(concept_entropy({{}, "", false}, t), error);
  CHECK_THROWS_AS(concept_entropy({{9}, "", false}, t), error);
}

TEST_CASE("score graph concepts") {
  const auto boy = score_graph_concepts(penman::parse_penman("(b / boy)"), toks({{"Ġboy", -std::log(2.0)}}));
  REQUIRE(boy.concepts.size() == 1);
  CHECK(boy.concepts[0].concept_label == "boy");
  CHECK(boy.concepts[0].entropy == Approx(2.0).epsilon(1e-14));
  CHECK(boy.concepts[0].subword_count == 1);

  const auto g = penman::parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))");
  const auto tokens = toks({{"Ġ(", -1}, {"Ġw", -1}, {"Ġ/", -1}, {"Ġwant", -1}, {"-01", -1}, {"Ġ:ARG0", -1},
                            {"Ġ(", -1}, {"Ġb", -1}, {"Ġ/", -1}, {"ĠBoy", -1}, {"Ġ)", -1}, {"Ġ:ARG1", -1},
                            {"Ġ(", -1}, {"Ġg", -1}, {"Ġ/", -1}, {"Ġgo", -1}, {"Ġ:ARG0", -1}, {"Ġb", -1},
                            {"Ġ)", -1}, {"Ġ)", -1}});
  const auto s = score_graph_concepts(g, tokens);
  REQUIRE(s.concepts.size() == 3);
  CHECK(s.concepts[0].concept_label == "want-01");
  CHECK(s.concepts[0].subword_count == 2);
  CHECK(s.concepts[1].concept_label == "boy");
  CHECK(s.concepts[2].concept_label == "go-02");  // sense-stripped fallback
  for (const auto& c : s.concepts) CHECK(c.entropy == Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(s.unmatched.empty());

  const auto miss = score_graph_concepts(penman::parse_penman("(w / want-01 :ARG0 (b / boy))", 2),
                                         toks({{"Ġwant", -1}, {"-01", -1}}));
  CHECK(miss.concepts.size() == 1);
  REQUIRE(miss.unmatched.size() == 1);
  CHECK(miss.unmatched[0].label == "boy");
  CHECK(miss.unmatched[0].sentence_index == 2);
}

TEST_CASE("duplicate labels take units in order") {
  const auto g = penman::parse_penman("(a / and :op1 (b / boy) :op2 (b2 / boy))");
  const auto s = score_graph_concepts(g, toks({{"Ġand", 0}, {"Ġboy", -std::log(3.0)}, {"Ġboy", -std::log(5.0)}}));
  REQUIRE(s.concepts.size() == 3);
  CHECK(*s.concepts[1].variable == "b");
  CHECK(s.concepts[1].entropy == Approx(3.0));
  CHECK(*s.concepts[2].variable == "b2");
  CHECK(s.concepts[2].entropy == Approx(5.0));
}

TEST_CASE("entropy properties over random units") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lp(-8.0, 0.0);
  std::uniform_int_distribution<int> len(1, 8);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<ScoredToken> t;
    const int m = len(rng);
    std::vector<std::size_t> idx;
    for (int j = 0; j < m; ++j) {
      t.push_back({j == 0 ? "Ġx" : "y", lp(rng), static_cast<std::size_t>(j)});
      idx.push_back(static_cast<std::size_t>(j));
    }
    const ConceptUnit unit{idx, "x", false};
    const double h = concept_entropy(unit, t);

    double lo = INFINITY, hi = 0.0;
    for (const auto& x : t) {
      lo = std::min(lo, token_entropy(x));
      hi = std::max(hi, token_entropy(x));
    }
    CHECK(h >= lo * (1 - 1e-15));
    CHECK(h <= hi * (1 + 1e-15));
    CHECK(h >= 1.0);

    auto lowered = t;
    lowered[static_cast<std::size_t>(trial % m)].logprob -= 0.5;
    CHECK(concept_entropy(unit, lowered) > h);

    std::vector<ScoredToken> same(static_cast<std::size_t>(m), ScoredToken{"y", t[0].logprob, 0});
    CHECK(concept_entropy(unit, same) == Approx(token_entropy(t[0])).epsilon(1e-14));
  }
}

TEST_CASE("units partition the token stream") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> pieces{"Ġ(", "Ġw", "Ġwant", "-01", "Ġ:ARG0", "lish", "Ġ)", "Ġ\"", "New", "ĠYork", "s"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<ScoredToken> t(1 + rng() % 30);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = {pieces[rng() % pieces.size()], -1.0, i};
    const auto units = segment_units(t);
    std::size_t next = 0;
    for (const auto& u : units) {
      REQUIRE_FALSE(u.token_indices.empty());
      for (std::size_t i : u.token_indices) REQUIRE(i == next++);
      if (!u.is_structural) CHECK_FALSE(u.detokenized.empty());
    }
    CHECK(next == t.size());
  }
}
