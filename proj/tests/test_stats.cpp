#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "amrcc/stats.hpp"
#include "oracle.hpp"

using namespace amrcc;
using namespace amrcc::stats;
using Catch::Approx;

namespace {

std::vector<entropy::ConceptEntropy> concepts(const std::vector<double>& h) {
  std::vector<entropy::ConceptEntropy> out;
  for (std::size_t i = 0; i < h.size(); ++i) out.push_back({"c" + std::to_string(i), std::nullopt, h[i], 1, 0});
  return out;
}

std::vector<bool> verdicts(const Selection& s) {
  std::vector<bool> v;
  for (const auto& r : s.results) v.push_back(r.selected);
  return v;
}

}  // namespace

TEST_CASE("population") {
  const std::vector<double> a{1, 2, 3};
  const auto p = population(a);
  CHECK(p.mean == 2.0);
  CHECK(p.sample_std == Approx(1.0).epsilon(1e-15));
  CHECK(p.n == 3);

  const std::vector<double> one{5};
  const auto q = population(one);
  CHECK(q.mean == 5.0);
  CHECK(q.sample_std == 0.0);
  CHECK(q.degenerate());

  const std::vector<double> flat{2, 2, 2, 2};
  CHECK(population(flat).sample_std == 0.0);

  const std::vector<double> tenths{0.1, 0.1, 0.1};
  CHECK(population(tenths).degenerate());

  CHECK(population(a, std_convention::population).sample_std == Approx(std::sqrt(2.0 / 3.0)));
  CHECK_THROWS_AS(population(std::vector<double>{}), error);
}

TEST_CASE("t statistic") {
  const std::vector<double> a{1, 2, 3};
  const auto p = population(a);
  CHECK(t_statistic(3, p) == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(t_statistic(2, p) == 0.0);
  CHECK(t_statistic(1, p) == Approx(-std::sqrt(3.0)).epsilon(1e-14));
  const std::vector<double> flat{2, 2};
  CHECK_THROWS_AS(t_statistic(2, population(flat)), error);
}

TEST_CASE("student t cdf") {
  CHECK(student_t_cdf(0, 7) == 0.5);
  CHECK(student_t_cdf(1, 1) == Approx(0.75).margin(1e-12));
  CHECK(student_t_cdf(std::sqrt(3.0), 2) == Approx(0.8872983346).margin(1e-9));
  CHECK(student_t_cdf(INFINITY, 3) == 1.0);
  CHECK(student_t_cdf(-INFINITY, 3) == 0.0);
  CHECK_THROWS_AS(student_t_cdf(1, 0.5), error);
  CHECK_THROWS_AS(student_t_cdf(NAN, 2), error);
}

TEST_CASE("t cdf matches the df = 1 and df = 2 closed forms") {
  for (int i = 0; i <= 400; ++i) {
    const double t = -10.0 + 0.05 * i;
    CHECK(std::fabs(student_t_cdf(t, 1) - oracle::cauchy_cdf(t)) <= 1e-10);
    CHECK(std::fabs(student_t_cdf(t, 2) - oracle::t2_cdf(t)) <= 1e-10);
  }
}

TEST_CASE("t cdf matches numerical integration of the density") {
  for (double df : {1.0, 2.0, 3.0, 5.0, 9.0, 29.0, 49.0}) {
    for (double t = -8.0; t <= 8.0; t += 0.37) CHECK(std::fabs(student_t_cdf(t, df) - oracle::t_cdf(t, df)) <= 1e-10);
  }
}

TEST_CASE("t cdf symmetry, monotonicity and normal limit") {
  for (int df = 1; df <= 100; ++df) CHECK(std::fabs(student_t_cdf(0.0, df) - 0.5) <= 1e-12);
  for (double df : {1.0, 2.0, 4.0, 17.0, 120.0}) {
    double prev = 0.0;
    for (double t = -30.0; t <= 30.0; t += 0.1) {
      const double f = student_t_cdf(t, df);
      CHECK(f >= prev);
      CHECK(std::fabs(f + student_t_cdf(-t, df) - 1.0) <= 1e-12);
      prev = f;
    }
  }
  CHECK(std::fabs(student_t_cdf(1.959964, 1e6) - 0.975) <= 1e-4);
}

TEST_CASE("p value") {
  CHECK(p_value(0, 4) == 1.0);
  CHECK(p_value(std::sqrt(3.0), 2) == Approx(0.2254033308).margin(1e-9));
  for (double t = 0.0; t < 12.0; t += 0.25) {
    CHECK(p_value(t, 6) == p_value(-t, 6));
    CHECK(std::fabs(p_value(t, 6) - 2.0 * (1.0 - student_t_cdf(std::fabs(t), 6))) <= 1e-10);
    CHECK(p_value(t + 0.25, 6) <= p_value(t, 6));
  }
  // The direct form keeps resolution far into the tail.
  CHECK(p_value(40.0, 10) > 0.0);
  CHECK(p_value(40.0, 10) < 1e-11);
}

TEST_CASE("select_significant examples") {
  const auto s = select_significant(concepts({1, 2, 3}));
  CHECK(verdicts(s) == std::vector<bool>{false, false, true});
  CHECK(s.results[2].p_value == Approx(0.2254033308).margin(1e-9));
  CHECK(s.results[0].p_value == Approx(s.results[2].p_value).margin(1e-15));
  CHECK_FALSE(s.degenerate);

  const auto two = select_significant(concepts({1, 2, 3}), 0.3, selection_mode::two_sided);
  CHECK(verdicts(two) == std::vector<bool>{true, false, true});

  const auto tiny = select_significant(concepts({1, 2, 3, 8, 1.5}), 1e-300, selection_mode::two_sided);
  CHECK(tiny.selected_count() == 0);

  const auto flat = select_significant(concepts({4, 4, 4}));
  CHECK(flat.degenerate);
  CHECK(flat.selected_count() == 3);

  const auto single = select_significant(concepts({4}));
  CHECK(single.degenerate);
  CHECK(single.selected_count() == 1);

  CHECK_THROWS_AS(select_significant(concepts({})), error);
  CHECK_THROWS_AS(select_significant(concepts({1, 2}), 0.0, selection_mode::high_only), error);
  CHECK_THROWS_AS(select_significant(concepts({1, 2}), 1.5, selection_mode::high_only), error);
}

TEST_CASE("selected implies p below alpha") {
  std::mt19937_64 rng(11);
  std::lognormal_distribution<double> h(0.5, 0.6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(3 + trial % 30);
    for (auto& x : v) x = 1.0 + h(rng);
    for (auto mode : {selection_mode::high_only, selection_mode::two_sided}) {
      const auto s = select_significant(concepts(v), 0.3, mode);
      for (const auto& r : s.results) {
        if (r.selected) CHECK(r.p_value < 0.3);
        if (r.selected && mode == selection_mode::high_only) CHECK(r.t_stat > 0.0);
      }
    }
  }
}

TEST_CASE("selection is invariant under positive affine maps") {
  std::mt19937_64 rng(3);
  std::lognormal_distribution<double> h(0.3, 0.8);
  std::uniform_real_distribution<double> scale(0.1, 50.0), shift(-20.0, 20.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(3 + trial % 40);
    for (auto& x : v) x = 1.0 + h(rng);
    const double a = scale(rng), b = shift(rng);
    std::vector<double> w;
    for (double x : v) w.push_back(a * x + b);
    const auto s1 = select_significant(concepts(v));
    const auto s2 = select_significant(concepts(w));
    for (std::size_t i = 0; i < v.size(); ++i) {
      // Skip verdicts that sit within rounding of the threshold.
      if (std::fabs(s1.results[i].p_value - 0.3) < 1e-9) continue;
      CHECK(s1.results[i].selected == s2.results[i].selected);
      CHECK(s1.results[i].t_stat == Approx(s2.results[i].t_stat).epsilon(1e-8).margin(1e-9));
    }
  }
}

TEST_CASE("near-total selection at alpha close to one") {
  std::mt19937_64 rng(5);
  std::lognormal_distribution<double> h(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(5 + trial % 20);
    for (auto& x : v) x = 1.0 + h(rng);
    const auto s = select_significant(concepts(v), 0.999999, selection_mode::two_sided);
    for (const auto& r : s.results) CHECK(r.selected == (r.t_stat != 0.0 && r.p_value < 0.999999));
  }
}

TEST_CASE("selection agrees with the brute-force oracle") {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> size(3, 50);
  std::normal_distribution<double> z(0.0, 1.0);
  std::size_t compared = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(size(rng)));
    const double sigma = 0.2 + 0.8 * std::fabs(z(rng));
    for (auto& x : v) x = 1.0 + std::exp(sigma * z(rng));
    const auto mine = select_significant(concepts(v));
    const auto ref = oracle::screen(v, 0.3);
    for (std::size_t i = 0; i < v.size(); ++i) {
      REQUIRE(mine.results[i].selected == ref[i].selected);
      REQUIRE(std::fabs(mine.results[i].p_value - ref[i].p) <= 1e-9);
      ++compared;
    }
  }
  CHECK(compared > 20000);
}
