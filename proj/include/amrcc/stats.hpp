#pragma once

// One-sample t-test screening of concept entropies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amrcc/entropy.hpp"
#include "amrcc/error.hpp"
#include "amrcc/special_functions.hpp"

namespace amrcc::stats {

enum class std_convention { sample, population };
enum class selection_mode { high_only, two_sided };

struct EntropyPopulation {
  std::vector<double> values;
  double mean = 0.0;
  double sample_std = 0.0;  // n-1 denominator unless built with std_convention::population
  std::size_t n = 0;

  bool degenerate() const noexcept { return n < 2 || sample_std == 0.0; }
};

inline EntropyPopulation population(std::span<const double> values,
                                    std_convention convention = std_convention::sample) {
  if (values.empty()) throw error(errc::empty_population, "no values");
  EntropyPopulation pop;
  pop.values.assign(values.begin(), values.end());
  pop.n = values.size();
  double sum = 0.0;
  double scale = 0.0;
  for (double v : values) {
    sum += v;
    scale = std::max(scale, std::fabs(v));
  }
  pop.mean = sum / static_cast<double>(pop.n);
  if (pop.n < 2) return pop;
  double ss = 0.0;
  for (double v : values) ss += (v - pop.mean) * (v - pop.mean);
  const double denom = convention == std_convention::sample ? static_cast<double>(pop.n - 1)
                                                           : static_cast<double>(pop.n);
  pop.sample_std = std::sqrt(ss / denom);
  // Identical inputs can leave rounding residue in the mean; that is not spread.
  if (pop.sample_std <= 8.0 * std::numeric_limits<double>::epsilon() * scale) pop.sample_std = 0.0;
  return pop;
}

inline double t_statistic(double h, const EntropyPopulation& pop) {
  if (pop.degenerate())
    throw error(errc::degenerate_population,
                "n=" + std::to_string(pop.n) + ", s=" + std::to_string(pop.sample_std));
  return (h - pop.mean) / (pop.sample_std / std::sqrt(static_cast<double>(pop.n)));
}

inline void check_df(double df) {
  if (!(df >= 1.0) || !std::isfinite(df))
    throw error(errc::domain_error, "degrees of freedom must be >= 1, got " + std::to_string(df));
}

// Student-t CDF through the regularized incomplete beta function.
inline double student_t_cdf(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw error(errc::domain_error, "t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double upper_tail = 0.5 * special::incomplete_beta(x, 0.5 * df, 0.5);
  return t >= 0.0 ? 1.0 - upper_tail : upper_tail;
}

// Two-sided p-value 2(1 - F(|t|)), evaluated as I_x(df/2, 1/2) directly to
// avoid cancellation in the tails.
inline double p_value(double t, double df) {
  check_df(df);
  if (std::isnan(t)) throw error(errc::domain_error, "t is NaN");
  if (std::isinf(t)) return 0.0;
  const double p = special::incomplete_beta(df / (df + t * t), 0.5 * df, 0.5);
  return std::clamp(p, 0.0, 1.0);
}

struct SignificanceResult {
  std::string concept_label;
  std::optional<penman::variable_id> variable;
  std::size_t sentence_index = 0;
  double entropy = 0.0;
  double t_stat = 0.0;   // 0 for degenerate populations
  double p_value = 1.0;  // 1 for degenerate populations
  bool selected = false;
};

struct SelectionOptions {
  double alpha = 0.3;
  selection_mode mode = selection_mode::high_only;
  std_convention convention = std_convention::sample;
};

struct Selection {
  std::vector<SignificanceResult> results;
  EntropyPopulation population;
  // Filtering is undefined for n < 2 or s = 0; everything is kept.
  bool degenerate = false;

  std::size_t selected_count() const {
    return static_cast<std::size_t>(
        std::count_if(results.begin(), results.end(), [](const auto& r) { return r.selected; }));
  }
};

inline Selection select_significant(const std::vector<entropy::ConceptEntropy>& entropies,
                                    const SelectionOptions& options = {}) {
  if (entropies.empty()) throw error(errc::empty_population, "no concepts to test");
  if (!(options.alpha > 0.0 && options.alpha <= 1.0))
    throw error(errc::domain_error, "alpha must lie in (0, 1], got " + std::to_string(options.alpha));

  std::vector<double> values;
  values.reserve(entropies.size());
  for (const auto& e : entropies) values.push_back(e.entropy);

  Selection sel;
  sel.population = population(values, options.convention);
  sel.degenerate = sel.population.degenerate();
  const double df = static_cast<double>(sel.population.n) - 1.0;

  sel.results.reserve(entropies.size());
  for (const auto& e : entropies) {
    SignificanceResult r{e.concept_label, e.variable, e.sentence_index, e.entropy, 0.0, 1.0, true};
    if (!sel.degenerate) {
      r.t_stat = t_statistic(e.entropy, sel.population);
      r.p_value = p_value(r.t_stat, df);
      r.selected = r.p_value < options.alpha &&
                   (options.mode == selection_mode::two_sided || r.t_stat > 0.0);
    }
    sel.results.push_back(std::move(r));
  }
  return sel;
}

inline Selection select_significant(const std::vector<entropy::ConceptEntropy>& entropies, double alpha,
                                    selection_mode mode) {
  return select_significant(entropies, SelectionOptions{alpha, mode, std_convention::sample});
}

}  // namespace amrcc::stats
