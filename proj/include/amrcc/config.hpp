#pragma once

// Pipeline configuration and its layered resolution:
// flags > AMRD_* environment > JSON config file > defaults.

#include <cstddef>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "amrcc/entropy.hpp"
#include "amrcc/error.hpp"
#include "amrcc/eval.hpp"
#include "amrcc/stats.hpp"

namespace amrcc {

struct PipelineConfig {
  double alpha = 0.3;
  stats::selection_mode mode = stats::selection_mode::high_only;
  std::string boundary_prefix{entropy::kDefaultBoundaryPrefix};
  eval::match_policy match_policy = eval::match_policy::substring;
  std::size_t k_max = eval::kDefaultKMax;
  double keep_fraction = 0.5;
  eval::Interval interval_standard = eval::kStandardInterval;
  eval::Interval interval_long = eval::kLongInterval;
  stats::std_convention std_convention = stats::std_convention::sample;
  std::size_t workers = 1;

  stats::SelectionOptions selection() const { return {alpha, mode, std_convention}; }

  void validate() const {
    auto bad = [](const std::string& what) { throw error(errc::schema, "config: " + what); };
    if (!(alpha > 0.0 && alpha <= 1.0)) bad("alpha must lie in (0, 1]");
    if (boundary_prefix.empty()) bad("boundary_prefix must be non-empty");
    if (k_max < 1) bad("k_max must be >= 1");
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) bad("keep_fraction must lie in (0, 1]");
    for (const auto& iv : {interval_standard, interval_long})
      if (iv.lo < 1 || iv.lo > iv.hi) bad("intervals need 1 <= lo <= hi");
    if (workers < 1) bad("workers must be >= 1");
  }
};

// One source of settings; unset fields fall through to the next source.
struct ConfigLayer {
  std::optional<double> alpha;
  std::optional<stats::selection_mode> mode;
  std::optional<std::string> boundary_prefix;
  std::optional<eval::match_policy> match_policy;
  std::optional<std::size_t> k_max;
  std::optional<double> keep_fraction;
  std::optional<eval::Interval> interval_standard;
  std::optional<eval::Interval> interval_long;
  std::optional<stats::std_convention> std_convention;
  std::optional<std::size_t> workers;
};

inline stats::selection_mode parse_mode(std::string_view s) {
  if (s == "high-only") return stats::selection_mode::high_only;
  if (s == "two-sided") return stats::selection_mode::two_sided;
  throw error(errc::schema, "mode must be high-only or two-sided, got '" + std::string(s) + "'");
}

inline eval::match_policy parse_match_policy(std::string_view s) {
  if (s == "substring") return eval::match_policy::substring;
  if (s == "strict") return eval::match_policy::strict;
  throw error(errc::schema, "match policy must be substring or strict, got '" + std::string(s) + "'");
}

inline stats::std_convention parse_std_convention(std::string_view s) {
  if (s == "sample") return stats::std_convention::sample;
  if (s == "population") return stats::std_convention::population;
  throw error(errc::schema, "std convention must be sample or population, got '" + std::string(s) + "'");
}

inline std::string to_string(stats::selection_mode m) {
  return m == stats::selection_mode::high_only ? "high-only" : "two-sided";
}
inline std::string to_string(eval::match_policy p) {
  return p == eval::match_policy::substring ? "substring" : "strict";
}
inline std::string to_string(stats::std_convention c) {
  return c == stats::std_convention::sample ? "sample" : "population";
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw error(errc::schema, key + ": not a number: '" + s + "'");
}

inline std::size_t parse_count(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used == s.size() && v >= 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw error(errc::schema, key + ": not a non-negative integer: '" + s + "'");
}

// "lo,hi"
inline eval::Interval parse_interval(const std::string& key, const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw error(errc::schema, key + ": expected 'lo,hi', got '" + s + "'");
  return {static_cast<int>(parse_count(key, s.substr(0, comma))),
          static_cast<int>(parse_count(key, s.substr(comma + 1)))};
}

}  // namespace detail

inline ConfigLayer layer_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw error(errc::schema, "config file must hold a JSON object");
  ConfigLayer l;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "alpha") l.alpha = value.get<double>();
      else if (key == "mode") l.mode = parse_mode(value.get<std::string>());
      else if (key == "boundary_prefix") l.boundary_prefix = value.get<std::string>();
      else if (key == "match_policy") l.match_policy = parse_match_policy(value.get<std::string>());
      else if (key == "k_max") l.k_max = value.get<std::size_t>();
      else if (key == "keep_fraction") l.keep_fraction = value.get<double>();
      else if (key == "interval_standard" || key == "interval_long") {
        const auto pair = value.get<std::vector<int>>();
        if (pair.size() != 2) throw error(errc::schema, key + ": expected [lo, hi]");
        (key == "interval_standard" ? l.interval_standard : l.interval_long) = eval::Interval{pair[0], pair[1]};
      } else if (key == "std_convention") l.std_convention = parse_std_convention(value.get<std::string>());
      else if (key == "workers") l.workers = value.get<std::size_t>();
      else throw error(errc::schema, "config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::schema, std::string("config: ") + e.what());
  }
  return l;
}

inline ConfigLayer layer_from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::io, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::schema, path.string() + ": " + e.what());
  }
  return layer_from_json(j);
}

using EnvLookup = std::function<const char*(const char*)>;

inline ConfigLayer layer_from_env(const EnvLookup& getenv = [](const char* k) { return std::getenv(k); }) {
  ConfigLayer l;
  auto get = [&](const char* key) -> std::optional<std::string> {
    const char* v = getenv(key);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("AMRD_ALPHA")) l.alpha = detail::parse_double("AMRD_ALPHA", *v);
  if (auto v = get("AMRD_MODE")) l.mode = parse_mode(*v);
  if (auto v = get("AMRD_BOUNDARY_PREFIX")) l.boundary_prefix = *v;
  if (auto v = get("AMRD_MATCH_POLICY")) l.match_policy = parse_match_policy(*v);
  if (auto v = get("AMRD_K_MAX")) l.k_max = detail::parse_count("AMRD_K_MAX", *v);
  if (auto v = get("AMRD_KEEP_FRACTION")) l.keep_fraction = detail::parse_double("AMRD_KEEP_FRACTION", *v);
  if (auto v = get("AMRD_INTERVAL_STANDARD"))
    l.interval_standard = detail::parse_interval("AMRD_INTERVAL_STANDARD", *v);
  if (auto v = get("AMRD_INTERVAL_LONG")) l.interval_long = detail::parse_interval("AMRD_INTERVAL_LONG", *v);
  if (auto v = get("AMRD_STD_CONVENTION")) l.std_convention = parse_std_convention(*v);
  if (auto v = get("AMRD_WORKERS")) l.workers = detail::parse_count("AMRD_WORKERS", *v);
  return l;
}

inline void apply(PipelineConfig& c, const ConfigLayer& l) {
  if (l.alpha) c.alpha = *l.alpha;
  if (l.mode) c.mode = *l.mode;
  if (l.boundary_prefix) c.boundary_prefix = *l.boundary_prefix;
  if (l.match_policy) c.match_policy = *l.match_policy;
  if (l.k_max) c.k_max = *l.k_max;
  if (l.keep_fraction) c.keep_fraction = *l.keep_fraction;
  if (l.interval_standard) c.interval_standard = *l.interval_standard;
  if (l.interval_long) c.interval_long = *l.interval_long;
  if (l.std_convention) c.std_convention = *l.std_convention;
  if (l.workers) c.workers = *l.workers;
}

inline PipelineConfig resolve_config(const ConfigLayer& file, const ConfigLayer& env, const ConfigLayer& flags) {
  PipelineConfig c;
  apply(c, file);
  apply(c, env);
  apply(c, flags);
  c.validate();
  return c;
}

inline nlohmann::json to_json(const PipelineConfig& c) {
  return {{"alpha", c.alpha},
          {"mode", to_string(c.mode)},
          {"boundary_prefix", c.boundary_prefix},
          {"match_policy", to_string(c.match_policy)},
          {"k_max", c.k_max},
          {"keep_fraction", c.keep_fraction},
          {"interval_standard", {c.interval_standard.lo, c.interval_standard.hi}},
          {"interval_long", {c.interval_long.lo, c.interval_long.hi}},
          {"std_convention", to_string(c.std_convention)},
          {"workers", c.workers}};
}

}  // namespace amrcc
