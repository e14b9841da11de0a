#pragma once

// Line-delimited JSON records.
//
// Corpus line:
//   {"schema_version": 1,             optional, must be 1 when present
//    "query_id": str, "query": str, "answers": [str, ...],
//    "documents": [{"text": str, "hasanswer": bool,
//                   "graphs": [{"penman": str,
//                               "tokens": [{"text": str, "logprob": num <= 0}, ...]}]}]}
// graphs[i] is the graph of sentence i. Graphs may be omitted when only the
// text is needed (tfidf, eval gold).
//
// Prediction line: {"query_id": str, "model_id": str, "method_id": str, "generated": str}

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "amrcc/error.hpp"
#include "amrcc/eval.hpp"

namespace amrcc::corpus {

inline constexpr int kSchemaVersion = 1;

enum class graphs_policy { required, optional };

namespace detail {

using nlohmann::json;

inline const json& field(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw error(errc::schema, where + ": missing field '" + key + "'");
  return *it;
}

inline std::string string_field(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_string()) throw error(errc::schema, where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline const json& array_field(const json& j, const char* key, const std::string& where) {
  const auto& v = field(j, key, where);
  if (!v.is_array()) throw error(errc::schema, where + ": '" + key + "' must be an array");
  return v;
}

inline void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw error(errc::schema, where + ": expected an object");
}

}  // namespace detail

inline eval::QaInstance parse_record(const nlohmann::json& j, graphs_policy graphs = graphs_policy::required) {
  using detail::array_field;
  using detail::string_field;
  detail::require_object(j, "record");
  if (const auto v = j.find("schema_version"); v != j.end())
    if (!v->is_number_integer() || v->get<int>() != kSchemaVersion)
      throw error(errc::schema, "unsupported schema_version " + v->dump());

  eval::QaInstance r;
  r.query_id = string_field(j, "query_id", "record");
  r.query = string_field(j, "query", r.query_id);
  for (const auto& a : array_field(j, "answers", r.query_id)) {
    if (!a.is_string()) throw error(errc::schema, r.query_id + ": answers must be strings");
    r.answers.push_back(a.get<std::string>());
  }
  if (r.answers.empty()) throw error(errc::schema, r.query_id + ": answers is empty");

  const auto& docs = array_field(j, "documents", r.query_id);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const std::string where = r.query_id + ".documents[" + std::to_string(d) + "]";
    detail::require_object(docs[d], where);
    eval::Document doc;
    doc.text = string_field(docs[d], "text", where);
    const auto& has = detail::field(docs[d], "hasanswer", where);
    if (!has.is_boolean()) throw error(errc::schema, where + ": 'hasanswer' must be a boolean");
    doc.hasanswer = has.get<bool>();

    if (graphs == graphs_policy::optional && !docs[d].contains("graphs")) {
      r.documents.push_back(std::move(doc));
      continue;
    }
    const auto& gs = array_field(docs[d], "graphs", where);
    for (std::size_t g = 0; g < gs.size(); ++g) {
      const std::string gwhere = where + ".graphs[" + std::to_string(g) + "]";
      detail::require_object(gs[g], gwhere);
      eval::GraphRecord rec;
      rec.penman = string_field(gs[g], "penman", gwhere);
      const auto& toks = array_field(gs[g], "tokens", gwhere);
      for (std::size_t t = 0; t < toks.size(); ++t) {
        const std::string twhere = gwhere + ".tokens[" + std::to_string(t) + "]";
        detail::require_object(toks[t], twhere);
        const auto& lp = detail::field(toks[t], "logprob", twhere);
        if (!lp.is_number()) throw error(errc::schema, twhere + ": 'logprob' must be a number");
        const double logprob = lp.get<double>();
        if (!std::isfinite(logprob) || logprob > 0.0)
          throw error(errc::schema, twhere + ": logprob must be a finite natural log <= 0");
        rec.tokens.push_back({string_field(toks[t], "text", twhere), logprob, t});
      }
      doc.graphs.push_back(std::move(rec));
    }
    r.documents.push_back(std::move(doc));
  }
  r.k = r.documents.size();
  return r;
}

inline eval::QaInstance parse_record_line(std::string_view line, graphs_policy graphs = graphs_policy::required) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::schema, std::string("malformed JSON: ") + e.what());
  }
  return parse_record(j, graphs);
}

inline eval::PredictionRecord parse_prediction(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::schema, std::string("malformed JSON: ") + e.what());
  }
  detail::require_object(j, "prediction");
  return {detail::string_field(j, "query_id", "prediction"), detail::string_field(j, "model_id", "prediction"),
          detail::string_field(j, "method_id", "prediction"), detail::string_field(j, "generated", "prediction")};
}

inline bool is_blank(std::string_view line) {
  for (char c : line)
    if (!text::is_space(c)) return false;
  return true;
}

}  // namespace amrcc::corpus
