#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace amrcc {

// Every failure raised by the library carries one of these codes so callers
// (and tests) can branch on the kind without parsing messages.
enum class errc {
  empty_input,
  unbalanced_parens,
  duplicate_variable,
  dangling_reference,
  malformed_role,
  syntax,
  unknown_variable,
  non_finite_logprob,
  empty_sequence,
  index_out_of_range,
  empty_population,
  degenerate_population,
  domain_error,
  month_out_of_range,
  empty_corpus,
  empty_document,
  missing_bucket,
  unresolved_query,
  duplicate_prediction,
  too_few_models,
  shape_mismatch,
  empty_original,
  schema,
  io,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::empty_input: return "EmptyInput";
    case errc::unbalanced_parens: return "UnbalancedParens";
    case errc::duplicate_variable: return "DuplicateVariable";
    case errc::dangling_reference: return "DanglingReference";
    case errc::malformed_role: return "MalformedRole";
    case errc::syntax: return "SyntaxError";
    case errc::unknown_variable: return "UnknownVariable";
    case errc::non_finite_logprob: return "NonFiniteLogProb";
    case errc::empty_sequence: return "EmptySequence";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::empty_population: return "EmptyPopulation";
    case errc::degenerate_population: return "DegeneratePopulation";
    case errc::domain_error: return "DomainError";
    case errc::month_out_of_range: return "MonthOutOfRange";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::empty_document: return "EmptyDocument";
    case errc::missing_bucket: return "MissingBucket";
    case errc::unresolved_query: return "UnresolvedQuery";
    case errc::duplicate_prediction: return "DuplicatePrediction";
    case errc::too_few_models: return "TooFewModels";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::empty_original: return "EmptyOriginal";
    case errc::schema: return "SchemaError";
    case errc::io: return "IoError";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

// Parse failures also remember the byte offset where they were detected.
class parse_error : public error {
 public:
  parse_error(errc code, const std::string& detail, std::size_t position)
      : error(code, detail + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace amrcc
