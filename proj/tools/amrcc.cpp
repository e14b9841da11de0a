// amrcc: batch front-end for AMR-based context compression and evaluation.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "amrcc/config.hpp"
#include "amrcc/pipeline.hpp"

namespace {

struct Flags {
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<std::string> boundary_prefix;
  std::optional<std::string> match_policy;
  std::optional<std::size_t> k_max;
  std::optional<double> keep_fraction;
  std::optional<std::size_t> workers;
  std::optional<std::string> std_convention;
  std::string config_path;

  amrcc::ConfigLayer layer() const {
    amrcc::ConfigLayer l;
    l.alpha = alpha;
    if (mode) l.mode = amrcc::parse_mode(*mode);
    l.boundary_prefix = boundary_prefix;
    if (match_policy) l.match_policy = amrcc::parse_match_policy(*match_policy);
    l.k_max = k_max;
    l.keep_fraction = keep_fraction;
    l.workers = workers;
    if (std_convention) l.std_convention = amrcc::parse_std_convention(*std_convention);
    return l;
  }

  amrcc::PipelineConfig resolve() const {
    const auto file = config_path.empty() ? amrcc::ConfigLayer{} : amrcc::layer_from_file(config_path);
    return amrcc::resolve_config(file, amrcc::layer_from_env(), layer());
  }
};

void add_pipeline_flags(CLI::App& app, Flags& f) {
  app.add_option("--alpha", f.alpha, "significance threshold in (0, 1]");
  app.add_option("--mode", f.mode, "high-only or two-sided");
  app.add_option("--boundary-prefix", f.boundary_prefix, "word-boundary marker of the parser tokenizer");
  app.add_option("--match-policy", f.match_policy, "substring or strict");
  app.add_option("--k-max", f.k_max, "largest K kept");
  app.add_option("--keep-fraction", f.keep_fraction, "TF-IDF token budget in (0, 1]");
  app.add_option("--workers", f.workers, "worker threads");
  app.add_option("--std-convention", f.std_convention, "sample or population");
  app.add_option("--config", f.config_path, "JSON config file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AMR-based context compression and QA evaluation"};
  app.require_subcommand(1);
  Flags flags;
  std::string input, output, gold, predictions, fixtures;

  auto* compress = app.add_subcommand("compress", "compress corpus records into concept contexts");
  auto* score = app.add_subcommand("score", "dump per-concept entropy, t, p and verdicts");
  auto* tfidf = app.add_subcommand("tfidf", "TF-IDF baseline compression");
  for (auto* sub : {compress, score, tfidf}) {
    sub->add_option("input", input, "corpus JSONL")->required();
    sub->add_option("-o,--output", output, "output JSONL")->required();
    add_pipeline_flags(*sub, flags);
  }

  auto* evaluate = app.add_subcommand("eval", "accuracy by K, AUC, spread and deltas");
  evaluate->add_option("gold", gold, "corpus JSONL with answers")->required();
  evaluate->add_option("predictions", predictions, "predictions JSONL")->required();
  evaluate->add_option("-o,--output", output, "machine-readable report JSONL");
  add_pipeline_flags(*evaluate, flags);

  auto* verify = app.add_subcommand("verify-tables", "replay metric tables from accuracy grids");
  verify->add_option("fixtures", fixtures, "dataset directory or a root of dataset directories")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : amrcc::pipeline::exit_schema;
  }

  namespace pl = amrcc::pipeline;
  if (verify->parsed()) return pl::cmd_verify_tables(fixtures);

  amrcc::PipelineConfig cfg;
  try {
    cfg = flags.resolve();
  } catch (const amrcc::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::exit_schema;
  }

  if (compress->parsed()) return pl::cmd_compress(input, output, cfg);
  if (score->parsed()) return pl::cmd_score(input, output, cfg);
  if (tfidf->parsed()) return pl::cmd_tfidf(input, output, cfg);
  if (evaluate->parsed())
    return pl::cmd_eval(gold, predictions,
                        output.empty() ? std::nullopt : std::optional<std::filesystem::path>(output), cfg);
  return pl::exit_schema;
}
