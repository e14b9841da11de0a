// Acceptance report: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "amrcc/pipeline.hpp"
#include "amrcc/tables.hpp"
#include "graph_gen.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace amrcc;

namespace {

constexpr double kTableTol = 0.02;
constexpr double kClosedFormTol = 1e-10;
constexpr double kSymmetryTol = 1e-12;
constexpr double kNormalLimitTol = 1e-4;
constexpr double kTauLo = 0.35;
constexpr double kTauHi = 0.65;
constexpr double kReplaySeconds = 1.0;
constexpr double kPipelineSeconds = 5.0;

const fs::path kFixtures = AMRCC_FIXTURES;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int places = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(places) << v;
  return s.str();
}

struct Dataset {
  std::string name;
  tables::AccuracyGrid grid;
  tables::ExpectedTable auc;
  tables::ExpectedTable ablation;
};

Dataset load(const std::string& name) {
  Dataset d{name, {}, {}, {}};
  std::ifstream acc(kFixtures / name / "accuracy.tsv");
  d.grid = tables::load_accuracy(acc);
  std::ifstream auc(kFixtures / name / "expected_auc.tsv");
  d.auc = tables::load_expected(auc);
  std::ifstream abl(kFixtures / name / "expected_ablation.tsv");
  d.ablation = tables::load_expected(abl);
  return d;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

void check_anchor(Outcome& o, const std::string& what, double got, double want) {
  if (!close(got, want, kTableTol)) o.fail(what + " = " + fmt(got) + ", expected " + fmt(want, 2));
}

// 1. Every AUC cell of the main PopQA table.
Outcome auc_replay(const Dataset& pop) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t cells = 0;
  for (const auto& row : pop.auc.rows) {
    if (row.method == "Delta") continue;
    for (std::size_t i = 0; i < pop.auc.models.size(); ++i) {
      const double got = tables::recompute(pop.grid, row.method, row.interval, pop.auc.models[i]);
      ++cells;
      if (!close(got, row.values[i], kTableTol))
        o.fail(row.method + "/" + row.interval + "/" + pop.auc.models[i] + " = " + fmt(got) + ", expected " +
               fmt(row.values[i], 2));
    }
  }
  const auto& g13 = pop.grid.at("Vanilla").at("GPT-Neo-1.3B");
  check_anchor(o, "Vanilla/G-1.3 I_s", eval::auc(g13, eval::kStandardInterval), 553.32);
  check_anchor(o, "Vanilla/G-1.3 I_l", eval::auc(g13, eval::kLongInterval), 262.07);
  check_anchor(o, "Ours/Q3-32 I_l", eval::auc(pop.grid.at("Ours").at("Qwen3-32B"), eval::kLongInterval), 191.09);
  if (cells != 7 * 10 * 2) o.fail("expected 140 cells, found " + std::to_string(cells));
  const double secs = seconds_since(t0);
  if (secs >= kReplaySeconds) o.fail("took " + fmt(secs, 3) + " s");
  if (o.pass) o.detail = std::to_string(cells) + " cells within 0.02, " + fmt(secs * 1000, 2) + " ms";
  return o;
}

// 2. Spread column of both datasets.
Outcome sigma_replay(const std::vector<Dataset>& all) {
  Outcome o;
  std::size_t checked = 0, failed = 0;
  std::string first_failure;
  for (const auto& d : all) {
    for (const auto& row : d.auc.rows) {
      if (!row.sigma || row.method == "Delta") continue;
      std::vector<double> aucs;
      for (const auto& m : d.auc.models) aucs.push_back(tables::recompute(d.grid, row.method, row.interval, m));
      const double s = eval::sigma_across_models(aucs);
      ++checked;
      if (!close(s, *row.sigma, kTableTol)) {
        ++failed;
        o.fail(d.name + " " + row.method + "/" + row.interval + " sigma = " + fmt(s) + ", expected " +
               fmt(*row.sigma, 2));
      }
    }
  }
  const auto& pop = all.front();
  std::vector<double> vanilla;
  for (const auto& m : pop.auc.models)
    vanilla.push_back(tables::recompute(pop.grid, "Vanilla", "standard", m));
  check_anchor(o, "PopQA Vanilla I_s sigma", eval::sigma_across_models(vanilla), 119.63);
  if (o.pass) o.detail = std::to_string(checked) + " sigma cells within 0.02";
  else o.detail += " (" + std::to_string(failed) + "/" + std::to_string(checked) + " cells off)";
  return o;
}

// 3. Delta rows: Ours minus Vanilla.
Outcome delta_replay(const std::vector<Dataset>& all) {
  Outcome o;
  std::size_t checked = 0;
  for (const auto& d : all) {
    for (const auto& row : d.auc.rows) {
      if (row.method != "Delta") continue;
      const auto iv = tables::interval_named(row.interval);
      for (std::size_t i = 0; i < d.auc.models.size(); ++i) {
        const auto& m = d.auc.models[i];
        const double got = eval::auc(d.grid.at("Ours").at(m), iv) - eval::auc(d.grid.at("Vanilla").at(m), iv);
        ++checked;
        if (!close(got, row.values[i], kTableTol))
          o.fail(d.name + " Delta/" + row.interval + "/" + m + " = " + fmt(got) + ", expected " + fmt(row.values[i], 2));
      }
    }
  }
  const auto& pop = all.front().grid;
  check_anchor(o, "G-1.3 I_s delta",
               eval::auc(pop.at("Ours").at("GPT-Neo-1.3B"), eval::kStandardInterval) -
                   eval::auc(pop.at("Vanilla").at("GPT-Neo-1.3B"), eval::kStandardInterval),
               47.30);
  if (checked == 0) o.fail("no delta rows found");
  if (o.pass) o.detail = std::to_string(checked) + " delta cells within 0.02";
  return o;
}

// 4. Every alpha variant loses to alpha = 0.3 on PopQA I_s, for every backbone.
Outcome ablation_order(const Dataset& pop) {
  Outcome o;
  std::size_t checked = 0;
  for (const char* variant : {"alpha=0.01", "alpha=0.05", "alpha=0.1", "alpha=0.5"}) {
    for (const auto& m : pop.ablation.models) {
      const double diff = eval::auc(pop.grid.at(variant).at(m), eval::kStandardInterval) -
                          eval::auc(pop.grid.at("Ours").at(m), eval::kStandardInterval);
      ++checked;
      if (!(diff < 0.0)) o.fail(std::string(variant) + "/" + m + " delta I_s = " + fmt(diff) + " (not negative)");
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " variant/backbone deltas all negative";
  return o;
}

// 5. Student-t CDF against closed forms and limits.
Outcome t_cdf_accuracy() {
  Outcome o;
  double worst1 = 0.0, worst2 = 0.0, worst0 = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double t = -10.0 + 0.05 * i;
    worst1 = std::max(worst1, std::fabs(stats::student_t_cdf(t, 1) - (0.5 + std::atan(t) / std::numbers::pi)));
    worst2 = std::max(worst2, std::fabs(stats::student_t_cdf(t, 2) - oracle::t2_cdf(t)));
  }
  for (int df = 1; df <= 100; ++df) worst0 = std::max(worst0, std::fabs(stats::student_t_cdf(0.0, df) - 0.5));
  const double normal = std::fabs(stats::student_t_cdf(1.959964, 1e6) - 0.975);
  if (worst1 > kClosedFormTol) o.fail("df=1 max error " + std::to_string(worst1));
  if (worst2 > kClosedFormTol) o.fail("df=2 max error " + std::to_string(worst2));
  if (worst0 > kSymmetryTol) o.fail("F(0) max error " + std::to_string(worst0));
  if (normal > kNormalLimitTol) o.fail("normal limit error " + std::to_string(normal));
  std::ostringstream s;
  s << std::scientific << std::setprecision(1) << "max err df1 " << worst1 << ", df2 " << worst2 << ", F(0) "
    << worst0 << ", normal " << normal;
  if (o.pass) o.detail = s.str();
  return o;
}

// 6. Verdicts agree with the brute-force screen.
Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> size(3, 50);
  std::normal_distribution<double> z(0.0, 1.0);
  std::size_t verdicts = 0, disagreements = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> h(static_cast<std::size_t>(size(rng)));
    const double sigma = 0.2 + 0.8 * std::fabs(z(rng));
    for (auto& x : h) x = 1.0 + std::exp(sigma * z(rng));
    std::vector<entropy::ConceptEntropy> concepts;
    for (std::size_t i = 0; i < h.size(); ++i) concepts.push_back({"c", std::nullopt, h[i], 1, 0});
    const auto mine = stats::select_significant(concepts);
    const auto ref = oracle::screen(h, 0.3);
    for (std::size_t i = 0; i < h.size(); ++i) {
      ++verdicts;
      if (mine.results[i].selected != ref[i].selected) ++disagreements;
    }
  }
  if (disagreements) o.fail(std::to_string(disagreements) + " of " + std::to_string(verdicts) + " verdicts differ");
  else o.detail = "1000 populations, " + std::to_string(verdicts) + " verdicts identical";
  return o;
}

// 7. parse(serialize(g)) == g over random graphs.
Outcome penman_round_trip() {
  Outcome o;
  testgen::GraphGen gen{std::mt19937_64(0x7a11)};
  std::size_t reentrant_graphs = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto g = gen(0.3);
    const auto text = penman::serialize_penman(g);
    if (!(penman::parse_penman(text) == g)) {
      o.fail("case " + std::to_string(i) + ": " + text);
      break;
    }
    std::set<std::string> targets;
    for (const auto& r : g.relations())
      if (r.is_edge() && !targets.insert(r.target_variable()).second) {
        ++reentrant_graphs;
        break;
      }
  }
  if (o.pass) o.detail = "10000 cases, " + std::to_string(reentrant_graphs) + " with re-entrancy";
  return o;
}

std::string compress_text(const std::string& corpus, std::size_t workers) {
  PipelineConfig cfg;
  cfg.workers = workers;
  std::istringstream in(corpus);
  std::ostringstream out, log;
  pipeline::run_compress(in, out, log, cfg);
  return out.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 8. Per-document length contract and the corpus-mean ratio band.
Outcome length_contract(const std::string& corpus) {
  Outcome o;
  std::istringstream lines(compress_text(corpus, 1));
  std::size_t records = 0, documents = 0;
  double tau = 0.0;
  for (std::string l; std::getline(lines, l);) {
    if (l.empty()) continue;
    const auto j = nlohmann::json::parse(l);
    ++records;
    tau += j["tau"].get<double>();
    for (const auto& d : j["documents"]) {
      ++documents;
      if (d["compressed_tokens"].get<std::size_t>() > d["source_tokens"].get<std::size_t>())
        o.fail(j["query_id"].get<std::string>() + " document exceeds its source");
    }
  }
  if (records != 20) o.fail("expected 20 records, got " + std::to_string(records));
  tau /= static_cast<double>(std::max<std::size_t>(records, 1));
  if (tau < kTauLo || tau > kTauHi) o.fail("mean tau " + fmt(tau) + " outside [0.35, 0.65]");
  if (o.pass) o.detail = std::to_string(documents) + " documents within source length, mean tau " + fmt(tau);
  return o;
}

// 9. Byte-identical reruns, serial and threaded.
Outcome determinism(const std::string& corpus) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = compress_text(corpus, 1);
  const auto b = compress_text(corpus, 1);
  const auto c = compress_text(corpus, 4);
  const double secs = seconds_since(t0);
  if (a.empty()) o.fail("no output");
  if (a != b) o.fail("two serial runs differ");
  if (a != c) o.fail("serial and 4-worker runs differ");
  if (secs >= kPipelineSeconds) o.fail("took " + fmt(secs, 3) + " s");
  if (o.pass) o.detail = "3 runs byte-identical (" + std::to_string(a.size()) + " bytes), " + fmt(secs, 3) + " s";
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria;
  std::vector<Dataset> datasets;
  std::string corpus;
  try {
    datasets = {load("popqa"), load("entityquestions")};
    corpus = slurp(kFixtures / "synthetic" / "corpus.jsonl");
  } catch (const std::exception& e) {
    std::cout << "FAIL fixtures: " << e.what() << "\n";
    return 1;
  }

  criteria.emplace_back("1 AUC replay", [&] { return auc_replay(datasets[0]); });
  criteria.emplace_back("2 sigma replay", [&] { return sigma_replay(datasets); });
  criteria.emplace_back("3 delta replay", [&] { return delta_replay(datasets); });
  criteria.emplace_back("4 ablation ordering", [&] { return ablation_order(datasets[0]); });
  criteria.emplace_back("5 t-CDF accuracy", t_cdf_accuracy);
  criteria.emplace_back("6 selection oracle", oracle_equivalence);
  criteria.emplace_back("7 PENMAN round trip", penman_round_trip);
  criteria.emplace_back("8 length contract", [&] { return length_contract(corpus); });
  criteria.emplace_back("9 determinism", [&] { return determinism(corpus); });

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << "\n";
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria pass\n";
  return failures == 0 ? 0 : 1;
}
