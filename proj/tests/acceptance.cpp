// Acceptance runner: exercises the library and the command-line binary
// against the published fixture values and the scripted end-to-end
// scenarios. Prints one [PASS]/[FAIL] line per criterion; the exit code is
// the number of failed criteria. argv[1] must be the causal-audit binary.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "causalaudit/survey.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace causalaudit;
using causalaudit::testfx::TempDir;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

struct Checker {
  bool ok = true;
  std::ostringstream detail;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      detail << "       - " << what << "\n";
    }
  }

  template <typename T, typename U>
  void expect_eq(const T& got, const U& want, const std::string& what) {
    if (!(got == want)) {
      ok = false;
      detail << "       - " << what << ": got " << got << ", want " << want
             << "\n";
    }
  }
};

// Displayed 1-decimal values agree when the exact percentage is within
// +/-0.05 of the target and the half-up rounding lands on the same tenth.
void expect_tenths(Checker& c, const Percent& rate, int want_tenths,
                   const std::string& what) {
  c.expect(rate.defined(), what + " is undefined");
  if (!rate.defined()) return;
  c.expect_eq(rate.tenths(), want_tenths, what + " (rounded tenths)");
  const double delta = std::fabs(rate.exact() - want_tenths / 10.0);
  c.expect(delta <= 0.05, what + " deviates by " + std::to_string(delta));
}

// ---------------------------------------------------------------------------
// 1. Fixture survey rates

bool fixture_survey_rates(Checker& c, const std::string&) {
  const auto start = Clock::now();
  const VerdictMatrix matrix = testfx::survey_fixture_matrix();
  const RateSummary rates = compute_rates(matrix);

  const std::vector<int> model_tenths = {722, 278, 556, 667, 278, 500};
  c.expect_eq(rates.per_responder.size(), model_tenths.size(),
              "responder count");
  for (std::size_t i = 0; i < model_tenths.size(); ++i)
    expect_tenths(c, rates.per_responder[i].rate, model_tenths[i],
                  "rate for " + testfx::kSurveyResponders[i]);

  const std::vector<int> edge_tenths = {500, 333, 333, 333, 1000, 167,
                                        333, 667, 333, 333, 833,  500,
                                        833, 500, 500, 333, 667,  500};
  c.expect_eq(rates.per_edge.size(), edge_tenths.size(), "edge count");
  for (std::size_t e = 0; e < edge_tenths.size(); ++e)
    expect_tenths(c, rates.per_edge[e].rate, edge_tenths[e],
                  "rate for edge E" + std::to_string(e + 1));

  expect_tenths(c, rates.overall, 500, "overall rate");
  const long long elapsed = ms_since(start);
  c.expect(elapsed < 1000,
           "rate computation took " + std::to_string(elapsed) + " ms");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 2. Grounding improvement rows and aggregate discrepancy flags

bool grounding_improvement(Checker& c, const std::string&) {
  const RateSummary before = compute_rates(testfx::survey_fixture_matrix());
  const RateSummary after = summary_from_fractions(
      testfx::kSurveyResponders,
      {{1, 18}, {1, 18}, {5, 18}, {3, 18}, {1, 18}, {1, 18}});
  const ImprovementReport report = compute_improvement(before, after, 139, 361);

  const std::vector<int> improvements = {666, 222, 278, 500, 222, 444};
  c.expect_eq(report.rows.size(), improvements.size(), "row count");
  for (std::size_t i = 0; i < improvements.size() && i < report.rows.size(); ++i)
    c.expect_eq(report.rows[i].improvement_tenths, improvements[i],
                "improvement for " + report.rows[i].responder);

  c.expect_eq(report.discrepancy_notes.size(), std::size_t{2},
              "discrepancy note count");
  const std::string want_after =
      "claimed after-treatment average 13.9% is not derivable from the listed "
      "rates (mean of rates = 11.1%)";
  const std::string want_improvement =
      "claimed average improvement 36.1% is not derivable from the listed "
      "improvements (mean = 38.9%)";
  bool found_after = false, found_improvement = false;
  for (const auto& note : report.discrepancy_notes) {
    if (note == want_after) found_after = true;
    if (note == want_improvement) found_improvement = true;
  }
  c.expect(found_after, "missing flag for the claimed after-average");
  c.expect(found_improvement, "missing flag for the claimed improvement average");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 3. Debate lineup rate average

bool debate_rate_average(Checker& c, const std::string&) {
  const std::vector<std::tuple<std::string, std::string, std::string>> lineups =
      {{"Claude", "GPT-4", "Gemini"},
       {"GPT-4", "Claude", "Gemini"},
       {"Gemini", "Claude", "GPT-4"},
       {"Claude", "Gemini", "GPT-4"}};
  const std::vector<Percent> rates = {{2, 18}, {1, 18}, {3, 18}, {3, 18}};
  const DebateResults results = debate_results_from_rates(lineups, rates);

  const std::vector<int> row_tenths = {111, 56, 167, 167};
  for (std::size_t i = 0; i < row_tenths.size(); ++i)
    expect_tenths(c, results.rows[i].rate, row_tenths[i],
                  "lineup " + std::to_string(i + 1) + " rate");
  expect_tenths(c, results.average, 125, "lineup average");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 4. Exhaustive verdict sweep

bool exhaustive_verdict_sweep(Checker& c, const std::string&) {
  const auto start = Clock::now();
  const StrengthThreshold th;
  constexpr std::uint32_t kTotal = 1u << 20;  // 4^10 rating assignments

  try {
    for (std::uint32_t code = 0; code < kTotal; ++code) {
      std::array<Rating, 10> ratings = {Rating(1), Rating(1), Rating(1),
                                        Rating(1), Rating(1), Rating(1),
                                        Rating(1), Rating(1), Rating(1),
                                        Rating(1)};
      for (int i = 0; i < 10; ++i)
        ratings[i] = Rating(1 + static_cast<int>((code >> (2 * i)) & 3u));
      const EdgeAuditProfile profile =
          profile_from_ratings("E1", "alpha", "beta", "sweeper", ratings);

      const Verdict first = evaluate(profile, th);
      const Verdict second = evaluate(profile, th);
      if (!(first == second)) {
        c.expect(false, "nondeterministic verdict at code " + std::to_string(code));
        return c.ok;
      }

      const bool is_h = first.kind() == Verdict::Kind::hallucination;
      if (is_h != !first.reasons().empty()) {
        c.expect(false, "reason-list biconditional broken at code " +
                            std::to_string(code));
        return c.ok;
      }

      const Verdict mirrored = evaluate(swapped_profile(profile), th);
      bool symmetric = mirrored.kind() == first.kind() &&
                       mirrored.reasons() == first.reasons();
      if (symmetric && first.kind() == Verdict::Kind::causality)
        symmetric = mirrored.dominant() != first.dominant();
      if (!symmetric) {
        c.expect(false, "swap asymmetry at code " + std::to_string(code));
        return c.ok;
      }
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("evaluation threw: ") + e.what());
    return c.ok;
  }

  const long long elapsed = ms_since(start);
  c.expect(elapsed < 60000, "sweep took " + std::to_string(elapsed) + " ms");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 5. Verdict archetype conformance

bool verdict_archetypes(Checker& c, const std::string&) {
  const StrengthThreshold th;
  const auto verdict_of = [&](const std::array<int, 10>& values) {
    return evaluate(testfx::profile_of(values), th);
  };

  // Matching general and specific dominance: causality toward the dominant side.
  const Verdict dominant_a = verdict_of({4, 1, 4, 4, 4, 4, 1, 1, 1, 1});
  c.expect(dominant_a.kind() == Verdict::Kind::causality &&
               dominant_a.dominant() == Side::A,
           "matching dominance should yield causality toward A");
  const Verdict dominant_b = verdict_of({1, 4, 1, 1, 1, 1, 4, 4, 4, 4});
  c.expect(dominant_b.kind() == Verdict::Kind::causality &&
               dominant_b.dominant() == Side::B,
           "mirrored dominance should yield causality toward B");

  // All ratings weak: no causality.
  c.expect(verdict_of({1, 1, 1, 1, 1, 1, 1, 1, 1, 1}).kind() ==
               Verdict::Kind::no_causality,
           "all-weak profile should yield no causality");
  c.expect(verdict_of({2, 2, 2, 2, 2, 2, 2, 2, 2, 2}).kind() ==
               Verdict::Kind::no_causality,
           "all-2 profile should stay below the default strength threshold");

  // General none against dominant specifics: contradiction hallucination.
  const Verdict general_flat = verdict_of({1, 1, 4, 4, 4, 4, 1, 1, 1, 1});
  c.expect(general_flat.kind() == Verdict::Kind::hallucination &&
               general_flat.reasons() ==
                   std::vector<HallucinationReason>{
                       HallucinationReason::general_colored_contradiction},
           "flat general against dominant specifics should contradict");

  // General dominant against flat specifics: the mirrored contradiction.
  const Verdict specifics_flat = verdict_of({4, 1, 1, 1, 1, 1, 1, 1, 1, 1});
  c.expect(specifics_flat.kind() == Verdict::Kind::hallucination &&
               specifics_flat.reasons() ==
                   std::vector<HallucinationReason>{
                       HallucinationReason::general_colored_contradiction},
           "dominant general against flat specifics should contradict");

  // Two-way chain: "higher alpha causes lower beta" and "lower beta causes
  // higher alpha" both strong.
  const EdgeAuditProfile chain = testfx::profile_of({1, 1, 1, 4, 1, 1, 1, 1, 4, 1});
  const auto records = detect_polarity_cycle(chain, th);
  bool chain_found = false;
  for (const auto& record : records) {
    if (record.a_pattern == PolarityPattern::hl &&
        record.b_pattern == PolarityPattern::lh)
      chain_found = true;
  }
  c.expect(chain_found, "hl/lh cycle record missing");
  const Verdict chain_verdict = evaluate(chain, th);
  bool cycle_reason = false;
  for (const auto& reason : chain_verdict.reasons())
    if (reason == HallucinationReason::polarity_cycle) cycle_reason = true;
  c.expect(chain_verdict.kind() == Verdict::Kind::hallucination && cycle_reason,
           "two-way chain should hallucinate with a polarity cycle");

  // The same chain inside an otherwise A-dominant profile isolates the
  // cycle as the only reason.
  const Verdict isolated = verdict_of({4, 1, 4, 4, 1, 1, 1, 1, 4, 1});
  c.expect(isolated.kind() == Verdict::Kind::hallucination &&
               isolated.reasons() ==
                   std::vector<HallucinationReason>{
                       HallucinationReason::polarity_cycle},
           "cycle inside a dominant profile should be the only reason");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 6. Prompt template goldens

bool prompt_goldens(Checker& c, const std::string&) {
  const CausalGraph graph = testfx::health_pair_graph();
  const EdgePromptSet set = build_prompt_set(0, graph);
  c.expect_eq(set.prompts.size(), std::size_t{10}, "battery size");

  const std::string general_a =
      "On a scale from 1 to 4, where 4 represents strong or most likely, rate "
      "the cause-and-effect relationship: changing percent fair or poor "
      "health rate causes a change in life expectancy";
  const std::string general_b =
      "On a scale from 1 to 4, where 4 represents strong or most likely, rate "
      "the cause-and-effect relationship: changing life expectancy causes a "
      "change in percent fair or poor health rate";
  c.expect(set.prompts[0].text == general_a, "general prompt A diverges");
  c.expect(set.prompts[1].text == general_b, "general prompt B diverges");

  const std::string claim =
      "changing percent fair or poor health rate causes a change in life "
      "expectancy";
  const std::string arbiter =
      render_arbiter_prompt(claim, "Rating: 4, the data supports it.",
                            "Rating: 1, the link is spurious.");
  const std::string want_arbiter =
      "Debater 1 response:\nRating: 4, the data supports it.\n\n"
      "Debater 2 response:\nRating: 1, the link is spurious.\n\n"
      "Using the responses of the two debaters and your own knowledge, "
      "generate a final rating in response to the question: On a scale from 1 "
      "to 4, 4 represents strong or most likely, rate the cause-and-effect "
      "relationship: " +
      claim;
  c.expect(arbiter == want_arbiter, "arbiter prompt diverges");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 7. Fact corpus goldens

bool corpus_goldens(Checker& c, const std::string&) {
  const Corpus physician = build_corpus(testfx::physician_pair_graph());
  c.expect_eq(physician.facts.size(), std::size_t{1}, "physician corpus size");
  if (!physician.facts.empty())
    c.expect(physician.facts[0].statement ==
                 "primary care physicians rate strongly affects life expectancy.",
             "physician fact diverges: " + physician.facts[0].statement);

  CausalGraph income;
  income.label = "income_pair";
  income.variables = {{"V3", "median_household_income"},
                      {"V1", "life_expectancy"}};
  income.edges = {{"V3", "V1", true}};
  const Edge& edge = income.edges[0];

  const std::string prop = render_stance_sentence(
      build_stance_corpus(edge, Stance::proposition, income));
  c.expect(prop ==
               "median household income strongly affects life expectancy, but "
               "life expectancy does not affect median household income.",
           "proposition stance diverges: " + prop);
  const std::string opp = render_stance_sentence(
      build_stance_corpus(edge, Stance::opposition, income));
  c.expect(opp ==
               "life expectancy strongly affects median household income, but "
               "median household income does not affect life expectancy.",
           "opposition stance diverges: " + opp);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 8. Scripted end-to-end scenarios

ModelSpec scripted(const std::string& name, const std::filesystem::path& path) {
  ModelSpec spec;
  spec.provider_kind = ProviderKind::scripted;
  spec.model_name = name;
  spec.scenario_path = path.string();
  return spec;
}

int hallucination_count(const VerdictMatrix& m, std::size_t responder) {
  int count = 0;
  for (std::size_t e = 0; e < m.edges().size(); ++e) {
    const CellOutcome& cell = m.at(e, responder);
    if (cell.verdict && cell.verdict->code() == 'H') ++count;
  }
  return count;
}

bool scripted_scenarios(Checker& c, const std::string&) {
  // (a) A provider that rates the general claims flat but favors one side on
  // the specific claims contradicts itself.
  TempDir dir;
  const auto pair_path = dir.path / "pair.json";
  CausalGraph pair;
  pair.label = "pair";
  pair.variables = {{"A", "alpha"}, {"B", "beta"}};
  pair.edges = {{"A", "B", true}};
  testfx::write_file(pair_path, serialize_graph(pair, GraphFormat::json));

  const auto skeptic_path = dir.path / "skeptic.json";
  testfx::write_file(skeptic_path, R"([
    {"match": {"context_contains": "established facts",
               "question_contains": " alpha causes"},
     "response": "Rating: 4"},
    {"match": {"context_contains": "established facts"},
     "response": "Rating: 1"},
    {"match": {"prompt_index": 0}, "response": "Rating: 1"},
    {"match": {"prompt_index": 1}, "response": "Rating: 1"},
    {"match": {"question_contains": " alpha causes"}, "response": "Rating: 4"},
    {"response": "Rating: 1", "default": true}
  ])");

  RunConfig solo;
  solo.graph_path = pair_path.string();
  solo.models = {scripted("skeptic", skeptic_path)};
  solo.out_dir = (dir.path / "out-solo").string();

  auto start = Clock::now();
  const RunSummary before = run_survey(solo);
  long long elapsed = ms_since(start);
  c.expect(elapsed < 5000,
           "solo scenario took " + std::to_string(elapsed) + " ms");
  c.expect(before.matrix.at(0, 0).verdict &&
               before.matrix.at(0, 0).verdict->kind() ==
                   Verdict::Kind::hallucination,
           "self-contradicting provider should hallucinate");

  // (b) The same provider defers to injected facts: rag mode flips the cell.
  RunConfig grounded = solo;
  grounded.mode = RunMode::rag;
  grounded.rag.reference_graph_path = pair_path.string();
  grounded.out_dir = (dir.path / "out-rag").string();

  start = Clock::now();
  const RunSummary after = run_survey(grounded);
  elapsed = ms_since(start);
  c.expect(elapsed < 5000, "rag scenario took " + std::to_string(elapsed) + " ms");
  c.expect(after.matrix.at(0, 0).verdict &&
               after.matrix.at(0, 0).verdict->kind() == Verdict::Kind::causality,
           "fact injection should flip the verdict to causality");

  // (c) A debate lineup whose arbiter follows the forward claims produces
  // fewer hallucinations over a five-edge chain than the worst solo provider.
  const CausalGraph chain = testfx::toy_chain_graph();
  const auto chain_path = dir.path / "chain.json";
  testfx::write_file(chain_path, serialize_graph(chain, GraphFormat::json));

  const auto steady_path = dir.path / "steady.json";
  testfx::write_file(steady_path, R"([{"response": "Rating: 1", "default": true}])");
  const auto chaotic_path = dir.path / "chaotic.json";
  testfx::write_file(chaotic_path, R"([{"response": "Rating: 4", "default": true}])");

  RunConfig chain_solo;
  chain_solo.graph_path = chain_path.string();
  chain_solo.models = {scripted("steady", steady_path),
                       scripted("chaotic", chaotic_path)};
  chain_solo.out_dir = (dir.path / "out-chain-solo").string();

  start = Clock::now();
  const RunSummary chain_summary = run_survey(chain_solo);
  elapsed = ms_since(start);
  c.expect(elapsed < 5000,
           "chain solo scenario took " + std::to_string(elapsed) + " ms");
  int worst_solo = 0;
  for (std::size_t r = 0; r < chain_summary.matrix.responders().size(); ++r)
    worst_solo = std::max(worst_solo, hallucination_count(chain_summary.matrix, r));
  c.expect(worst_solo >= 5, "the chaotic provider should hallucinate everywhere");

  // The arbiter rates forward claims 4 and everything else 1; the debaters
  // reply with free text that carries no rating of its own.
  json arbiter_rules = json::array();
  for (const Edge& e : chain.edges) {
    const std::string u = chain.variable(e.from).display_name();
    const std::string v = chain.variable(e.to).display_name();
    for (const std::string& needle :
         {"changing " + u + " causes a change in " + v,
          u + " causes higher " + v, u + " causes lower " + v}) {
      arbiter_rules.push_back(json{{"match", json{{"question_contains", needle}}},
                                   {"response", "Final rating: 4"}});
    }
  }
  arbiter_rules.push_back(json{{"response", "Final rating: 1"}, {"default", true}});
  const auto arbiter_path = dir.path / "arbiter.json";
  testfx::write_file(arbiter_path, arbiter_rules.dump(2));

  const auto prop_path = dir.path / "prop.json";
  testfx::write_file(prop_path,
                     R"([{"response": "I support the claim.", "default": true}])");
  const auto opp_path = dir.path / "opp.json";
  testfx::write_file(opp_path,
                     R"([{"response": "I doubt the claim.", "default": true}])");

  RunConfig chain_debate;
  chain_debate.graph_path = chain_path.string();
  chain_debate.mode = RunMode::debate;
  chain_debate.models = {scripted("prop-bot", prop_path),
                         scripted("opp-bot", opp_path),
                         scripted("arbiter-bot", arbiter_path)};
  chain_debate.debate.arbiter_pool = {"arbiter-bot"};
  chain_debate.out_dir = (dir.path / "out-chain-debate").string();

  start = Clock::now();
  const RunSummary debate_summary = run_survey(chain_debate);
  elapsed = ms_since(start);
  c.expect(elapsed < 5000,
           "chain debate scenario took " + std::to_string(elapsed) + " ms");
  int worst_debate = 0;
  for (std::size_t r = 0; r < debate_summary.matrix.responders().size(); ++r)
    worst_debate =
        std::max(worst_debate, hallucination_count(debate_summary.matrix, r));
  c.expect(worst_debate < worst_solo,
           "debate lineups should hallucinate less than the worst solo provider "
           "(debate " +
               std::to_string(worst_debate) + ", solo " +
               std::to_string(worst_solo) + ")");
  return c.ok;
}

// ---------------------------------------------------------------------------
// 9. Replay determinism through the CLI

bool run_cli(Checker& c, const std::string& command, const std::string& label) {
  const int status = std::system(command.c_str());
  const bool ok = status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  c.expect(ok, label + " failed (status " + std::to_string(status) + ")");
  return ok;
}

bool replay_determinism(Checker& c, const std::string& cli) {
  TempDir dir;
  const auto graph_path = dir.path / "graph.json";
  testfx::write_file(graph_path,
                     serialize_graph(testfx::mini_graph(), GraphFormat::json));

  const auto upbeat_path = dir.path / "upbeat.json";
  testfx::write_file(upbeat_path, R"([
    {"match": {"question_contains": " study hours causes"}, "response": "Rating: 4"},
    {"response": "Rating: 2", "default": true}
  ])");
  const auto flat_path = dir.path / "flat.json";
  testfx::write_file(flat_path, R"([{"response": "Rating: 1", "default": true}])");

  json config;
  config["graph"] = graph_path.string();
  config["out_dir"] = (dir.path / "out-record").string();
  config["cassette_dir"] = (dir.path / "tapes").string();
  config["replay"] = "record";
  config["models"] = json::array(
      {json{{"name", "upbeat"}, {"provider", "scripted"},
            {"scenario", upbeat_path.string()}},
       json{{"name", "flat"}, {"provider", "scripted"},
            {"scenario", flat_path.string()}}});
  const auto config_path = dir.path / "config.json";
  testfx::write_file(config_path, config.dump(2));

  const std::string log = " >> \"" + (dir.path / "cli-log.txt").string() +
                          "\" 2>&1";
  const std::string base = "\"" + cli + "\" survey --config \"" +
                           config_path.string() + "\"";
  if (!run_cli(c, base + log, "recording run")) return c.ok;

  const auto replay_a = dir.path / "out-replay-a";
  const auto replay_b = dir.path / "out-replay-b";
  if (!run_cli(c, base + " --replay-only --out \"" + replay_a.string() + "\"" + log,
               "first replay run"))
    return c.ok;
  if (!run_cli(c, base + " --replay-only --out \"" + replay_b.string() + "\"" + log,
               "second replay run"))
    return c.ok;

  for (const char* name : {"report.csv", "matrix.json"}) {
    const std::string a = testfx::read_file(replay_a / name);
    const std::string b = testfx::read_file(replay_b / name);
    c.expect(!a.empty(), std::string(name) + " is empty");
    c.expect(a == b, std::string(name) + " differs between replay runs");
  }
  return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-causal-audit-binary>\n";
    return 2;
  }
  const std::string cli = argv[1];

  struct Criterion {
    const char* name;
    bool (*run)(Checker&, const std::string&);
  };
  const std::vector<Criterion> criteria = {
      {"fixture survey rates", fixture_survey_rates},
      {"grounding improvement report and aggregate flags", grounding_improvement},
      {"debate lineup rate average", debate_rate_average},
      {"exhaustive verdict sweep", exhaustive_verdict_sweep},
      {"verdict archetype conformance", verdict_archetypes},
      {"prompt template goldens", prompt_goldens},
      {"fact corpus goldens", corpus_goldens},
      {"scripted end-to-end scenarios", scripted_scenarios},
      {"replay determinism through the CLI", replay_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Checker checker;
    const auto start = Clock::now();
    bool ok = false;
    try {
      ok = criteria[i].run(checker, cli);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("unexpected exception: ") + e.what());
      ok = false;
    }
    const long long elapsed = ms_since(start);
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ". "
              << criteria[i].name << " (" << elapsed << " ms)\n";
    if (!ok) {
      std::cout << checker.detail.str();
      ++failures;
    }
  }
  return failures;
}
