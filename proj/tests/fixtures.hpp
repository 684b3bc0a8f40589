#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "causalaudit/graph.hpp"
#include "causalaudit/metrics.hpp"
#include "causalaudit/verdict.hpp"

namespace causalaudit::testfx {

// Scratch directory removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("causal-audit-test-" + std::to_string(counter++) + "-" +
            std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Published 18-edge, 6-responder survey outcomes used as a reference fixture.
inline const std::vector<std::string> kSurveyResponders = {
    "GPT-3.5",        "GPT-4",       "Llama3 8b",
    "Mixtral 8x7b",   "Gemini 1.5 Pro", "Claude 3.5 Sonnet"};

inline const std::vector<std::string> kSurveyEdgeDescriptions = {
    "E1 (V1->V7)",  "E2 (V4->V2)",  "E3 (V4->V3)",  "E4 (V4->V5)",
    "E5 (V5->V3)",  "E6 (V6->V1)",  "E7 (V6->V2)",  "E8 (V6->V4)",
    "E9 (V6->V7)",  "E10 (V6->V1)", "E11 (V7->V1)", "E12 (V7->V4)",
    "E13 (V8->V1)", "E14 (V8->V3)", "E15 (V8->V7)", "E16 (V9->V3)",
    "E17 (V9->V7)", "E18 (V9->V6)"};

// One string per edge row, one verdict code per responder column.
inline const std::vector<std::string> kSurveyCells = {
    "HCHHCC", "HNNNNH", "CHNHNN", "NCHCCH", "HHHHHH", "HCCCCC",
    "HNHNNN", "HNHHNH", "HNHCCC", "CCNHCH", "HHHHCH", "CCHCHH",
    "HHHHHC", "HNNHNH", "HHNHCC", "HNNHNC", "HCHHHC", "CNNHHH"};

inline Verdict verdict_for_code(char code) {
  switch (code) {
    case 'C': return Verdict::causality(Side::A);
    case 'N': return Verdict::no_causality();
    case 'H':
      return Verdict::hallucination(
          {HallucinationReason::general_colored_contradiction});
  }
  throw std::invalid_argument(std::string("unknown verdict code '") + code + "'");
}

inline VerdictMatrix survey_fixture_matrix() {
  std::vector<std::string> edges;
  for (std::size_t e = 0; e < kSurveyCells.size(); ++e)
    edges.push_back(edge_label(e));
  VerdictMatrix m(edges, kSurveyResponders);
  m.set_edge_descriptions(kSurveyEdgeDescriptions);
  for (std::size_t e = 0; e < kSurveyCells.size(); ++e) {
    for (std::size_t r = 0; r < kSurveyResponders.size(); ++r)
      m.set(e, r, CellOutcome::of(verdict_for_code(kSurveyCells[e][r])));
  }
  return m;
}

// Expected per-responder hallucination fractions of the fixture.
inline const std::vector<std::pair<long long, long long>> kSurveyFractions = {
    {13, 18}, {5, 18}, {10, 18}, {12, 18}, {5, 18}, {9, 18}};

inline CausalGraph mini_graph() {
  CausalGraph g;
  g.label = "study_demo";
  g.variables = {{"X", "study_hours"}, {"Y", "exam_score"}, {"Z", "stress_level"}};
  g.edges = {{"X", "Y", true}, {"Z", "Y", true}};
  return g;
}

inline CausalGraph health_pair_graph() {
  CausalGraph g;
  g.label = "health_pair";
  g.variables = {{"V2", "percent_fair_or_poor_health_rate"},
                 {"V1", "life_expectancy"}};
  g.edges = {{"V2", "V1", true}};
  return g;
}

inline CausalGraph physician_pair_graph() {
  CausalGraph g;
  g.label = "physician_pair";
  g.variables = {{"V6", "primary_care_physicians_rate"},
                 {"V1", "life_expectancy"}};
  g.edges = {{"V6", "V1", true}};
  return g;
}

// A five-edge chain used by the scripted end-to-end scenarios.
inline CausalGraph toy_chain_graph() {
  CausalGraph g;
  g.label = "toy_chain";
  g.variables = {{"N1", "rainfall"},      {"N2", "soil_moisture"},
                 {"N3", "crop_yield"},    {"N4", "market_supply"},
                 {"N5", "grain_price"},   {"N6", "export_volume"}};
  g.edges = {{"N1", "N2", true},
             {"N2", "N3", true},
             {"N3", "N4", true},
             {"N4", "N5", true},
             {"N5", "N6", true}};
  return g;
}

inline EdgeAuditProfile profile_of(const std::array<int, 10>& values,
                                   const std::string& responder = "tester") {
  const std::array<Rating, 10> ratings = {
      Rating(values[0]), Rating(values[1]), Rating(values[2]), Rating(values[3]),
      Rating(values[4]), Rating(values[5]), Rating(values[6]), Rating(values[7]),
      Rating(values[8]), Rating(values[9])};
  return profile_from_ratings("E1", "alpha", "beta", responder, ratings);
}

}  // namespace causalaudit::testfx
