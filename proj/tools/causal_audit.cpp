#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "causalaudit/chart.hpp"
#include "causalaudit/survey.hpp"
#include "json.hpp"

namespace ca = causalaudit;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ca::ConfigError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct Overrides {
  std::string config_path;
  std::string mode;
  std::string out;
  std::string graph;
  bool replay_only = false;
  bool record = false;
  int t_strong = 0;
  int parallelism = 0;
};

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "run configuration JSON")
      ->required();
  cmd->add_option("--mode", o.mode, "solo, rag or debate");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--graph", o.graph, "causal graph file (.json or .dot)");
  cmd->add_flag("--replay-only", o.replay_only,
                "serve every request from recorded cassettes");
  cmd->add_flag("--record", o.record, "record live responses into cassettes");
  cmd->add_option("--t-strong", o.t_strong, "strength threshold (2..4)");
  cmd->add_option("--parallelism", o.parallelism, "concurrent cell tasks");
}

ca::RunConfig resolve_config(const Overrides& o) {
  ca::RunConfig config = ca::load_run_config(o.config_path);
  if (!o.mode.empty()) config.mode = ca::run_mode_from_string(o.mode);
  if (!o.out.empty()) config.out_dir = o.out;
  if (!o.graph.empty()) config.graph_path = o.graph;
  if (o.replay_only && o.record)
    throw ca::ConfigError("--replay-only and --record are mutually exclusive");
  if (o.replay_only) config.replay = ca::ReplayPolicy::replay_only;
  if (o.record) config.replay = ca::ReplayPolicy::record;
  if (o.t_strong) config.t_strong = o.t_strong;
  if (o.parallelism) config.parallelism = o.parallelism;
  return config;
}

std::string verdict_text(const ca::Verdict& v, const std::string& a_name,
                         const std::string& b_name) {
  switch (v.kind()) {
    case ca::Verdict::Kind::causality:
      return std::string("C (") +
             (v.dominant() == ca::Side::A ? a_name : b_name) + " dominant)";
    case ca::Verdict::Kind::no_causality:
      return "N";
    case ca::Verdict::Kind::hallucination: {
      std::string text = "H (";
      for (std::size_t i = 0; i < v.reasons().size(); ++i) {
        if (i) text += ", ";
        text += ca::to_string(v.reasons()[i]);
      }
      return text + ")";
    }
  }
  return "";
}

int run_survey_command(const Overrides& o, std::optional<ca::RunMode> forced_mode) {
  ca::RunConfig config = resolve_config(o);
  if (forced_mode) config.mode = *forced_mode;
  const ca::RunSummary summary = ca::run_survey(config);
  std::cout << "run " << summary.run_id << " (" << ca::to_string(config.mode)
            << "): " << summary.rates.total_cells << " cells, "
            << summary.rates.total_hallucinations
            << " hallucinations, overall rate "
            << summary.rates.overall.display() << "%\n";
  if (summary.unparseable_cells > 0)
    std::cout << summary.unparseable_cells
              << " cell(s) had unparseable ratings and carry no verdict\n";
  std::cout << "outputs written to " << summary.out_dir.string() << "\n";
  return summary.exit_code;
}

std::size_t resolve_edge_index(const std::string& text, std::size_t n_edges) {
  std::string digits = text;
  if (!digits.empty() && (digits[0] == 'E' || digits[0] == 'e'))
    digits.erase(0, 1);
  std::size_t pos = 0;
  unsigned long value = 0;
  try {
    value = std::stoul(digits, &pos);
  } catch (const std::exception&) {
    throw ca::ConfigError("cannot parse edge label '" + text + "'");
  }
  if (pos != digits.size() || value == 0 || value > n_edges)
    throw ca::ConfigError("edge '" + text + "' is out of range (graph has " +
                          std::to_string(n_edges) + " edges)");
  return value - 1;
}

int run_audit_command(const Overrides& o, const std::string& edge_text) {
  ca::RunConfig config = resolve_config(o);
  if (config.out_dir.empty()) config.out_dir = ".";
  config.validate();

  const ca::CausalGraph graph = ca::load_graph_file(config.graph_path);
  if (graph.edges.empty()) throw ca::ConfigError("graph has no edges");
  const std::size_t edge_index = resolve_edge_index(edge_text, graph.edges.size());

  std::optional<ca::Corpus> corpus;
  if (config.mode == ca::RunMode::rag) {
    if (!config.rag.corpus_path.empty())
      corpus = ca::parse_corpus(read_file(config.rag.corpus_path));
    else
      corpus = ca::build_corpus(ca::load_graph_file(config.rag.reference_graph_path));
  }

  ca::GatewayOptions options;
  options.replay = config.replay;
  options.cassette_dir = config.cassette_dir.empty()
                             ? std::filesystem::path(config.out_dir) / "cassettes"
                             : std::filesystem::path(config.cassette_dir);
  ca::Gateway gateway(config.models, options);
  const ca::StrengthThreshold th(config.t_strong);

  std::vector<ca::CellResult> cells;
  if (config.mode == ca::RunMode::debate) {
    auto lineups = ca::enumerate_lineups(config.models, config.debate.arbiter_pool,
                                         config.debate.stance_mode);
    for (auto& lineup : lineups) {
      lineup.swap_debater_order = config.debate.swap_debater_order;
      cells.push_back(ca::run_debate_cell(gateway, graph, edge_index, lineup, th));
    }
  } else {
    for (const auto& model : config.models)
      cells.push_back(ca::run_solo_cell(gateway, graph, edge_index,
                                        model.model_name,
                                        corpus ? &*corpus : nullptr, th));
  }

  const std::string description = ca::edge_report_label(graph, edge_index);
  int unparseable = 0;
  for (const auto& cell : cells) {
    std::cout << "== " << description << " x " << cell.responder << " ==\n";
    for (const auto& record : cell.records) {
      std::cout << "[" << record.prompt_index << "] " << record.question << "\n";
      if (record.context) std::cout << "    context: " << *record.context << "\n";
      std::cout << "    response: " << record.response << "\n";
      std::cout << "    rating: "
                << (record.rating ? std::to_string(record.rating->value())
                                  : std::string("unparseable"))
                << "\n";
    }
    for (const auto& t : cell.transcripts) {
      std::cout << "[" << t.prompt_index << "] " << t.question << "\n";
      std::cout << "    proposition: " << t.proposition_response << "\n";
      std::cout << "    opposition: " << t.opposition_response << "\n";
      std::cout << "    arbiter: " << t.arbiter_response << "\n";
      std::cout << "    rating: "
                << (t.final_rating ? std::to_string(t.final_rating->value())
                                   : std::string("unparseable"))
                << "\n";
    }
    if (cell.verdict && cell.profile) {
      std::cout << "verdict: "
                << verdict_text(*cell.verdict, cell.profile->a_name,
                                cell.profile->b_name)
                << "\n\n";
    } else {
      std::cout << "verdict: unparseable (" << cell.unparseable
                << " prompt(s) without a rating)\n\n";
      ++unparseable;
    }
  }
  return unparseable > 0 ? ca::kExitPartialUnparseable : ca::kExitOk;
}

std::optional<int> parse_tenths(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto dot = text.find('.');
  try {
    if (dot == std::string::npos) return std::stoi(text) * 10;
    const int whole = std::stoi(text.substr(0, dot));
    const std::string frac = text.substr(dot + 1);
    if (frac.size() != 1 || frac[0] < '0' || frac[0] > '9')
      throw ca::ConfigError("expected one decimal digit in '" + text + "'");
    const int tenth = frac[0] - '0';
    return whole >= 0 ? whole * 10 + tenth : whole * 10 - tenth;
  } catch (const ca::ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ca::ConfigError("cannot parse percentage '" + text + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causal-audit: audit causal-graph edges with LLM responders"};
  app.require_subcommand(1);
  int rc = 0;

  Overrides survey_opts;
  auto* survey_cmd =
      app.add_subcommand("survey", "audit every edge with every responder");
  add_run_flags(survey_cmd, survey_opts);
  survey_cmd->callback(
      [&] { rc = run_survey_command(survey_opts, std::nullopt); });

  Overrides audit_opts;
  std::string audit_edge;
  auto* audit_cmd = app.add_subcommand("audit", "audit one edge, verbosely");
  add_run_flags(audit_cmd, audit_opts);
  audit_cmd->add_option("--edge", audit_edge, "edge label (E3) or 1-based index")
      ->required();
  audit_cmd->callback([&] { rc = run_audit_command(audit_opts, audit_edge); });

  auto* rag_cmd = app.add_subcommand("rag", "fact-corpus utilities and surveys");
  rag_cmd->require_subcommand(1);

  std::string rag_graph, rag_out;
  auto* rag_build = rag_cmd->add_subcommand(
      "build", "build a fact corpus from a reference graph");
  rag_build->add_option("--graph", rag_graph, "reference graph file")->required();
  rag_build->add_option("--out", rag_out, "corpus file (stdout when omitted)");
  rag_build->callback([&] {
    const ca::Corpus corpus = ca::build_corpus(ca::load_graph_file(rag_graph));
    const std::string text = ca::serialize_corpus(corpus);
    if (rag_out.empty()) {
      std::cout << text;
    } else {
      write_file(rag_out, text);
      std::cout << "wrote " << corpus.facts.size() << " facts to " << rag_out
                << "\n";
    }
  });

  Overrides rag_survey_opts;
  auto* rag_survey =
      rag_cmd->add_subcommand("survey", "survey with fact augmentation");
  add_run_flags(rag_survey, rag_survey_opts);
  rag_survey->callback(
      [&] { rc = run_survey_command(rag_survey_opts, ca::RunMode::rag); });

  auto* debate_cmd = app.add_subcommand("debate", "debate-protocol surveys");
  debate_cmd->require_subcommand(1);
  Overrides debate_survey_opts;
  auto* debate_survey = debate_cmd->add_subcommand(
      "survey", "survey every lineup through the debate protocol");
  add_run_flags(debate_survey, debate_survey_opts);
  debate_survey->callback(
      [&] { rc = run_survey_command(debate_survey_opts, ca::RunMode::debate); });

  std::string report_matrix, report_before, report_format = "markdown";
  std::string report_out, claimed_after, claimed_improvement;
  auto* report_cmd =
      app.add_subcommand("report", "re-emit reports from a saved matrix");
  report_cmd->add_option("--matrix", report_matrix, "matrix.json from a run")
      ->required();
  report_cmd->add_option("--before", report_before,
                         "baseline matrix.json; emits an improvement report");
  report_cmd->add_option("--format", report_format, "markdown or csv");
  report_cmd->add_option("--out", report_out, "output file (stdout when omitted)");
  report_cmd->add_option("--claimed-after-avg", claimed_after,
                         "externally claimed after-average to verify, e.g. 13.9");
  report_cmd->add_option("--claimed-improvement-avg", claimed_improvement,
                         "externally claimed improvement average to verify");
  report_cmd->callback([&] {
    const ca::ReportFormat format = report_format == "csv"
                                        ? ca::ReportFormat::csv
                                        : ca::ReportFormat::markdown;
    const ca::VerdictMatrix matrix =
        ca::VerdictMatrix::from_json(read_file(report_matrix));
    const ca::RateSummary rates = ca::compute_rates(matrix);
    std::string text;
    if (report_before.empty()) {
      text = ca::emit_report(matrix, rates, format);
    } else {
      const ca::VerdictMatrix before =
          ca::VerdictMatrix::from_json(read_file(report_before));
      const ca::ImprovementReport improvement = ca::compute_improvement(
          ca::compute_rates(before), rates, parse_tenths(claimed_after),
          parse_tenths(claimed_improvement));
      text = ca::emit_report(improvement, format);
    }
    if (report_out.empty())
      std::cout << text;
    else
      write_file(report_out, text);
  });

  std::string chart_profiles, chart_out;
  int chart_t_strong = 3;
  auto* chart_cmd =
      app.add_subcommand("chart", "render charts from saved profiles");
  chart_cmd->add_option("--profiles", chart_profiles,
                        "profiles.json from a run")
      ->required();
  chart_cmd->add_option("--out", chart_out, "chart directory")->required();
  chart_cmd->add_option("--t-strong", chart_t_strong, "strength threshold (2..4)");
  chart_cmd->callback([&] {
    const json doc = json::parse(read_file(chart_profiles));
    const ca::StrengthThreshold th(chart_t_strong);
    std::vector<ca::ChartIndexEntry> entries;
    for (const auto& jp : doc.at("profiles")) {
      const ca::EdgeAuditProfile profile = ca::profile_from_json(jp.dump());
      const ca::Verdict verdict = ca::evaluate(profile, th);
      const std::string file =
          ca::chart_file_name(profile.edge_label, profile.responder);
      write_file((std::filesystem::path(chart_out) / file).string(),
                 ca::render_debate_chart(profile, {}, verdict));
      entries.push_back({file, profile.edge_label + " - " + profile.responder});
    }
    write_file((std::filesystem::path(chart_out) / "index.html").string(),
               ca::render_chart_index(entries));
    std::cout << "wrote " << entries.size() << " chart(s) to " << chart_out
              << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ca::exit_code_for_current_exception();
  }
  return rc;
}
