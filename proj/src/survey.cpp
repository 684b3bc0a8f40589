#include "causalaudit/survey.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "causalaudit/chart.hpp"
#include "causalaudit/prompts.hpp"
#include "json.hpp"

namespace causalaudit {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(RunMode mode) {
  switch (mode) {
    case RunMode::solo: return "solo";
    case RunMode::rag: return "rag";
    case RunMode::debate: return "debate";
  }
  return "solo";
}

RunMode run_mode_from_string(const std::string& text) {
  if (text == "solo") return RunMode::solo;
  if (text == "rag") return RunMode::rag;
  if (text == "debate") return RunMode::debate;
  throw ConfigError("unknown mode '" + text + "' (expected solo, rag or debate)");
}

namespace {

const char* provider_kind_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::http_chat: return "http_chat";
    case ProviderKind::scripted: return "scripted";
    case ProviderKind::replay: return "replay";
  }
  return "scripted";
}

ProviderKind provider_kind_from_string(const std::string& text) {
  if (text == "http_chat") return ProviderKind::http_chat;
  if (text == "scripted") return ProviderKind::scripted;
  if (text == "replay") return ProviderKind::replay;
  throw ConfigError("unknown provider '" + text +
                    "' (expected http_chat, scripted or replay)");
}

ReplayPolicy replay_policy_from_string(const std::string& text) {
  if (text == "live") return ReplayPolicy::live;
  if (text == "record") return ReplayPolicy::record;
  if (text == "replay_only" || text == "replay-only") return ReplayPolicy::replay_only;
  throw ConfigError("unknown replay policy '" + text +
                    "' (expected live, record or replay_only)");
}

const char* replay_policy_name(ReplayPolicy policy) {
  switch (policy) {
    case ReplayPolicy::live: return "live";
    case ReplayPolicy::record: return "record";
    case ReplayPolicy::replay_only: return "replay_only";
  }
  return "live";
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

ModelSpec model_spec_from_json(const json& j) {
  ModelSpec spec;
  spec.model_name = j.at("name").get<std::string>();
  spec.provider_kind = provider_kind_from_string(j.value("provider", "http_chat"));
  spec.endpoint = j.value("endpoint", "");
  spec.credential_ref = j.value("credential_env", "");
  spec.scenario_path = j.value("scenario", "");
  if (j.contains("temperature"))
    spec.decoding.temperature = j["temperature"].get<double>();
  if (j.contains("max_output_tokens"))
    spec.decoding.max_output_tokens = j["max_output_tokens"].get<int>();
  return spec;
}

json model_spec_to_json(const ModelSpec& spec) {
  json j;
  j["name"] = spec.model_name;
  j["provider"] = provider_kind_name(spec.provider_kind);
  j["endpoint"] = spec.endpoint;
  j["credential_env"] = spec.credential_ref;
  j["scenario"] = spec.scenario_path;
  j["temperature"] = spec.decoding.temperature;
  j["max_output_tokens"] = spec.decoding.max_output_tokens;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  if (graph_path.empty()) throw ConfigError("graph path is required");
  if (models.empty()) throw ConfigError("at least one model is required");
  if (parallelism < 1) throw ConfigError("parallelism must be at least 1");
  if (t_strong < 2 || t_strong > 4)
    throw ConfigError("t_strong must lie in [2, 4]");
  if (out_dir.empty()) throw ConfigError("output directory is required");

  std::vector<std::string> names;
  for (const auto& model : models) {
    try {
      model.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("model '" + model.model_name + "': " + e.what());
    }
    for (const auto& name : names) {
      if (name == model.model_name)
        throw ConfigError("duplicate model name: " + model.model_name);
    }
    names.push_back(model.model_name);
  }

  if (mode == RunMode::rag) {
    const bool corpus = !rag.corpus_path.empty();
    const bool reference = !rag.reference_graph_path.empty();
    if (corpus == reference)
      throw ConfigError(
          "rag mode needs exactly one of rag.corpus and rag.reference_graph");
  }
  if (mode == RunMode::debate) {
    if (models.size() < 3) throw ConfigError("debate mode needs at least 3 models");
    if (debate.arbiter_pool.empty())
      throw ConfigError("debate mode needs a non-empty arbiter pool");
  }
}

RunConfig run_config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig config;
  try {
    config.graph_path = doc.at("graph").get<std::string>();
    for (const auto& jm : doc.at("models")) config.models.push_back(model_spec_from_json(jm));
    if (doc.contains("mode"))
      config.mode = run_mode_from_string(doc["mode"].get<std::string>());
    if (doc.contains("t_strong")) config.t_strong = doc["t_strong"].get<int>();
    if (doc.contains("parallelism")) config.parallelism = doc["parallelism"].get<int>();
    if (doc.contains("replay"))
      config.replay = replay_policy_from_string(doc["replay"].get<std::string>());
    if (doc.contains("out_dir")) config.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("cassette_dir"))
      config.cassette_dir = doc["cassette_dir"].get<std::string>();
    if (doc.contains("rag")) {
      config.rag.corpus_path = doc["rag"].value("corpus", "");
      config.rag.reference_graph_path = doc["rag"].value("reference_graph", "");
    }
    if (doc.contains("debate")) {
      const json& jd = doc["debate"];
      if (jd.contains("arbiter_pool"))
        config.debate.arbiter_pool =
            jd["arbiter_pool"].get<std::vector<std::string>>();
      if (jd.contains("stance_mode")) {
        const std::string mode = jd["stance_mode"].get<std::string>();
        if (mode == "stress_test")
          config.debate.stance_mode = StanceMode::stress_test;
        else if (mode == "fair")
          config.debate.stance_mode = StanceMode::fair;
        else
          throw ConfigError("unknown stance_mode '" + mode + "'");
      }
      if (jd.contains("swap_debater_order"))
        config.debate.swap_debater_order = jd["swap_debater_order"].get<bool>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  return config;
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(read_text_file(path));
}

std::string semantic_config_json(const RunConfig& config) {
  json doc;
  doc["graph"] = config.graph_path;
  doc["mode"] = to_string(config.mode);
  doc["t_strong"] = config.t_strong;
  auto models = json::array();
  for (const auto& m : config.models) models.push_back(model_spec_to_json(m));
  doc["models"] = std::move(models);
  if (config.mode == RunMode::rag) {
    doc["rag"] = {{"corpus", config.rag.corpus_path},
                  {"reference_graph", config.rag.reference_graph_path}};
  }
  if (config.mode == RunMode::debate) {
    doc["debate"] = {{"arbiter_pool", config.debate.arbiter_pool},
                     {"stance_mode", to_string(config.debate.stance_mode)},
                     {"swap_debater_order", config.debate.swap_debater_order}};
  }
  return doc.dump();
}

CausalGraph load_graph_file(const fs::path& path) {
  const GraphFormat format =
      path.extension() == ".dot" ? GraphFormat::dot : GraphFormat::json;
  return parse_graph(read_text_file(path), format);
}

CellResult run_solo_cell(Gateway& gateway, const CausalGraph& graph,
                         std::size_t edge_index, const std::string& model_name,
                         const Corpus* corpus, StrengthThreshold th) {
  const EdgePromptSet set = build_prompt_set(edge_index, graph);
  const Edge& edge = graph.edges.at(edge_index);

  CellResult cell;
  cell.edge_label = edge_label(edge_index);
  cell.responder = model_name;

  std::vector<std::optional<Rating>> ratings;
  std::vector<std::string> raw;
  for (std::size_t i = 0; i < set.prompts.size(); ++i) {
    CompletionRequest request;
    request.question = set.prompts[i].text;
    request.edge_label = cell.edge_label;
    request.prompt_index = static_cast<int>(i);
    if (corpus) request = retrieve_and_augment(*corpus, request, edge, graph);

    const CompletionResponse response = gateway.complete(model_name, request);

    PromptRecord record;
    record.prompt_index = static_cast<int>(i);
    record.question = request.question;
    record.context = request.context;
    record.response = response.text;
    record.rating = extract_rating(response.text);
    if (!record.rating) ++cell.unparseable;
    ratings.push_back(record.rating);
    raw.push_back(response.text);
    cell.records.push_back(std::move(record));
  }

  if (cell.unparseable == 0) {
    const std::array<Rating, kPromptsPerEdge> all = {
        *ratings[0], *ratings[1], *ratings[2], *ratings[3], *ratings[4],
        *ratings[5], *ratings[6], *ratings[7], *ratings[8], *ratings[9]};
    EdgeAuditProfile profile = profile_from_ratings(
        cell.edge_label, graph.variable(edge.from).display_name(),
        graph.variable(edge.to).display_name(), model_name, all);
    profile.raw_responses = std::move(raw);
    cell.verdict = evaluate(profile, th);
    cell.profile = std::move(profile);
  }
  return cell;
}

CellResult run_debate_cell(Gateway& gateway, const CausalGraph& graph,
                           std::size_t edge_index, const DebateLineup& lineup,
                           StrengthThreshold th) {
  DebateAuditOutcome outcome = run_debate_audit(gateway, graph, edge_index, lineup);

  CellResult cell;
  cell.edge_label = edge_label(edge_index);
  cell.responder = outcome.responder;
  cell.transcripts = std::move(outcome.transcripts);
  cell.unparseable = outcome.unparseable_rounds;
  if (outcome.profile) {
    cell.verdict = evaluate(*outcome.profile, th);
    cell.profile = std::move(outcome.profile);
  }
  return cell;
}

namespace {

std::string prompt_record_line(const std::string& edge,
                               const std::string& responder,
                               const PromptRecord& record) {
  json j;
  j["edge"] = edge;
  j["responder"] = responder;
  j["prompt_index"] = record.prompt_index;
  j["question"] = record.question;
  if (record.context)
    j["context"] = *record.context;
  else
    j["context"] = nullptr;
  j["response"] = record.response;
  if (record.rating)
    j["rating"] = record.rating->value();
  else
    j["rating"] = nullptr;
  return j.dump();
}

}  // namespace

RunSummary run_survey(const RunConfig& config) {
  config.validate();

  const std::string graph_text = read_text_file(config.graph_path);
  const GraphFormat graph_format = fs::path(config.graph_path).extension() == ".dot"
                                       ? GraphFormat::dot
                                       : GraphFormat::json;
  const CausalGraph graph = parse_graph(graph_text, graph_format);
  if (graph.edges.empty()) throw ConfigError("graph has no edges to audit");

  std::optional<Corpus> corpus;
  if (config.mode == RunMode::rag) {
    if (!config.rag.corpus_path.empty())
      corpus = parse_corpus(read_text_file(config.rag.corpus_path));
    else
      corpus = build_corpus(load_graph_file(config.rag.reference_graph_path));
  }

  std::vector<DebateLineup> lineups;
  std::vector<std::string> responders;
  if (config.mode == RunMode::debate) {
    lineups = enumerate_lineups(config.models, config.debate.arbiter_pool,
                                config.debate.stance_mode);
    for (auto& lineup : lineups) {
      lineup.swap_debater_order = config.debate.swap_debater_order;
      responders.push_back(debate_responder_label(lineup));
    }
  } else {
    for (const auto& model : config.models) responders.push_back(model.model_name);
  }

  const fs::path out_dir(config.out_dir);
  GatewayOptions options;
  options.replay = config.replay;
  options.cassette_dir = config.cassette_dir.empty()
                             ? out_dir / "cassettes"
                             : fs::path(config.cassette_dir);
  Gateway gateway(config.models, options);

  const std::string config_digest = sha256_hex(semantic_config_json(config));
  const std::string graph_digest = sha256_hex(graph_text);
  const std::string run_id = sha256_hex(config_digest + graph_digest).substr(0, 12);
  const StrengthThreshold th(config.t_strong);

  const std::size_t n_edges = graph.edges.size();
  const std::size_t n_responders = responders.size();
  const std::size_t total = n_edges * n_responders;

  std::vector<std::optional<CellResult>> slots(total);
  std::vector<std::exception_ptr> cell_errors(total);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total || abort.load()) return;
      const std::size_t e = i / n_responders;
      const std::size_t r = i % n_responders;
      try {
        if (config.mode == RunMode::debate) {
          slots[i] = run_debate_cell(gateway, graph, e, lineups[r], th);
        } else {
          slots[i] = run_solo_cell(gateway, graph, e,
                                   config.models[r].model_name,
                                   corpus ? &*corpus : nullptr, th);
        }
      } catch (...) {
        cell_errors[i] = std::current_exception();
        abort.store(true);
      }
    }
  };

  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), total);
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < thread_count; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  for (const auto& error : cell_errors) {
    if (error) std::rethrow_exception(error);
  }

  std::vector<std::string> edge_labels;
  std::vector<std::string> edge_descriptions;
  for (std::size_t e = 0; e < n_edges; ++e) {
    edge_labels.push_back(edge_label(e));
    edge_descriptions.push_back(edge_report_label(graph, e));
  }

  VerdictMatrix matrix(edge_labels, responders);
  matrix.set_edge_descriptions(edge_descriptions);
  int unparseable_cells = 0;
  for (std::size_t e = 0; e < n_edges; ++e) {
    for (std::size_t r = 0; r < n_responders; ++r) {
      const CellResult& cell = *slots[e * n_responders + r];
      if (cell.verdict) {
        matrix.set(e, r, CellOutcome::of(*cell.verdict));
      } else {
        matrix.set(e, r, CellOutcome::unparseable_marker());
        ++unparseable_cells;
      }
    }
  }

  const RateSummary rates = compute_rates(matrix);

  fs::create_directories(out_dir);
  Provenance provenance;
  provenance.run_id = run_id;
  provenance.config_digest = config_digest;
  if (gateway.store()) provenance.replay_store_digest = gateway.store()->store_digest();

  write_text_file(out_dir / "matrix.json", matrix.to_json());
  write_text_file(out_dir / "report.md",
                  emit_report(matrix, rates, ReportFormat::markdown, provenance));
  write_text_file(out_dir / "report.csv",
                  emit_report(matrix, rates, ReportFormat::csv, provenance));

  std::ostringstream transcripts;
  auto profiles = json::array();
  std::vector<ChartIndexEntry> chart_entries;
  for (std::size_t e = 0; e < n_edges; ++e) {
    for (std::size_t r = 0; r < n_responders; ++r) {
      const CellResult& cell = *slots[e * n_responders + r];
      for (const auto& record : cell.records)
        transcripts << prompt_record_line(cell.edge_label, cell.responder, record)
                    << "\n";
      for (const auto& transcript : cell.transcripts) {
        json line = json::parse(transcript_to_json_line(transcript));
        line["responder"] = cell.responder;
        transcripts << line.dump() << "\n";
      }
      if (cell.profile) {
        profiles.push_back(json::parse(profile_to_json(*cell.profile)));
        const std::string file = chart_file_name(cell.edge_label, cell.responder);
        write_text_file(out_dir / "charts" / file,
                        render_debate_chart(*cell.profile, {}, cell.verdict));
        chart_entries.push_back(
            {file, edge_descriptions[e] + " - " + cell.responder});
      }
    }
  }
  write_text_file(out_dir / "transcripts.jsonl", transcripts.str());
  write_text_file(out_dir / "profiles.json",
                  json{{"profiles", profiles}}.dump(2) + "\n");
  write_text_file(out_dir / "charts" / "index.html",
                  render_chart_index(chart_entries));

  json manifest;
  manifest["run_id"] = run_id;
  manifest["mode"] = to_string(config.mode);
  manifest["t_strong"] = config.t_strong;
  manifest["replay"] = replay_policy_name(config.replay);
  manifest["config_digest"] = config_digest;
  manifest["graph_digest"] = graph_digest;
  manifest["graph_label"] = graph.label;
  manifest["edges"] = edge_labels;
  manifest["edge_descriptions"] = edge_descriptions;
  manifest["responders"] = responders;
  auto cells = json::array();
  for (std::size_t e = 0; e < n_edges; ++e) {
    for (std::size_t r = 0; r < n_responders; ++r) {
      const CellResult& cell = *slots[e * n_responders + r];
      json jc;
      jc["edge"] = cell.edge_label;
      jc["responder"] = cell.responder;
      if (cell.verdict) {
        jc["outcome"] = std::string(1, cell.verdict->code());
        if (cell.verdict->kind() == Verdict::Kind::hallucination) {
          auto reasons = json::array();
          for (const auto& reason : cell.verdict->reasons())
            reasons.push_back(to_string(reason));
          jc["reasons"] = std::move(reasons);
        }
      } else {
        jc["outcome"] = "U";
        jc["unparseable_prompts"] = cell.unparseable;
      }
      cells.push_back(std::move(jc));
    }
  }
  manifest["cells"] = std::move(cells);
  manifest["totals"] = {{"cells", rates.total_cells},
                        {"hallucinations", rates.total_hallucinations},
                        {"unparseable", unparseable_cells}};
  manifest["overall_rate"] = rates.overall.display();
  manifest["replay_store_digest"] = provenance.replay_store_digest;
  manifest["outputs"] = {"matrix.json",     "report.md",     "report.csv",
                         "charts",          "transcripts.jsonl",
                         "profiles.json",   "manifest.json"};
  write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");

  RunSummary summary;
  summary.run_id = run_id;
  summary.matrix = std::move(matrix);
  summary.rates = rates;
  summary.unparseable_cells = unparseable_cells;
  summary.exit_code = unparseable_cells > 0 ? kExitPartialUnparseable : kExitOk;
  summary.out_dir = out_dir;
  return summary;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return kExitConfigError;
  } catch (const GraphParseError&) {
    return kExitConfigError;
  } catch (const GatewayError& e) {
    return e.code() == GatewayErrorCode::config ? kExitConfigError
                                                : kExitProviderError;
  } catch (const json::exception&) {
    return kExitConfigError;
  } catch (const std::invalid_argument&) {
    return kExitConfigError;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace causalaudit
