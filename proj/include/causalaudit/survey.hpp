#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "causalaudit/debate.hpp"
#include "causalaudit/gateway.hpp"
#include "causalaudit/graph.hpp"
#include "causalaudit/metrics.hpp"
#include "causalaudit/rag.hpp"
#include "causalaudit/verdict.hpp"

namespace causalaudit {

enum class RunMode { solo, rag, debate };

const char* to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& text);

/// Configuration problems raise this; the CLI maps it to its own exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RagSettings {
  std::string corpus_path;           // plain-text fact file, or
  std::string reference_graph_path;  // graph whose edges become the corpus
};

struct DebateSettings {
  std::vector<std::string> arbiter_pool;  // model names
  StanceMode stance_mode = StanceMode::fair;
  bool swap_debater_order = false;
};

struct RunConfig {
  std::string graph_path;
  std::vector<ModelSpec> models;
  RunMode mode = RunMode::solo;
  RagSettings rag;
  DebateSettings debate;
  int t_strong = 3;
  int parallelism = 4;
  ReplayPolicy replay = ReplayPolicy::live;
  std::string out_dir;
  std::string cassette_dir;  // defaults to {out_dir}/cassettes

  /// Throws ConfigError when mode-specific fields are missing or a bound is
  /// violated.
  void validate() const;
};

RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical JSON of the fields that define the experiment (graph, models,
/// mode, rag/debate settings, threshold). Execution details (parallelism,
/// replay policy, directories) are excluded so a replay of a recorded run
/// digests identically.
std::string semantic_config_json(const RunConfig& config);

/// Loads and parses config.graph_path, inferring the format from the
/// extension (.dot for DOT, everything else JSON).
CausalGraph load_graph_file(const std::filesystem::path& path);

/// One request/response exchange of a solo or RAG audit.
struct PromptRecord {
  int prompt_index = -1;
  std::string question;
  std::optional<std::string> context;
  std::string response;
  std::optional<Rating> rating;
};

/// Outcome of auditing one (edge, responder) cell.
struct CellResult {
  std::string edge_label;
  std::string responder;
  std::vector<PromptRecord> records;          // solo/rag cells
  std::vector<DebateTranscript> transcripts;  // debate cells
  std::optional<EdgeAuditProfile> profile;    // set when all 10 ratings parsed
  std::optional<Verdict> verdict;
  int unparseable = 0;  // prompts whose response carried no rating
};

/// Audits one edge with one model: 10 prompts, optional fact augmentation,
/// rating extraction, profile assembly, evaluation.
CellResult run_solo_cell(Gateway& gateway, const CausalGraph& graph,
                         std::size_t edge_index, const std::string& model_name,
                         const Corpus* corpus, StrengthThreshold th);

/// Audits one edge through the debate protocol.
CellResult run_debate_cell(Gateway& gateway, const CausalGraph& graph,
                           std::size_t edge_index, const DebateLineup& lineup,
                           StrengthThreshold th);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitProviderError = 3;
inline constexpr int kExitPartialUnparseable = 4;

struct RunSummary {
  std::string run_id;
  VerdictMatrix matrix;
  RateSummary rates;
  int unparseable_cells = 0;
  int exit_code = kExitOk;  // kExitOk or kExitPartialUnparseable
  std::filesystem::path out_dir;
};

/// Runs the configured survey over every (edge, responder) pair and writes
/// matrix.json, report.md, report.csv, charts/, transcripts.jsonl,
/// profiles.json, and manifest.json under config.out_dir. Cell tasks run on
/// config.parallelism threads; all files are written by the caller's thread
/// in canonical order. Throws ConfigError or GatewayError; never drops a
/// cell silently.
RunSummary run_survey(const RunConfig& config);

/// Maps an escaped exception to the survey exit-code convention.
int exit_code_for_current_exception();

}  // namespace causalaudit
