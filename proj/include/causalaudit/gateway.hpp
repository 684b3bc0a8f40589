#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "causalaudit/verdict.hpp"

namespace causalaudit {

enum class ProviderKind { http_chat, scripted, replay };

struct DecodingParams {
  double temperature = 0.0;  // deterministic by default
  int max_output_tokens = 512;

  bool operator==(const DecodingParams&) const = default;
};

struct ModelSpec {
  ProviderKind provider_kind = ProviderKind::scripted;
  std::string model_name;
  std::string endpoint;        // http_chat: chat-completions URL
  std::string credential_ref;  // http_chat: environment variable holding the key
  std::string scenario_path;   // scripted: rule file
  DecodingParams decoding;

  /// Throws std::invalid_argument when a backend's required fields are missing.
  void validate() const;
};

struct CompletionRequest {
  std::optional<std::string> context;  // RAG facts or debate stance preamble
  std::string question;
  std::optional<double> temperature;        // decoding overrides
  std::optional<int> max_output_tokens;

  // Harness annotations for scripted matching and logs; not part of the
  // request digest.
  std::string edge_label;
  int prompt_index = -1;
};

enum class ResponseSource { live, scripted, replayed };

struct CompletionResponse {
  std::string text;
  std::chrono::milliseconds latency{0};
  ResponseSource source = ResponseSource::scripted;
};

/// Reads a rating from free-text model output. Prefers an in-range integer
/// immediately after the words "rating"/"rate" or in "n/4" form, then falls
/// back to the first standalone integer in [1,4] anywhere. Returns nullopt
/// when the text carries no in-range integer; never returns a value outside
/// the scale.
std::optional<Rating> extract_rating(const std::string& text);

enum class GatewayErrorCode {
  config,
  auth_failure,
  rate_limited,
  network,
  bad_response,
  replay_miss,
  scenario,
};

class GatewayError : public std::runtime_error {
 public:
  GatewayError(GatewayErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  GatewayErrorCode code() const { return code_; }

 private:
  GatewayErrorCode code_;
};

/// Canonical digest of one completion request against one model. Stable
/// under JSON key reordering; credentials never participate.
std::string request_digest(const ModelSpec& model, const CompletionRequest& request);

/// SHA-256 hex digest of arbitrary bytes (exposed for manifest hashing).
std::string sha256_hex(const std::string& bytes);

class CompletionProvider {
 public:
  virtual ~CompletionProvider() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

/// Deterministic provider driven by a rule list. Rules match on any
/// combination of edge label, prompt index, and question/context substrings;
/// the first match wins and a default rule is mandatory.
class ScriptedProvider : public CompletionProvider {
 public:
  struct Rule {
    std::optional<std::string> edge;
    std::optional<int> prompt_index;
    std::optional<std::string> question_contains;
    std::optional<std::string> context_contains;
    bool is_default = false;
    std::string response;
  };

  static ScriptedProvider from_json_text(const std::string& text);
  static ScriptedProvider from_file(const std::filesystem::path& path);
  explicit ScriptedProvider(std::vector<Rule> rules);

  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  std::vector<Rule> rules_;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_delay{1000};  // then doubled: 1s/2s/4s
  std::chrono::milliseconds max_delay{4000};
};

/// Live backend speaking the OpenAI-compatible chat-completions protocol.
/// The bearer credential is read from the environment variable named by the
/// model spec at call time. Transient failures (429, 5xx, transport errors)
/// are retried with exponential backoff.
class HttpChatProvider : public CompletionProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  HttpChatProvider(ModelSpec spec, RetryPolicy retry = {}, Sleeper sleeper = {});

  CompletionResponse complete(const CompletionRequest& request) override;

 private:
  ModelSpec spec_;
  RetryPolicy retry_;
  Sleeper sleeper_;
};

/// Content-addressed cassette store: one JSON file per request digest.
/// Reads are lock-free once written; appends are serialized.
class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& digest) const;
  void append(const std::string& digest, const ModelSpec& model,
              const CompletionRequest& request, const std::string& response_text);

  /// Digest over the sorted cassette set; identical stores hash identically.
  std::string store_digest() const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path cassette_path(const std::string& digest) const;

  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
};

enum class ReplayPolicy { live, record, replay_only };

struct GatewayOptions {
  ReplayPolicy replay = ReplayPolicy::live;
  std::filesystem::path cassette_dir;  // required unless replay == live
  RetryPolicy retry;
  int max_inflight_per_provider = 4;
  HttpChatProvider::Sleeper sleeper;  // test hook; defaults to real sleep
};

/// Routes completion requests to per-model providers, consults the replay
/// store per policy, and bounds in-flight live requests per provider.
class Gateway {
 public:
  Gateway(std::vector<ModelSpec> models, GatewayOptions options);
  ~Gateway();

  CompletionResponse complete(const std::string& model_name,
                              const CompletionRequest& request);

  /// Test hook: replaces the provider behind an already-registered model.
  void set_provider(const std::string& model_name,
                    std::unique_ptr<CompletionProvider> provider);

  const ModelSpec& spec(const std::string& model_name) const;
  const ReplayStore* store() const { return store_ ? store_.get() : nullptr; }

 private:
  struct Entry;
  Entry& entry(const std::string& model_name);

  std::map<std::string, std::unique_ptr<Entry>> entries_;
  std::unique_ptr<ReplayStore> store_;
  GatewayOptions options_;
};

}  // namespace causalaudit
