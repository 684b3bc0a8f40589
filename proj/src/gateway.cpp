#include "causalaudit/gateway.hpp"

#include <cctype>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <openssl/evp.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"

namespace causalaudit {

using nlohmann::json;

void ModelSpec::validate() const {
  if (model_name.empty())
    throw std::invalid_argument("model spec needs a model_name");
  if (decoding.temperature < 0)
    throw std::invalid_argument("temperature must be >= 0");
  if (decoding.max_output_tokens <= 0)
    throw std::invalid_argument("max_output_tokens must be positive");
  switch (provider_kind) {
    case ProviderKind::http_chat:
      if (endpoint.empty() || credential_ref.empty())
        throw std::invalid_argument("http_chat model '" + model_name +
                                    "' needs endpoint and credential_ref");
      break;
    case ProviderKind::scripted:
      if (scenario_path.empty())
        throw std::invalid_argument("scripted model '" + model_name +
                                    "' needs a scenario source");
      break;
    case ProviderKind::replay:
      break;
  }
}

// ---------------------------------------------------------------------------
// Rating extraction

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct IntToken {
  long value;
  std::size_t begin;
  std::size_t end;
};

std::vector<IntToken> standalone_integers(const std::string& text) {
  std::vector<IntToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    std::size_t begin = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    const bool bounded_left = begin == 0 || !is_word_char(text[begin - 1]);
    const bool bounded_right = i >= text.size() || !is_word_char(text[i]);
    if (bounded_left && bounded_right && i - begin <= 9)
      tokens.push_back({std::stol(text.substr(begin, i - begin)), begin, i});
  }
  return tokens;
}

bool in_range(long v) { return v >= 1 && v <= 4; }

// Only whitespace and light punctuation may sit between a "rating"/"rate"
// keyword and the integer it introduces.
bool gap_is_clean(const std::string& text, std::size_t from, std::size_t to) {
  static const std::string allowed = " \t\r\n:=-.,()'\"*";
  for (std::size_t i = from; i < to; ++i) {
    if (allowed.find(text[i]) == std::string::npos) return false;
  }
  return true;
}

std::vector<std::size_t> keyword_ends(const std::string& text) {
  std::string lower(text.size(), '\0');
  for (std::size_t i = 0; i < text.size(); ++i)
    lower[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
  std::vector<std::size_t> ends;
  for (const std::string kw : {"rating", "rated", "rate"}) {
    std::size_t pos = 0;
    while ((pos = lower.find(kw, pos)) != std::string::npos) {
      const bool left_ok = pos == 0 || !is_word_char(lower[pos - 1]);
      const std::size_t end = pos + kw.size();
      const bool right_ok = end >= lower.size() || !is_word_char(lower[end]);
      if (left_ok && right_ok) ends.push_back(end);
      pos = end;
    }
  }
  return ends;
}

}  // namespace

std::optional<Rating> extract_rating(const std::string& text) {
  const auto tokens = standalone_integers(text);
  if (tokens.empty()) return std::nullopt;

  std::optional<std::size_t> best_pos;
  long best_value = 0;

  auto offer = [&](std::size_t pos, long value) {
    if (!best_pos || pos < *best_pos) {
      best_pos = pos;
      best_value = value;
    }
  };

  // Preferred form 1: in-range integer introduced by "rating"/"rate".
  for (std::size_t kw_end : keyword_ends(text)) {
    for (const auto& tok : tokens) {
      if (tok.begin < kw_end) continue;
      if (!gap_is_clean(text, kw_end, tok.begin)) break;
      if (in_range(tok.value)) offer(tok.begin, tok.value);
      break;  // only the integer immediately after the keyword counts
    }
  }
  // Preferred form 2: "n/4".
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const auto& tok = tokens[i];
    const auto& next = tokens[i + 1];
    if (tok.end < text.size() && text[tok.end] == '/' && next.begin == tok.end + 1 &&
        next.value == 4 && in_range(tok.value)) {
      offer(tok.begin, tok.value);
    }
  }
  if (best_pos) return Rating(static_cast<int>(best_value));

  // Fallback: first in-range standalone integer anywhere.
  for (const auto& tok : tokens) {
    if (in_range(tok.value)) return Rating(static_cast<int>(tok.value));
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Digests

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(),
                  nullptr))
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

namespace {

json canonical_request_json(const ModelSpec& model, const CompletionRequest& request) {
  // nlohmann objects are key-sorted, which makes dump() canonical.
  json doc;
  doc["model"] = model.model_name;
  doc["context"] = request.context ? json(*request.context) : json(nullptr);
  doc["question"] = request.question;
  doc["decoding"] = {
      {"temperature", request.temperature.value_or(model.decoding.temperature)},
      {"max_output_tokens",
       request.max_output_tokens.value_or(model.decoding.max_output_tokens)}};
  return doc;
}

}  // namespace

std::string request_digest(const ModelSpec& model, const CompletionRequest& request) {
  return sha256_hex(canonical_request_json(model, request).dump());
}

// ---------------------------------------------------------------------------
// Scripted provider

ScriptedProvider::ScriptedProvider(std::vector<Rule> rules)
    : rules_(std::move(rules)) {
  bool has_default = false;
  for (const auto& rule : rules_) has_default = has_default || rule.is_default;
  if (!has_default)
    throw GatewayError(GatewayErrorCode::scenario,
                       "scripted scenario needs a default rule");
}

ScriptedProvider ScriptedProvider::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GatewayError(GatewayErrorCode::scenario,
                       std::string("scenario parse error: ") + e.what());
  }
  if (!doc.is_array())
    throw GatewayError(GatewayErrorCode::scenario, "scenario must be a JSON array");
  std::vector<Rule> rules;
  for (const auto& item : doc) {
    Rule rule;
    if (!item.contains("response") || !item["response"].is_string())
      throw GatewayError(GatewayErrorCode::scenario,
                         "every scenario rule needs a string 'response'");
    rule.response = item["response"].get<std::string>();
    if (item.value("default", false)) {
      rule.is_default = true;
    } else if (item.contains("match") && item["match"].is_object()) {
      const auto& m = item["match"];
      if (m.contains("edge")) rule.edge = m["edge"].get<std::string>();
      if (m.contains("prompt_index")) rule.prompt_index = m["prompt_index"].get<int>();
      if (m.contains("question_contains"))
        rule.question_contains = m["question_contains"].get<std::string>();
      if (m.contains("context_contains"))
        rule.context_contains = m["context_contains"].get<std::string>();
      if (m.empty()) rule.is_default = true;
    } else {
      throw GatewayError(GatewayErrorCode::scenario,
                         "scenario rule needs 'match' or 'default': true");
    }
    rules.push_back(std::move(rule));
  }
  return ScriptedProvider(std::move(rules));
}

ScriptedProvider ScriptedProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw GatewayError(GatewayErrorCode::scenario,
                       "cannot open scenario file " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

CompletionResponse ScriptedProvider::complete(const CompletionRequest& request) {
  for (const auto& rule : rules_) {
    if (rule.is_default)
      return {rule.response, std::chrono::milliseconds(0), ResponseSource::scripted};
    if (rule.edge && *rule.edge != request.edge_label) continue;
    if (rule.prompt_index && *rule.prompt_index != request.prompt_index) continue;
    if (rule.question_contains &&
        request.question.find(*rule.question_contains) == std::string::npos)
      continue;
    if (rule.context_contains &&
        (!request.context ||
         request.context->find(*rule.context_contains) == std::string::npos))
      continue;
    return {rule.response, std::chrono::milliseconds(0), ResponseSource::scripted};
  }
  throw GatewayError(GatewayErrorCode::scenario,
                     "no scenario rule matched and no default present");
}

// ---------------------------------------------------------------------------
// HTTP chat provider

HttpChatProvider::HttpChatProvider(ModelSpec spec, RetryPolicy retry, Sleeper sleeper)
    : spec_(std::move(spec)), retry_(retry), sleeper_(std::move(sleeper)) {
  spec_.validate();
  if (!sleeper_)
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

CompletionResponse HttpChatProvider::complete(const CompletionRequest& request) {
  const char* credential = std::getenv(spec_.credential_ref.c_str());
  if (!credential || !*credential)
    throw GatewayError(GatewayErrorCode::auth_failure,
                       "environment variable " + spec_.credential_ref +
                           " is unset for model " + spec_.model_name);

  json body;
  body["model"] = spec_.model_name;
  body["messages"] = json::array();
  if (request.context)
    body["messages"].push_back({{"role", "system"}, {"content", *request.context}});
  body["messages"].push_back({{"role", "user"}, {"content", request.question}});
  body["temperature"] = request.temperature.value_or(spec_.decoding.temperature);
  body["max_tokens"] =
      request.max_output_tokens.value_or(spec_.decoding.max_output_tokens);

  // Split the endpoint into origin and path for httplib.
  const std::string& url = spec_.endpoint;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw GatewayError(GatewayErrorCode::config,
                       "endpoint must be an http(s) URL: " + url);
  const std::size_t path_start = url.find('/', scheme_end + 3);
  const std::string origin =
      path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path =
      path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Headers headers = {
      {"Authorization", std::string("Bearer ") + credential}};

  std::string last_error;
  auto delay = retry_.initial_delay;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      sleeper_(delay);
      delay = std::min(delay * 2, retry_.max_delay);
    }
    const auto start = std::chrono::steady_clock::now();
    httplib::Client client(origin);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    auto result = client.Post(path, headers, body.dump(), "application/json");
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);

    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 401 || result->status == 403) {
      throw GatewayError(GatewayErrorCode::auth_failure,
                         "authentication failed (" + std::to_string(result->status) +
                             ") for model " + spec_.model_name);
    }
    if (result->status == 429 || result->status >= 500) {
      last_error = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw GatewayError(GatewayErrorCode::bad_response,
                         "HTTP " + std::to_string(result->status) + ": " +
                             result->body);
    }
    try {
      const json doc = json::parse(result->body);
      std::string text =
          doc.at("choices").at(0).at("message").at("content").get<std::string>();
      return {std::move(text), elapsed, ResponseSource::live};
    } catch (const json::exception& e) {
      throw GatewayError(GatewayErrorCode::bad_response,
                         std::string("malformed chat completion response: ") +
                             e.what());
    }
  }
  const auto code = last_error.find("429") != std::string::npos
                        ? GatewayErrorCode::rate_limited
                        : GatewayErrorCode::network;
  throw GatewayError(code, "model " + spec_.model_name + " failed after " +
                               std::to_string(retry_.max_retries + 1) +
                               " attempts: " + last_error);
}

// ---------------------------------------------------------------------------
// Replay store

ReplayStore::ReplayStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ReplayStore::cassette_path(const std::string& digest) const {
  return dir_ / (digest + ".json");
}

std::optional<std::string> ReplayStore::lookup(const std::string& digest) const {
  std::ifstream in(cassette_path(digest));
  if (!in) return std::nullopt;
  json doc;
  try {
    in >> doc;
    return doc.at("response").at("text").get<std::string>();
  } catch (const json::exception&) {
    return std::nullopt;  // corrupt cassette behaves like a miss
  }
}

void ReplayStore::append(const std::string& digest, const ModelSpec& model,
                         const CompletionRequest& request,
                         const std::string& response_text) {
  std::lock_guard<std::mutex> lock(write_mutex_);
  const auto path = cassette_path(digest);
  if (std::filesystem::exists(path)) return;  // content-addressed, first write wins
  json doc;
  doc["digest"] = digest;
  doc["request"] = canonical_request_json(model, request);
  doc["response"] = {{"text", response_text}};
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  doc["recorded_at_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << doc.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

std::string ReplayStore::store_digest() const {
  std::vector<std::string> names;
  if (std::filesystem::exists(dir_)) {
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
      if (entry.path().extension() == ".json")
        names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  std::string joined;
  for (const auto& n : names) {
    joined += n;
    joined += '\n';
  }
  return sha256_hex(joined);
}

// ---------------------------------------------------------------------------
// Gateway

struct Gateway::Entry {
  ModelSpec spec;
  std::unique_ptr<CompletionProvider> provider;
  std::mutex inflight_mutex;
  std::condition_variable inflight_cv;
  int inflight = 0;
};

namespace {

std::unique_ptr<CompletionProvider> make_provider(const ModelSpec& spec,
                                                  const GatewayOptions& options) {
  switch (spec.provider_kind) {
    case ProviderKind::scripted:
      return std::make_unique<ScriptedProvider>(
          ScriptedProvider::from_file(spec.scenario_path));
    case ProviderKind::http_chat:
      return std::make_unique<HttpChatProvider>(spec, options.retry,
                                                options.sleeper);
    case ProviderKind::replay:
      return nullptr;  // served purely from the store
  }
  return nullptr;
}

}  // namespace

Gateway::Gateway(std::vector<ModelSpec> models, GatewayOptions options)
    : options_(std::move(options)) {
  if (options_.replay != ReplayPolicy::live) {
    if (options_.cassette_dir.empty())
      throw GatewayError(GatewayErrorCode::config,
                         "replay policy requires a cassette directory");
    store_ = std::make_unique<ReplayStore>(options_.cassette_dir);
  }
  for (auto& spec : models) {
    spec.validate();
    if (spec.provider_kind == ProviderKind::replay &&
        options_.replay == ReplayPolicy::live)
      throw GatewayError(GatewayErrorCode::config,
                         "replay model '" + spec.model_name +
                             "' needs a record or replay_only policy");
    auto e = std::make_unique<Entry>();
    e->spec = spec;
    // Scenario files load lazily for replay_only runs so a recorded survey
    // can be replayed without its original scenario files present.
    if (options_.replay != ReplayPolicy::replay_only)
      e->provider = make_provider(spec, options_);
    const std::string name = spec.model_name;
    if (!entries_.emplace(name, std::move(e)).second)
      throw GatewayError(GatewayErrorCode::config,
                         "duplicate model name '" + name + "'");
  }
}

Gateway::~Gateway() = default;

Gateway::Entry& Gateway::entry(const std::string& model_name) {
  auto it = entries_.find(model_name);
  if (it == entries_.end())
    throw GatewayError(GatewayErrorCode::config,
                       "unknown model '" + model_name + "'");
  return *it->second;
}

const ModelSpec& Gateway::spec(const std::string& model_name) const {
  auto it = entries_.find(model_name);
  if (it == entries_.end())
    throw GatewayError(GatewayErrorCode::config,
                       "unknown model '" + model_name + "'");
  return it->second->spec;
}

void Gateway::set_provider(const std::string& model_name,
                           std::unique_ptr<CompletionProvider> provider) {
  entry(model_name).provider = std::move(provider);
}

CompletionResponse Gateway::complete(const std::string& model_name,
                                     const CompletionRequest& request) {
  if (request.question.empty())
    throw GatewayError(GatewayErrorCode::config, "completion question is empty");
  Entry& e = entry(model_name);
  const std::string digest = request_digest(e.spec, request);

  if (store_) {
    if (auto hit = store_->lookup(digest)) {
      return {*hit, std::chrono::milliseconds(0), ResponseSource::replayed};
    }
    if (options_.replay == ReplayPolicy::replay_only) {
      throw GatewayError(GatewayErrorCode::replay_miss,
                         "no cassette for digest " + digest + " (model " +
                             model_name + ", edge " + request.edge_label + ")");
    }
  }

  if (!e.provider)
    throw GatewayError(GatewayErrorCode::replay_miss,
                       "replay model '" + model_name + "' has no cassette for " +
                           digest);

  {
    std::unique_lock<std::mutex> lock(e.inflight_mutex);
    e.inflight_cv.wait(lock, [&] {
      return e.inflight < options_.max_inflight_per_provider;
    });
    ++e.inflight;
  }
  CompletionResponse response;
  try {
    response = e.provider->complete(request);
  } catch (...) {
    std::lock_guard<std::mutex> lock(e.inflight_mutex);
    --e.inflight;
    e.inflight_cv.notify_one();
    throw;
  }
  {
    std::lock_guard<std::mutex> lock(e.inflight_mutex);
    --e.inflight;
    e.inflight_cv.notify_one();
  }

  if (store_ && options_.replay == ReplayPolicy::record)
    store_->append(digest, e.spec, request, response.text);
  return response;
}

}  // namespace causalaudit
