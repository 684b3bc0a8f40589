#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causalaudit/gateway.hpp"
#include "causalaudit/graph.hpp"
#include "causalaudit/prompts.hpp"
#include "causalaudit/verdict.hpp"

namespace causalaudit {

/// stress_test grounds each debater with its stance corpus; fair sends the
/// bare prompt. The arbiter is never augmented in either mode.
enum class StanceMode { stress_test, fair };

const char* to_string(StanceMode mode);

struct DebateLineup {
  ModelSpec proposition;
  ModelSpec opposition;
  ModelSpec arbiter;
  StanceMode stance_mode = StanceMode::fair;
  // Embeds the opposition response first in the arbiter prompt. Role
  // assignment is unchanged; this only probes order sensitivity.
  bool swap_debater_order = false;

  /// Throws std::invalid_argument unless the three model names are pairwise
  /// distinct and every spec validates.
  void validate() const;
};

/// "debate:{prop}|{opp}|{arb}"
std::string debate_responder_label(const DebateLineup& lineup);

struct DebateTranscript {
  std::string edge_label;
  int prompt_index = -1;
  std::string question;  // the audited prompt, as the debaters saw it
  std::string proposition_response;
  std::string opposition_response;
  std::string arbiter_prompt;
  std::string arbiter_response;
  std::optional<Rating> final_rating;  // nullopt: arbiter response unparseable
};

/// One JSON object per line for transcripts.jsonl.
std::string transcript_to_json_line(const DebateTranscript& transcript);

/// One round: both debaters answer the prompt concurrently and independently
/// (with stance context iff stress_test), then the arbiter rates the claim
/// given both responses. No rebuttals. Provider errors are rethrown with the
/// failing role named in the message.
DebateTranscript run_debate_round(Gateway& gateway, const CausalGraph& graph,
                                  std::size_t edge_index,
                                  const PromptEntry& prompt, int prompt_index,
                                  const DebateLineup& lineup);

struct DebateAuditOutcome {
  std::string responder;  // debate_responder_label(lineup)
  std::vector<DebateTranscript> transcripts;  // always 10, canonical order
  std::optional<EdgeAuditProfile> profile;    // nullopt when any round unparseable
  int unparseable_rounds = 0;
};

/// Runs the full 10-prompt battery for one edge through the debate protocol
/// and assembles the arbiter ratings into an audit profile.
DebateAuditOutcome run_debate_audit(Gateway& gateway, const CausalGraph& graph,
                                    std::size_t edge_index,
                                    const DebateLineup& lineup);

/// All ordered (proposition, opposition, arbiter) triples of distinct models
/// with the arbiter drawn from the pool, in deterministic order: arbiter in
/// pool order, then proposition and opposition in model order.
/// Throws std::invalid_argument on fewer than 3 models, an empty pool, or a
/// pool entry missing from the models.
std::vector<DebateLineup> enumerate_lineups(const std::vector<ModelSpec>& models,
                                            const std::vector<std::string>& arbiter_pool,
                                            StanceMode stance_mode = StanceMode::fair);

}  // namespace causalaudit
