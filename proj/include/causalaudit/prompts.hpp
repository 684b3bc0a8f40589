#pragma once

#include <array>
#include <string>
#include <vector>

#include "causalaudit/graph.hpp"

namespace causalaudit {

/// Which endpoint of the edge is the claimed cause: A = edge.from, B = edge.to.
enum class Side { A, B };

enum class Polarity { higher, lower };

/// The four antecedent/consequent polarity combinations of the specific
/// prompts, in canonical order.
enum class PolarityPattern { hh, hl, lh, ll };

inline constexpr std::array<PolarityPattern, 4> kPolarityPatterns = {
    PolarityPattern::hh, PolarityPattern::hl, PolarityPattern::lh,
    PolarityPattern::ll};

Polarity antecedent_of(PolarityPattern p);
Polarity consequent_of(PolarityPattern p);
const char* to_string(Polarity p);
const char* to_string(Side s);
const char* to_string(PolarityPattern p);

struct PromptKind {
  enum class Kind { general, specific };

  Kind kind = Kind::general;
  Side claimed_cause = Side::A;
  PolarityPattern pattern = PolarityPattern::hh;  // specific prompts only

  static PromptKind general(Side cause) {
    return {Kind::general, cause, PolarityPattern::hh};
  }
  static PromptKind specific(Side cause, PolarityPattern pattern) {
    return {Kind::specific, cause, pattern};
  }

  bool operator==(const PromptKind&) const = default;
};

struct PromptEntry {
  PromptKind kind;
  std::string claim;  // the causal claim without the rating-scale preamble
  std::string text;   // full prompt sent to a responder
};

struct EdgePromptSet {
  std::size_t edge_index = 0;
  Edge edge;
  std::vector<PromptEntry> prompts;  // always 10, canonical order
};

/// Canonical battery order: 0 = general A, 1 = general B, 2-5 = specific A
/// (hh, hl, lh, ll), 6-9 = specific B in the same pattern order.
inline constexpr std::size_t kPromptsPerEdge = 10;

std::array<PromptKind, kPromptsPerEdge> canonical_prompt_order();

/// The claim text for one prompt, e.g. "changing X causes a change in Y" or
/// "higher X causes lower Y". Variables render with display_name().
std::string render_claim(const PromptKind& kind, const Edge& edge,
                         const CausalGraph& graph);

/// Full prompt: rating-scale preamble plus claim.
std::string render_prompt(const PromptKind& kind, const Edge& edge,
                          const CausalGraph& graph);

/// Builds the complete 10-prompt battery for one edge of the graph.
/// Throws std::invalid_argument when the edge does not belong to the graph.
EdgePromptSet build_prompt_set(std::size_t edge_index, const CausalGraph& graph);

/// The arbiter prompt: both debater responses embedded verbatim, then the
/// final-rating instruction with the causal claim substituted.
/// Throws std::invalid_argument on an empty question or debater response.
std::string render_arbiter_prompt(const std::string& question,
                                  const std::string& response_prop,
                                  const std::string& response_opp);

std::string prompt_set_to_json(const EdgePromptSet& set);

}  // namespace causalaudit
