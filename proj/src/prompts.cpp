#include "causalaudit/prompts.hpp"

#include <stdexcept>

#include "json.hpp"

namespace causalaudit {

namespace {

constexpr const char* kScalePreamble =
    "On a scale from 1 to 4, where 4 represents strong or most likely, "
    "rate the cause-and-effect relationship: ";

// The arbiter wording restates the scale without "where", so it cannot
// reuse kScalePreamble.
constexpr const char* kArbiterInstruction =
    "Using the responses of the two debaters and your own knowledge, "
    "generate a final rating in response to the question: "
    "On a scale from 1 to 4, 4 represents strong or most likely, "
    "rate the cause-and-effect relationship: ";

}  // namespace

Polarity antecedent_of(PolarityPattern p) {
  return (p == PolarityPattern::hh || p == PolarityPattern::hl)
             ? Polarity::higher
             : Polarity::lower;
}

Polarity consequent_of(PolarityPattern p) {
  return (p == PolarityPattern::hh || p == PolarityPattern::lh)
             ? Polarity::higher
             : Polarity::lower;
}

const char* to_string(Polarity p) {
  return p == Polarity::higher ? "higher" : "lower";
}

const char* to_string(Side s) { return s == Side::A ? "A" : "B"; }

const char* to_string(PolarityPattern p) {
  switch (p) {
    case PolarityPattern::hh: return "hh";
    case PolarityPattern::hl: return "hl";
    case PolarityPattern::lh: return "lh";
    case PolarityPattern::ll: return "ll";
  }
  return "?";
}

std::array<PromptKind, kPromptsPerEdge> canonical_prompt_order() {
  std::array<PromptKind, kPromptsPerEdge> order;
  order[0] = PromptKind::general(Side::A);
  order[1] = PromptKind::general(Side::B);
  std::size_t i = 2;
  for (Side side : {Side::A, Side::B}) {
    for (PolarityPattern pattern : kPolarityPatterns) {
      if (side == Side::A)
        order[i] = PromptKind::specific(Side::A, pattern);
      else
        order[i] = PromptKind::specific(Side::B, pattern);
      ++i;
    }
  }
  return order;
}

std::string render_claim(const PromptKind& kind, const Edge& edge,
                         const CausalGraph& graph) {
  const std::string cause_id = kind.claimed_cause == Side::A ? edge.from : edge.to;
  const std::string effect_id = kind.claimed_cause == Side::A ? edge.to : edge.from;
  const std::string cause = graph.variable(cause_id).display_name();
  const std::string effect = graph.variable(effect_id).display_name();

  if (kind.kind == PromptKind::Kind::general)
    return "changing " + cause + " causes a change in " + effect;
  return std::string(to_string(antecedent_of(kind.pattern))) + " " + cause +
         " causes " + to_string(consequent_of(kind.pattern)) + " " + effect;
}

std::string render_prompt(const PromptKind& kind, const Edge& edge,
                          const CausalGraph& graph) {
  return kScalePreamble + render_claim(kind, edge, graph);
}

EdgePromptSet build_prompt_set(std::size_t edge_index, const CausalGraph& graph) {
  if (edge_index >= graph.edges.size())
    throw std::invalid_argument("edge index " + std::to_string(edge_index) +
                                " is not in the graph");
  const Edge& edge = graph.edges[edge_index];
  EdgePromptSet set;
  set.edge_index = edge_index;
  set.edge = edge;
  set.prompts.reserve(kPromptsPerEdge);
  for (const PromptKind& kind : canonical_prompt_order()) {
    PromptEntry entry;
    entry.kind = kind;
    entry.claim = render_claim(kind, edge, graph);
    entry.text = render_prompt(kind, edge, graph);
    set.prompts.push_back(std::move(entry));
  }
  return set;
}

std::string render_arbiter_prompt(const std::string& question,
                                  const std::string& response_prop,
                                  const std::string& response_opp) {
  if (question.empty())
    throw std::invalid_argument("arbiter question must not be empty");
  if (response_prop.empty() || response_opp.empty())
    throw std::invalid_argument("debater responses must not be empty");
  std::string out;
  out += "Debater 1 response:\n";
  out += response_prop;
  out += "\n\nDebater 2 response:\n";
  out += response_opp;
  out += "\n\n";
  out += kArbiterInstruction;
  out += question;
  return out;
}

std::string prompt_set_to_json(const EdgePromptSet& set) {
  nlohmann::json doc;
  doc["edge"] = {{"from", set.edge.from},
                 {"to", set.edge.to},
                 {"directed", set.edge.directed}};
  doc["edge_label"] = edge_label(set.edge_index);
  doc["prompts"] = nlohmann::json::array();
  for (const auto& p : set.prompts) {
    nlohmann::json item;
    item["kind"] = p.kind.kind == PromptKind::Kind::general ? "general" : "specific";
    item["claimed_cause"] = to_string(p.kind.claimed_cause);
    if (p.kind.kind == PromptKind::Kind::specific)
      item["pattern"] = to_string(p.kind.pattern);
    item["claim"] = p.claim;
    item["text"] = p.text;
    doc["prompts"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

}  // namespace causalaudit
