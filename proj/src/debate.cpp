#include "causalaudit/debate.hpp"

#include <future>
#include <set>
#include <stdexcept>

#include "causalaudit/rag.hpp"
#include "json.hpp"

namespace causalaudit {

using nlohmann::json;

const char* to_string(StanceMode mode) {
  return mode == StanceMode::stress_test ? "stress_test" : "fair";
}

void DebateLineup::validate() const {
  proposition.validate();
  opposition.validate();
  arbiter.validate();
  if (proposition.model_name == opposition.model_name ||
      proposition.model_name == arbiter.model_name ||
      opposition.model_name == arbiter.model_name)
    throw std::invalid_argument("debate roles must be three distinct models");
}

std::string debate_responder_label(const DebateLineup& lineup) {
  return "debate:" + lineup.proposition.model_name + "|" +
         lineup.opposition.model_name + "|" + lineup.arbiter.model_name;
}

std::string transcript_to_json_line(const DebateTranscript& t) {
  json doc;
  doc["edge"] = t.edge_label;
  doc["prompt_index"] = t.prompt_index;
  doc["question"] = t.question;
  doc["proposition_response"] = t.proposition_response;
  doc["opposition_response"] = t.opposition_response;
  doc["arbiter_prompt"] = t.arbiter_prompt;
  doc["arbiter_response"] = t.arbiter_response;
  if (t.final_rating)
    doc["final_rating"] = t.final_rating->value();
  else
    doc["final_rating"] = nullptr;
  return doc.dump();
}

namespace {

std::string ask_debater(Gateway& gateway, const CausalGraph& graph,
                        const Edge& edge, const PromptEntry& prompt,
                        const std::string& edge_label, int prompt_index,
                        const ModelSpec& model, Stance stance,
                        StanceMode mode) {
  CompletionRequest request;
  request.question = prompt.text;
  request.edge_label = edge_label;
  request.prompt_index = prompt_index;
  if (mode == StanceMode::stress_test) {
    const Corpus corpus = build_stance_corpus(edge, stance, graph);
    request.context =
        std::string(kFactsHeader) + "\n" + render_stance_sentence(corpus);
  }
  try {
    return gateway.complete(model.model_name, request).text;
  } catch (const GatewayError& e) {
    throw GatewayError(e.code(), std::string(to_string(stance)) + " (" +
                                     model.model_name + "): " + e.what());
  }
}

}  // namespace

DebateTranscript run_debate_round(Gateway& gateway, const CausalGraph& graph,
                                  std::size_t edge_index,
                                  const PromptEntry& prompt, int prompt_index,
                                  const DebateLineup& lineup) {
  lineup.validate();
  const Edge& edge = graph.edges.at(edge_index);
  const std::string label = edge_label(edge_index);

  DebateTranscript t;
  t.edge_label = label;
  t.prompt_index = prompt_index;
  t.question = prompt.text;

  auto prop_future = std::async(std::launch::async, [&] {
    return ask_debater(gateway, graph, edge, prompt, label, prompt_index,
                       lineup.proposition, Stance::proposition,
                       lineup.stance_mode);
  });
  auto opp_future = std::async(std::launch::async, [&] {
    return ask_debater(gateway, graph, edge, prompt, label, prompt_index,
                       lineup.opposition, Stance::opposition,
                       lineup.stance_mode);
  });

  std::exception_ptr failure;
  try {
    t.proposition_response = prop_future.get();
  } catch (...) {
    failure = std::current_exception();
  }
  try {
    t.opposition_response = opp_future.get();
  } catch (...) {
    if (!failure) failure = std::current_exception();
  }
  if (failure) std::rethrow_exception(failure);

  const std::string& first =
      lineup.swap_debater_order ? t.opposition_response : t.proposition_response;
  const std::string& second =
      lineup.swap_debater_order ? t.proposition_response : t.opposition_response;
  t.arbiter_prompt = render_arbiter_prompt(prompt.claim, first, second);

  CompletionRequest arbiter_request;
  arbiter_request.question = t.arbiter_prompt;
  arbiter_request.edge_label = label;
  arbiter_request.prompt_index = prompt_index;
  try {
    t.arbiter_response =
        gateway.complete(lineup.arbiter.model_name, arbiter_request).text;
  } catch (const GatewayError& e) {
    throw GatewayError(e.code(), "arbiter (" + lineup.arbiter.model_name +
                                     "): " + e.what());
  }
  t.final_rating = extract_rating(t.arbiter_response);
  return t;
}

DebateAuditOutcome run_debate_audit(Gateway& gateway, const CausalGraph& graph,
                                    std::size_t edge_index,
                                    const DebateLineup& lineup) {
  const EdgePromptSet set = build_prompt_set(edge_index, graph);

  DebateAuditOutcome outcome;
  outcome.responder = debate_responder_label(lineup);

  std::vector<std::optional<Rating>> ratings;
  for (std::size_t i = 0; i < set.prompts.size(); ++i) {
    DebateTranscript t = run_debate_round(gateway, graph, edge_index,
                                          set.prompts[i],
                                          static_cast<int>(i), lineup);
    if (!t.final_rating) ++outcome.unparseable_rounds;
    ratings.push_back(t.final_rating);
    outcome.transcripts.push_back(std::move(t));
  }

  if (outcome.unparseable_rounds == 0) {
    std::array<Rating, kPromptsPerEdge> all = {
        *ratings[0], *ratings[1], *ratings[2], *ratings[3], *ratings[4],
        *ratings[5], *ratings[6], *ratings[7], *ratings[8], *ratings[9]};
    const Edge& edge = graph.edges.at(edge_index);
    outcome.profile = profile_from_ratings(
        edge_label(edge_index), graph.variable(edge.from).display_name(),
        graph.variable(edge.to).display_name(), outcome.responder, all);
  }
  return outcome;
}

std::vector<DebateLineup> enumerate_lineups(
    const std::vector<ModelSpec>& models,
    const std::vector<std::string>& arbiter_pool, StanceMode stance_mode) {
  if (models.size() < 3)
    throw std::invalid_argument("debates need at least 3 models");
  if (arbiter_pool.empty())
    throw std::invalid_argument("arbiter pool is empty");

  std::set<std::string> names;
  for (const auto& m : models) {
    if (!names.insert(m.model_name).second)
      throw std::invalid_argument("duplicate model name: " + m.model_name);
  }
  for (const auto& name : arbiter_pool) {
    if (!names.count(name))
      throw std::invalid_argument("arbiter '" + name + "' is not among the models");
  }

  auto spec_of = [&](const std::string& name) -> const ModelSpec& {
    for (const auto& m : models) {
      if (m.model_name == name) return m;
    }
    throw std::logic_error("unreachable");
  };

  std::vector<DebateLineup> lineups;
  for (const auto& arbiter_name : arbiter_pool) {
    for (const auto& prop : models) {
      if (prop.model_name == arbiter_name) continue;
      for (const auto& opp : models) {
        if (opp.model_name == arbiter_name || opp.model_name == prop.model_name)
          continue;
        DebateLineup lineup;
        lineup.proposition = prop;
        lineup.opposition = opp;
        lineup.arbiter = spec_of(arbiter_name);
        lineup.stance_mode = stance_mode;
        lineups.push_back(std::move(lineup));
      }
    }
  }
  return lineups;
}

}  // namespace causalaudit
