#include "causalaudit/rag.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace causalaudit {

const char* const kFactsHeader =
    "Use the following established facts when answering:";

CausalFact CausalFact::affirmative(const std::string& cause,
                                   const std::string& effect) {
  return {cause, effect, cause + " strongly affects " + effect + ".",
          FactPolarity::affirmative};
}

CausalFact CausalFact::negated(const std::string& cause, const std::string& effect) {
  return {cause, effect, cause + " does not affect " + effect + ".",
          FactPolarity::negated};
}

const char* to_string(Stance s) {
  return s == Stance::proposition ? "proposition" : "opposition";
}

namespace {

using FactKey = std::tuple<std::string, std::string, FactPolarity>;

FactKey key_of(const CausalFact& fact) {
  return {fact.cause, fact.effect, fact.polarity};
}

std::string normalize_name(const std::string& name) {
  std::string out;
  bool pending_space = false;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace

Corpus build_corpus(const CausalGraph& reference) {
  Corpus corpus;
  corpus.origin = CorpusOrigin::reference_graph;
  std::set<FactKey> seen;
  for (const Edge& edge : reference.edges) {
    if (!edge.directed) continue;
    CausalFact fact =
        CausalFact::affirmative(reference.variable(edge.from).display_name(),
                                reference.variable(edge.to).display_name());
    if (seen.insert(key_of(fact)).second) corpus.facts.push_back(std::move(fact));
  }
  return corpus;
}

Corpus build_stance_corpus(const Edge& edge, Stance stance,
                           const CausalGraph& graph) {
  const std::string a = graph.variable(edge.from).display_name();
  const std::string b = graph.variable(edge.to).display_name();
  Corpus corpus;
  corpus.origin = CorpusOrigin::stance;
  if (stance == Stance::proposition) {
    corpus.facts = {CausalFact::affirmative(a, b), CausalFact::negated(b, a)};
  } else {
    corpus.facts = {CausalFact::affirmative(b, a), CausalFact::negated(a, b)};
  }
  return corpus;
}

std::string render_stance_sentence(const Corpus& stance_corpus) {
  if (stance_corpus.facts.size() != 2 ||
      stance_corpus.facts[0].polarity != FactPolarity::affirmative ||
      stance_corpus.facts[1].polarity != FactPolarity::negated)
    throw std::invalid_argument("not a stance corpus");
  const CausalFact& yes = stance_corpus.facts[0];
  const CausalFact& no = stance_corpus.facts[1];
  return yes.cause + " strongly affects " + yes.effect + ", but " + no.cause +
         " does not affect " + no.effect + ".";
}

CompletionRequest retrieve_and_augment(const Corpus& corpus,
                                       const CompletionRequest& request,
                                       const Edge& edge, const CausalGraph& graph) {
  const std::string a = normalize_name(graph.variable(edge.from).display_name());
  const std::string b = normalize_name(graph.variable(edge.to).display_name());

  std::vector<const CausalFact*> matched;
  for (const CausalFact& fact : corpus.facts) {
    const std::string cause = normalize_name(fact.cause);
    const std::string effect = normalize_name(fact.effect);
    if (cause == a || cause == b || effect == a || effect == b)
      matched.push_back(&fact);
  }
  if (matched.empty()) return request;

  // Skip statements already present as lines of the existing context, which
  // makes a second augmentation with the same corpus a no-op.
  std::set<std::string> existing;
  if (request.context) {
    std::istringstream lines(*request.context);
    std::string line;
    while (std::getline(lines, line)) existing.insert(line);
  }
  std::vector<std::string> additions;
  for (const CausalFact* fact : matched) {
    if (!existing.count(fact->statement)) additions.push_back(fact->statement);
  }
  if (additions.empty()) return request;

  std::string block = kFactsHeader;
  for (const auto& line : additions) {
    block += '\n';
    block += line;
  }
  CompletionRequest out = request;
  out.context = request.context ? block + "\n" + *request.context : block;
  return out;
}

std::string serialize_corpus(const Corpus& corpus) {
  std::string out;
  for (const auto& fact : corpus.facts) {
    out += fact.statement;
    out += '\n';
  }
  return out;
}

Corpus parse_corpus(const std::string& text) {
  Corpus corpus;
  corpus.origin = CorpusOrigin::reference_graph;
  std::set<FactKey> seen;
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string body = line;
    if (body.back() == '.') body.pop_back();
    CausalFact fact;
    if (auto pos = body.find(" does not affect "); pos != std::string::npos) {
      fact = CausalFact::negated(body.substr(0, pos), body.substr(pos + 17));
    } else if (auto pos2 = body.find(" strongly affects ");
               pos2 != std::string::npos) {
      fact = CausalFact::affirmative(body.substr(0, pos2), body.substr(pos2 + 18));
    } else {
      throw std::invalid_argument("corpus line " + std::to_string(line_no) +
                                  " is not a recognized causal statement: " + line);
    }
    if (seen.insert(key_of(fact)).second) corpus.facts.push_back(std::move(fact));
  }
  return corpus;
}

}  // namespace causalaudit
