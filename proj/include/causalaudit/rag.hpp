#pragma once

#include <string>
#include <vector>

#include "causalaudit/gateway.hpp"
#include "causalaudit/graph.hpp"

namespace causalaudit {

enum class FactPolarity { affirmative, negated };

/// One retrievable causal statement. Affirmative facts render as
/// "{cause} strongly affects {effect}."; negated facts as
/// "{cause} does not affect {effect}.".
struct CausalFact {
  std::string cause;   // display name
  std::string effect;  // display name
  std::string statement;
  FactPolarity polarity = FactPolarity::affirmative;

  static CausalFact affirmative(const std::string& cause, const std::string& effect);
  static CausalFact negated(const std::string& cause, const std::string& effect);

  bool operator==(const CausalFact&) const = default;
};

enum class CorpusOrigin { reference_graph, stance };

struct Corpus {
  std::vector<CausalFact> facts;  // unique (cause, effect, polarity) triples
  CorpusOrigin origin = CorpusOrigin::reference_graph;
};

/// One affirmative fact per directed edge of the reference graph, in edge
/// order. Undirected edges contribute nothing; exact duplicate edges
/// collapse to the first occurrence.
Corpus build_corpus(const CausalGraph& reference);

enum class Stance { proposition, opposition };

const char* to_string(Stance s);

/// The two opposing facts a debater is grounded with: proposition asserts
/// A-causes-B and denies the reverse, opposition mirrors it.
Corpus build_stance_corpus(const Edge& edge, Stance stance, const CausalGraph& graph);

/// A stance corpus rendered as its single combined sentence,
/// "{X} strongly affects {Y}, but {Y} does not affect {X}."
std::string render_stance_sentence(const Corpus& stance_corpus);

/// Header line that introduces injected facts in a request context.
extern const char* const kFactsHeader;

/// Prepends every fact mentioning either edge endpoint (case-insensitive,
/// whitespace-normalized name match) to the request context. The question is
/// never touched; re-augmenting with the same corpus adds nothing.
CompletionRequest retrieve_and_augment(const Corpus& corpus,
                                       const CompletionRequest& request,
                                       const Edge& edge, const CausalGraph& graph);

/// Plain-text corpus format: one statement per line, order preserved.
std::string serialize_corpus(const Corpus& corpus);
Corpus parse_corpus(const std::string& text);

}  // namespace causalaudit
