#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "causalaudit/prompts.hpp"

namespace causalaudit {

/// A rating on the audit scale. Construction enforces 1..4.
class Rating {
 public:
  explicit Rating(int value);

  int value() const { return value_; }

  bool operator==(const Rating&) const = default;

 private:
  int value_;
};

/// A rating r counts as strong iff r >= t_strong. The scale's natural
/// midpoint split (3) is the default; 2 and 4 are accepted for sensitivity
/// runs.
class StrengthThreshold {
 public:
  explicit StrengthThreshold(int t_strong = 3);

  int t_strong() const { return t_strong_; }

 private:
  int t_strong_;
};

enum class StrengthClass { weak, strong };

StrengthClass classify_strength(Rating r, StrengthThreshold th);

/// One mirrored rating pair: a_side rates the "A causes B" variant of a
/// prompt kind, b_side the "B causes A" variant of the same kind.
struct BarPair {
  Rating a_side;
  Rating b_side;

  bool operator==(const BarPair&) const = default;
};

/// The full 10-rating outcome of auditing one edge with one responder,
/// organized as 1 general pair + 4 specific pairs (hh, hl, lh, ll).
struct EdgeAuditProfile {
  std::string edge_label;
  std::string a_name;  // display name of edge.from
  std::string b_name;  // display name of edge.to
  std::string responder;
  BarPair general{Rating(1), Rating(1)};
  std::array<BarPair, 4> specific{BarPair{Rating(1), Rating(1)},
                                  BarPair{Rating(1), Rating(1)},
                                  BarPair{Rating(1), Rating(1)},
                                  BarPair{Rating(1), Rating(1)}};
  std::vector<std::string> raw_responses;  // empty or 10, battery order

  const BarPair& pair(PolarityPattern p) const {
    return specific[static_cast<std::size_t>(p)];
  }
};

/// Assembles a profile from the 10 ratings in canonical battery order:
/// r[0]/r[1] the general pair, r[2+i]/r[6+i] the specific pair for
/// pattern i (hh, hl, lh, ll).
EdgeAuditProfile profile_from_ratings(std::string edge_label, std::string a_name,
                                      std::string b_name, std::string responder,
                                      const std::array<Rating, 10>& ratings);

std::array<Rating, 10> ratings_of(const EdgeAuditProfile& profile);

/// The same audit with the edge endpoints exchanged.
EdgeAuditProfile swapped_profile(const EdgeAuditProfile& profile);

enum class Dominance { A, B, none };

const char* to_string(Dominance d);

/// Causal dominance of one mirrored pair: equal ratings or two weak ratings
/// yield none; otherwise the strictly greater rating's side dominates.
Dominance pair_dominance(const BarPair& p, StrengthThreshold th);

struct ColoredDominance {
  Dominance dominance = Dominance::none;
  bool split = false;  // both sides dominate somewhere, with no majority
  int a_count = 0;
  int b_count = 0;
};

/// Majority vote over the four specific pairs.
ColoredDominance colored_dominance(const std::array<BarPair, 4>& pairs,
                                   StrengthThreshold th);

/// A two-way chain of strong specific claims, e.g. "high A causes low B"
/// together with "low B causes high A". `a_pattern` identifies the strong
/// A-side claim, `b_pattern` the strong B-side claim; the pair is reported
/// when either claim's consequent matches the other's antecedent.
struct CycleRecord {
  PolarityPattern a_pattern;
  PolarityPattern b_pattern;

  bool operator==(const CycleRecord&) const = default;
};

std::vector<CycleRecord> detect_polarity_cycle(const EdgeAuditProfile& profile,
                                               StrengthThreshold th);

enum class HallucinationReason {
  polarity_cycle,
  colored_split,
  general_colored_contradiction,
};

/// Stable reason codes used in serialized verdicts.
const char* to_string(HallucinationReason reason);

class Verdict {
 public:
  enum class Kind { causality, no_causality, hallucination };

  static Verdict causality(Side dominant);
  static Verdict no_causality();
  static Verdict hallucination(std::vector<HallucinationReason> reasons);

  Kind kind() const { return kind_; }
  Side dominant() const;  // valid for causality only, throws otherwise
  const std::vector<HallucinationReason>& reasons() const { return reasons_; }

  bool operator==(const Verdict&) const = default;

  /// Table cell key: "C", "N" or "H".
  char code() const;

 private:
  Verdict() = default;
  Kind kind_ = Kind::no_causality;
  std::optional<Side> dominant_;
  std::vector<HallucinationReason> reasons_;
};

/// Applies the full evaluation rationale to one profile. Total and
/// deterministic over all 4^10 rating assignments.
Verdict evaluate(const EdgeAuditProfile& profile, StrengthThreshold th);

std::string verdict_to_json(const Verdict& v);
Verdict verdict_from_json(const std::string& text);

std::string profile_to_json(const EdgeAuditProfile& profile);
EdgeAuditProfile profile_from_json(const std::string& text);

}  // namespace causalaudit
