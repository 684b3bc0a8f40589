#include "causalaudit/verdict.hpp"

#include <stdexcept>

#include "json.hpp"

namespace causalaudit {

using nlohmann::json;

Rating::Rating(int value) : value_(value) {
  if (value < 1 || value > 4)
    throw std::invalid_argument("rating " + std::to_string(value) +
                                " outside [1,4]");
}

StrengthThreshold::StrengthThreshold(int t_strong) : t_strong_(t_strong) {
  if (t_strong < 2 || t_strong > 4)
    throw std::invalid_argument("t_strong " + std::to_string(t_strong) +
                                " outside [2,4]");
}

StrengthClass classify_strength(Rating r, StrengthThreshold th) {
  return r.value() >= th.t_strong() ? StrengthClass::strong : StrengthClass::weak;
}

EdgeAuditProfile profile_from_ratings(std::string edge_label, std::string a_name,
                                      std::string b_name, std::string responder,
                                      const std::array<Rating, 10>& r) {
  EdgeAuditProfile p;
  p.edge_label = std::move(edge_label);
  p.a_name = std::move(a_name);
  p.b_name = std::move(b_name);
  p.responder = std::move(responder);
  p.general = BarPair{r[0], r[1]};
  for (std::size_t i = 0; i < 4; ++i) p.specific[i] = BarPair{r[2 + i], r[6 + i]};
  return p;
}

std::array<Rating, 10> ratings_of(const EdgeAuditProfile& profile) {
  std::array<Rating, 10> r{Rating(1), Rating(1), Rating(1), Rating(1), Rating(1),
                           Rating(1), Rating(1), Rating(1), Rating(1), Rating(1)};
  r[0] = profile.general.a_side;
  r[1] = profile.general.b_side;
  for (std::size_t i = 0; i < 4; ++i) {
    r[2 + i] = profile.specific[i].a_side;
    r[6 + i] = profile.specific[i].b_side;
  }
  return r;
}

EdgeAuditProfile swapped_profile(const EdgeAuditProfile& profile) {
  EdgeAuditProfile out = profile;
  std::swap(out.a_name, out.b_name);
  std::swap(out.general.a_side, out.general.b_side);
  for (auto& pair : out.specific) std::swap(pair.a_side, pair.b_side);
  return out;
}

const char* to_string(Dominance d) {
  switch (d) {
    case Dominance::A: return "A";
    case Dominance::B: return "B";
    case Dominance::none: return "none";
  }
  return "?";
}

Dominance pair_dominance(const BarPair& p, StrengthThreshold th) {
  const int a = p.a_side.value();
  const int b = p.b_side.value();
  if (a == b) return Dominance::none;  // equal, whether weak or strong
  const int t = th.t_strong();
  if (a < t && b < t) return Dominance::none;  // both weak
  // Unequal with at least one strong rating: the greater rating is
  // necessarily the strong one, and its side dominates.
  return a > b ? Dominance::A : Dominance::B;
}

ColoredDominance colored_dominance(const std::array<BarPair, 4>& pairs,
                                   StrengthThreshold th) {
  ColoredDominance result;
  for (const auto& pair : pairs) {
    switch (pair_dominance(pair, th)) {
      case Dominance::A: ++result.a_count; break;
      case Dominance::B: ++result.b_count; break;
      case Dominance::none: break;
    }
  }
  if (result.a_count > result.b_count) {
    result.dominance = Dominance::A;
  } else if (result.b_count > result.a_count) {
    result.dominance = Dominance::B;
  } else {
    result.dominance = Dominance::none;
    result.split = result.a_count >= 1;  // tied dominance with no majority
  }
  return result;
}

std::vector<CycleRecord> detect_polarity_cycle(const EdgeAuditProfile& profile,
                                               StrengthThreshold th) {
  const int t = th.t_strong();
  std::vector<CycleRecord> records;
  // A strong a_side of pattern (p,q) asserts "p A causes q B"; a strong
  // b_side of pattern (q,r) asserts "q B causes r A". Two strong claims in
  // opposite directions chain whenever one's consequent polarity feeds the
  // other's antecedent, in either orientation.
  for (PolarityPattern ap : kPolarityPatterns) {
    if (profile.pair(ap).a_side.value() < t) continue;
    for (PolarityPattern bp : kPolarityPatterns) {
      if (profile.pair(bp).b_side.value() < t) continue;
      const bool a_feeds_b = consequent_of(ap) == antecedent_of(bp);
      const bool b_feeds_a = consequent_of(bp) == antecedent_of(ap);
      if (a_feeds_b || b_feeds_a) records.push_back({ap, bp});
    }
  }
  return records;
}

Verdict Verdict::causality(Side dominant) {
  Verdict v;
  v.kind_ = Kind::causality;
  v.dominant_ = dominant;
  return v;
}

Verdict Verdict::no_causality() {
  Verdict v;
  v.kind_ = Kind::no_causality;
  return v;
}

Verdict Verdict::hallucination(std::vector<HallucinationReason> reasons) {
  if (reasons.empty())
    throw std::invalid_argument("hallucination verdict needs at least one reason");
  Verdict v;
  v.kind_ = Kind::hallucination;
  v.reasons_ = std::move(reasons);
  return v;
}

Side Verdict::dominant() const {
  if (!dominant_) throw std::logic_error("verdict has no dominant side");
  return *dominant_;
}

char Verdict::code() const {
  switch (kind_) {
    case Kind::causality: return 'C';
    case Kind::no_causality: return 'N';
    case Kind::hallucination: return 'H';
  }
  return '?';
}

const char* to_string(HallucinationReason reason) {
  switch (reason) {
    case HallucinationReason::polarity_cycle: return "polarity_cycle";
    case HallucinationReason::colored_split: return "colored_split";
    case HallucinationReason::general_colored_contradiction:
      return "general_colored_contradiction";
  }
  return "unknown";
}

Verdict evaluate(const EdgeAuditProfile& profile, StrengthThreshold th) {
  const Dominance general = pair_dominance(profile.general, th);
  const ColoredDominance colored = colored_dominance(profile.specific, th);
  const bool has_cycle = !detect_polarity_cycle(profile, th).empty();

  std::vector<HallucinationReason> reasons;
  if (has_cycle) reasons.push_back(HallucinationReason::polarity_cycle);
  if (colored.split) reasons.push_back(HallucinationReason::colored_split);
  if (general != colored.dominance)
    reasons.push_back(HallucinationReason::general_colored_contradiction);
  if (!reasons.empty()) return Verdict::hallucination(std::move(reasons));

  switch (general) {  // general == colored here
    case Dominance::A: return Verdict::causality(Side::A);
    case Dominance::B: return Verdict::causality(Side::B);
    case Dominance::none: return Verdict::no_causality();
  }
  return Verdict::no_causality();
}

namespace {

json verdict_json(const Verdict& v) {
  json doc;
  switch (v.kind()) {
    case Verdict::Kind::causality:
      doc["verdict"] = "causality";
      doc["dominant"] = to_string(v.dominant());
      break;
    case Verdict::Kind::no_causality:
      doc["verdict"] = "no_causality";
      break;
    case Verdict::Kind::hallucination: {
      doc["verdict"] = "hallucination";
      auto reasons = json::array();
      for (auto r : v.reasons()) reasons.push_back(to_string(r));
      doc["reasons"] = std::move(reasons);
      break;
    }
  }
  return doc;
}

Verdict verdict_of_json(const json& doc) {
  const std::string kind = doc.at("verdict").get<std::string>();
  if (kind == "causality") {
    const std::string side = doc.at("dominant").get<std::string>();
    return Verdict::causality(side == "A" ? Side::A : Side::B);
  }
  if (kind == "no_causality") return Verdict::no_causality();
  if (kind == "hallucination") {
    std::vector<HallucinationReason> reasons;
    for (const auto& r : doc.at("reasons")) {
      const std::string name = r.get<std::string>();
      if (name == "polarity_cycle")
        reasons.push_back(HallucinationReason::polarity_cycle);
      else if (name == "colored_split")
        reasons.push_back(HallucinationReason::colored_split);
      else if (name == "general_colored_contradiction")
        reasons.push_back(HallucinationReason::general_colored_contradiction);
      else
        throw std::invalid_argument("unknown hallucination reason '" + name + "'");
    }
    return Verdict::hallucination(std::move(reasons));
  }
  throw std::invalid_argument("unknown verdict kind '" + kind + "'");
}

}  // namespace

std::string verdict_to_json(const Verdict& v) { return verdict_json(v).dump(); }

Verdict verdict_from_json(const std::string& text) {
  return verdict_of_json(json::parse(text));
}

std::string profile_to_json(const EdgeAuditProfile& profile) {
  json doc;
  doc["edge"] = profile.edge_label;
  doc["a_name"] = profile.a_name;
  doc["b_name"] = profile.b_name;
  doc["responder"] = profile.responder;
  auto ratings = json::array();
  for (const Rating& r : ratings_of(profile)) ratings.push_back(r.value());
  doc["ratings"] = std::move(ratings);
  if (!profile.raw_responses.empty()) doc["raw_responses"] = profile.raw_responses;
  return doc.dump();
}

EdgeAuditProfile profile_from_json(const std::string& text) {
  const json doc = json::parse(text);
  const auto& values = doc.at("ratings");
  if (!values.is_array() || values.size() != 10)
    throw std::invalid_argument("profile needs exactly 10 ratings");
  std::array<Rating, 10> ratings{Rating(1), Rating(1), Rating(1), Rating(1),
                                 Rating(1), Rating(1), Rating(1), Rating(1),
                                 Rating(1), Rating(1)};
  for (std::size_t i = 0; i < 10; ++i) ratings[i] = Rating(values[i].get<int>());
  EdgeAuditProfile profile = profile_from_ratings(
      doc.at("edge").get<std::string>(), doc.value("a_name", ""),
      doc.value("b_name", ""), doc.at("responder").get<std::string>(), ratings);
  if (doc.contains("raw_responses"))
    profile.raw_responses = doc["raw_responses"].get<std::vector<std::string>>();
  return profile;
}

}  // namespace causalaudit
