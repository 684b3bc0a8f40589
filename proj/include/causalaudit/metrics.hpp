#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "causalaudit/verdict.hpp"

namespace causalaudit {

/// One matrix cell: a verdict, or the unparseable marker when a responder's
/// ratings could not be read.
struct CellOutcome {
  std::optional<Verdict> verdict;

  bool unparseable() const { return !verdict.has_value(); }
  static CellOutcome of(Verdict v) { return {std::move(v)}; }
  static CellOutcome unparseable_marker() { return {std::nullopt}; }
};

/// Edges x responders grid of audit outcomes. Rows are edges, columns
/// responders; every cell must be filled before rates are computed.
class VerdictMatrix {
 public:
  VerdictMatrix() = default;
  VerdictMatrix(std::vector<std::string> edges, std::vector<std::string> responders);

  const std::vector<std::string>& edges() const { return edges_; }
  const std::vector<std::string>& responders() const { return responders_; }

  /// Optional display strings for edge rows ("E1 (V1->V7)"); defaults to the
  /// plain edge labels.
  const std::vector<std::string>& edge_descriptions() const;
  void set_edge_descriptions(std::vector<std::string> descriptions);

  void set(std::size_t edge, std::size_t responder, CellOutcome outcome);
  const CellOutcome& at(std::size_t edge, std::size_t responder) const;

  bool complete() const;
  std::size_t cell_count() const { return edges_.size() * responders_.size(); }

  std::string to_json() const;
  static VerdictMatrix from_json(const std::string& text);

 private:
  std::vector<std::string> edges_;
  std::vector<std::string> responders_;
  mutable std::vector<std::string> edge_descriptions_;
  std::vector<std::optional<CellOutcome>> cells_;
};

/// Percentage with both the exact fraction and the 1-decimal display value
/// (tenths of a percent, rounded half-up).
struct Percent {
  long long numerator = 0;
  long long denominator = 0;  // 0 means undefined (all cells unparseable)

  bool defined() const { return denominator != 0; }
  double exact() const;
  int tenths() const;
  std::string display() const;  // "72.2" or "n/a"
};

/// Round-half-up of 100*num/den to tenths of a percent, in exact integer
/// arithmetic.
int percent_tenths(long long numerator, long long denominator);

std::string format_tenths(int tenths);

struct RateEntry {
  std::string label;
  int hallucinations = 0;
  int denominator = 0;   // parseable cells only
  int unparseable = 0;
  Percent rate;
};

struct RateSummary {
  std::vector<RateEntry> per_responder;
  std::vector<RateEntry> per_edge;
  Percent overall;  // mean of per-responder rates
  int total_hallucinations = 0;
  int total_cells = 0;
  int total_unparseable = 0;

  const RateEntry* responder(const std::string& label) const;
  const RateEntry* edge(const std::string& label) const;
};

/// Hallucination rates per responder, per edge, and overall. Unparseable
/// cells leave both numerator and denominator for their row/column.
/// Throws std::invalid_argument on an empty or incomplete matrix.
RateSummary compute_rates(const VerdictMatrix& m);

/// Builds a summary directly from known fractions, for comparing against
/// externally reported rate tables.
RateSummary summary_from_fractions(
    const std::vector<std::string>& responders,
    const std::vector<std::pair<long long, long long>>& fractions);

struct ImprovementRow {
  std::string responder;
  int before_tenths = 0;
  int after_tenths = 0;
  int improvement_tenths = 0;  // before - after on displayed values
  double exact_delta = 0.0;    // before - after on exact fractions
};

struct ImprovementReport {
  std::vector<ImprovementRow> rows;
  int avg_before_tenths = 0;
  int avg_after_tenths = 0;
  int avg_improvement_tenths = 0;  // mean of row improvements
  double avg_improvement_exact = 0.0;
  /// Notes emitted when claimed aggregates cannot be derived from the rows.
  std::vector<std::string> discrepancy_notes;
};

/// Per-responder improvement between two summaries over the same responder
/// set. Improvements subtract displayed (rounded) rates so published tables
/// reproduce literally; exact deltas ride along. Claimed aggregates, when
/// given (in tenths), are checked against the derived ones and flagged when
/// they disagree.
ImprovementReport compute_improvement(const RateSummary& before,
                                      const RateSummary& after,
                                      std::optional<int> claimed_after_avg_tenths =
                                          std::nullopt,
                                      std::optional<int> claimed_improvement_avg_tenths =
                                          std::nullopt);

struct DebateResultRow {
  int index = 0;  // 1-based lineup number
  std::string proposition;
  std::string opposition;
  std::string arbiter;
  Percent rate;
};

struct DebateResults {
  std::vector<DebateResultRow> rows;
  Percent average;
};

DebateResults debate_results_from_rates(
    const std::vector<std::tuple<std::string, std::string, std::string>>& lineups,
    const std::vector<Percent>& rates);

enum class ReportFormat { csv, markdown };

struct Provenance {
  std::string run_id;
  std::string config_digest;
  std::string replay_store_digest;
};

std::string emit_report(const VerdictMatrix& m, const RateSummary& summary,
                        ReportFormat format, const Provenance& provenance = {});
std::string emit_report(const ImprovementReport& report, ReportFormat format,
                        const Provenance& provenance = {});
std::string emit_report(const DebateResults& results, ReportFormat format,
                        const Provenance& provenance = {});

}  // namespace causalaudit
