#include "causalaudit/metrics.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace causalaudit {

using nlohmann::json;

// ---------------------------------------------------------------------------
// VerdictMatrix

VerdictMatrix::VerdictMatrix(std::vector<std::string> edges,
                             std::vector<std::string> responders)
    : edges_(std::move(edges)),
      responders_(std::move(responders)),
      cells_(edges_.size() * responders_.size()) {}

const std::vector<std::string>& VerdictMatrix::edge_descriptions() const {
  if (edge_descriptions_.empty()) edge_descriptions_ = edges_;
  return edge_descriptions_;
}

void VerdictMatrix::set_edge_descriptions(std::vector<std::string> descriptions) {
  if (descriptions.size() != edges_.size())
    throw std::invalid_argument("edge description count mismatch");
  edge_descriptions_ = std::move(descriptions);
}

void VerdictMatrix::set(std::size_t edge, std::size_t responder, CellOutcome outcome) {
  cells_.at(edge * responders_.size() + responder) = std::move(outcome);
}

const CellOutcome& VerdictMatrix::at(std::size_t edge, std::size_t responder) const {
  const auto& cell = cells_.at(edge * responders_.size() + responder);
  if (!cell) throw std::logic_error("matrix cell not filled");
  return *cell;
}

bool VerdictMatrix::complete() const {
  for (const auto& cell : cells_) {
    if (!cell) return false;
  }
  return true;
}

std::string VerdictMatrix::to_json() const {
  json doc;
  doc["edges"] = edges_;
  doc["edge_descriptions"] = edge_descriptions();
  doc["responders"] = responders_;
  auto rows = json::array();
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto row = json::array();
    for (std::size_t r = 0; r < responders_.size(); ++r) {
      const CellOutcome& cell = at(e, r);
      if (cell.unparseable()) {
        row.push_back({{"verdict", "unparseable"}});
      } else {
        row.push_back(json::parse(verdict_to_json(*cell.verdict)));
      }
    }
    rows.push_back(std::move(row));
  }
  doc["cells"] = std::move(rows);
  return doc.dump(2) + "\n";
}

VerdictMatrix VerdictMatrix::from_json(const std::string& text) {
  const json doc = json::parse(text);
  VerdictMatrix m(doc.at("edges").get<std::vector<std::string>>(),
                  doc.at("responders").get<std::vector<std::string>>());
  if (doc.contains("edge_descriptions"))
    m.set_edge_descriptions(doc["edge_descriptions"].get<std::vector<std::string>>());
  const auto& rows = doc.at("cells");
  if (rows.size() != m.edges().size())
    throw std::invalid_argument("matrix row count mismatch");
  for (std::size_t e = 0; e < rows.size(); ++e) {
    if (rows[e].size() != m.responders().size())
      throw std::invalid_argument("matrix column count mismatch");
    for (std::size_t r = 0; r < rows[e].size(); ++r) {
      if (rows[e][r].at("verdict").get<std::string>() == "unparseable") {
        m.set(e, r, CellOutcome::unparseable_marker());
      } else {
        m.set(e, r, CellOutcome::of(verdict_from_json(rows[e][r].dump())));
      }
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Percentages

int percent_tenths(long long numerator, long long denominator) {
  if (denominator <= 0) throw std::invalid_argument("denominator must be positive");
  // round-half-up of 1000*num/den
  return static_cast<int>((2000 * numerator + denominator) / (2 * denominator));
}

std::string format_tenths(int tenths) {
  std::ostringstream out;
  if (tenths < 0) {
    out << '-';
    tenths = -tenths;
  }
  out << tenths / 10 << '.' << tenths % 10;
  return out.str();
}

double Percent::exact() const {
  return defined() ? 100.0 * static_cast<double>(numerator) /
                         static_cast<double>(denominator)
                   : 0.0;
}

int Percent::tenths() const {
  return defined() ? percent_tenths(numerator, denominator) : 0;
}

std::string Percent::display() const {
  return defined() ? format_tenths(tenths()) : "n/a";
}

// ---------------------------------------------------------------------------
// Rates

const RateEntry* RateSummary::responder(const std::string& label) const {
  for (const auto& e : per_responder) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

const RateEntry* RateSummary::edge(const std::string& label) const {
  for (const auto& e : per_edge) {
    if (e.label == label) return &e;
  }
  return nullptr;
}

namespace {

// Exact mean of a set of fractions, reduced with gcd at every step.
Percent mean_of_fractions(const std::vector<Percent>& values) {
  long long num = 0;
  long long den = 1;
  int count = 0;
  for (const auto& v : values) {
    if (!v.defined()) continue;
    ++count;
    const long long g = std::gcd(den, v.denominator);
    const long long scaled_den = den / g * v.denominator;
    num = num * (v.denominator / g) + v.numerator * (den / g);
    den = scaled_den;
    const long long g2 = std::gcd(num < 0 ? -num : num, den);
    if (g2 > 1) {
      num /= g2;
      den /= g2;
    }
  }
  if (count == 0) return {0, 0};
  return {num, den * count};
}

}  // namespace

RateSummary compute_rates(const VerdictMatrix& m) {
  if (m.edges().empty() || m.responders().empty())
    throw std::invalid_argument("matrix is empty");
  if (!m.complete()) throw std::invalid_argument("matrix has unfilled cells");

  RateSummary summary;
  summary.total_cells = static_cast<int>(m.cell_count());

  for (std::size_t r = 0; r < m.responders().size(); ++r) {
    RateEntry entry;
    entry.label = m.responders()[r];
    for (std::size_t e = 0; e < m.edges().size(); ++e) {
      const CellOutcome& cell = m.at(e, r);
      if (cell.unparseable()) {
        ++entry.unparseable;
        continue;
      }
      ++entry.denominator;
      if (cell.verdict->kind() == Verdict::Kind::hallucination)
        ++entry.hallucinations;
    }
    entry.rate = {entry.hallucinations, entry.denominator};
    summary.total_hallucinations += entry.hallucinations;
    summary.total_unparseable += entry.unparseable;
    summary.per_responder.push_back(std::move(entry));
  }

  for (std::size_t e = 0; e < m.edges().size(); ++e) {
    RateEntry entry;
    entry.label = m.edges()[e];
    for (std::size_t r = 0; r < m.responders().size(); ++r) {
      const CellOutcome& cell = m.at(e, r);
      if (cell.unparseable()) {
        ++entry.unparseable;
        continue;
      }
      ++entry.denominator;
      if (cell.verdict->kind() == Verdict::Kind::hallucination)
        ++entry.hallucinations;
    }
    entry.rate = {entry.hallucinations, entry.denominator};
    summary.per_edge.push_back(std::move(entry));
  }

  std::vector<Percent> responder_rates;
  for (const auto& entry : summary.per_responder) responder_rates.push_back(entry.rate);
  summary.overall = mean_of_fractions(responder_rates);
  return summary;
}

RateSummary summary_from_fractions(
    const std::vector<std::string>& responders,
    const std::vector<std::pair<long long, long long>>& fractions) {
  if (responders.size() != fractions.size())
    throw std::invalid_argument("label/fraction count mismatch");
  RateSummary summary;
  std::vector<Percent> rates;
  for (std::size_t i = 0; i < responders.size(); ++i) {
    RateEntry entry;
    entry.label = responders[i];
    entry.hallucinations = static_cast<int>(fractions[i].first);
    entry.denominator = static_cast<int>(fractions[i].second);
    entry.rate = {fractions[i].first, fractions[i].second};
    rates.push_back(entry.rate);
    summary.total_hallucinations += entry.hallucinations;
    summary.total_cells += entry.denominator;
    summary.per_responder.push_back(std::move(entry));
  }
  summary.overall = mean_of_fractions(rates);
  return summary;
}

ImprovementReport compute_improvement(const RateSummary& before,
                                      const RateSummary& after,
                                      std::optional<int> claimed_after_avg_tenths,
                                      std::optional<int> claimed_improvement_avg_tenths) {
  if (before.per_responder.size() != after.per_responder.size())
    throw std::invalid_argument("responder sets differ in size");

  ImprovementReport report;
  long long improvement_sum = 0;
  double exact_sum = 0.0;
  for (std::size_t i = 0; i < before.per_responder.size(); ++i) {
    const RateEntry& b = before.per_responder[i];
    const RateEntry& a = after.per_responder[i];
    if (b.label != a.label)
      throw std::invalid_argument("responder sets differ: '" + b.label +
                                  "' vs '" + a.label + "'");
    ImprovementRow row;
    row.responder = b.label;
    row.before_tenths = b.rate.tenths();
    row.after_tenths = a.rate.tenths();
    row.improvement_tenths = row.before_tenths - row.after_tenths;
    row.exact_delta = b.rate.exact() - a.rate.exact();
    improvement_sum += row.improvement_tenths;
    exact_sum += row.exact_delta;
    report.rows.push_back(std::move(row));
  }

  const long long n = static_cast<long long>(report.rows.size());
  report.avg_before_tenths = before.overall.tenths();
  report.avg_after_tenths = after.overall.tenths();
  // mean of row improvements, rounded half-up at tenths
  report.avg_improvement_tenths =
      static_cast<int>((2 * improvement_sum + n) / (2 * n));
  report.avg_improvement_exact = exact_sum / static_cast<double>(n);

  if (claimed_after_avg_tenths && *claimed_after_avg_tenths != report.avg_after_tenths) {
    report.discrepancy_notes.push_back(
        "claimed after-treatment average " + format_tenths(*claimed_after_avg_tenths) +
        "% is not derivable from the listed rates (mean of rates = " +
        format_tenths(report.avg_after_tenths) + "%)");
  }
  if (claimed_improvement_avg_tenths &&
      *claimed_improvement_avg_tenths != report.avg_improvement_tenths) {
    report.discrepancy_notes.push_back(
        "claimed average improvement " + format_tenths(*claimed_improvement_avg_tenths) +
        "% is not derivable from the listed improvements (mean = " +
        format_tenths(report.avg_improvement_tenths) + "%)");
  }
  return report;
}

DebateResults debate_results_from_rates(
    const std::vector<std::tuple<std::string, std::string, std::string>>& lineups,
    const std::vector<Percent>& rates) {
  if (lineups.size() != rates.size())
    throw std::invalid_argument("lineup/rate count mismatch");
  DebateResults results;
  for (std::size_t i = 0; i < lineups.size(); ++i) {
    DebateResultRow row;
    row.index = static_cast<int>(i + 1);
    std::tie(row.proposition, row.opposition, row.arbiter) = lineups[i];
    row.rate = rates[i];
    results.rows.push_back(std::move(row));
  }
  results.average = mean_of_fractions(rates);
  return results;
}

// ---------------------------------------------------------------------------
// Report emission

namespace {

std::string cell_text(const CellOutcome& cell) {
  return cell.unparseable() ? "U" : std::string(1, cell.verdict->code());
}

void append_provenance_md(std::ostringstream& out, const Provenance& p) {
  if (p.run_id.empty() && p.config_digest.empty() && p.replay_store_digest.empty())
    return;
  out << "run: " << (p.run_id.empty() ? "-" : p.run_id)
      << " | config: " << (p.config_digest.empty() ? "-" : p.config_digest)
      << " | replay-store: "
      << (p.replay_store_digest.empty() ? "-" : p.replay_store_digest) << "\n\n";
}

void append_provenance_csv(std::ostringstream& out, const Provenance& p) {
  if (p.run_id.empty() && p.config_digest.empty() && p.replay_store_digest.empty())
    return;
  out << "# run: " << (p.run_id.empty() ? "-" : p.run_id) << "\n";
  out << "# config: " << (p.config_digest.empty() ? "-" : p.config_digest) << "\n";
  out << "# replay-store: "
      << (p.replay_store_digest.empty() ? "-" : p.replay_store_digest) << "\n";
}

}  // namespace

std::string emit_report(const VerdictMatrix& m, const RateSummary& summary,
                        ReportFormat format, const Provenance& provenance) {
  std::ostringstream out;
  if (format == ReportFormat::markdown) {
    out << "# Hallucination Survey Results\n\n";
    append_provenance_md(out, provenance);
    out << "C = causality N = no causality H = hallucination U = unparseable\n\n";
    out << "| Edge/LLM |";
    for (const auto& r : m.responders()) out << " " << r << " |";
    out << " Edge hallucination rate |\n";
    out << "|---|";
    for (std::size_t i = 0; i < m.responders().size(); ++i) out << "---|";
    out << "---|\n";
    for (std::size_t e = 0; e < m.edges().size(); ++e) {
      out << "| " << m.edge_descriptions()[e] << " |";
      for (std::size_t r = 0; r < m.responders().size(); ++r)
        out << " " << cell_text(m.at(e, r)) << " |";
      out << " " << summary.per_edge[e].rate.display() << "% |\n";
    }
    out << "| LLM hallucination rate |";
    for (const auto& entry : summary.per_responder)
      out << " " << entry.rate.display() << "% |";
    out << " Average " << summary.overall.display() << "% |\n";
    if (summary.total_unparseable > 0) {
      out << "\n" << summary.total_unparseable
          << " cell(s) were unparseable and excluded from every rate.\n";
    }
    return out.str();
  }

  append_provenance_csv(out, provenance);
  out << "edge";
  for (const auto& r : m.responders()) out << "," << r;
  out << ",edge_hallucination_rate\n";
  for (std::size_t e = 0; e < m.edges().size(); ++e) {
    out << m.edges()[e];
    for (std::size_t r = 0; r < m.responders().size(); ++r)
      out << "," << cell_text(m.at(e, r));
    out << "," << summary.per_edge[e].rate.display() << "\n";
  }
  out << "llm_hallucination_rate";
  for (const auto& entry : summary.per_responder)
    out << "," << entry.rate.display();
  out << "," << summary.overall.display() << "\n";
  return out.str();
}

std::string emit_report(const ImprovementReport& report, ReportFormat format,
                        const Provenance& provenance) {
  std::ostringstream out;
  if (format == ReportFormat::markdown) {
    out << "# RAG Survey Results\n\n";
    append_provenance_md(out, provenance);
    out << "| Treatment/LLM |";
    for (const auto& row : report.rows) out << " " << row.responder << " |";
    out << " Average LLM hallucination rate |\n";
    out << "|---|";
    for (std::size_t i = 0; i < report.rows.size(); ++i) out << "---|";
    out << "---|\n";
    out << "| Before |";
    for (const auto& row : report.rows)
      out << " " << format_tenths(row.before_tenths) << "% |";
    out << " " << format_tenths(report.avg_before_tenths) << "% |\n";
    out << "| After |";
    for (const auto& row : report.rows)
      out << " " << format_tenths(row.after_tenths) << "% |";
    out << " " << format_tenths(report.avg_after_tenths) << "% |\n";
    out << "| Improvement |";
    for (const auto& row : report.rows)
      out << " " << format_tenths(row.improvement_tenths) << "% |";
    out << " Average " << format_tenths(report.avg_improvement_tenths) << "% |\n";
    out << "| Improvement (exact) |";
    for (const auto& row : report.rows) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", row.exact_delta);
      out << " " << buf << "% |";
    }
    {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", report.avg_improvement_exact);
      out << " " << buf << "% |\n";
    }
    for (const auto& note : report.discrepancy_notes)
      out << "\nNOTE: " << note << "\n";
    return out.str();
  }

  append_provenance_csv(out, provenance);
  out << "responder,before,after,improvement,improvement_exact\n";
  for (const auto& row : report.rows) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", row.exact_delta);
    out << row.responder << "," << format_tenths(row.before_tenths) << ","
        << format_tenths(row.after_tenths) << ","
        << format_tenths(row.improvement_tenths) << "," << buf << "\n";
  }
  {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", report.avg_improvement_exact);
    out << "average," << format_tenths(report.avg_before_tenths) << ","
        << format_tenths(report.avg_after_tenths) << ","
        << format_tenths(report.avg_improvement_tenths) << "," << buf << "\n";
  }
  for (const auto& note : report.discrepancy_notes) out << "# NOTE: " << note << "\n";
  return out.str();
}

std::string emit_report(const DebateResults& results, ReportFormat format,
                        const Provenance& provenance) {
  std::ostringstream out;
  if (format == ReportFormat::markdown) {
    out << "# Multi-LLM Debate with Arbiter Survey Results\n\n";
    append_provenance_md(out, provenance);
    out << "| Debate/Lineup | Proposition | Opposition | Arbiter | "
           "LLM hallucination rate |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& row : results.rows) {
      out << "| " << row.index << " | " << row.proposition << " | "
          << row.opposition << " | " << row.arbiter << " | "
          << row.rate.display() << "% |\n";
    }
    out << "| | | | | Average " << results.average.display() << "% |\n";
    return out.str();
  }

  append_provenance_csv(out, provenance);
  out << "debate,proposition,opposition,arbiter,llm_hallucination_rate\n";
  for (const auto& row : results.rows) {
    out << row.index << "," << row.proposition << "," << row.opposition << ","
        << row.arbiter << "," << row.rate.display() << "\n";
  }
  out << "average,,,," << results.average.display() << "\n";
  return out.str();
}

}  // namespace causalaudit
