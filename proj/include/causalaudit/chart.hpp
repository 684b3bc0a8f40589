#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "causalaudit/verdict.hpp"

namespace causalaudit {

/// Visual parameters for the causal debate chart. The general bar is gray;
/// each specific polarity pattern gets its own color, mirrored on both sides.
struct ChartStyle {
  std::string general_color = "#8a8a8a";
  // keyed by PolarityPattern order: hh, hl, lh, ll
  std::array<std::string, 4> specific_palette = {"#4e79a7", "#f28e2b",
                                                 "#59a14f", "#b07aa1"};
  int unit = 30;        // bar length in px per rating point
  int bar_height = 18;  // px
  int row_gap = 6;      // px between bar rows
  int margin = 20;      // px outer margin

  /// Throws std::invalid_argument when the palette repeats a color, reuses
  /// the gray, or a dimension is not positive.
  void validate() const;
};

/// Renders a bidirectional bar chart of the profile's 10 ratings: one column
/// per variable (A left, B right), five rows in canonical prompt order
/// (general, hh, hl, lh, ll), bar length = rating x unit. When a verdict is
/// given it is drawn beneath the chart. Output bytes are deterministic.
std::string render_debate_chart(const EdgeAuditProfile& profile,
                                const ChartStyle& style = {},
                                const std::optional<Verdict>& verdict = std::nullopt);

/// "{edge_label}_{responder}.svg" with characters outside [A-Za-z0-9._-]
/// replaced by '_'.
std::string chart_file_name(const std::string& edge_label,
                            const std::string& responder);

struct ChartIndexEntry {
  std::string file;   // relative path to the SVG
  std::string title;  // display title, e.g. "E1 (V1->V7) - gpt-4"
};

/// Static HTML page listing every chart inline.
std::string render_chart_index(const std::vector<ChartIndexEntry>& entries);

std::string xml_escape(const std::string& text);

}  // namespace causalaudit
