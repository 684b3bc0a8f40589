#include "causalaudit/chart.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

#include "causalaudit/prompts.hpp"

namespace causalaudit {

void ChartStyle::validate() const {
  std::set<std::string> colors(specific_palette.begin(), specific_palette.end());
  if (colors.size() != specific_palette.size())
    throw std::invalid_argument("palette colors must be pairwise distinct");
  if (colors.count(general_color))
    throw std::invalid_argument("palette colors must differ from the general color");
  if (unit <= 0 || bar_height <= 0 || row_gap < 0 || margin < 0)
    throw std::invalid_argument("chart dimensions must be positive");
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

namespace {

struct Row {
  Rating a;
  Rating b;
  std::string color;
};

std::string verdict_footer(const EdgeAuditProfile& profile, const Verdict& v) {
  switch (v.kind()) {
    case Verdict::Kind::causality:
      return "verdict: C (" +
             (v.dominant() == Side::A ? profile.a_name : profile.b_name) +
             " dominant)";
    case Verdict::Kind::no_causality:
      return "verdict: N";
    case Verdict::Kind::hallucination: {
      std::string text = "verdict: H (";
      for (std::size_t i = 0; i < v.reasons().size(); ++i) {
        if (i) text += ", ";
        text += to_string(v.reasons()[i]);
      }
      return text + ")";
    }
  }
  return "";
}

}  // namespace

std::string render_debate_chart(const EdgeAuditProfile& profile,
                                const ChartStyle& style,
                                const std::optional<Verdict>& verdict) {
  style.validate();

  std::vector<Row> rows;
  rows.push_back({profile.general.a_side, profile.general.b_side,
                  style.general_color});
  for (std::size_t i = 0; i < kPolarityPatterns.size(); ++i) {
    const BarPair& p = profile.pair(kPolarityPatterns[i]);
    rows.push_back({p.a_side, p.b_side, style.specific_palette[i]});
  }

  const int header_h = 24;
  const int footer_line_h = 16;
  const int cx = style.margin + 4 * style.unit;  // center axis x
  const int width = 2 * cx;
  const int bars_top = style.margin + header_h;
  const int bars_bottom =
      bars_top + static_cast<int>(rows.size()) * style.bar_height +
      (static_cast<int>(rows.size()) - 1) * style.row_gap;
  const std::string footer =
      verdict ? verdict_footer(profile, *verdict) : std::string();
  const int height =
      bars_bottom + style.margin + (footer.empty() ? 0 : footer_line_h);

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\" font-family=\"monospace\" font-size=\"13\">\n";
  svg << "  <rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";

  // variable headers, one per side
  svg << "  <text x=\"" << cx / 2 << "\" y=\"" << style.margin + 14
      << "\" text-anchor=\"middle\" font-weight=\"bold\">"
      << xml_escape(profile.a_name) << "</text>\n";
  svg << "  <text x=\"" << cx + cx / 2 << "\" y=\"" << style.margin + 14
      << "\" text-anchor=\"middle\" font-weight=\"bold\">"
      << xml_escape(profile.b_name) << "</text>\n";

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int y =
        bars_top + static_cast<int>(i) * (style.bar_height + style.row_gap);
    const int a_len = rows[i].a.value() * style.unit;
    const int b_len = rows[i].b.value() * style.unit;
    const int text_y = y + style.bar_height - 5;
    svg << "  <rect x=\"" << cx - a_len << "\" y=\"" << y << "\" width=\""
        << a_len << "\" height=\"" << style.bar_height << "\" fill=\""
        << rows[i].color << "\"/>\n";
    svg << "  <rect x=\"" << cx << "\" y=\"" << y << "\" width=\"" << b_len
        << "\" height=\"" << style.bar_height << "\" fill=\"" << rows[i].color
        << "\"/>\n";
    svg << "  <text x=\"" << cx - a_len - 4 << "\" y=\"" << text_y
        << "\" text-anchor=\"end\">" << rows[i].a.value() << "</text>\n";
    svg << "  <text x=\"" << cx + b_len + 4 << "\" y=\"" << text_y
        << "\" text-anchor=\"start\">" << rows[i].b.value() << "</text>\n";
  }

  svg << "  <line x1=\"" << cx << "\" y1=\"" << bars_top - 2 << "\" x2=\"" << cx
      << "\" y2=\"" << bars_bottom + 2
      << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  if (!footer.empty()) {
    svg << "  <text x=\"" << cx << "\" y=\"" << bars_bottom + style.margin + 8
        << "\" text-anchor=\"middle\">" << xml_escape(footer) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string chart_file_name(const std::string& edge_label,
                            const std::string& responder) {
  std::string name = edge_label + "_" + responder + ".svg";
  for (char& c : name) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return name;
}

std::string render_chart_index(const std::vector<ChartIndexEntry>& entries) {
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>Causal Debate Charts</title>\n"
       << "<style>body{font-family:monospace}figure{display:inline-block;"
       << "margin:12px;border:1px solid #ccc;padding:8px}</style>\n"
       << "</head>\n<body>\n<h1>Causal Debate Charts</h1>\n";
  for (const auto& entry : entries) {
    html << "<figure>\n  <img src=\"" << xml_escape(entry.file) << "\" alt=\""
         << xml_escape(entry.title) << "\">\n  <figcaption>"
         << xml_escape(entry.title) << "</figcaption>\n</figure>\n";
  }
  html << "</body>\n</html>\n";
  return html.str();
}

}  // namespace causalaudit
