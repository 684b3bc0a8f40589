#include "causalaudit/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace causalaudit {

using nlohmann::json;

std::string Variable::display_name() const {
  std::string out = name;
  std::replace(out.begin(), out.end(), '_', ' ');
  return out;
}

const Variable* CausalGraph::find_variable(const std::string& id) const {
  for (const auto& v : variables) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

const Variable& CausalGraph::variable(const std::string& id) const {
  const Variable* v = find_variable(id);
  if (!v) throw std::out_of_range("no variable with id '" + id + "'");
  return *v;
}

std::string edge_label(std::size_t edge_index) {
  return "E" + std::to_string(edge_index + 1);
}

std::string edge_report_label(const CausalGraph& g, std::size_t edge_index) {
  const Edge& e = g.edges.at(edge_index);
  const char* arrow = e.directed ? "->" : "--";
  return edge_label(edge_index) + " (" + e.from + arrow + e.to + ")";
}

namespace {

void check_invariants(const CausalGraph& g) {
  std::unordered_set<std::string> ids;
  for (const auto& v : g.variables) {
    if (v.name.empty())
      throw GraphParseError("variable '" + v.id + "' has an empty name");
    if (!ids.insert(v.id).second)
      throw GraphParseError("duplicate variable id '" + v.id + "'");
  }
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    if (e.from == e.to)
      throw GraphParseError("edge " + edge_label(k) + " is a self-loop on '" +
                            e.from + "'");
    for (const std::string& endpoint : {e.from, e.to}) {
      if (!ids.count(endpoint))
        throw GraphParseError("edge " + edge_label(k) +
                              " references unknown variable '" + endpoint +
                              "'");
    }
  }
}

CausalGraph parse_graph_json(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw GraphParseError(std::string("JSON syntax error: ") + e.what(),
                          0, e.byte);
  }
  if (!doc.is_object()) throw GraphParseError("graph document must be a JSON object");

  CausalGraph g;
  g.label = doc.value("label", "");
  if (!doc.contains("variables") || !doc["variables"].is_array())
    throw GraphParseError("missing 'variables' array");
  for (const auto& v : doc["variables"]) {
    if (!v.is_object() || !v.contains("id"))
      throw GraphParseError("variable entries need an 'id'");
    Variable var;
    var.id = v["id"].get<std::string>();
    var.name = v.value("name", var.id);
    g.variables.push_back(std::move(var));
  }
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw GraphParseError("'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_object() || !e.contains("from") || !e.contains("to"))
        throw GraphParseError("edge entries need 'from' and 'to'");
      Edge edge;
      edge.from = e["from"].get<std::string>();
      edge.to = e["to"].get<std::string>();
      edge.directed = e.value("directed", true);
      g.edges.push_back(std::move(edge));
    }
  }
  check_invariants(g);
  return g;
}

// Minimal DOT reader covering the shapes serialize_graph emits plus common
// hand-written files: an optional (di)graph header, node statements with an
// optional [label="..."] attribute, and "->" / "--" edge statements.
class DotParser {
 public:
  explicit DotParser(const std::string& text) : text_(text) {}

  CausalGraph parse() {
    CausalGraph g;
    skip_ws();
    if (accept_keyword("strict")) skip_ws();
    if (!accept_keyword("digraph") && !accept_keyword("graph"))
      fail("expected 'digraph' or 'graph'");
    skip_ws();
    if (peek() != '{') g.label = read_id();
    skip_ws();
    expect('{');
    while (true) {
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        break;
      }
      if (pos_ >= text_.size()) fail("unexpected end of input, missing '}'");
      parse_statement(g);
    }
    check_invariants(g);
    return g;
  }

 private:
  void parse_statement(CausalGraph& g) {
    std::string first = read_id();
    skip_ws();
    if (starts_with("->") || starts_with("--")) {
      bool directed = text_[pos_] == '-' && text_[pos_ + 1] == '>';
      pos_ += 2;
      skip_ws();
      std::string second = read_id();
      skip_ws();
      if (peek() == '[') skip_attr_list();
      skip_ws();
      if (peek() == ';') ++pos_;
      g.edges.push_back(Edge{first, second, directed});
      return;
    }
    Variable v;
    v.id = first;
    v.name = first;
    if (peek() == '[') {
      auto attrs = read_attr_list();
      auto it = attrs.find("label");
      if (it != attrs.end()) v.name = it->second;
    }
    skip_ws();
    if (peek() == ';') ++pos_;
    g.variables.push_back(std::move(v));
  }

  std::unordered_map<std::string, std::string> read_attr_list() {
    std::unordered_map<std::string, std::string> attrs;
    expect('[');
    while (true) {
      skip_ws();
      if (peek() == ']') {
        ++pos_;
        return attrs;
      }
      std::string key = read_id();
      skip_ws();
      expect('=');
      skip_ws();
      attrs[key] = read_id();
      skip_ws();
      if (peek() == ',' || peek() == ';') ++pos_;
    }
  }

  void skip_attr_list() { read_attr_list(); }

  std::string read_id() {
    skip_ws();
    if (peek() == '"') return read_quoted();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_' || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ == start) fail("expected an identifier");
    return text_.substr(start, pos_ - start);
  }

  std::string read_quoted() {
    expect('"');
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    expect('"');
    return out;
  }

  bool accept_keyword(const std::string& kw) {
    if (text_.compare(pos_, kw.size(), kw) != 0) return false;
    std::size_t end = pos_ + kw.size();
    if (end < text_.size() &&
        (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
      return false;
    pos_ = end;
    return true;
  }

  bool starts_with(const char* s) const {
    return text_.compare(pos_, 2, s) == 0;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream oss;
    oss << "DOT syntax error at " << line << ":" << col << ": " << message;
    throw GraphParseError(oss.str(), line, col);
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CausalGraph parse_graph(const std::string& document, GraphFormat format) {
  switch (format) {
    case GraphFormat::json:
      return parse_graph_json(document);
    case GraphFormat::dot:
      return DotParser(document).parse();
  }
  throw GraphParseError("unknown graph format");
}

std::string serialize_graph(const CausalGraph& g, GraphFormat format) {
  if (format == GraphFormat::json) {
    json doc;
    doc["label"] = g.label;
    doc["variables"] = json::array();
    for (const auto& v : g.variables)
      doc["variables"].push_back({{"id", v.id}, {"name", v.name}});
    doc["edges"] = json::array();
    for (const auto& e : g.edges)
      doc["edges"].push_back(
          {{"from", e.from}, {"to", e.to}, {"directed", e.directed}});
    return doc.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "digraph " << dot_quote(g.label) << " {\n";
  for (const auto& v : g.variables)
    out << "  " << dot_quote(v.id) << " [label=" << dot_quote(v.name) << "];\n";
  for (const auto& e : g.edges)
    out << "  " << dot_quote(e.from) << (e.directed ? " -> " : " -- ")
        << dot_quote(e.to) << ";\n";
  out << "}\n";
  return out.str();
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::duplicate_edge: return "duplicate_edge";
    case ViolationKind::self_loop: return "self_loop";
    case ViolationKind::dangling_reference: return "dangling_reference";
    case ViolationKind::isolated_variable: return "isolated_variable";
  }
  return "unknown";
}

std::vector<Violation> validate_graph(const CausalGraph& g) {
  std::vector<Violation> out;
  std::unordered_set<std::string> ids;
  for (const auto& v : g.variables) ids.insert(v.id);

  std::set<std::tuple<std::string, std::string, bool>> seen;
  std::unordered_set<std::string> connected;
  for (std::size_t k = 0; k < g.edges.size(); ++k) {
    const Edge& e = g.edges[k];
    if (e.from == e.to) {
      out.push_back({ViolationKind::self_loop, ViolationSeverity::error,
                     "edge " + edge_label(k) + " is a self-loop on '" + e.from + "'"});
    }
    for (const std::string& endpoint : {e.from, e.to}) {
      if (!ids.count(endpoint)) {
        out.push_back({ViolationKind::dangling_reference, ViolationSeverity::error,
                       "edge " + edge_label(k) + " references unknown variable '" +
                           endpoint + "'"});
      }
    }
    // Undirected duplicates match in either endpoint order.
    auto key = std::make_tuple(e.from, e.to, e.directed);
    if (!e.directed && e.to < e.from) key = std::make_tuple(e.to, e.from, e.directed);
    if (!seen.insert(key).second) {
      out.push_back({ViolationKind::duplicate_edge, ViolationSeverity::warning,
                     "edge " + edge_label(k) + " duplicates an earlier " + e.from +
                         (e.directed ? "->" : "--") + e.to + " edge"});
    }
    connected.insert(e.from);
    connected.insert(e.to);
  }
  for (const auto& v : g.variables) {
    if (!connected.count(v.id)) {
      out.push_back({ViolationKind::isolated_variable, ViolationSeverity::warning,
                     "variable '" + v.id + "' appears in no edge"});
    }
  }
  return out;
}

}  // namespace causalaudit
