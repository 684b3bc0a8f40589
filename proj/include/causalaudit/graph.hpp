#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace causalaudit {

/// A node of a causal graph. `name` may use underscores ("life_expectancy");
/// `display_name()` normalizes them to spaces for prompt rendering.
struct Variable {
  std::string id;    // short identifier, unique within a graph ("V1")
  std::string name;  // human-readable label ("life_expectancy")

  std::string display_name() const;
};

struct Edge {
  std::string from;
  std::string to;
  bool directed = true;

  bool operator==(const Edge&) const = default;
};

struct CausalGraph {
  std::string label;
  std::vector<Variable> variables;
  std::vector<Edge> edges;

  const Variable* find_variable(const std::string& id) const;
  const Variable& variable(const std::string& id) const;  // throws if absent
};

/// Report label for edge index k is "E{k+1}" (stable across a run).
std::string edge_label(std::size_t edge_index);

/// Row heading used by survey tables, e.g. "E1 (V1->V7)".
std::string edge_report_label(const CausalGraph& g, std::size_t edge_index);

enum class GraphFormat { json, dot };

class GraphParseError : public std::runtime_error {
 public:
  GraphParseError(std::string message, std::size_t line, std::size_t column)
      : std::runtime_error(std::move(message)), line_(line), column_(column) {}
  explicit GraphParseError(std::string message)
      : std::runtime_error(std::move(message)), line_(0), column_(0) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Parses a graph document. Edge order is preserved from the document.
/// Throws GraphParseError on malformed input, unknown variable references,
/// duplicate variable ids, empty names, or self-loops.
CausalGraph parse_graph(const std::string& document, GraphFormat format);

std::string serialize_graph(const CausalGraph& g, GraphFormat format);

enum class ViolationKind {
  duplicate_edge,
  self_loop,
  dangling_reference,
  isolated_variable,
};

enum class ViolationSeverity { error, warning };

struct Violation {
  ViolationKind kind;
  ViolationSeverity severity;
  std::string message;
};

/// Structural audit of an already-constructed graph. Violations are data,
/// not failures; an empty result means the graph is clean.
std::vector<Violation> validate_graph(const CausalGraph& g);

std::string to_string(ViolationKind kind);

}  // namespace causalaudit
