#pragma once

// Static IoT description: property graph, its ontology, and the sensor binding.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace aerial {

/// Property values are numeric or categorical constants.
using PropertyValue = std::variant<double, std::string>;

std::string render_value(const PropertyValue& value);

struct Ontology {
  std::set<std::string> classes;
  std::set<std::string> relations;
  std::set<std::string> properties;
  /// relation -> (source class, target class)
  std::map<std::string, std::pair<std::string, std::string>> relation_signature;
  /// class or relation -> properties it owns
  std::map<std::string, std::set<std::string>> owned_properties;

  bool operator==(const Ontology&) const = default;
};

struct Node {
  std::set<std::string> labels;
  std::map<std::string, PropertyValue> props;

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string from;
  std::string to;
  std::set<std::string> labels;
  std::map<std::string, PropertyValue> props;

  bool operator==(const Edge&) const = default;
};

struct PropertyGraph {
  std::map<std::string, Node> nodes;
  std::map<std::string, Edge> edges;

  bool operator==(const PropertyGraph&) const = default;

  /// Label used to qualify property features: the smallest label, or "node".
  static std::string primary_label(const std::set<std::string>& labels);

  /// Numeric values of `property` across all nodes and edges whose primary label is `label`.
  std::vector<double> numeric_population(const std::string& label,
                                         const std::string& property) const;
};

/// sensor id -> node id
using Binding = std::map<std::string, std::string>;

struct GraphDocument {
  Ontology ontology;
  PropertyGraph graph;
  Binding binding;

  bool operator==(const GraphDocument&) const = default;
};

struct SchemaViolation {
  enum class What { Label, Property };
  std::string owner_id;
  What what;
  std::string name;

  bool operator==(const SchemaViolation&) const = default;
};

/// Empty iff every label is in C ∪ R and every property key is in A.
std::vector<SchemaViolation> validate_schema(const PropertyGraph& graph, const Ontology& ontology);

/// Parses the graph JSON format. Throws Error(Parse) on malformed input and
/// Error(Integrity) when edges, bindings or relation signatures name missing ids.
GraphDocument load_graph(std::istream& source);
GraphDocument load_graph_file(const std::string& path);
GraphDocument parse_graph(const std::string& text);

std::string save_graph(const GraphDocument& document);

struct SemanticItem {
  std::string feature;  // <role>.<label>.<property>, or <role>.type for label items
  PropertyValue value;
  std::string label;     // qualifying label of the owning node/edge
  std::string property;  // empty for type items

  bool operator==(const SemanticItem&) const = default;
};

struct EnrichmentOptions {
  std::size_t depth = 1;
  /// Also emit properties of traversed edges (role e<hop>[edge id]).
  bool include_edge_properties = false;
};

/// Items describing the node bound to `sensor_id`: its labels and properties, plus
/// properties of nodes within `options.depth` undirected hops. Sorted by feature name.
std::vector<SemanticItem> semantic_items_for_sensor(const PropertyGraph& graph,
                                                    const Binding& binding,
                                                    const std::string& sensor_id,
                                                    const EnrichmentOptions& options = {});

}  // namespace aerial
