#include "aerial/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <queue>
#include <sstream>

#include "aerial/error.hpp"
#include "json.hpp"

namespace aerial {

using nlohmann::json;

std::string render_value(const PropertyValue& value) {
  if (const auto* text = std::get_if<std::string>(&value)) {
    return *text;
  }
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), std::get<double>(value));
  return std::string(buffer, end);
}

std::string PropertyGraph::primary_label(const std::set<std::string>& labels) {
  return labels.empty() ? std::string("node") : *labels.begin();
}

std::vector<double> PropertyGraph::numeric_population(const std::string& label,
                                                      const std::string& property) const {
  std::vector<double> values;
  auto collect = [&](const std::set<std::string>& labels,
                     const std::map<std::string, PropertyValue>& props) {
    if (primary_label(labels) != label) {
      return;
    }
    auto it = props.find(property);
    if (it != props.end()) {
      if (const auto* number = std::get_if<double>(&it->second)) {
        values.push_back(*number);
      }
    }
  };
  for (const auto& [id, node] : nodes) {
    collect(node.labels, node.props);
  }
  for (const auto& [id, edge] : edges) {
    collect(edge.labels, edge.props);
  }
  return values;
}

std::vector<SchemaViolation> validate_schema(const PropertyGraph& graph, const Ontology& ontology) {
  std::vector<SchemaViolation> violations;
  auto check = [&](const std::string& id, const std::set<std::string>& labels,
                   const std::map<std::string, PropertyValue>& props) {
    for (const auto& label : labels) {
      if (!ontology.classes.contains(label) && !ontology.relations.contains(label)) {
        violations.push_back({id, SchemaViolation::What::Label, label});
      }
    }
    for (const auto& [key, value] : props) {
      if (!ontology.properties.contains(key)) {
        violations.push_back({id, SchemaViolation::What::Property, key});
      }
    }
  };
  for (const auto& [id, node] : graph.nodes) {
    check(id, node.labels, node.props);
  }
  for (const auto& [id, edge] : graph.edges) {
    check(id, edge.labels, edge.props);
  }
  return violations;
}

namespace {

template <typename T>
T required(const json& object, const char* key, const std::string& context) {
  if (!object.is_object() || !object.contains(key)) {
    fail(ErrorKind::Parse, context + ": missing key '" + key + "'");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, context + ": bad value for '" + key + "': " + e.what());
  }
}

std::set<std::string> string_set(const json& array, const std::string& context) {
  if (!array.is_array()) {
    fail(ErrorKind::Parse, context + ": expected array of strings");
  }
  std::set<std::string> out;
  for (const auto& entry : array) {
    if (!entry.is_string()) {
      fail(ErrorKind::Parse, context + ": expected array of strings");
    }
    out.insert(entry.get<std::string>());
  }
  return out;
}

std::map<std::string, PropertyValue> parse_props(const json& object, const std::string& context) {
  std::map<std::string, PropertyValue> props;
  if (object.is_null()) {
    return props;
  }
  if (!object.is_object()) {
    fail(ErrorKind::Parse, context + ": 'props' must be an object");
  }
  for (const auto& [key, value] : object.items()) {
    if (value.is_number()) {
      props.emplace(key, value.get<double>());
    } else if (value.is_string()) {
      props.emplace(key, value.get<std::string>());
    } else {
      fail(ErrorKind::Parse, context + ": property '" + key + "' must be a number or string");
    }
  }
  return props;
}

json props_to_json(const std::map<std::string, PropertyValue>& props) {
  json out = json::object();
  for (const auto& [key, value] : props) {
    std::visit([&](const auto& v) { out[key] = v; }, value);
  }
  return out;
}

std::string id_field(const json& object, const char* key, const std::string& context) {
  if (!object.contains(key)) {
    fail(ErrorKind::Parse, context + ": missing key '" + key + "'");
  }
  const auto& value = object.at(key);
  if (value.is_string()) {
    return value.get<std::string>();
  }
  if (value.is_number_integer()) {
    return std::to_string(value.get<long long>());
  }
  fail(ErrorKind::Parse, context + ": '" + key + "' must be a string or integer id");
}

GraphDocument from_json(const json& root) {
  if (!root.is_object()) {
    fail(ErrorKind::Parse, "graph document: top level must be an object");
  }
  GraphDocument doc;

  const json& onto = root.contains("ontology") ? root.at("ontology") : json::object();
  if (!onto.is_object()) {
    fail(ErrorKind::Parse, "ontology: must be an object");
  }
  if (onto.contains("classes")) {
    doc.ontology.classes = string_set(onto.at("classes"), "ontology.classes");
  }
  if (onto.contains("properties")) {
    doc.ontology.properties = string_set(onto.at("properties"), "ontology.properties");
  }
  if (onto.contains("relations")) {
    if (!onto.at("relations").is_array()) {
      fail(ErrorKind::Parse, "ontology.relations: expected array");
    }
    for (const auto& relation : onto.at("relations")) {
      auto name = required<std::string>(relation, "name", "ontology.relations[]");
      auto from = required<std::string>(relation, "from", "relation " + name);
      auto to = required<std::string>(relation, "to", "relation " + name);
      doc.ontology.relations.insert(name);
      doc.ontology.relation_signature[name] = {from, to};
    }
  }
  if (onto.contains("owned")) {
    if (!onto.at("owned").is_object()) {
      fail(ErrorKind::Parse, "ontology.owned: expected object");
    }
    for (const auto& [owner, names] : onto.at("owned").items()) {
      doc.ontology.owned_properties[owner] = string_set(names, "ontology.owned." + owner);
    }
  }

  if (root.contains("nodes")) {
    if (!root.at("nodes").is_array()) {
      fail(ErrorKind::Parse, "nodes: expected array");
    }
    for (const auto& entry : root.at("nodes")) {
      if (!entry.is_object()) {
        fail(ErrorKind::Parse, "nodes[]: expected object");
      }
      auto id = id_field(entry, "id", "nodes[]");
      Node node;
      if (entry.contains("labels")) {
        node.labels = string_set(entry.at("labels"), "node " + id + " labels");
      }
      if (entry.contains("props")) {
        node.props = parse_props(entry.at("props"), "node " + id);
      }
      if (!doc.graph.nodes.emplace(id, std::move(node)).second) {
        fail(ErrorKind::Integrity, "duplicate node id '" + id + "'");
      }
    }
  }

  if (root.contains("edges")) {
    if (!root.at("edges").is_array()) {
      fail(ErrorKind::Parse, "edges: expected array");
    }
    for (const auto& entry : root.at("edges")) {
      if (!entry.is_object()) {
        fail(ErrorKind::Parse, "edges[]: expected object");
      }
      auto id = id_field(entry, "id", "edges[]");
      Edge edge;
      edge.from = id_field(entry, "from", "edge " + id);
      edge.to = id_field(entry, "to", "edge " + id);
      if (entry.contains("labels")) {
        edge.labels = string_set(entry.at("labels"), "edge " + id + " labels");
      }
      if (entry.contains("props")) {
        edge.props = parse_props(entry.at("props"), "edge " + id);
      }
      for (const auto* endpoint : {&edge.from, &edge.to}) {
        if (!doc.graph.nodes.contains(*endpoint)) {
          fail(ErrorKind::Integrity,
               "edge '" + id + "' references missing node '" + *endpoint + "'");
        }
      }
      if (doc.graph.nodes.contains(id) ||
          !doc.graph.edges.emplace(id, std::move(edge)).second) {
        fail(ErrorKind::Integrity, "duplicate edge id '" + id + "'");
      }
    }
  }

  if (root.contains("bindings")) {
    if (!root.at("bindings").is_object()) {
      fail(ErrorKind::Parse, "bindings: expected object");
    }
    for (const auto& [sensor, node] : root.at("bindings").items()) {
      if (!node.is_string()) {
        fail(ErrorKind::Parse, "bindings." + sensor + ": expected node id string");
      }
      auto node_id = node.get<std::string>();
      if (!doc.graph.nodes.contains(node_id)) {
        fail(ErrorKind::Integrity,
             "binding for sensor '" + sensor + "' references missing node '" + node_id + "'");
      }
      doc.binding.emplace(sensor, node_id);
    }
  }

  for (const auto& [relation, ends] : doc.ontology.relation_signature) {
    for (const auto* cls : {&ends.first, &ends.second}) {
      if (!doc.ontology.classes.contains(*cls)) {
        fail(ErrorKind::Integrity,
             "relation '" + relation + "' references unknown class '" + *cls + "'");
      }
    }
  }
  for (const auto& [owner, names] : doc.ontology.owned_properties) {
    for (const auto& name : names) {
      if (!doc.ontology.properties.contains(name)) {
        fail(ErrorKind::Integrity,
             "'" + owner + "' owns undeclared property '" + name + "'");
      }
    }
  }
  return doc;
}

}  // namespace

GraphDocument parse_graph(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("graph JSON: ") + e.what());
  }
  return from_json(root);
}

GraphDocument load_graph(std::istream& source) {
  std::stringstream buffer;
  buffer << source.rdbuf();
  return parse_graph(buffer.str());
}

GraphDocument load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Usage, "cannot open graph file '" + path + "'");
  }
  return load_graph(in);
}

std::string save_graph(const GraphDocument& doc) {
  json onto;
  onto["classes"] = doc.ontology.classes;
  onto["properties"] = doc.ontology.properties;
  onto["relations"] = json::array();
  for (const auto& [name, ends] : doc.ontology.relation_signature) {
    onto["relations"].push_back({{"name", name}, {"from", ends.first}, {"to", ends.second}});
  }
  onto["owned"] = json::object();
  for (const auto& [owner, names] : doc.ontology.owned_properties) {
    onto["owned"][owner] = names;
  }

  json nodes = json::array();
  for (const auto& [id, node] : doc.graph.nodes) {
    nodes.push_back({{"id", id}, {"labels", node.labels}, {"props", props_to_json(node.props)}});
  }
  json edges = json::array();
  for (const auto& [id, edge] : doc.graph.edges) {
    edges.push_back({{"id", id},
                     {"from", edge.from},
                     {"to", edge.to},
                     {"labels", edge.labels},
                     {"props", props_to_json(edge.props)}});
  }
  json root;
  root["ontology"] = std::move(onto);
  root["nodes"] = std::move(nodes);
  root["edges"] = std::move(edges);
  root["bindings"] = doc.binding;
  return root.dump(2) + "\n";
}

std::vector<SemanticItem> semantic_items_for_sensor(const PropertyGraph& graph,
                                                    const Binding& binding,
                                                    const std::string& sensor_id,
                                                    const EnrichmentOptions& options) {
  auto bound = binding.find(sensor_id);
  if (bound == binding.end()) {
    fail(ErrorKind::Integrity, "sensor '" + sensor_id + "' is not bound to a graph node");
  }
  auto self_it = graph.nodes.find(bound->second);
  if (self_it == graph.nodes.end()) {
    fail(ErrorKind::Integrity,
         "sensor '" + sensor_id + "' is bound to missing node '" + bound->second + "'");
  }

  std::vector<SemanticItem> items;
  auto add_props = [&](const std::string& role, const std::set<std::string>& labels,
                       const std::map<std::string, PropertyValue>& props) {
    const auto label = PropertyGraph::primary_label(labels);
    for (const auto& [key, value] : props) {
      items.push_back({role + "." + label + "." + key, value, label, key});
    }
  };

  const Node& self = self_it->second;
  std::size_t ordinal = 0;
  for (const auto& label : self.labels) {
    auto name = ordinal == 0 ? std::string("self.type") : "self.type." + std::to_string(ordinal);
    items.push_back({name, label, label, ""});
    ++ordinal;
  }
  add_props("self", self.labels, self.props);

  if (options.depth > 0) {
    // Undirected adjacency: node -> (neighbor, edge id)
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> adjacency;
    for (const auto& [edge_id, edge] : graph.edges) {
      adjacency[edge.from].emplace_back(edge.to, edge_id);
      adjacency[edge.to].emplace_back(edge.from, edge_id);
    }
    std::map<std::string, std::size_t> hops{{bound->second, 0}};
    std::set<std::string> seen_edges;
    std::queue<std::string> frontier;
    frontier.push(bound->second);
    while (!frontier.empty()) {
      auto current = frontier.front();
      frontier.pop();
      const auto hop = hops.at(current) + 1;
      if (hop > options.depth) {
        continue;
      }
      for (const auto& [next, edge_id] : adjacency[current]) {
        if (options.include_edge_properties && seen_edges.insert(edge_id).second) {
          const Edge& edge = graph.edges.at(edge_id);
          add_props("e" + std::to_string(hop) + "[" + edge_id + "]", edge.labels, edge.props);
        }
        if (hops.emplace(next, hop).second) {
          const Node& node = graph.nodes.at(next);
          add_props("n" + std::to_string(hop) + "[" + next + "]", node.labels, node.props);
          frontier.push(next);
        }
      }
    }
  }

  std::sort(items.begin(), items.end(),
            [](const SemanticItem& a, const SemanticItem& b) { return a.feature < b.feature; });
  return items;
}

}  // namespace aerial
