#include <sstream>

#include "aerial/error.hpp"
#include "aerial/graph.hpp"
#include "doctest.h"

using namespace aerial;

namespace {

const char* kWaterNetwork = R"({
  "ontology": {
    "classes": ["Pipe", "Junction"],
    "relations": [{"name": "connected_to", "from": "Pipe", "to": "Junction"}],
    "properties": ["length", "elevation", "material"],
    "owned": {"Pipe": ["length", "material"], "Junction": ["elevation"]}
  },
  "nodes": [
    {"id": "P1", "labels": ["Pipe"], "props": {"length": 850, "material": "PVC"}},
    {"id": "J2", "labels": ["Junction"], "props": {"elevation": 12.5}},
    {"id": "J3", "labels": ["Junction"], "props": {"elevation": 30}}
  ],
  "edges": [
    {"id": "e1", "from": "P1", "to": "J2", "labels": ["connected_to"], "props": {}}
  ],
  "bindings": {"s1": "P1", "s2": "J2"}
})";

GraphDocument water_network() { return parse_graph(kWaterNetwork); }

ErrorKind kind_of(const std::string& text) {
  try {
    parse_graph(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Internal;
}

std::vector<std::string> names(const std::vector<SemanticItem>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) out.push_back(item.feature);
  return out;
}

}  // namespace

TEST_CASE("schema conformance") {
  auto doc = water_network();
  CHECK(validate_schema(doc.graph, doc.ontology).empty());
  CHECK(validate_schema(PropertyGraph{}, doc.ontology).empty());

  PropertyGraph odd;
  odd.nodes["V1"] = Node{{"Valve"}, {}};
  Ontology onto;
  onto.classes = {"Pipe", "Junction"};
  auto violations = validate_schema(odd, onto);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].owner_id == "V1");
  CHECK(violations[0].what == SchemaViolation::What::Label);
  CHECK(violations[0].name == "Valve");

  odd.nodes["V1"] = Node{{"Pipe"}, {{"pressure", 3.0}}};
  violations = validate_schema(odd, onto);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].what == SchemaViolation::What::Property);
  CHECK(violations[0].name == "pressure");
}

TEST_CASE("graph loading") {
  SUBCASE("minimal document") {
    auto doc = parse_graph(R"({"ontology": {"classes": ["Pipe"]},
      "nodes": [{"id": 7, "labels": ["Pipe"], "props": {}}], "bindings": {"s": "7"}})");
    CHECK(doc.graph.nodes.size() == 1);
    CHECK(doc.binding.size() == 1);
    CHECK(doc.binding.at("s") == "7");
  }
  SUBCASE("missing edge endpoint") {
    CHECK(kind_of(R"({"nodes": [{"id": "A", "labels": ["Pipe"]}],
      "edges": [{"id": "e", "from": "A", "to": "B", "labels": ["connected_to"]}]})") ==
          ErrorKind::Integrity);
  }
  SUBCASE("binding to a missing node") {
    CHECK(kind_of(R"({"nodes": [], "bindings": {"s": "X"}})") == ErrorKind::Integrity);
  }
  SUBCASE("duplicate node id") {
    CHECK(kind_of(R"({"nodes": [{"id": "A"}, {"id": "A"}]})") == ErrorKind::Integrity);
  }
  SUBCASE("malformed json") {
    CHECK(kind_of("{\"nodes\": [") == ErrorKind::Parse);
    CHECK(kind_of("[]") == ErrorKind::Parse);
  }
  SUBCASE("stream and string agree") {
    std::istringstream in(kWaterNetwork);
    CHECK(load_graph(in) == water_network());
  }
}

TEST_CASE("save then load is the identity") {
  auto doc = water_network();
  auto again = parse_graph(save_graph(doc));
  CHECK(again == doc);
  CHECK(save_graph(again) == save_graph(doc));
}

TEST_CASE("semantic items of a bound node") {
  GraphDocument doc;
  doc.graph.nodes["P1"] = Node{{"Pipe"}, {{"length", 850.0}}};
  doc.binding["s1"] = "P1";
  auto items = semantic_items_for_sensor(doc.graph, doc.binding, "s1", {0, false});
  // Lexicographic order puts the property before the type item.
  REQUIRE(items.size() == 2);
  CHECK(items[0].feature == "self.Pipe.length");
  CHECK(std::get<double>(items[0].value) == 850.0);
  CHECK(items[0].label == "Pipe");
  CHECK(items[0].property == "length");
  CHECK(items[1].feature == "self.type");
  CHECK(std::get<std::string>(items[1].value) == "Pipe");

  doc.graph.nodes["J9"] = Node{{"Junction"}, {}};
  doc.binding["s9"] = "J9";
  CHECK(semantic_items_for_sensor(doc.graph, doc.binding, "s9", {0, false}).size() == 1);

  try {
    semantic_items_for_sensor(doc.graph, doc.binding, "nobody", {});
    FAIL("unbound sensor accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Integrity);
  }
}

TEST_CASE("neighbour enrichment on the water network") {
  auto doc = water_network();
  auto depth0 = names(semantic_items_for_sensor(doc.graph, doc.binding, "s1", {0, false}));
  auto depth1 = names(semantic_items_for_sensor(doc.graph, doc.binding, "s1", {1, false}));
  auto depth2 = names(semantic_items_for_sensor(doc.graph, doc.binding, "s1", {2, false}));

  // Hand enumeration: P1 itself, then J2 one hop away; J3 is isolated.
  CHECK(depth0 == std::vector<std::string>{"self.Pipe.length", "self.Pipe.material", "self.type"});
  CHECK(depth1 == std::vector<std::string>{"n1[J2].Junction.elevation", "self.Pipe.length",
                                           "self.Pipe.material", "self.type"});
  CHECK(depth2 == depth1);
  CHECK(std::is_sorted(depth1.begin(), depth1.end()));
  CHECK(std::includes(depth1.begin(), depth1.end(), depth0.begin(), depth0.end()));

  auto with_edges = names(semantic_items_for_sensor(doc.graph, doc.binding, "s1", {1, true}));
  CHECK(std::includes(with_edges.begin(), with_edges.end(), depth1.begin(), depth1.end()));

  // Deterministic across calls.
  CHECK(semantic_items_for_sensor(doc.graph, doc.binding, "s2", {1, false}) ==
        semantic_items_for_sensor(doc.graph, doc.binding, "s2", {1, false}));
}

TEST_CASE("multi-label nodes") {
  GraphDocument doc;
  doc.graph.nodes["X"] = Node{{"Pipe", "Asset"}, {{"age", 4.0}}};
  doc.binding["s"] = "X";
  auto items = names(semantic_items_for_sensor(doc.graph, doc.binding, "s", {0, false}));
  CHECK(items == std::vector<std::string>{"self.Asset.age", "self.type", "self.type.1"});
}
