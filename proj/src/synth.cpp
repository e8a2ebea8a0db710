#include "aerial/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "aerial/error.hpp"

namespace aerial {

namespace {

constexpr double kConfidenceTolerance = 0.03;

std::size_t digits(std::size_t n) {
  std::size_t d = 1;
  while (n >= 10) {
    n /= 10;
    ++d;
  }
  return d;
}

std::string padded(std::size_t value, std::size_t width) {
  auto text = std::to_string(value);
  return std::string(width > text.size() ? width - text.size() : 0, '0') + text;
}

bool compatible(const PlantedRule& a, const PlantedRule& b) {
  for (const auto& x : a.antecedent) {
    for (const auto& y : b.antecedent) {
      if (x.feature == y.feature && x.cls != y.cls) {
        return false;
      }
    }
  }
  return true;
}

std::string describe(const PlantedRule& rule) {
  std::ostringstream out;
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    out << (i ? "&" : "") << rule.antecedent[i].feature << '=' << rule.antecedent[i].cls;
  }
  out << "->" << rule.consequent.feature << '=' << rule.consequent.cls << '@' << rule.confidence;
  return out.str();
}

Item parse_item(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos) {
    fail(ErrorKind::Usage, "planted item '" + text + "' must be feature=class");
  }
  try {
    return {std::stoul(text.substr(0, eq)), std::stoul(text.substr(eq + 1))};
  } catch (const std::exception&) {
    fail(ErrorKind::Usage, "planted item '" + text + "' must use integer indices");
  }
}

GraphDocument water_network(const SyntheticSpec& spec, std::mt19937_64& rng) {
  GraphDocument doc;
  doc.ontology.classes = {"Junction", "Pipe", "Tank"};
  doc.ontology.relations = {"connected_to", "feeds"};
  doc.ontology.relation_signature = {{"connected_to", {"Pipe", "Junction"}},
                                     {"feeds", {"Tank", "Pipe"}}};
  doc.ontology.properties = {"capacity", "diameter", "elevation", "length", "material", "zone"};
  doc.ontology.owned_properties = {{"Pipe", {"diameter", "length", "material"}},
                                   {"Junction", {"elevation", "zone"}},
                                   {"Tank", {"capacity"}}};

  std::uniform_real_distribution<double> jitter(0.0, 1.0);
  const std::size_t width = digits(spec.features);
  std::vector<std::string> ids;
  for (std::size_t f = 0; f < spec.features; ++f) {
    // Properties track the sensor's base class so semantics correlate with readings.
    const auto base = static_cast<double>(f % spec.classes);
    Node node;
    std::string id;
    if (f % 2 == 0) {
      id = "P" + padded(f, width);
      node.labels = {"Pipe"};
      node.props["length"] = std::round(100.0 + 250.0 * base + 40.0 * jitter(rng));
      node.props["diameter"] = std::round(100.0 + 50.0 * base);
      node.props["material"] = base < spec.classes / 2.0 ? std::string("PVC") : std::string("steel");
    } else {
      id = "J" + padded(f, width);
      node.labels = {"Junction"};
      node.props["elevation"] = std::round(10.0 + 5.0 * base + 3.0 * jitter(rng));
      node.props["zone"] = "zone" + std::to_string(f % 3);
    }
    doc.graph.nodes.emplace(id, std::move(node));
    doc.binding.emplace(sensor_name(f, spec.features), id);
    ids.push_back(id);
  }
  Node tank;
  tank.labels = {"Tank"};
  tank.props["capacity"] = 5000.0;
  doc.graph.nodes.emplace("T0", std::move(tank));

  std::size_t edge_no = 0;
  auto connect = [&](const std::string& from, const std::string& to, const std::string& label) {
    Edge edge{from, to, {label}, {}};
    doc.graph.edges.emplace("e" + padded(edge_no++, 3), std::move(edge));
  };
  if (!ids.empty()) {
    connect("T0", ids.front(), "feeds");
  }
  // Alternating chain; connected_to always runs pipe -> junction.
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    if (ids[i].front() == 'P') {
      connect(ids[i], ids[i + 1], "connected_to");
    } else {
      connect(ids[i + 1], ids[i], "connected_to");
    }
  }
  return doc;
}

}  // namespace

std::string sensor_name(std::size_t feature, std::size_t features) {
  return "s" + padded(feature, digits(features > 0 ? features - 1 : 0));
}

std::string class_name(std::size_t cls, std::size_t classes) {
  return "c" + padded(cls, digits(classes > 0 ? classes - 1 : 0));
}

PlantedRule parse_planted_rule(const std::string& text) {
  PlantedRule rule;
  auto arrow = text.find("->");
  if (arrow == std::string::npos) {
    fail(ErrorKind::Usage, "planted rule '" + text + "' needs '->'");
  }
  std::string rhs = text.substr(arrow + 2);
  auto at = rhs.find('@');
  if (at != std::string::npos) {
    try {
      rule.confidence = std::stod(rhs.substr(at + 1));
    } catch (const std::exception&) {
      fail(ErrorKind::Usage, "planted rule '" + text + "' has a bad confidence");
    }
    rhs = rhs.substr(0, at);
  }
  std::stringstream lhs(text.substr(0, arrow));
  std::string part;
  while (std::getline(lhs, part, '&')) {
    rule.antecedent.push_back(parse_item(part));
  }
  rule.consequent = parse_item(rhs);
  std::sort(rule.antecedent.begin(), rule.antecedent.end());
  return rule;
}

void SyntheticSpec::validate() const {
  if (features < 2 || classes < 2 || rows < 1) {
    fail(ErrorKind::Usage, "synthetic data needs >= 2 features, >= 2 classes and >= 1 row");
  }
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) {
    fail(ErrorKind::Usage, "noise rate must be in [0, 1]");
  }
  if (step_seconds <= 0) {
    fail(ErrorKind::Usage, "step must be positive");
  }
  for (const auto& rule : planted) {
    if (rule.antecedent.empty()) {
      fail(ErrorKind::Usage, "planted rule " + describe(rule) + " has no antecedent");
    }
    if (!(rule.confidence > 0.0 && rule.confidence <= 1.0)) {
      fail(ErrorKind::Usage, "planted rule " + describe(rule) + ": confidence must be in (0, 1]");
    }
    std::vector<Item> all = rule.antecedent;
    all.push_back(rule.consequent);
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].feature >= features || all[i].cls >= classes) {
        fail(ErrorKind::Usage, "planted rule " + describe(rule) + " references a missing item");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (all[i].feature == all[j].feature) {
          fail(ErrorKind::Usage, "planted rule " + describe(rule) + " repeats a feature");
        }
      }
    }
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const auto& planted = spec.planted;

  for (std::size_t i = 0; i < planted.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (planted[i].consequent.feature == planted[j].consequent.feature &&
          compatible(planted[i], planted[j]) &&
          (planted[i].consequent.cls != planted[j].consequent.cls ||
           planted[i].confidence < 1.0 || planted[j].confidence < 1.0)) {
        fail(ErrorKind::Data, "conflicting planted rules: " + describe(planted[j]) + " and " +
                                  describe(planted[i]));
      }
    }
  }

  // Rules whose consequent feeds another rule's antecedent go first.
  std::vector<std::size_t> order;
  std::vector<int> state(planted.size(), 0);  // 0 new, 1 visiting, 2 done
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (state[i] == 2) {
      return;
    }
    if (state[i] == 1) {
      fail(ErrorKind::Data, "planted rules form a cycle through " + describe(planted[i]));
    }
    state[i] = 1;
    for (std::size_t j = 0; j < planted.size(); ++j) {
      for (const auto& item : planted[i].antecedent) {
        if (j != i && planted[j].consequent.feature == item.feature) {
          self(self, j);
        }
      }
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < planted.size(); ++i) {
    visit(visit, i);
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any_class(0, spec.classes - 1);

  SyntheticData data;
  auto& rows = data.classes;
  rows.assign(spec.rows, std::vector<std::uint32_t>(spec.features));
  for (auto& row : rows) {
    for (std::size_t f = 0; f < spec.features; ++f) {
      const bool background = unit(rng) < spec.noise_rate;
      row[f] = static_cast<std::uint32_t>(background ? any_class(rng) : f % spec.classes);
    }
  }

  auto matches = [&](const std::vector<std::uint32_t>& row, const std::vector<Item>& items) {
    return std::all_of(items.begin(), items.end(),
                       [&](const Item& item) { return row[item.feature] == item.cls; });
  };
  for (auto i : order) {
    const auto& rule = planted[i];
    std::vector<std::size_t> hits;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (matches(rows[r], rule.antecedent)) {
        hits.push_back(r);
      }
    }
    std::shuffle(hits.begin(), hits.end(), rng);
    const auto keep = static_cast<std::size_t>(
        std::llround(rule.confidence * static_cast<double>(hits.size())));
    std::uniform_int_distribution<std::size_t> other(0, spec.classes - 2);
    for (std::size_t h = 0; h < hits.size(); ++h) {
      auto& value = rows[hits[h]][rule.consequent.feature];
      if (h < keep) {
        value = static_cast<std::uint32_t>(rule.consequent.cls);
      } else {
        auto pick = other(rng);
        value = static_cast<std::uint32_t>(pick >= rule.consequent.cls ? pick + 1 : pick);
      }
    }
  }

  for (const auto& rule : planted) {
    std::size_t x = 0;
    std::size_t xy = 0;
    for (const auto& row : rows) {
      if (matches(row, rule.antecedent)) {
        ++x;
        xy += row[rule.consequent.feature] == rule.consequent.cls;
      }
    }
    if (x == 0) {
      fail(ErrorKind::Data, "planted rule " + describe(rule) + ": antecedent never occurs");
    }
    const double measured = static_cast<double>(xy) / static_cast<double>(x);
    if (std::abs(measured - rule.confidence) > kConfidenceTolerance) {
      fail(ErrorKind::Data, "planted rule " + describe(rule) + " measured confidence " +
                                std::to_string(measured) + " outside ±0.03");
    }
    data.measured_confidence.push_back(measured);
  }

  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ts = static_cast<std::int64_t>(r) * spec.step_seconds;
    for (std::size_t f = 0; f < spec.features; ++f) {
      data.series.add(sensor_name(f, spec.features), ts, class_name(rows[r][f], spec.classes));
    }
  }
  data.graph = water_network(spec, rng);
  return data;
}

}  // namespace aerial
