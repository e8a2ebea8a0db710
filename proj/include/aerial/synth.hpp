#pragma once

// Desk-scale synthetic sensor data with planted implications and a small
// water-network property graph bound to the sensors.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "aerial/graph.hpp"
#include "aerial/rule.hpp"
#include "aerial/transact.hpp"

namespace aerial {

struct PlantedRule {
  std::vector<Item> antecedent;
  Item consequent;
  double confidence = 1.0;
};

struct SyntheticSpec {
  std::size_t features = 10;
  std::size_t classes = 4;
  std::size_t rows = 5000;
  std::vector<PlantedRule> planted;
  /// Probability that a background value is drawn uniformly; otherwise the
  /// feature takes its base class (feature index mod classes).
  double noise_rate = 1.0;
  std::uint64_t seed = 0;
  /// Spacing between consecutive transactions in the emitted CSV.
  std::int64_t step_seconds = 60;

  void validate() const;
};

struct SyntheticData {
  /// rows[r][f] = planted class index
  std::vector<std::vector<std::uint32_t>> classes;
  SensorSeries series;
  GraphDocument graph;
  std::vector<double> measured_confidence;  // one per planted rule
};

/// "0=1&2=0->1=2@0.9": feature=class items, consequent after "->", confidence after '@'.
PlantedRule parse_planted_rule(const std::string& text);

std::string sensor_name(std::size_t feature, std::size_t features);
std::string class_name(std::size_t cls, std::size_t classes);

/// Throws Error(Data) naming the offending pair when planted rules conflict, and
/// when a planted confidence is not met within ±0.03 by the generated rows.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace aerial
