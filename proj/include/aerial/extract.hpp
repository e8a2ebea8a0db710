#pragma once

// Rule extraction by probing a trained autoencoder with marked test vectors.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "aerial/forward_model.hpp"
#include "aerial/layout.hpp"
#include "aerial/rule.hpp"

namespace aerial {

struct ExtractionConfig {
  double similarity_threshold = 0.8;
  std::size_t max_antecedents = 2;
  /// When set, only these features are marked (used as antecedents).
  std::optional<std::set<std::size_t>> markable_features;

  void validate() const;
};

/// Each feature's slots set to 1/k for its k classes.
std::vector<double> equal_prob_vector(const Layout& layout);

struct TestVector {
  std::vector<double> values;
  std::vector<Item> marked;
};

/// One vector per element of the Cartesian product of the subset's classes
/// (first feature most significant); unmarked features keep equal probabilities.
std::vector<TestVector> generate_test_vectors(const Layout& layout,
                                              std::span<const std::size_t> feature_subset);

/// Feature subsets of size 1..max_size over `features`, by size then lexicographically.
std::vector<std::vector<std::size_t>> feature_combinations(std::span<const std::size_t> features,
                                                           std::size_t max_size);

/// Σ over nonempty subsets of size <= max_antecedents of Π class counts.
std::uint64_t count_test_vectors(const Layout& layout, std::size_t max_antecedents,
                                 const std::optional<std::set<std::size_t>>& markable = {});

struct ExtractionResult {
  std::vector<Rule> rules;
  std::uint64_t forward_passes = 0;
};

/// For each test vector: skip it unless every marked slot reconstructs with
/// probability >= τ; otherwise emit marked -> argmax(f) for every unmarked feature f
/// whose best class probability is > τ. Throws Error(Data) if the model's layout
/// differs from `layout`.
ExtractionResult extract_rules(const ForwardModel& model, const Layout& layout,
                               const ExtractionConfig& config);

}  // namespace aerial
