#pragma once

// Rule-quality metrics over a transaction table. Every metric is an exact
// integer count followed by a final division.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aerial/rule.hpp"

namespace aerial {

struct TransactionTable;

struct RuleCounts {
  std::size_t rows = 0;        // |D|
  std::size_t antecedent = 0;  // rows containing X
  std::size_t consequent = 0;  // rows containing Y
  std::size_t both = 0;        // rows containing X ∪ Y

  bool operator==(const RuleCounts&) const = default;
};

struct RuleMetrics {
  double support = 0.0;
  double confidence = 0.0;
  double rule_coverage = 0.0;
  double zhang = 0.0;

  bool operator==(const RuleMetrics&) const = default;
};

bool row_contains(const TransactionTable& table, std::size_t row, std::span<const Item> items);

RuleCounts count_rule(const Rule& rule, const TransactionTable& table);
RuleMetrics metrics_from_counts(const RuleCounts& counts);

double support(const Rule& rule, const TransactionTable& table);
/// |X ∪ Y| / |X|, 0 when X never occurs.
double confidence(const Rule& rule, const TransactionTable& table);
/// support(X)
double rule_coverage(const Rule& rule, const TransactionTable& table);
/// (conf(X->Y) - conf(X'->Y)) / max(conf(X->Y), conf(X'->Y)); 0 when X covers
/// every row or both confidences are 0.
double zhang(const Rule& rule, const TransactionTable& table);
/// Fraction of rows matched by at least one rule antecedent.
double data_coverage(std::span<const Rule> rules, const TransactionTable& table);

struct ScoredRule {
  Rule rule;
  RuleMetrics metrics;

  auto operator<=>(const ScoredRule& other) const { return rule <=> other.rule; }
  bool operator==(const ScoredRule& other) const = default;
};

struct QualityAggregate {
  std::size_t rule_count = 0;
  double mean_support = 0.0;
  double mean_confidence = 0.0;
  double mean_coverage = 0.0;
  double mean_zhang = 0.0;
  double data_coverage = 0.0;
};

struct RuleQualityReport {
  std::vector<ScoredRule> per_rule;
  QualityAggregate aggregate;
};

RuleQualityReport evaluate_rules(std::span<const Rule> rules, const TransactionTable& table);

/// Aligned columns: # Rules, Support, Confidence, Coverage, Data Cov., Zhang.
std::string format_quality_table(std::span<const std::pair<std::string, QualityAggregate>> rows);

}  // namespace aerial
