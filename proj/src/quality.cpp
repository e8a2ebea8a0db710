#include "aerial/quality.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "aerial/transact.hpp"

namespace aerial {

bool row_contains(const TransactionTable& table, std::size_t row, std::span<const Item> items) {
  const auto& values = table.rows[row];
  return std::all_of(items.begin(), items.end(),
                     [&](const Item& item) { return values[item.feature] == item.cls; });
}

RuleCounts count_rule(const Rule& rule, const TransactionTable& table) {
  RuleCounts counts;
  counts.rows = table.rows.size();
  const Item consequent[] = {rule.consequent};
  for (std::size_t r = 0; r < counts.rows; ++r) {
    const bool has_x = row_contains(table, r, rule.antecedent);
    const bool has_y = row_contains(table, r, consequent);
    counts.antecedent += has_x;
    counts.consequent += has_y;
    counts.both += has_x && has_y;
  }
  return counts;
}

RuleMetrics metrics_from_counts(const RuleCounts& c) {
  RuleMetrics m;
  if (c.rows == 0) {
    return m;
  }
  const auto n = static_cast<double>(c.rows);
  m.support = static_cast<double>(c.both) / n;
  m.rule_coverage = static_cast<double>(c.antecedent) / n;
  m.confidence = c.antecedent == 0 ? 0.0
                                   : static_cast<double>(c.both) / static_cast<double>(c.antecedent);
  const std::size_t without_x = c.rows - c.antecedent;
  if (without_x == 0) {
    m.zhang = 0.0;
    return m;
  }
  const double conf_without =
      static_cast<double>(c.consequent - c.both) / static_cast<double>(without_x);
  const double denominator = std::max(m.confidence, conf_without);
  m.zhang = denominator == 0.0 ? 0.0 : (m.confidence - conf_without) / denominator;
  return m;
}

double support(const Rule& rule, const TransactionTable& table) {
  return metrics_from_counts(count_rule(rule, table)).support;
}

double confidence(const Rule& rule, const TransactionTable& table) {
  return metrics_from_counts(count_rule(rule, table)).confidence;
}

double rule_coverage(const Rule& rule, const TransactionTable& table) {
  return metrics_from_counts(count_rule(rule, table)).rule_coverage;
}

double zhang(const Rule& rule, const TransactionTable& table) {
  return metrics_from_counts(count_rule(rule, table)).zhang;
}

double data_coverage(std::span<const Rule> rules, const TransactionTable& table) {
  if (table.rows.empty()) {
    return 0.0;
  }
  std::size_t covered = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    covered += std::any_of(rules.begin(), rules.end(), [&](const Rule& rule) {
      return row_contains(table, r, rule.antecedent);
    });
  }
  return static_cast<double>(covered) / static_cast<double>(table.rows.size());
}

RuleQualityReport evaluate_rules(std::span<const Rule> rules, const TransactionTable& table) {
  RuleQualityReport report;
  auto& agg = report.aggregate;
  for (const auto& rule : rules) {
    auto metrics = metrics_from_counts(count_rule(rule, table));
    agg.mean_support += metrics.support;
    agg.mean_confidence += metrics.confidence;
    agg.mean_coverage += metrics.rule_coverage;
    agg.mean_zhang += metrics.zhang;
    report.per_rule.push_back({rule, metrics});
  }
  agg.rule_count = rules.size();
  if (!rules.empty()) {
    const auto n = static_cast<double>(rules.size());
    agg.mean_support /= n;
    agg.mean_confidence /= n;
    agg.mean_coverage /= n;
    agg.mean_zhang /= n;
  }
  agg.data_coverage = data_coverage(rules, table);
  return report;
}

std::string format_quality_table(std::span<const std::pair<std::string, QualityAggregate>> rows) {
  std::size_t name_width = 9;
  for (const auto& [name, agg] : rows) {
    name_width = std::max(name_width, name.size());
  }
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-*s %9s %9s %11s %9s %10s %8s\n",
                static_cast<int>(name_width), "Run", "# Rules", "Support", "Confidence",
                "Coverage", "Data Cov.", "Zhang");
  out << line;
  for (const auto& [name, agg] : rows) {
    std::snprintf(line, sizeof(line), "%-*s %9zu %9.4f %11.4f %9.4f %10.4f %8.4f\n",
                  static_cast<int>(name_width), name.c_str(), agg.rule_count, agg.mean_support,
                  agg.mean_confidence, agg.mean_coverage, agg.data_coverage, agg.mean_zhang);
    out << line;
  }
  return out.str();
}

}  // namespace aerial
