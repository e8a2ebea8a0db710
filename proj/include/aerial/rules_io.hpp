#pragma once

// Rule and report documents shared by the miners and the CLI.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "aerial/quality.hpp"
#include "aerial/rule.hpp"
#include "json.hpp"

namespace aerial {

struct TransactionTable;

/// [{"antecedent":[{"feature","class"}], "consequent":{"feature","class"}, ...}]
/// Metrics are attached when `scored` is true.
nlohmann::json rules_to_json(std::span<const ScoredRule> rules, const TransactionTable& table,
                             bool scored);
nlohmann::json rules_to_json(std::span<const Rule> rules, const TransactionTable& table);

/// Resolves names against `table`; throws Error(Data) for unknown features/classes.
std::vector<Rule> rules_from_json(const nlohmann::json& document, const TransactionTable& table);

struct ReportDocument {
  std::string label;
  QualityAggregate aggregate;
  std::map<std::string, double> timings_seconds;
  std::map<std::string, double> parameters;
};

nlohmann::json report_to_json(const RuleQualityReport& report, const TransactionTable& table,
                              const ReportDocument& meta);
/// Reads the summary part of a report; throws Error(Data) on schema violations.
ReportDocument report_summary_from_json(const nlohmann::json& document);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace aerial
