#include "aerial/rules_io.hpp"

#include <fstream>
#include <sstream>

#include "aerial/error.hpp"
#include "aerial/transact.hpp"

namespace aerial {

using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "aerial-report/1";

json item_to_json(const TransactionTable& table, const Item& item) {
  const auto& feature = table.features.at(item.feature);
  return {{"feature", feature.name}, {"class", feature.class_values.at(item.cls)}};
}

Item item_from_json(const json& entry, const TransactionTable& table) {
  if (!entry.is_object() || !entry.contains("feature") || !entry.contains("class") ||
      !entry.at("feature").is_string() || !entry.at("class").is_string()) {
    fail(ErrorKind::Data, "rule item must be {\"feature\": string, \"class\": string}");
  }
  const auto name = entry.at("feature").get<std::string>();
  const auto value = entry.at("class").get<std::string>();
  auto feature = table.find_feature(name);
  if (!feature) {
    fail(ErrorKind::Data, "rule refers to unknown feature '" + name + "'");
  }
  auto cls = table.find_class(*feature, value);
  if (!cls) {
    fail(ErrorKind::Data, "rule refers to unknown class '" + value + "' of '" + name + "'");
  }
  return {*feature, *cls};
}

json rule_body(const Rule& rule, const TransactionTable& table) {
  json antecedent = json::array();
  for (const auto& item : rule.antecedent) {
    antecedent.push_back(item_to_json(table, item));
  }
  return {{"antecedent", std::move(antecedent)},
          {"consequent", item_to_json(table, rule.consequent)}};
}

double number_at(const json& object, const char* key) {
  if (!object.contains(key) || !object.at(key).is_number()) {
    fail(ErrorKind::Data, std::string("report: missing numeric field '") + key + "'");
  }
  return object.at(key).get<double>();
}

}  // namespace

json rules_to_json(std::span<const ScoredRule> rules, const TransactionTable& table, bool scored) {
  json out = json::array();
  for (const auto& entry : rules) {
    json body = rule_body(entry.rule, table);
    if (scored) {
      body["support"] = entry.metrics.support;
      body["confidence"] = entry.metrics.confidence;
      body["zhang"] = entry.metrics.zhang;
    }
    out.push_back(std::move(body));
  }
  return out;
}

json rules_to_json(std::span<const Rule> rules, const TransactionTable& table) {
  json out = json::array();
  for (const auto& rule : rules) {
    out.push_back(rule_body(rule, table));
  }
  return out;
}

std::vector<Rule> rules_from_json(const json& document, const TransactionTable& table) {
  const json& array = document.is_object() && document.contains("rules") ? document.at("rules")
                                                                        : document;
  if (!array.is_array()) {
    fail(ErrorKind::Data, "rules document must be an array");
  }
  std::vector<Rule> rules;
  for (const auto& entry : array) {
    if (!entry.is_object() || !entry.contains("antecedent") || !entry.contains("consequent") ||
        !entry.at("antecedent").is_array()) {
      fail(ErrorKind::Data, "rule must have an 'antecedent' array and a 'consequent'");
    }
    Rule rule;
    for (const auto& item : entry.at("antecedent")) {
      rule.antecedent.push_back(item_from_json(item, table));
    }
    std::sort(rule.antecedent.begin(), rule.antecedent.end());
    rule.consequent = item_from_json(entry.at("consequent"), table);
    if (!rule.well_formed()) {
      fail(ErrorKind::Data, "malformed rule: " + entry.dump());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

json report_to_json(const RuleQualityReport& report, const TransactionTable& table,
                    const ReportDocument& meta) {
  json rules = json::array();
  for (const auto& entry : report.per_rule) {
    json body = rule_body(entry.rule, table);
    body["support"] = entry.metrics.support;
    body["confidence"] = entry.metrics.confidence;
    body["rule_coverage"] = entry.metrics.rule_coverage;
    body["zhang"] = entry.metrics.zhang;
    rules.push_back(std::move(body));
  }
  const auto& agg = report.aggregate;
  json root;
  root["schema"] = kReportSchema;
  root["label"] = meta.label;
  root["aggregate"] = {{"rule_count", agg.rule_count},         {"mean_support", agg.mean_support},
                       {"mean_confidence", agg.mean_confidence}, {"mean_coverage", agg.mean_coverage},
                       {"mean_zhang", agg.mean_zhang},           {"data_coverage", agg.data_coverage}};
  root["timings_seconds"] = meta.timings_seconds;
  root["parameters"] = meta.parameters;
  root["rules"] = std::move(rules);
  return root;
}

ReportDocument report_summary_from_json(const json& document) {
  if (!document.is_object() || !document.contains("schema") ||
      document.at("schema") != kReportSchema) {
    fail(ErrorKind::Data, std::string("report: expected schema '") + kReportSchema + "'");
  }
  if (!document.contains("aggregate") || !document.at("aggregate").is_object() ||
      !document.contains("rules") || !document.at("rules").is_array()) {
    fail(ErrorKind::Data, "report: missing 'aggregate' or 'rules'");
  }
  ReportDocument out;
  out.label = document.value("label", "");
  const auto& agg = document.at("aggregate");
  out.aggregate.rule_count = static_cast<std::size_t>(number_at(agg, "rule_count"));
  out.aggregate.mean_support = number_at(agg, "mean_support");
  out.aggregate.mean_confidence = number_at(agg, "mean_confidence");
  out.aggregate.mean_coverage = number_at(agg, "mean_coverage");
  out.aggregate.mean_zhang = number_at(agg, "mean_zhang");
  out.aggregate.data_coverage = number_at(agg, "data_coverage");
  if (out.aggregate.rule_count != document.at("rules").size()) {
    fail(ErrorKind::Data, "report: rule_count disagrees with the rules array");
  }
  for (const char* section : {"timings_seconds", "parameters"}) {
    if (document.contains(section)) {
      auto& target = std::string(section) == "parameters" ? out.parameters : out.timings_seconds;
      for (const auto& [key, value] : document.at(section).items()) {
        if (!value.is_number()) {
          fail(ErrorKind::Data, std::string("report: non-numeric entry in ") + section);
        }
        target[key] = value.get<double>();
      }
    }
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Usage, "cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    fail(ErrorKind::Usage, "cannot write '" + path + "'");
  }
  out << text;
}

}  // namespace aerial
