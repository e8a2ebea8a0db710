#pragma once

// Shared fixtures and independent row-scan oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "aerial/quality.hpp"
#include "aerial/rule.hpp"
#include "aerial/transact.hpp"

namespace testing {

using aerial::Item;
using aerial::Rule;
using aerial::TransactionTable;

inline TransactionTable make_table(const std::vector<std::size_t>& class_counts,
                                   std::vector<std::vector<std::uint32_t>> rows) {
  TransactionTable table;
  for (std::size_t f = 0; f < class_counts.size(); ++f) {
    aerial::FeatureDescriptor feature;
    feature.name = "f" + std::to_string(f);
    for (std::size_t c = 0; c < class_counts[f]; ++c) {
      feature.class_values.push_back("v" + std::to_string(c));
    }
    table.features.push_back(feature);
  }
  table.rows = std::move(rows);
  return table;
}

inline TransactionTable random_table(std::mt19937_64& rng, std::size_t max_features,
                                     std::size_t max_classes, std::size_t max_rows,
                                     std::size_t min_features = 1) {
  auto pick = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::vector<std::size_t> counts(pick(min_features, max_features));
  for (auto& k : counts) k = pick(1, max_classes);
  std::vector<std::vector<std::uint32_t>> rows(pick(1, max_rows));
  for (auto& row : rows) {
    for (auto k : counts) row.push_back(static_cast<std::uint32_t>(pick(0, k - 1)));
  }
  return make_table(counts, std::move(rows));
}

/// Random well-formed rule with 1..max_antecedents antecedent items; needs >= 2 features.
inline Rule random_rule(std::mt19937_64& rng, const TransactionTable& table,
                        std::size_t max_antecedents = 3) {
  std::vector<std::size_t> order(table.features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const auto limit = std::min(max_antecedents, order.size() - 1);
  const auto n = std::uniform_int_distribution<std::size_t>(1, limit)(rng);
  auto cls = [&](std::size_t f) {
    return std::uniform_int_distribution<std::size_t>(0, table.features[f].class_values.size() -
                                                             1)(rng);
  };
  Rule rule;
  for (std::size_t i = 0; i < n; ++i) rule.antecedent.push_back({order[i], cls(order[i])});
  std::sort(rule.antecedent.begin(), rule.antecedent.end());
  rule.consequent = {order[n], cls(order[n])};
  return rule;
}

// --- row-scan oracles: plain loops, no shared code with the library ---------------

inline bool holds(const std::vector<std::uint32_t>& row, const std::vector<Item>& items) {
  for (const auto& item : items) {
    if (row[item.feature] != item.cls) return false;
  }
  return true;
}

struct ScanCounts {
  std::size_t x = 0, y = 0, xy = 0, not_x = 0, not_x_y = 0;
};

inline ScanCounts scan(const TransactionTable& table, const Rule& rule) {
  ScanCounts c;
  std::vector<Item> y{rule.consequent};
  for (const auto& row : table.rows) {
    const bool x = holds(row, rule.antecedent);
    const bool has_y = holds(row, y);
    c.x += x;
    c.y += has_y;
    c.xy += x && has_y;
    c.not_x += !x;
    c.not_x_y += !x && has_y;
  }
  return c;
}

inline double oracle_support(const TransactionTable& t, const Rule& r) {
  return static_cast<double>(scan(t, r).xy) / static_cast<double>(t.rows.size());
}
inline double oracle_confidence(const TransactionTable& t, const Rule& r) {
  auto c = scan(t, r);
  return c.x == 0 ? 0.0 : static_cast<double>(c.xy) / static_cast<double>(c.x);
}
inline double oracle_coverage(const TransactionTable& t, const Rule& r) {
  return static_cast<double>(scan(t, r).x) / static_cast<double>(t.rows.size());
}
inline double oracle_zhang(const TransactionTable& t, const Rule& r) {
  auto c = scan(t, r);
  if (c.not_x == 0) return 0.0;
  const double with_x = c.x == 0 ? 0.0 : static_cast<double>(c.xy) / static_cast<double>(c.x);
  const double without_x = static_cast<double>(c.not_x_y) / static_cast<double>(c.not_x);
  const double top = std::max(with_x, without_x);
  return top == 0.0 ? 0.0 : (with_x - without_x) / top;
}
inline double oracle_data_coverage(const TransactionTable& t, const std::vector<Rule>& rules) {
  std::size_t covered = 0;
  for (const auto& row : t.rows) {
    bool any = false;
    for (const auto& rule : rules) any = any || holds(row, rule.antecedent);
    covered += any;
  }
  return static_cast<double>(covered) / static_cast<double>(t.rows.size());
}

/// Every (X, y) with |X| <= max_antecedents, support >= min_support and
/// confidence >= min_confidence, by enumerating per-feature choices.
inline std::vector<aerial::ScoredRule> oracle_implications(const TransactionTable& t,
                                                           double min_confidence,
                                                           std::size_t max_antecedents,
                                                           double min_support) {
  const auto nf = t.features.size();
  std::vector<aerial::ScoredRule> out;
  // choice[f] == 0 means absent, otherwise class choice[f]-1.
  std::vector<std::size_t> choice(nf, 0);
  while (true) {
    std::vector<Item> items;
    for (std::size_t f = 0; f < nf; ++f) {
      if (choice[f] > 0) items.push_back({f, choice[f] - 1});
    }
    if (items.size() >= 2 && items.size() <= max_antecedents + 1) {
      for (std::size_t k = 0; k < items.size(); ++k) {
        Rule rule;
        rule.consequent = items[k];
        for (std::size_t j = 0; j < items.size(); ++j) {
          if (j != k) rule.antecedent.push_back(items[j]);
        }
        auto c = scan(t, rule);
        const auto rows = static_cast<double>(t.rows.size());
        const double supp = static_cast<double>(c.xy) / rows;
        const double conf = c.x == 0 ? 0.0 : static_cast<double>(c.xy) / static_cast<double>(c.x);
        if (supp >= min_support && conf >= min_confidence) {
          out.push_back({rule,
                         {supp, conf, static_cast<double>(c.x) / rows, oracle_zhang(t, rule)}});
        }
      }
    }
    std::size_t f = 0;
    while (f < nf && ++choice[f] > t.features[f].class_values.size()) choice[f++] = 0;
    if (f == nf) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Fresh scratch directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("aerial-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
