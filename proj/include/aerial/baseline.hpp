#pragma once

// Exhaustive association rule mining (FP-growth) and a brute-force implication
// enumerator that serves as its oracle.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aerial/quality.hpp"
#include "aerial/rule.hpp"

namespace aerial {

struct TransactionTable;

struct FrequentItemset {
  std::vector<Item> items;  // sorted by feature
  std::size_t count = 0;
  double support = 0.0;

  bool operator==(const FrequentItemset&) const = default;
};

/// Smallest row count c with c / rows >= min_support.
std::size_t min_count_for(double min_support, std::size_t rows);

/// Every itemset with support >= min_support, in canonical order (size, then items).
/// A nonzero `max_items` stops growth at itemsets of that size.
std::vector<FrequentItemset> mine_frequent(const TransactionTable& table, double min_support,
                                           std::size_t max_items = 0);

/// All X -> y with X ∪ {y} frequent, |X| <= max_antecedents and
/// confidence >= min_confidence, sorted by rule.
std::vector<ScoredRule> rules_from_itemsets(std::span<const FrequentItemset> itemsets,
                                            const TransactionTable& table, double min_confidence,
                                            std::size_t max_antecedents);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Number of (antecedent, consequent) candidates brute_force_implications would scan.
std::uint64_t brute_force_candidates(const TransactionTable& table, std::size_t max_antecedents);

/// Direct enumeration of every rule with support >= min_support and confidence >=
/// min_confidence. Throws Error(Usage) past kBruteForceLimit candidates.
std::vector<ScoredRule> brute_force_implications(const TransactionTable& table,
                                                 double min_confidence,
                                                 std::size_t max_antecedents,
                                                 double min_support = 0.0);

/// Half the mean support of `rules` on `table`.
double coupled_support_threshold(std::span<const Rule> rules, const TransactionTable& table);

}  // namespace aerial
