#include "aerial/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "aerial/error.hpp"
#include "aerial/extract.hpp"
#include "aerial/transact.hpp"

namespace aerial {

std::size_t min_count_for(double min_support, std::size_t rows) {
  if (rows == 0) {
    return 0;
  }
  const auto n = static_cast<double>(rows);
  auto count = static_cast<std::size_t>(std::max(0.0, std::ceil(min_support * n)));
  while (count > 0 && static_cast<double>(count - 1) / n >= min_support) {
    --count;
  }
  while (static_cast<double>(count) / n < min_support) {
    ++count;
  }
  return count;
}

namespace {

// Items are global one-hot slots: layout offset + class.
using ItemId = std::uint32_t;

class FpTree {
 public:
  struct Node {
    ItemId item;
    std::size_t count;
    int parent;
  };

  explicit FpTree(const std::vector<std::size_t>* rank) : rank_(rank) {
    nodes_.push_back({0, 0, -1});
  }

  /// `path` must already be sorted by rank.
  void insert(const std::vector<ItemId>& path, std::size_t count) {
    int current = 0;
    for (auto item : path) {
      auto [it, inserted] = children_.try_emplace({current, item}, 0);
      if (inserted) {
        it->second = static_cast<int>(nodes_.size());
        nodes_.push_back({item, 0, current});
        header_[item].push_back(it->second);
      }
      current = it->second;
      nodes_[static_cast<std::size_t>(current)].count += count;
    }
  }

  bool empty() const { return header_.empty(); }
  const std::map<ItemId, std::vector<int>>& header() const { return header_; }
  const Node& node(int index) const { return nodes_[static_cast<std::size_t>(index)]; }

  std::vector<ItemId> prefix_path(int index) const {
    std::vector<ItemId> path;
    for (int p = node(index).parent; p > 0; p = node(p).parent) {
      path.push_back(node(p).item);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  const std::vector<std::size_t>& rank() const { return *rank_; }

 private:
  const std::vector<std::size_t>* rank_;
  std::vector<Node> nodes_;
  std::map<std::pair<int, ItemId>, int> children_;
  std::map<ItemId, std::vector<int>> header_;
};

void grow(const FpTree& tree, std::vector<ItemId>& suffix, std::size_t min_count,
          std::size_t max_items, std::vector<std::pair<std::vector<ItemId>, std::size_t>>& out) {
  for (const auto& [item, nodes] : tree.header()) {
    std::size_t total = 0;
    for (int n : nodes) {
      total += tree.node(n).count;
    }
    if (total < min_count) {
      continue;
    }
    suffix.push_back(item);
    out.emplace_back(suffix, total);
    if (max_items != 0 && suffix.size() >= max_items) {
      suffix.pop_back();
      continue;
    }

    // Conditional pattern base for `item`.
    std::vector<std::pair<std::vector<ItemId>, std::size_t>> base;
    std::map<ItemId, std::size_t> counts;
    for (int n : nodes) {
      auto path = tree.prefix_path(n);
      const auto c = tree.node(n).count;
      for (auto i : path) {
        counts[i] += c;
      }
      if (!path.empty()) {
        base.emplace_back(std::move(path), c);
      }
    }
    FpTree conditional(&tree.rank());
    for (auto& [path, c] : base) {
      std::vector<ItemId> kept;
      for (auto i : path) {
        if (counts[i] >= min_count) {
          kept.push_back(i);
        }
      }
      if (!kept.empty()) {
        conditional.insert(kept, c);
      }
    }
    if (!conditional.empty()) {
      grow(conditional, suffix, min_count, max_items, out);
    }
    suffix.pop_back();
  }
}

bool canonical_less(const FrequentItemset& a, const FrequentItemset& b) {
  if (a.items.size() != b.items.size()) {
    return a.items.size() < b.items.size();
  }
  return a.items < b.items;
}

}  // namespace

std::vector<FrequentItemset> mine_frequent(const TransactionTable& table, double min_support,
                                           std::size_t max_items) {
  if (!(min_support > 0.0 && min_support <= 1.0)) {
    fail(ErrorKind::Usage, "min support must be in (0, 1]");
  }
  std::vector<FrequentItemset> result;
  const std::size_t rows = table.rows.size();
  if (rows == 0) {
    return result;
  }
  const auto layout = table.layout();
  const std::size_t width = layout_width(layout);
  const std::size_t min_count = min_count_for(min_support, rows);

  std::vector<std::size_t> item_counts(width, 0);
  for (const auto& row : table.rows) {
    for (const auto& slots : layout) {
      ++item_counts[slots.offset + row[slots.feature]];
    }
  }
  // Rank: descending frequency, ties by item id.
  std::vector<ItemId> order(width);
  std::iota(order.begin(), order.end(), ItemId{0});
  std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    return item_counts[a] != item_counts[b] ? item_counts[a] > item_counts[b] : a < b;
  });
  std::vector<std::size_t> rank(width);
  for (std::size_t i = 0; i < width; ++i) {
    rank[order[i]] = i;
  }

  FpTree tree(&rank);
  for (const auto& row : table.rows) {
    std::vector<ItemId> path;
    for (const auto& slots : layout) {
      const auto id = static_cast<ItemId>(slots.offset + row[slots.feature]);
      if (item_counts[id] >= min_count) {
        path.push_back(id);
      }
    }
    std::sort(path.begin(), path.end(), [&](ItemId a, ItemId b) { return rank[a] < rank[b]; });
    if (!path.empty()) {
      tree.insert(path, 1);
    }
  }

  std::vector<std::pair<std::vector<ItemId>, std::size_t>> found;
  std::vector<ItemId> suffix;
  grow(tree, suffix, min_count, max_items, found);

  // slot -> (feature, class)
  std::vector<Item> slot_item(width);
  for (const auto& slots : layout) {
    for (std::size_t c = 0; c < slots.count; ++c) {
      slot_item[slots.offset + c] = {slots.feature, c};
    }
  }
  for (auto& [ids, count] : found) {
    FrequentItemset itemset;
    for (auto id : ids) {
      itemset.items.push_back(slot_item[id]);
    }
    std::sort(itemset.items.begin(), itemset.items.end());
    itemset.count = count;
    itemset.support = static_cast<double>(count) / static_cast<double>(rows);
    result.push_back(std::move(itemset));
  }
  std::sort(result.begin(), result.end(), canonical_less);
  return result;
}

std::vector<ScoredRule> rules_from_itemsets(std::span<const FrequentItemset> itemsets,
                                            const TransactionTable& table, double min_confidence,
                                            std::size_t max_antecedents) {
  std::map<std::vector<Item>, std::size_t> counts;
  for (const auto& itemset : itemsets) {
    counts.emplace(itemset.items, itemset.count);
  }
  auto lookup = [&](const std::vector<Item>& items) {
    auto it = counts.find(items);
    if (it == counts.end()) {
      fail(ErrorKind::Internal, "itemset collection is not downward closed");
    }
    return it->second;
  };

  std::vector<ScoredRule> rules;
  for (const auto& itemset : itemsets) {
    const auto size = itemset.items.size();
    if (size < 2 || size - 1 > max_antecedents) {
      continue;
    }
    for (std::size_t y = 0; y < size; ++y) {
      Rule rule;
      rule.consequent = itemset.items[y];
      for (std::size_t i = 0; i < size; ++i) {
        if (i != y) {
          rule.antecedent.push_back(itemset.items[i]);
        }
      }
      RuleCounts c;
      c.rows = table.rows.size();
      c.both = itemset.count;
      c.antecedent = lookup(rule.antecedent);
      c.consequent = lookup({rule.consequent});
      auto metrics = metrics_from_counts(c);
      if (metrics.confidence >= min_confidence) {
        rules.push_back({std::move(rule), metrics});
      }
    }
  }
  std::sort(rules.begin(), rules.end());
  return rules;
}

std::uint64_t brute_force_candidates(const TransactionTable& table, std::size_t max_antecedents) {
  const auto layout = table.layout();
  const std::uint64_t width = layout_width(layout);
  std::uint64_t total = 0;
  std::vector<std::size_t> all(layout.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  // For each antecedent feature subset: Π classes × (slots outside the subset).
  for (const auto& subset : feature_combinations(all, max_antecedents)) {
    std::uint64_t product = 1;
    std::uint64_t inside = 0;
    for (auto f : subset) {
      product *= layout[f].count;
      inside += layout[f].count;
    }
    total += product * (width - inside);
    if (total > kBruteForceLimit) {
      return total;
    }
  }
  return total;
}

std::vector<ScoredRule> brute_force_implications(const TransactionTable& table,
                                                 double min_confidence,
                                                 std::size_t max_antecedents,
                                                 double min_support) {
  std::vector<ScoredRule> rules;
  const std::size_t rows = table.rows.size();
  if (rows == 0 || table.features.empty()) {
    return rules;
  }
  if (brute_force_candidates(table, max_antecedents) > kBruteForceLimit) {
    fail(ErrorKind::Usage, "brute-force enumeration exceeds " +
                               std::to_string(kBruteForceLimit) + " candidates");
  }
  const auto layout = table.layout();
  std::vector<std::size_t> all(layout.size());
  std::iota(all.begin(), all.end(), std::size_t{0});

  std::vector<std::vector<std::size_t>> single(layout.size());
  for (const auto& slots : layout) {
    single[slots.feature].assign(slots.count, 0);
  }
  for (const auto& row : table.rows) {
    for (std::size_t f = 0; f < row.size(); ++f) {
      ++single[f][row[f]];
    }
  }

  for (const auto& subset : feature_combinations(all, max_antecedents)) {
    std::vector<std::size_t> classes(subset.size(), 0);
    while (true) {
      std::vector<Item> antecedent;
      for (std::size_t i = 0; i < subset.size(); ++i) {
        antecedent.push_back({subset[i], classes[i]});
      }
      for (std::size_t f = 0; f < layout.size(); ++f) {
        if (std::find(subset.begin(), subset.end(), f) != subset.end()) {
          continue;
        }
        for (std::size_t c = 0; c < layout[f].count; ++c) {
          Rule rule{antecedent, {f, c}};
          RuleCounts counts;
          counts.rows = rows;
          counts.consequent = single[f][c];
          for (std::size_t r = 0; r < rows; ++r) {
            if (row_contains(table, r, antecedent)) {
              ++counts.antecedent;
              counts.both += table.rows[r][f] == c;
            }
          }
          auto metrics = metrics_from_counts(counts);
          if (metrics.support >= min_support && metrics.confidence >= min_confidence) {
            rules.push_back({std::move(rule), metrics});
          }
        }
      }
      std::size_t i = subset.size();
      bool done = true;
      while (i > 0) {
        --i;
        if (++classes[i] < layout[subset[i]].count) {
          done = false;
          break;
        }
        classes[i] = 0;
      }
      if (done) {
        break;
      }
    }
  }
  std::sort(rules.begin(), rules.end());
  return rules;
}

double coupled_support_threshold(std::span<const Rule> rules, const TransactionTable& table) {
  if (rules.empty()) {
    fail(ErrorKind::Data, "coupled support threshold needs at least one rule");
  }
  double total = 0.0;
  for (const auto& rule : rules) {
    total += support(rule, table);
  }
  return total / static_cast<double>(rules.size()) / 2.0;
}

}  // namespace aerial
