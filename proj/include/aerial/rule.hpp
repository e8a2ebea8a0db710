#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace aerial {

struct TransactionTable;

/// feature = class, by index into a TransactionTable.
struct Item {
  std::size_t feature = 0;
  std::size_t cls = 0;

  auto operator<=>(const Item&) const = default;
};

/// Horn clause X -> y with a single consequent item. Antecedent items are kept
/// sorted by feature index and come from distinct features.
struct Rule {
  std::vector<Item> antecedent;
  Item consequent;

  auto operator<=>(const Rule&) const = default;
  bool operator==(const Rule&) const = default;

  /// True iff the antecedent is nonempty, sorted, per-feature unique and the
  /// consequent's feature is not among the antecedent features.
  bool well_formed() const;
};

std::string render_item(const TransactionTable& table, const Item& item);
std::string render_rule(const TransactionTable& table, const Rule& rule);

}  // namespace aerial
