#include "aerial/extract.hpp"

#include <algorithm>
#include <cmath>

#include "aerial/error.hpp"
#include "aerial/transact.hpp"

namespace aerial {

bool Rule::well_formed() const {
  if (antecedent.empty()) {
    return false;
  }
  for (std::size_t i = 0; i < antecedent.size(); ++i) {
    if (i > 0 && antecedent[i - 1].feature >= antecedent[i].feature) {
      return false;
    }
    if (antecedent[i].feature == consequent.feature) {
      return false;
    }
  }
  return true;
}

std::string render_item(const TransactionTable& table, const Item& item) {
  const auto& feature = table.features.at(item.feature);
  return feature.name + "=" + feature.class_values.at(item.cls);
}

std::string render_rule(const TransactionTable& table, const Rule& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
    if (i > 0) {
      out += " & ";
    }
    out += render_item(table, rule.antecedent[i]);
  }
  return out + " -> " + render_item(table, rule.consequent);
}

void ExtractionConfig::validate() const {
  if (!(similarity_threshold > 0.0 && similarity_threshold <= 1.0)) {
    fail(ErrorKind::Usage, "similarity threshold must be in (0, 1]");
  }
  if (max_antecedents < 1) {
    fail(ErrorKind::Usage, "max antecedents must be at least 1");
  }
}

std::vector<double> equal_prob_vector(const Layout& layout) {
  std::vector<double> out(layout_width(layout));
  for (const auto& slots : layout) {
    std::fill_n(out.begin() + static_cast<std::ptrdiff_t>(slots.offset), slots.count,
                1.0 / static_cast<double>(slots.count));
  }
  return out;
}

std::vector<TestVector> generate_test_vectors(const Layout& layout,
                                              std::span<const std::size_t> feature_subset) {
  const auto base = equal_prob_vector(layout);
  std::vector<TestVector> out;
  if (feature_subset.empty()) {
    return out;
  }
  std::vector<std::size_t> classes(feature_subset.size(), 0);
  while (true) {
    TestVector vector{base, {}};
    for (std::size_t i = 0; i < feature_subset.size(); ++i) {
      const auto& slots = layout.at(feature_subset[i]);
      std::fill_n(vector.values.begin() + static_cast<std::ptrdiff_t>(slots.offset), slots.count,
                  0.0);
      vector.values[slots.offset + classes[i]] = 1.0;
      vector.marked.push_back({slots.feature, classes[i]});
    }
    out.push_back(std::move(vector));

    // odometer, last feature fastest
    std::size_t i = feature_subset.size();
    while (i > 0) {
      --i;
      if (++classes[i] < layout.at(feature_subset[i]).count) {
        break;
      }
      classes[i] = 0;
      if (i == 0) {
        return out;
      }
    }
  }
}

std::vector<std::vector<std::size_t>> feature_combinations(std::span<const std::size_t> features,
                                                           std::size_t max_size) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = features.size();
  for (std::size_t k = 1; k <= std::min(max_size, n); ++k) {
    std::vector<std::size_t> index(k);
    for (std::size_t i = 0; i < k; ++i) {
      index[i] = i;
    }
    while (true) {
      std::vector<std::size_t> combo;
      combo.reserve(k);
      for (auto i : index) {
        combo.push_back(features[i]);
      }
      out.push_back(std::move(combo));
      std::size_t i = k;
      while (i > 0 && index[i - 1] == n - k + (i - 1)) {
        --i;
      }
      if (i == 0) {
        break;
      }
      ++index[i - 1];
      for (std::size_t j = i; j < k; ++j) {
        index[j] = index[j - 1] + 1;
      }
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> markable_list(const Layout& layout,
                                       const std::optional<std::set<std::size_t>>& markable) {
  std::vector<std::size_t> features;
  for (std::size_t f = 0; f < layout.size(); ++f) {
    if (!markable || markable->contains(f)) {
      features.push_back(f);
    }
  }
  return features;
}

}  // namespace

std::uint64_t count_test_vectors(const Layout& layout, std::size_t max_antecedents,
                                 const std::optional<std::set<std::size_t>>& markable) {
  // Elementary symmetric sums e_1..e_a of the class counts.
  const auto features = markable_list(layout, markable);
  std::vector<std::uint64_t> sums(max_antecedents + 1, 0);
  sums[0] = 1;
  for (auto f : features) {
    const std::uint64_t k = layout[f].count;
    for (std::size_t j = max_antecedents; j >= 1; --j) {
      sums[j] += sums[j - 1] * k;
    }
  }
  std::uint64_t total = 0;
  for (std::size_t j = 1; j <= max_antecedents; ++j) {
    total += sums[j];
  }
  return total;
}

ExtractionResult extract_rules(const ForwardModel& model, const Layout& layout,
                               const ExtractionConfig& config) {
  config.validate();
  if (model.layout() != layout) {
    fail(ErrorKind::Data, "model layout does not match the transaction layout");
  }
  if (config.markable_features) {
    for (auto f : *config.markable_features) {
      if (f >= layout.size()) {
        fail(ErrorKind::Usage, "markable feature index " + std::to_string(f) + " out of range");
      }
    }
  }
  const double tau = config.similarity_threshold;
  const auto features = markable_list(layout, config.markable_features);

  ExtractionResult result;
  std::set<Rule> seen;
  for (const auto& subset : feature_combinations(features, config.max_antecedents)) {
    const auto tests = generate_test_vectors(layout, subset);
    const std::size_t width = layout_width(layout);
    std::vector<double> batch;
    batch.reserve(tests.size() * width);
    for (const auto& test : tests) {
      batch.insert(batch.end(), test.values.begin(), test.values.end());
    }
    const auto outputs = model.forward_many(batch, tests.size());
    result.forward_passes += tests.size();

    for (std::size_t t = 0; t < tests.size(); ++t) {
      const auto& test = tests[t];
      const double* out = outputs.data() + t * width;
      const bool confirmed = std::all_of(test.marked.begin(), test.marked.end(),
                                         [&](const Item& item) {
                                           return out[layout[item.feature].offset + item.cls] >= tau;
                                         });
      if (!confirmed) {
        continue;
      }
      for (const auto& slots : layout) {
        if (std::find(subset.begin(), subset.end(), slots.feature) != subset.end()) {
          continue;
        }
        const double* begin = out + slots.offset;
        const double* best = std::max_element(begin, begin + slots.count);
        if (*best > tau) {
          Rule rule{test.marked, {slots.feature, static_cast<std::size_t>(best - begin)}};
          if (seen.insert(rule).second) {
            result.rules.push_back(std::move(rule));
          }
        }
      }
    }
  }
  return result;
}

}  // namespace aerial
