#include <atomic>
#include <random>

#include "aerial/autonet.hpp"
#include "aerial/baseline.hpp"
#include "aerial/error.hpp"
#include "aerial/extract.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace aerial;

namespace {

/// Returns a fixed reconstruction for every input and counts calls.
class FixedOutput final : public ForwardModel {
 public:
  FixedOutput(Layout layout, std::vector<double> output)
      : layout_(std::move(layout)), output_(std::move(output)) {}
  const Layout& layout() const override { return layout_; }
  std::vector<double> forward(std::span<const double>) const override {
    ++calls;
    return output_;
  }
  mutable std::atomic<std::uint64_t> calls{0};

 private:
  Layout layout_;
  std::vector<double> output_;
};

Layout sizes(std::vector<std::size_t> counts) { return make_layout(counts); }

}  // namespace

TEST_CASE("equal-probability vectors") {
  auto v = equal_prob_vector(sizes({2, 3}));
  REQUIRE(v.size() == 5);
  CHECK(v[0] == 0.5);
  CHECK(v[2] == 1.0 / 3.0);
  CHECK(equal_prob_vector(sizes({1})) == std::vector<double>{1.0});
  CHECK(equal_prob_vector(sizes({4})) == std::vector<double>(4, 0.25));
}

TEST_CASE("test vector generation") {
  const auto layout = sizes({2, 3});
  std::vector<std::size_t> first{0};
  auto single = generate_test_vectors(layout, first);
  REQUIRE(single.size() == 2);
  CHECK(single[0].values == std::vector<double>{1, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(single[0].marked == std::vector<Item>{{0, 0}});

  std::vector<std::size_t> both{0, 1};
  auto pairs = generate_test_vectors(layout, both);
  REQUIRE(pairs.size() == 6);
  CHECK(pairs[1].marked == std::vector<Item>{{0, 0}, {1, 1}});
  CHECK(pairs[1].values == std::vector<double>{1, 0, 0, 1, 0});
  CHECK(pairs[5].marked == std::vector<Item>{{0, 1}, {1, 2}});
}

TEST_CASE("test vector accounting") {
  CHECK(count_test_vectors(sizes({2, 3, 4}), 2) == 35);
  CHECK(count_test_vectors(sizes({2, 3}), 2) == 11);
  CHECK(count_test_vectors(sizes({7}), 1) == 7);
  CHECK(count_test_vectors(sizes({5, 5, 5, 5}), 1) == 20);
  CHECK(count_test_vectors(sizes({2, 3, 4}), 2, std::set<std::size_t>{0, 2}) == 2 + 4 + 8);

  std::vector<std::size_t> all{0, 1, 2, 3};
  auto combos = feature_combinations(all, 2);
  CHECK(combos.size() == 10);
  CHECK(combos.front() == std::vector<std::size_t>{0});
  CHECK(combos.back() == std::vector<std::size_t>{2, 3});
}

TEST_CASE("worked example: f1(a) -> f2(c)") {
  FixedOutput stub(sizes({2, 3}), {0.8, 0.2, 0.9, 0.04, 0.06});
  ExtractionConfig config;
  config.similarity_threshold = 0.8;
  auto result = extract_rules(stub, stub.layout(), config);
  REQUIRE(result.rules.size() == 1);
  CHECK(result.rules[0] == Rule{{{0, 0}}, {1, 0}});
  CHECK(result.forward_passes == 11);
  CHECK(stub.calls == 11);
}

TEST_CASE("extraction gates") {
  FixedOutput stub(sizes({2, 3}), {0.8, 0.2, 0.9, 0.04, 0.06});
  ExtractionConfig config;
  config.similarity_threshold = 1.0;
  CHECK(extract_rules(stub, stub.layout(), config).rules.empty());

  config.similarity_threshold = 0.5;
  auto loose = extract_rules(stub, stub.layout(), config).rules;
  CHECK(std::find(loose.begin(), loose.end(), Rule{{{1, 1}}, {0, 0}}) == loose.end());
  CHECK(std::find(loose.begin(), loose.end(), Rule{{{1, 0}}, {0, 0}}) != loose.end());
  for (const auto& rule : loose) CHECK(rule.well_formed());

  config.markable_features = std::set<std::size_t>{1};
  auto marked = extract_rules(stub, stub.layout(), config);
  CHECK(marked.rules == std::vector<Rule>{Rule{{{1, 0}}, {0, 0}}});
  CHECK(marked.forward_passes == 3);

  config = {};
  CHECK_THROWS_AS(extract_rules(stub, sizes({3, 2}), config), Error);
  config.similarity_threshold = 0.0;
  CHECK_THROWS_AS(extract_rules(stub, stub.layout(), config), Error);
}

TEST_CASE("a trained network recovers an exact implication") {
  // f0 = 0 always comes with f1 = 2; the rest is noise.
  std::mt19937_64 rng(31);
  std::vector<std::vector<std::uint32_t>> rows;
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t f0 = rng() % 4 == 0 ? 1u : 0u;
    const std::uint32_t f1 = f0 == 0 ? 2u : static_cast<std::uint32_t>(rng() % 2);
    rows.push_back({f0, f1, static_cast<std::uint32_t>(rng() % 3)});
  }
  auto table = testing::make_table({2, 3, 3}, rows);
  auto matrix = one_hot_encode(table);
  TrainingConfig config;
  config.epochs = 10;
  config.batch_size = 16;
  config.seed = 31;
  auto net = train(matrix, NetworkShape::for_layout(matrix.layout), config);

  ExtractionConfig extraction;
  extraction.max_antecedents = 1;
  auto rules = extract_rules(net, matrix.layout, extraction).rules;
  const Rule planted{{{0, 0}}, {1, 2}};
  CHECK(std::find(rules.begin(), rules.end(), planted) != rules.end());

  auto exact = brute_force_implications(table, 1.0, 1, 0.0);
  bool listed = false;
  for (const auto& entry : exact) listed = listed || entry.rule == planted;
  CHECK(listed);
}
