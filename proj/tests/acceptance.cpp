// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "aerial/autonet.hpp"
#include "aerial/baseline.hpp"
#include "aerial/commands.hpp"
#include "aerial/extract.hpp"
#include "aerial/quality.hpp"
#include "aerial/synth.hpp"
#include "support.hpp"

using namespace aerial;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

class FixedOutput final : public ForwardModel {
 public:
  FixedOutput(Layout layout, std::vector<double> output)
      : layout_(std::move(layout)), output_(std::move(output)) {}
  const Layout& layout() const override { return layout_; }
  std::vector<double> forward(std::span<const double>) const override { return output_; }

 private:
  Layout layout_;
  std::vector<double> output_;
};

/// Delegates to a real network and counts every evaluated input row.
class CountingModel final : public ForwardModel {
 public:
  explicit CountingModel(const TrainedAutoencoder& inner) : inner_(inner) {}
  const Layout& layout() const override { return inner_.layout(); }
  std::vector<double> forward(std::span<const double> input) const override {
    ++rows;
    return inner_.forward(input);
  }
  std::vector<double> forward_many(std::span<const double> inputs,
                                   std::size_t count) const override {
    rows += count;
    return inner_.forward_many(inputs, count);
  }
  mutable std::atomic<std::uint64_t> rows{0};

 private:
  const TrainedAutoencoder& inner_;
};

Layout random_layout(std::mt19937_64& rng, std::size_t min_width, std::size_t max_width,
                     std::size_t max_classes) {
  while (true) {
    std::vector<std::size_t> counts;
    std::size_t width = 0;
    const auto target = std::uniform_int_distribution<std::size_t>(min_width, max_width)(rng);
    while (width < target) {
      auto k = std::uniform_int_distribution<std::size_t>(1, max_classes)(rng);
      k = std::min(k, target - width);
      counts.push_back(k);
      width += k;
    }
    if (width >= 3) return make_layout(counts);
  }
}

// ---------------------------------------------------------------------------------

Outcome worked_example() {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> counts{2, 3};
  FixedOutput stub(make_layout(counts), {0.8, 0.2, 0.9, 0.04, 0.06});
  auto tv = generate_test_vectors(stub.layout(), std::vector<std::size_t>{0});
  const bool vector_ok = tv[0].values == std::vector<double>{1, 0, 1.0 / 3, 1.0 / 3, 1.0 / 3};
  ExtractionConfig config;
  config.similarity_threshold = 0.8;
  auto rules = extract_rules(stub, stub.layout(), config).rules;
  const double elapsed = seconds_since(start);
  const bool exact = rules == std::vector<Rule>{Rule{{{0, 0}}, {1, 0}}};
  return {vector_ok && exact && elapsed < 1.0,
          fmt("%.0f rule(s), f1(a) -> f2(c) only; %.4f s", static_cast<double>(rules.size()),
              elapsed)};
}

Outcome gradient_check() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  int nets = 0;
  for (; nets < 24; ++nets) {
    const auto layout = random_layout(rng, 3, 12, 4);
    TrainedAutoencoder net(NetworkShape::for_layout(layout), rng());
    const auto d = static_cast<Eigen::Index>(layout_width(layout));
    const Eigen::Index batch = 3;
    Eigen::MatrixXd inputs(d, batch);
    Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(d, batch);
    for (Eigen::Index c = 0; c < batch; ++c) {
      for (Eigen::Index r = 0; r < d; ++r) inputs(r, c) = unit(rng);
      for (const auto& slots : layout) {
        targets(static_cast<Eigen::Index>(slots.offset + rng() % slots.count), c) = 1.0;
      }
    }
    Gradients grads;
    net.loss_and_gradients(inputs, targets, &grads);
    auto probe = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = net.loss_and_gradients(inputs, targets, nullptr);
      param = keep - h;
      const double down = net.loss_and_gradients(inputs, targets, nullptr);
      param = keep;
      const double numeric = (up - down) / (2 * h);
      const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(analytic - numeric) / scale);
    };
    for (std::size_t l = 0; l < net.layers().size(); ++l) {
      auto& layer = net.layers()[l];
      for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
        probe(layer.weights.data()[i], grads[l].weights.data()[i]);
      }
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) probe(layer.bias(i), grads[l].bias(i));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-4 && elapsed < 10.0,
          fmt("%.0f nets, max relative error %.3g; %.2f s", nets, worst, elapsed)};
}

Outcome softmax_normalization() {
  std::mt19937_64 rng(202);
  std::normal_distribution<double> normal(0.0, 3.0);
  double worst = 0.0;
  for (int pass = 0; pass < 1000; ++pass) {
    const auto layout = random_layout(rng, 3, 40, 6);
    TrainedAutoencoder net(NetworkShape::for_layout(layout), rng());
    // Every other net gets inflated weights to push the logits apart.
    for (auto& layer : net.layers()) layer.weights *= 1.0 + 4.0 * (rng() % 2);
    std::vector<double> x(layout_width(layout));
    for (auto& v : x) v = normal(rng);
    auto out = net.forward(x);
    for (const auto& slots : layout) {
      double sum = 0.0;
      for (std::size_t k = 0; k < slots.count; ++k) sum += out[slots.offset + k];
      worst = std::max(worst, std::abs(sum - 1.0));
    }
  }
  return {worst <= 1e-9, fmt("1000 passes, max |group sum - 1| = %.3g", worst)};
}

Outcome oracle_equivalence() {
  auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(303);
  int agree = 0;
  std::size_t total_rules = 0;
  for (int trial = 0; trial < 50; ++trial) {
    auto t = testing::random_table(rng, 8, 4, 60, 2);
    const double min_support = std::uniform_real_distribution<double>(0.02, 0.3)(rng);
    const double min_conf = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
    const auto a = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    auto mined = rules_from_itemsets(mine_frequent(t, min_support), t, min_conf, a);
    auto brute = brute_force_implications(t, min_conf, a, min_support);
    total_rules += brute.size();
    // Equal vectors of ScoredRule compare rules and every metric exactly.
    agree += mined == brute;
  }
  const double elapsed = seconds_since(start);
  return {agree == 50 && elapsed < 30.0,
          fmt("%.0f/50 tables identical (%.0f rules); %.2f s", agree,
              static_cast<double>(total_rules), elapsed)};
}

Outcome metric_oracles() {
  std::mt19937_64 rng(404);
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    auto t = testing::random_table(rng, 7, 4, 50, 2);
    auto rule = testing::random_rule(rng, t);
    std::vector<Rule> rules{rule, testing::random_rule(rng, t)};
    exact += support(rule, t) == testing::oracle_support(t, rule) &&
             confidence(rule, t) == testing::oracle_confidence(t, rule) &&
             rule_coverage(rule, t) == testing::oracle_coverage(t, rule) &&
             zhang(rule, t) == testing::oracle_zhang(t, rule) &&
             data_coverage(rules, t) == testing::oracle_data_coverage(t, rules);
  }
  using testing::make_table;
  const Rule r{{{0, 0}}, {1, 0}};
  const double positive = zhang(r, make_table({2, 2}, {{0, 0}, {0, 0}, {1, 1}, {1, 1}, {1, 0}}));
  const double zero = zhang(r, make_table({2, 2}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  const double negative = zhang(r, make_table({2, 2}, {{0, 1}, {0, 1}, {0, 0}, {1, 0}, {1, 0}}));
  const bool signs = positive > 0 && zero == 0 && negative < 0;
  return {exact == 100 && signs, fmt("%.0f/100 exact; zhang fixtures %+.3f %+.3f", exact,
                                     positive, negative) +
                                     fmt(" %+.3f", zero)};
}

struct PlantedFixture {
  TransactionTable table;
  std::vector<Rule> planted;
  TrainedAutoencoder net;
  double train_seconds = 0.0;
};

constexpr std::uint64_t kPlantedSeed = 1;

PlantedFixture planted_fixture() {
  SyntheticSpec spec;
  spec.features = 10;
  spec.classes = 4;
  spec.rows = 5000;
  spec.noise_rate = 0.2;
  spec.seed = kPlantedSeed;
  const std::vector<std::string> plants{"0=0->1=2", "2=2&3=3->4=0", "5=1->6=3"};
  for (const auto& p : plants) spec.planted.push_back(parse_planted_rule(p));
  auto data = generate_synthetic(spec);
  auto table = build_transactions(aggregate(data.series, spec.step_seconds), std::nullopt);

  std::vector<Rule> planted;
  for (const auto& p : spec.planted) {
    auto item = [&](const Item& i) {
      const auto f = *table.find_feature(sensor_name(i.feature, spec.features));
      return Item{f, *table.find_class(f, class_name(i.cls, spec.classes))};
    };
    Rule rule;
    for (const auto& i : p.antecedent) rule.antecedent.push_back(item(i));
    std::sort(rule.antecedent.begin(), rule.antecedent.end());
    rule.consequent = item(p.consequent);
    planted.push_back(rule);
  }

  auto start = std::chrono::steady_clock::now();
  auto matrix = one_hot_encode(table);
  TrainingConfig config;  // lr 5e-3, 5 epochs, weight decay 2e-8, noise 0.5
  config.batch_size = 16;
  config.seed = kPlantedSeed;
  auto net = train(matrix, NetworkShape::for_layout(matrix.layout), config);
  return {std::move(table), std::move(planted), std::move(net), seconds_since(start)};
}

Outcome planted_recovery(const PlantedFixture& fx) {
  auto start = std::chrono::steady_clock::now();
  ExtractionConfig config;
  config.similarity_threshold = 0.8;
  config.max_antecedents = 2;
  auto rules = extract_rules(fx.net, fx.table.layout(), config).rules;
  const double elapsed = fx.train_seconds + seconds_since(start);
  int found = 0;
  double weakest = 1.0;
  for (const auto& p : fx.planted) {
    if (std::find(rules.begin(), rules.end(), p) != rules.end()) ++found;
    weakest = std::min(weakest, confidence(p, fx.table));
  }
  const double coverage = data_coverage(rules, fx.table);
  return {found == 3 && weakest >= 0.95 && coverage == 1.0 && elapsed < 120.0,
          fmt("%.0f/3 planted rules, min confidence %.3f, data coverage %.4f", found, weakest,
              coverage) +
              fmt(" (%.0f rules, seed %.0f", static_cast<double>(rules.size()),
                  static_cast<double>(kPlantedSeed)) +
              fmt(", tau 0.8); %.2f s", elapsed)};
}

Outcome threshold_monotonicity(const PlantedFixture& fx) {
  std::vector<std::set<Rule>> sets;
  std::string counts;
  for (double tau : {0.5, 0.6, 0.7, 0.8, 0.9}) {
    ExtractionConfig config;
    config.similarity_threshold = tau;
    auto rules = extract_rules(fx.net, fx.table.layout(), config).rules;
    sets.emplace_back(rules.begin(), rules.end());
    counts += (counts.empty() ? "" : " >= ") + std::to_string(rules.size());
  }
  bool chain = true;
  for (std::size_t i = 1; i < sets.size(); ++i) {
    chain = chain && std::includes(sets[i - 1].begin(), sets[i - 1].end(), sets[i].begin(),
                                   sets[i].end());
  }
  return {chain, "rule counts " + counts};
}

Outcome test_vector_accounting() {
  std::mt19937_64 rng(808);
  int matches = 0, cases = 0;
  for (int trial = 0; trial < 8; ++trial) {
    const auto layout = random_layout(rng, 6, 24, 5);
    TrainedAutoencoder net(NetworkShape::for_layout(layout), rng());
    for (std::size_t a = 1; a <= 3; ++a) {
      CountingModel counter(net);
      ExtractionConfig config;
      config.max_antecedents = a;
      auto result = extract_rules(counter, layout, config);
      const auto expected = count_test_vectors(layout, a);
      ++cases;
      matches += counter.rows == expected && result.forward_passes == expected;
    }
  }
  return {matches == cases, fmt("%.0f/%.0f (layout, a) cases exact", matches, cases)};
}

struct SideMetrics {
  QualityAggregate aerial;
  QualityAggregate exhaustive;
};

SideMetrics enrichment_run(const SyntheticData& data, bool enrich) {
  auto series = aggregate(data.series, 60);
  std::optional<Enrichment> enrichment;
  if (enrich) enrichment = Enrichment{&data.graph.graph, &data.graph.binding, {0, false}};
  auto table = build_transactions(series, enrichment);
  auto matrix = one_hot_encode(table);
  TrainingConfig config;
  config.batch_size = 16;
  config.seed = 3;
  auto net = train(matrix, NetworkShape::for_layout(matrix.layout), config);
  auto rules = extract_rules(net, matrix.layout, ExtractionConfig{}).rules;
  auto aerial_report = evaluate_rules(rules, table);

  const double threshold = coupled_support_threshold(rules, table);
  auto scored = rules_from_itemsets(mine_frequent(table, threshold, 3), table, 0.8, 2);
  std::vector<Rule> baseline;
  for (const auto& s : scored) baseline.push_back(s.rule);
  return {aerial_report.aggregate, evaluate_rules(baseline, table).aggregate};
}

Outcome enrichment_direction() {
  SyntheticSpec spec;
  spec.features = 6;
  spec.classes = 4;
  spec.rows = 1000;
  spec.noise_rate = 0.3;
  spec.seed = 3;
  spec.planted = {parse_planted_rule("0=0->1=2")};
  auto data = generate_synthetic(spec);
  auto plain = enrichment_run(data, false);
  auto rich = enrichment_run(data, true);
  const bool ok = rich.aerial.mean_support >= plain.aerial.mean_support &&
                  rich.aerial.mean_coverage >= plain.aerial.mean_coverage &&
                  rich.exhaustive.mean_support >= plain.exhaustive.mean_support &&
                  rich.exhaustive.mean_coverage >= plain.exhaustive.mean_coverage;
  return {ok, fmt("aerial support %.3f -> %.3f, coverage %.3f", plain.aerial.mean_support,
                  rich.aerial.mean_support, plain.aerial.mean_coverage) +
                  fmt(" -> %.3f; exhaustive support %.3f -> %.3f", rich.aerial.mean_coverage,
                      plain.exhaustive.mean_support, rich.exhaustive.mean_support) +
                  fmt(", coverage %.3f -> %.3f", plain.exhaustive.mean_coverage,
                      rich.exhaustive.mean_coverage)};
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "aerial");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome determinism() {
  std::string outputs[2];
  for (auto& output : outputs) {
    testing::ScratchDir dir("determinism");
    const auto out = dir.str();
    const auto csv = dir.file("sensors.csv");
    const bool ok =
        run({"synth", "--out", out, "--features", "8", "--classes", "3", "--rows", "1500",
             "--noise-rate", "0.4", "--plant", "0=0->1=2", "--plant", "3=1&4=2->5=0", "--seed",
             "42"}) == 0 &&
        run({"train", "--csv", csv, "--out", out, "--seed", "42"}) == 0 &&
        run({"mine", "--csv", csv, "--out", out, "--seed", "42", "--similarity-threshold",
             "0.7"}) == 0;
    if (!ok) return {false, "pipeline run failed"};
    output = slurp(dir.file("rules.json"));
  }
  const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
  return {same, fmt("rules.json %.0f bytes, identical across runs",
                    static_cast<double>(outputs[0].size()))};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& check) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    failures += !outcome.pass;
    std::printf("criterion %2d %-28s %s  %s\n", id, name, outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "worked-example", worked_example);
  report(2, "gradient-correctness", gradient_check);
  report(3, "softmax-normalization", softmax_normalization);
  report(4, "exhaustive-oracle", oracle_equivalence);
  report(5, "metric-oracles", metric_oracles);

  std::optional<PlantedFixture> fixture;
  try {
    fixture = planted_fixture();
  } catch (const std::exception& e) {
    std::printf("planted fixture failed: %s\n", e.what());
  }
  auto with_fixture = [&](Outcome (*check)(const PlantedFixture&)) {
    return [&fixture, check]() -> Outcome {
      if (!fixture) return {false, "no planted fixture"};
      return check(*fixture);
    };
  };
  report(6, "planted-rule-recovery", with_fixture(planted_recovery));
  report(7, "threshold-monotonicity", with_fixture(threshold_monotonicity));
  report(8, "test-vector-accounting", test_vector_accounting);
  report(9, "enrichment-direction", enrichment_direction);
  report(10, "determinism", determinism);

  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
