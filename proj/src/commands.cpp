#include "aerial/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <queue>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "aerial/baseline.hpp"
#include "aerial/error.hpp"
#include "aerial/quality.hpp"
#include "aerial/rules_io.hpp"

namespace aerial {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    fail(ErrorKind::Usage, "cannot create output directory '" + dir + "': " + ec.message());
  }
}

std::string in_dir(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string model_path_for(const RunConfig& config) {
  return config.model_path.empty() ? in_dir(config.out_dir, "model.json") : config.model_path;
}

std::string manifest_path_for(const std::string& model_path) {
  fs::path p(model_path);
  return (p.parent_path() / (p.stem().string() + ".manifest.json")).string();
}

json pipeline_to_json(const PipelineOptions& p) {
  return {{"csv", p.csv_path},
          {"graph", p.graph_path},
          {"window-seconds", p.window_seconds},
          {"intervals", p.intervals},
          {"enrich", p.enrich},
          {"depth", p.depth},
          {"edge-properties", p.edge_properties},
          {"sample-sensors", p.sample_sensors}};
}

std::string dump(const json& document) { return document.dump(2) + "\n"; }

void write_report(const RuleQualityReport& report, const TransactionTable& table,
                  const ReportDocument& meta, const std::string& rules_path,
                  const std::string& report_path, const std::string& text_path) {
  write_text_file(rules_path, dump(rules_to_json(report.per_rule, table, true)));
  write_text_file(report_path, dump(report_to_json(report, table, meta)));

  std::ostringstream text;
  const std::pair<std::string, QualityAggregate> row{meta.label, report.aggregate};
  text << format_quality_table(std::span(&row, 1)) << "\n";
  for (const auto& entry : report.per_rule) {
    char metrics[128];
    std::snprintf(metrics, sizeof(metrics), "supp=%.4f conf=%.4f cov=%.4f zhang=%.4f",
                  entry.metrics.support, entry.metrics.confidence, entry.metrics.rule_coverage,
                  entry.metrics.zhang);
    text << render_rule(table, entry.rule) << "  [" << metrics << "]\n";
  }
  write_text_file(text_path, text.str());
}

}  // namespace

std::vector<std::string> sample_sensors_by_traversal(const GraphDocument& graph,
                                                     const std::vector<std::string>& sensors,
                                                     std::size_t count, std::uint64_t seed) {
  if (count == 0 || count >= sensors.size()) {
    return sensors;
  }
  std::map<std::string, std::vector<std::string>> at_node;
  for (const auto& sensor : sensors) {
    auto it = graph.binding.find(sensor);
    if (it == graph.binding.end()) {
      fail(ErrorKind::Integrity, "sensor '" + sensor + "' is not bound to a graph node");
    }
    at_node[it->second].push_back(sensor);
  }
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& [id, edge] : graph.graph.edges) {
    adjacency[edge.from].push_back(edge.to);
    adjacency[edge.to].push_back(edge.from);
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, sensors.size() - 1);
  const auto& start = graph.binding.at(sensors[pick(rng)]);

  std::vector<std::string> chosen;
  std::set<std::string> visited{start};
  std::queue<std::string> frontier;
  frontier.push(start);
  while (!frontier.empty() && chosen.size() < count) {
    auto node = frontier.front();
    frontier.pop();
    if (auto it = at_node.find(node); it != at_node.end()) {
      for (const auto& sensor : it->second) {
        if (chosen.size() < count) {
          chosen.push_back(sensor);
        }
      }
    }
    for (const auto& next : adjacency[node]) {
      if (visited.insert(next).second) {
        frontier.push(next);
      }
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

PreparedTable prepare_table(const PipelineOptions& options, std::uint64_t seed) {
  if (options.csv_path.empty()) {
    fail(ErrorKind::Usage, "a sensor CSV is required (--csv)");
  }
  if ((options.enrich || options.sample_sensors > 0) && options.graph_path.empty()) {
    fail(ErrorKind::Usage, "--enrich and --sample-sensors require --graph");
  }
  if (options.intervals < 1) {
    fail(ErrorKind::Usage, "--intervals must be at least 1");
  }
  auto series = aggregate(read_sensor_csv_file(options.csv_path), options.window_seconds);

  std::optional<GraphDocument> graph;
  if (!options.graph_path.empty()) {
    graph = load_graph_file(options.graph_path);
  }

  std::vector<std::string> sensors;
  for (const auto& [sensor, readings] : series.sensors()) {
    sensors.push_back(sensor);
  }
  if (options.sample_sensors > 0) {
    sensors = sample_sensors_by_traversal(*graph, sensors, options.sample_sensors, seed);
    series = series.restricted_to(std::set<std::string>(sensors.begin(), sensors.end()));
  }

  std::optional<Enrichment> enrichment;
  if (options.enrich) {
    enrichment = Enrichment{&graph->graph, &graph->binding,
                            EnrichmentOptions{options.depth, options.edge_properties}};
  }
  return {build_transactions(series, enrichment, options.intervals), sensors};
}

json feature_dictionary(const TransactionTable& table) {
  json features = json::array();
  for (const auto& feature : table.features) {
    features.push_back(
        {{"name", feature.name},
         {"kind", feature.kind == FeatureKind::NumericBinned ? "numeric-binned" : "categorical"},
         {"class_values", feature.class_values}});
  }
  return features;
}

SynthOutput cmd_synth(const SyntheticSpec& spec, const std::string& out_dir) {
  auto data = generate_synthetic(spec);
  ensure_dir(out_dir);
  SynthOutput out{in_dir(out_dir, "sensors.csv"), in_dir(out_dir, "graph.json"),
                  data.measured_confidence};
  std::ostringstream csv;
  write_sensor_csv(csv, data.series);
  write_text_file(out.csv_path, csv.str());
  write_text_file(out.graph_path, save_graph(data.graph));

  json planted = json::array();
  for (std::size_t i = 0; i < spec.planted.size(); ++i) {
    const auto& rule = spec.planted[i];
    json antecedent = json::array();
    for (const auto& item : rule.antecedent) {
      antecedent.push_back({{"feature", sensor_name(item.feature, spec.features)},
                            {"class", class_name(item.cls, spec.classes)}});
    }
    planted.push_back({{"antecedent", antecedent},
                       {"consequent",
                        {{"feature", sensor_name(rule.consequent.feature, spec.features)},
                         {"class", class_name(rule.consequent.cls, spec.classes)}}},
                       {"target_confidence", rule.confidence},
                       {"measured_confidence", data.measured_confidence[i]}});
  }
  json summary = {{"features", spec.features}, {"classes", spec.classes},
                  {"rows", spec.rows},         {"noise_rate", spec.noise_rate},
                  {"seed", spec.seed},         {"planted", planted}};
  write_text_file(in_dir(out_dir, "synth.json"), dump(summary));
  return out;
}

TrainOutput cmd_train(const RunConfig& config) {
  Stopwatch total;
  auto prepared = prepare_table(config.pipeline, config.seed);
  const double prepare_seconds = total.seconds();

  auto matrix = one_hot_encode(prepared.table);
  auto shape = config.encoder_dims ? NetworkShape::with_encoder(matrix.layout, *config.encoder_dims)
                                   : NetworkShape::for_layout(matrix.layout);
  auto training = config.training;
  training.seed = config.seed;
  Stopwatch train_clock;
  auto net = train(matrix, shape, training);
  const double train_seconds = train_clock.seconds();

  ensure_dir(config.out_dir);
  TrainOutput out;
  out.model_path = model_path_for(config);
  out.manifest_path = manifest_path_for(out.model_path);
  out.final_loss = net.final_loss();
  net.save(out.model_path);

  json bin_edges = json::object();
  for (const auto& [name, edges] : prepared.table.bin_edges) {
    bin_edges[name] = edges;
  }
  json manifest = {
      {"schema", "aerial-manifest/1"},
      {"model", fs::path(out.model_path).filename().string()},
      {"features", feature_dictionary(prepared.table)},
      {"bin_edges", bin_edges},
      {"sensors", prepared.sensors},
      {"rows", prepared.table.row_count()},
      {"pipeline", pipeline_to_json(config.pipeline)},
      {"training",
       {{"learning-rate", training.learning_rate},
        {"epochs", training.epochs},
        {"weight-decay", training.weight_decay},
        {"noise-factor", training.noise_factor},
        {"batch-size", training.batch_size},
        {"encoder-dims", shape.encoder_dims}}},
      {"seed", config.seed},
      {"final_loss", net.final_loss()},
      {"epoch_losses", net.epoch_losses()},
      {"timings_seconds", {{"prepare", prepare_seconds}, {"train", train_seconds}}}};
  write_text_file(out.manifest_path, dump(manifest));
  return out;
}

MineOutput cmd_mine(const RunConfig& config) {
  const auto model_path = model_path_for(config);
  auto net = TrainedAutoencoder::load(model_path);
  const auto manifest = read_json_file(manifest_path_for(model_path));

  auto prepared = prepare_table(config.pipeline, config.seed);
  const auto& table = prepared.table;
  if (!manifest.contains("features") || manifest.at("features") != feature_dictionary(table)) {
    fail(ErrorKind::Data, "model manifest feature dictionary does not match the rebuilt table");
  }

  auto extraction = config.extraction;
  if (!config.markable.empty()) {
    extraction.markable_features.emplace();
    for (const auto& name : config.markable) {
      auto f = table.find_feature(name);
      if (!f) {
        fail(ErrorKind::Usage, "--markable names unknown feature '" + name + "'");
      }
      extraction.markable_features->insert(*f);
    }
  }

  Stopwatch clock;
  auto extracted = extract_rules(net, table.layout(), extraction);
  const double extract_seconds = clock.seconds();
  auto report = evaluate_rules(extracted.rules, table);

  ReportDocument meta;
  meta.label = "aerial";
  meta.timings_seconds["extract"] = extract_seconds;
  if (manifest.contains("timings_seconds") && manifest.at("timings_seconds").contains("train")) {
    meta.timings_seconds["train"] = manifest.at("timings_seconds").at("train").get<double>();
  }
  meta.parameters["similarity_threshold"] = extraction.similarity_threshold;
  meta.parameters["max_antecedents"] = static_cast<double>(extraction.max_antecedents);
  meta.parameters["forward_passes"] = static_cast<double>(extracted.forward_passes);
  meta.parameters["rows"] = static_cast<double>(table.row_count());

  ensure_dir(config.out_dir);
  MineOutput out{in_dir(config.out_dir, "rules.json"), in_dir(config.out_dir, "report.json"),
                 in_dir(config.out_dir, "report.txt"), report.aggregate.rule_count,
                 report.aggregate.data_coverage};
  write_report(report, table, meta, out.rules_path, out.report_path, out.text_path);
  return out;
}

MineOutput cmd_baseline(const RunConfig& config) {
  auto prepared = prepare_table(config.pipeline, config.seed);
  const auto& table = prepared.table;

  double min_support = 0.0;
  if (config.coupled) {
    if (config.aerial_rules_path.empty()) {
      fail(ErrorKind::Usage, "--coupled requires --aerial-rules");
    }
    auto aerial_rules = rules_from_json(read_json_file(config.aerial_rules_path), table);
    if (aerial_rules.empty()) {
      fail(ErrorKind::Data, "--coupled: the Aerial rules file contains no rules");
    }
    min_support = coupled_support_threshold(aerial_rules, table);
  } else if (config.min_support) {
    min_support = *config.min_support;
  } else {
    fail(ErrorKind::Usage, "baseline needs --min-support or --coupled");
  }
  if (!(min_support > 0.0 && min_support <= 1.0)) {
    fail(ErrorKind::Usage, "min support must be in (0, 1]");
  }
  if (!(config.min_confidence >= 0.0 && config.min_confidence <= 1.0)) {
    fail(ErrorKind::Usage, "min confidence must be in [0, 1]");
  }
  const auto max_antecedents = config.extraction.max_antecedents;

  Stopwatch clock;
  auto itemsets = mine_frequent(table, min_support, max_antecedents + 1);
  auto scored = rules_from_itemsets(itemsets, table, config.min_confidence, max_antecedents);
  const double mine_seconds = clock.seconds();

  std::vector<Rule> rules;
  rules.reserve(scored.size());
  for (auto& entry : scored) {
    rules.push_back(entry.rule);
  }
  auto report = evaluate_rules(rules, table);

  ReportDocument meta;
  meta.label = "exhaustive";
  meta.timings_seconds["mine"] = mine_seconds;
  meta.parameters["min_support"] = min_support;
  meta.parameters["min_confidence"] = config.min_confidence;
  meta.parameters["max_antecedents"] = static_cast<double>(max_antecedents);
  meta.parameters["frequent_itemsets"] = static_cast<double>(itemsets.size());
  meta.parameters["rows"] = static_cast<double>(table.row_count());

  ensure_dir(config.out_dir);
  MineOutput out{in_dir(config.out_dir, "baseline_rules.json"),
                 in_dir(config.out_dir, "baseline_report.json"),
                 in_dir(config.out_dir, "baseline_report.txt"), report.aggregate.rule_count,
                 report.aggregate.data_coverage};
  write_report(report, table, meta, out.rules_path, out.report_path, out.text_path);
  return out;
}

namespace {

struct Averaged {
  QualityAggregate aggregate;
  double rule_count = 0.0;
  std::map<std::string, double> timings;
};

Averaged macro_average(const std::vector<std::string>& paths) {
  if (paths.empty()) {
    fail(ErrorKind::Usage, "compare needs at least one report per side");
  }
  Averaged avg;
  std::map<std::string, std::size_t> timing_counts;
  for (const auto& path : paths) {
    auto summary = report_summary_from_json(read_json_file(path));
    const auto& a = summary.aggregate;
    avg.rule_count += static_cast<double>(a.rule_count);
    avg.aggregate.mean_support += a.mean_support;
    avg.aggregate.mean_confidence += a.mean_confidence;
    avg.aggregate.mean_coverage += a.mean_coverage;
    avg.aggregate.mean_zhang += a.mean_zhang;
    avg.aggregate.data_coverage += a.data_coverage;
    for (const auto& [stage, seconds] : summary.timings_seconds) {
      avg.timings[stage] += seconds;
      ++timing_counts[stage];
    }
  }
  const auto n = static_cast<double>(paths.size());
  avg.rule_count /= n;
  avg.aggregate.mean_support /= n;
  avg.aggregate.mean_confidence /= n;
  avg.aggregate.mean_coverage /= n;
  avg.aggregate.mean_zhang /= n;
  avg.aggregate.data_coverage /= n;
  for (auto& [stage, seconds] : avg.timings) {
    seconds /= static_cast<double>(timing_counts[stage]);
  }
  return avg;
}

}  // namespace

std::string cmd_compare(const std::vector<std::string>& left, const std::vector<std::string>& right,
                        const std::string& left_label, const std::string& right_label,
                        const std::string& out_dir) {
  const auto a = macro_average(left);
  const auto b = macro_average(right);

  struct Row {
    std::string name;
    double left;
    double right;
  };
  std::vector<Row> rows = {
      {"# Rules", a.rule_count, b.rule_count},
      {"Support", a.aggregate.mean_support, b.aggregate.mean_support},
      {"Confidence", a.aggregate.mean_confidence, b.aggregate.mean_confidence},
      {"Coverage", a.aggregate.mean_coverage, b.aggregate.mean_coverage},
      {"Data Cov.", a.aggregate.data_coverage, b.aggregate.data_coverage},
      {"Zhang", a.aggregate.mean_zhang, b.aggregate.mean_zhang},
  };
  std::set<std::string> stages;
  for (const auto& [stage, s] : a.timings) stages.insert(stage);
  for (const auto& [stage, s] : b.timings) stages.insert(stage);
  for (const auto& stage : stages) {
    auto get = [&](const Averaged& side) {
      auto it = side.timings.find(stage);
      return it == side.timings.end() ? 0.0 : it->second;
    };
    rows.push_back({"Time " + stage + " (s)", get(a), get(b)});
  }

  const auto width = static_cast<int>(std::max<std::size_t>(
      {12, left_label.size(), right_label.size()}));
  std::ostringstream text;
  char line[256];
  std::snprintf(line, sizeof(line), "%-18s %*s %*s %*s\n", "Metric", width, left_label.c_str(),
                width, right_label.c_str(), width, "delta");
  text << line;
  json document = {{"left", {{"label", left_label}, {"reports", left}}},
                   {"right", {{"label", right_label}, {"reports", right}}},
                   {"rows", json::array()}};
  for (const auto& row : rows) {
    std::snprintf(line, sizeof(line), "%-18s %*.4f %*.4f %*.4f\n", row.name.c_str(), width,
                  row.left, width, row.right, width, row.right - row.left);
    text << line;
    document["rows"].push_back({{"metric", row.name},
                                {"left", row.left},
                                {"right", row.right},
                                {"delta", row.right - row.left}});
  }
  if (!out_dir.empty()) {
    ensure_dir(out_dir);
    write_text_file(in_dir(out_dir, "comparison.txt"), text.str());
    write_text_file(in_dir(out_dir, "comparison.json"), dump(document));
  }
  return text.str();
}

// --- command line ----------------------------------------------------------------

namespace {

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
      return 2;
    case ErrorKind::Parse:
    case ErrorKind::Integrity:
    case ErrorKind::Data:
      return 3;
    case ErrorKind::Internal:
      return 4;
  }
  return 4;
}

std::string one_line(std::string text) {
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

/// Turns a JSON config object into flag tokens, skipping flags given on the command line.
std::vector<std::string> config_tokens(const json& config, const std::vector<std::string>& argv) {
  auto given = [&](const std::string& flag) {
    return std::any_of(argv.begin(), argv.end(), [&](const std::string& token) {
      return token == flag || token.rfind(flag + "=", 0) == 0;
    });
  };
  auto scalar = [](const json& value) {
    if (value.is_string()) {
      return value.get<std::string>();
    }
    return value.dump();
  };
  if (!config.is_object()) {
    fail(ErrorKind::Usage, "--config must contain a JSON object");
  }
  std::vector<std::string> tokens;
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) {
      continue;
    }
    if (value.is_boolean()) {
      if (value.get<bool>()) {
        tokens.push_back(flag);
      }
    } else if (value.is_array()) {
      tokens.push_back(flag);
      for (const auto& entry : value) {
        tokens.push_back(scalar(entry));
      }
    } else if (!value.is_null()) {
      tokens.push_back(flag);
      tokens.push_back(scalar(value));
    }
  }
  return tokens;
}

void add_pipeline_options(CLI::App* cmd, RunConfig& config) {
  auto& p = config.pipeline;
  cmd->add_option("--csv", p.csv_path, "Sensor CSV (timestamp,sensor_id,value)");
  cmd->add_option("--graph", p.graph_path, "Property graph JSON with bindings");
  cmd->add_option("--window-seconds", p.window_seconds, "Aggregation window")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--intervals", p.intervals, "Equal-frequency intervals")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--enrich", p.enrich, "Add graph semantics to each transaction");
  cmd->add_option("--depth", p.depth, "Neighbor depth for enrichment");
  cmd->add_flag("--edge-properties", p.edge_properties, "Include traversed edge properties");
  cmd->add_option("--sample-sensors", p.sample_sensors,
                  "Sample N sensors by graph traversal (0 = all)");
}

void add_common_options(CLI::App* cmd, RunConfig& config, std::string& config_path) {
  cmd->add_option("--config", config_path, "JSON config; flags override it");
  cmd->add_option("--seed", config.seed, "Random seed");
  cmd->add_option("--out", config.out_dir, "Output directory");
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Semantic association rule mining with a denoising autoencoder"};
  app.require_subcommand(1);

  RunConfig config;
  std::string config_path;
  SyntheticSpec synth;
  std::vector<std::string> planted;
  std::vector<std::string> left_reports;
  std::vector<std::string> right_reports;
  std::string left_label = "left";
  std::string right_label = "right";
  std::vector<std::size_t> encoder_dims;

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset with planted rules");
  add_common_options(synth_cmd, config, config_path);
  synth_cmd->add_option("--features", synth.features, "Sensor count");
  synth_cmd->add_option("--classes", synth.classes, "Classes per sensor");
  synth_cmd->add_option("--rows", synth.rows, "Transactions");
  synth_cmd->add_option("--plant", planted, "Planted rule, e.g. 0=1&2=0->1=2@0.9");
  synth_cmd->add_option("--noise-rate", synth.noise_rate, "Background randomness in [0,1]");
  synth_cmd->add_option("--step-seconds", synth.step_seconds, "Seconds between transactions");

  auto* train_cmd = app.add_subcommand("train", "Train the denoising autoencoder");
  add_common_options(train_cmd, config, config_path);
  add_pipeline_options(train_cmd, config);
  train_cmd->add_option("--model", config.model_path, "Model output path (default <out>/model.json)");
  train_cmd->add_option("--learning-rate", config.training.learning_rate);
  train_cmd->add_option("--epochs", config.training.epochs);
  train_cmd->add_option("--weight-decay", config.training.weight_decay);
  train_cmd->add_option("--noise-factor", config.training.noise_factor);
  train_cmd->add_option("--batch-size", config.training.batch_size);
  train_cmd->add_option("--encoder-dims", encoder_dims, "Three encoder widths")->expected(3);

  auto* mine_cmd = app.add_subcommand("mine", "Extract rules from a trained model");
  add_common_options(mine_cmd, config, config_path);
  add_pipeline_options(mine_cmd, config);
  mine_cmd->add_option("--model", config.model_path, "Model path (default <out>/model.json)");
  mine_cmd->add_option("--similarity-threshold", config.extraction.similarity_threshold);
  mine_cmd->add_option("--max-antecedents", config.extraction.max_antecedents);
  mine_cmd->add_option("--markable", config.markable, "Only mark these features");

  auto* baseline_cmd = app.add_subcommand("baseline", "Exhaustive FP-growth baseline");
  add_common_options(baseline_cmd, config, config_path);
  add_pipeline_options(baseline_cmd, config);
  baseline_cmd->add_option("--min-support", config.min_support);
  baseline_cmd->add_option("--min-confidence", config.min_confidence);
  baseline_cmd->add_option("--max-antecedents", config.extraction.max_antecedents);
  baseline_cmd->add_flag("--coupled", config.coupled,
                         "min support = half the mean support of --aerial-rules");
  baseline_cmd->add_option("--aerial-rules", config.aerial_rules_path);

  auto* compare_cmd = app.add_subcommand("compare", "Compare two sets of reports");
  add_common_options(compare_cmd, config, config_path);
  compare_cmd->add_option("--left", left_reports, "Reports averaged into the left column")
      ->required();
  compare_cmd->add_option("--right", right_reports, "Reports averaged into the right column")
      ->required();
  compare_cmd->add_option("--left-label", left_label);
  compare_cmd->add_option("--right-label", right_label);

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    // Splice config-file values in right after the subcommand name.
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::string path;
      if (args[i] == "--config" && i + 1 < args.size()) {
        path = args[i + 1];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      }
      if (!path.empty() && !args.empty()) {
        auto tokens = config_tokens(read_json_file(path), args);
        args.insert(args.begin() + 1, tokens.begin(), tokens.end());
        break;
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error[usage]: " << one_line(e.what()) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  }

  try {
    if (!encoder_dims.empty()) {
      config.encoder_dims = std::array<std::size_t, 3>{encoder_dims[0], encoder_dims[1],
                                                       encoder_dims[2]};
    }
    if (synth_cmd->parsed()) {
      synth.seed = config.seed;
      for (const auto& text : planted) {
        synth.planted.push_back(parse_planted_rule(text));
      }
      auto out = cmd_synth(synth, config.out_dir);
      std::cout << "wrote " << out.csv_path << " and " << out.graph_path << "\n";
    } else if (train_cmd->parsed()) {
      auto out = cmd_train(config);
      std::cout << "wrote " << out.model_path << " (final loss " << out.final_loss << ")\n";
    } else if (mine_cmd->parsed()) {
      auto out = cmd_mine(config);
      std::cout << "wrote " << out.rules_path << " (" << out.rule_count << " rules, data coverage "
                << out.data_coverage << ")\n";
    } else if (baseline_cmd->parsed()) {
      auto out = cmd_baseline(config);
      std::cout << "wrote " << out.rules_path << " (" << out.rule_count << " rules, data coverage "
                << out.data_coverage << ")\n";
    } else if (compare_cmd->parsed()) {
      std::cout << cmd_compare(left_reports, right_reports, left_label, right_label,
                               config.out_dir);
    }
  } catch (const Error& e) {
    std::cerr << "error[" << to_string(e.kind()) << "]: " << one_line(e.what()) << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << one_line(e.what()) << "\n";
    return 4;
  }
  return 0;
}

}  // namespace aerial
