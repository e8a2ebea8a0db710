#pragma once

// End-to-end pipeline stages behind the `aerial` command line tool.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aerial/autonet.hpp"
#include "aerial/extract.hpp"
#include "aerial/graph.hpp"
#include "aerial/synth.hpp"
#include "aerial/transact.hpp"
#include "json.hpp"

namespace aerial {

struct PipelineOptions {
  std::string csv_path;
  std::string graph_path;
  std::int64_t window_seconds = 60;
  std::size_t intervals = kDefaultIntervals;
  bool enrich = false;
  std::size_t depth = 1;
  bool edge_properties = false;
  /// 0 keeps every sensor; otherwise sample this many by graph traversal.
  std::size_t sample_sensors = 0;
};

struct RunConfig {
  PipelineOptions pipeline;
  TrainingConfig training;
  std::optional<std::array<std::size_t, 3>> encoder_dims;
  ExtractionConfig extraction;
  std::vector<std::string> markable;  // feature names
  std::optional<double> min_support;
  bool coupled = false;
  std::string aerial_rules_path;
  double min_confidence = 0.8;
  std::string model_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

struct PreparedTable {
  TransactionTable table;
  std::vector<std::string> sensors;
};

/// aggregate -> (sample) -> discretize -> (enrich). Deterministic in `seed`.
PreparedTable prepare_table(const PipelineOptions& options, std::uint64_t seed);

/// Sensors reached by breadth-first traversal from a randomly chosen bound node.
std::vector<std::string> sample_sensors_by_traversal(const GraphDocument& graph,
                                                     const std::vector<std::string>& sensors,
                                                     std::size_t count, std::uint64_t seed);

nlohmann::json feature_dictionary(const TransactionTable& table);

struct SynthOutput {
  std::string csv_path;
  std::string graph_path;
  std::vector<double> measured_confidence;
};
SynthOutput cmd_synth(const SyntheticSpec& spec, const std::string& out_dir);

struct TrainOutput {
  std::string model_path;
  std::string manifest_path;
  double final_loss = 0.0;
};
TrainOutput cmd_train(const RunConfig& config);

struct MineOutput {
  std::string rules_path;
  std::string report_path;
  std::string text_path;
  std::size_t rule_count = 0;
  double data_coverage = 0.0;
};
MineOutput cmd_mine(const RunConfig& config);
MineOutput cmd_baseline(const RunConfig& config);

/// Macro-averages each side's reports and prints them next to each other with deltas.
std::string cmd_compare(const std::vector<std::string>& left, const std::vector<std::string>& right,
                        const std::string& left_label, const std::string& right_label,
                        const std::string& out_dir);

/// Exit codes: 0 ok, 2 usage, 3 data error, 4 internal.
int run_cli(int argc, char** argv);

}  // namespace aerial
