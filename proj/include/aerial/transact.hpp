#pragma once

// Sensor readings -> aggregated windows -> discretized (optionally enriched)
// transactions -> one-hot matrix.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "aerial/graph.hpp"
#include "aerial/layout.hpp"

namespace aerial {

using SensorValue = PropertyValue;

/// s: (sensor, timestamp) -> value. Each sensor is consistently numeric or categorical.
class SensorSeries {
 public:
  using Readings = std::map<std::int64_t, SensorValue>;

  /// Throws Error(Data) on a duplicate (sensor, timestamp) key or a kind mismatch.
  void add(const std::string& sensor, std::int64_t timestamp, SensorValue value);

  const std::map<std::string, Readings>& sensors() const noexcept { return sensors_; }
  bool empty() const noexcept { return sensors_.empty(); }
  std::size_t reading_count() const noexcept;
  bool is_numeric(const std::string& sensor) const;

  SensorSeries restricted_to(const std::set<std::string>& keep) const;

  bool operator==(const SensorSeries&) const = default;

 private:
  std::map<std::string, Readings> sensors_;
  std::map<std::string, bool> numeric_;
};

/// One reading per sensor per window (mean for numeric, mode for categorical with
/// lexicographic tie-break), keeping only windows where every sensor reports.
/// Output timestamps are window starts.
SensorSeries aggregate(const SensorSeries& series, std::int64_t window_seconds);

struct Discretization {
  /// Upper-inclusive bin boundaries, strictly increasing; one fewer than labels.
  std::vector<double> edges;
  /// "lo-hi" from the observed min/max of each bin.
  std::vector<std::string> labels;
  /// Bin index of every input value, in input order.
  std::vector<std::size_t> assignment;

  std::size_t classify(double value) const;
};

Discretization discretize_equal_frequency(std::span<const double> values, std::size_t intervals);

enum class FeatureKind { NumericBinned, Categorical };

struct FeatureDescriptor {
  std::string name;
  FeatureKind kind = FeatureKind::Categorical;
  std::vector<std::string> class_values;

  bool operator==(const FeatureDescriptor&) const = default;
};

struct TransactionTable {
  std::vector<FeatureDescriptor> features;
  /// rows[r][f] is the class index of feature f in transaction r.
  std::vector<std::vector<std::uint32_t>> rows;
  std::map<std::string, std::vector<double>> bin_edges;

  std::size_t row_count() const noexcept { return rows.size(); }
  std::size_t feature_count() const noexcept { return features.size(); }
  std::optional<std::size_t> find_feature(const std::string& name) const;
  std::optional<std::size_t> find_class(std::size_t feature, const std::string& value) const;
  Layout layout() const;

  /// Throws Error(Data) if any table invariant is broken.
  void validate() const;

  bool operator==(const TransactionTable&) const = default;
};

struct Enrichment {
  const PropertyGraph* graph = nullptr;
  const Binding* binding = nullptr;
  EnrichmentOptions options;
};

inline constexpr std::size_t kDefaultIntervals = 10;

/// One measurement feature per sensor, then (with enrichment) one feature per
/// semantic item per sensor, named "<sensor>.<item feature>". Numeric graph
/// properties are binned over the values of that label/property across the graph.
TransactionTable build_transactions(const SensorSeries& series,
                                    const std::optional<Enrichment>& enrichment,
                                    std::size_t intervals = kDefaultIntervals);

struct EncodedMatrix {
  Layout layout;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
};

EncodedMatrix one_hot_encode(const TransactionTable& table);

/// Inverse of one_hot_encode on the class-index rows (argmax per feature).
std::vector<std::vector<std::uint32_t>> decode_rows(const EncodedMatrix& matrix);

/// Sensor CSV: header `timestamp,sensor_id,value`.
SensorSeries read_sensor_csv(std::istream& in, const std::string& source_name = "<csv>");
SensorSeries read_sensor_csv_file(const std::string& path);
void write_sensor_csv(std::ostream& out, const SensorSeries& series);

/// Integer epoch seconds or ISO-8601 (YYYY-MM-DD[T ]HH:MM:SS[Z|±HH:MM]).
std::optional<std::int64_t> parse_timestamp(std::string_view text);

}  // namespace aerial
