#include "aerial/transact.hpp"

#include <algorithm>
#include <cmath>

#include "aerial/error.hpp"

namespace aerial {

Layout make_layout(std::span<const std::size_t> class_counts) {
  Layout layout;
  layout.reserve(class_counts.size());
  std::size_t offset = 0;
  for (std::size_t f = 0; f < class_counts.size(); ++f) {
    layout.push_back({f, offset, class_counts[f]});
    offset += class_counts[f];
  }
  return layout;
}

// --- SensorSeries ----------------------------------------------------------

void SensorSeries::add(const std::string& sensor, std::int64_t timestamp, SensorValue value) {
  const bool numeric = std::holds_alternative<double>(value);
  if (numeric && !std::isfinite(std::get<double>(value))) {
    fail(ErrorKind::Data, "sensor '" + sensor + "': non-finite reading");
  }
  auto [kind, inserted] = numeric_.emplace(sensor, numeric);
  if (!inserted && kind->second != numeric) {
    fail(ErrorKind::Data, "sensor '" + sensor + "' mixes numeric and categorical readings");
  }
  if (!sensors_[sensor].emplace(timestamp, std::move(value)).second) {
    fail(ErrorKind::Data, "sensor '" + sensor + "' has two readings at timestamp " +
                              std::to_string(timestamp));
  }
}

std::size_t SensorSeries::reading_count() const noexcept {
  std::size_t total = 0;
  for (const auto& [sensor, readings] : sensors_) {
    total += readings.size();
  }
  return total;
}

bool SensorSeries::is_numeric(const std::string& sensor) const {
  auto it = numeric_.find(sensor);
  return it != numeric_.end() && it->second;
}

SensorSeries SensorSeries::restricted_to(const std::set<std::string>& keep) const {
  SensorSeries out;
  for (const auto& [sensor, readings] : sensors_) {
    if (keep.contains(sensor)) {
      out.sensors_.emplace(sensor, readings);
      out.numeric_.emplace(sensor, numeric_.at(sensor));
    }
  }
  return out;
}

SensorSeries aggregate(const SensorSeries& series, std::int64_t window_seconds) {
  if (window_seconds <= 0) {
    fail(ErrorKind::Usage, "aggregation window must be positive");
  }
  if (series.reading_count() == 0) {
    fail(ErrorKind::Data, "cannot aggregate an empty sensor series");
  }
  auto window_of = [&](std::int64_t ts) {
    // floor division so negative timestamps land in the right window
    std::int64_t q = ts / window_seconds;
    if (ts % window_seconds != 0 && ts < 0) {
      --q;
    }
    return q * window_seconds;
  };

  std::map<std::string, std::map<std::int64_t, SensorValue>> per_sensor;
  for (const auto& [sensor, readings] : series.sensors()) {
    std::map<std::int64_t, std::vector<const SensorValue*>> windows;
    for (const auto& [ts, value] : readings) {
      windows[window_of(ts)].push_back(&value);
    }
    auto& out = per_sensor[sensor];
    for (const auto& [start, values] : windows) {
      if (series.is_numeric(sensor)) {
        double sum = 0.0;
        for (const auto* v : values) {
          sum += std::get<double>(*v);
        }
        out.emplace(start, sum / static_cast<double>(values.size()));
      } else {
        std::map<std::string, std::size_t> counts;
        for (const auto* v : values) {
          ++counts[std::get<std::string>(*v)];
        }
        // map iteration is lexicographic, so strict > keeps the smallest among ties
        auto best = counts.begin();
        for (auto it = counts.begin(); it != counts.end(); ++it) {
          if (it->second > best->second) {
            best = it;
          }
        }
        out.emplace(start, best->first);
      }
    }
  }

  std::set<std::int64_t> common;
  bool first = true;
  for (const auto& [sensor, windows] : per_sensor) {
    std::set<std::int64_t> keys;
    for (const auto& [start, value] : windows) {
      if (first || common.contains(start)) {
        keys.insert(start);
      }
    }
    common = std::move(keys);
    first = false;
  }

  SensorSeries out;
  for (const auto& [sensor, windows] : per_sensor) {
    for (const auto& [start, value] : windows) {
      if (common.contains(start)) {
        out.add(sensor, start, value);
      }
    }
  }
  return out;
}

// --- Discretization ----------------------------------------------------------

std::size_t Discretization::classify(double value) const {
  return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), value) -
                                  edges.begin());
}

Discretization discretize_equal_frequency(std::span<const double> values, std::size_t intervals) {
  if (intervals == 0) {
    fail(ErrorKind::Usage, "interval count must be at least 1");
  }
  if (values.empty()) {
    fail(ErrorKind::Data, "cannot discretize an empty column");
  }
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();

  Discretization out;
  for (std::size_t k = 1; k < intervals; ++k) {
    // 1-based sorted position ceil(k*n/intervals)
    const std::size_t position = (k * n + intervals - 1) / intervals;
    const double edge = sorted[std::max<std::size_t>(position, 1) - 1];
    if (edge >= sorted.back()) {
      break;
    }
    if (out.edges.empty() || edge > out.edges.back()) {
      out.edges.push_back(edge);
    }
  }

  const std::size_t bins = out.edges.size() + 1;
  std::vector<double> lo(bins, 0.0);
  std::vector<double> hi(bins, 0.0);
  std::vector<bool> seen(bins, false);
  out.assignment.reserve(n);
  for (double v : values) {
    const auto bin = out.classify(v);
    out.assignment.push_back(bin);
    if (!seen[bin]) {
      lo[bin] = hi[bin] = v;
      seen[bin] = true;
    } else {
      lo[bin] = std::min(lo[bin], v);
      hi[bin] = std::max(hi[bin], v);
    }
  }
  for (std::size_t b = 0; b < bins; ++b) {
    out.labels.push_back(render_value(lo[b]) + "-" + render_value(hi[b]));
  }
  return out;
}

// --- TransactionTable ------------------------------------------------------------

std::optional<std::size_t> TransactionTable::find_feature(const std::string& name) const {
  for (std::size_t f = 0; f < features.size(); ++f) {
    if (features[f].name == name) {
      return f;
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> TransactionTable::find_class(std::size_t feature,
                                                        const std::string& value) const {
  const auto& classes = features.at(feature).class_values;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c] == value) {
      return c;
    }
  }
  return std::nullopt;
}

Layout TransactionTable::layout() const {
  std::vector<std::size_t> counts;
  counts.reserve(features.size());
  for (const auto& feature : features) {
    counts.push_back(feature.class_values.size());
  }
  return make_layout(counts);
}

void TransactionTable::validate() const {
  std::set<std::string> names;
  for (const auto& feature : features) {
    if (!names.insert(feature.name).second) {
      fail(ErrorKind::Data, "duplicate feature name '" + feature.name + "'");
    }
    if (feature.class_values.empty()) {
      fail(ErrorKind::Data, "feature '" + feature.name + "' has no class values");
    }
    std::set<std::string> distinct(feature.class_values.begin(), feature.class_values.end());
    if (distinct.size() != feature.class_values.size()) {
      fail(ErrorKind::Data, "feature '" + feature.name + "' has repeated class values");
    }
    if (feature.kind == FeatureKind::NumericBinned) {
      auto it = bin_edges.find(feature.name);
      if (it == bin_edges.end() || it->second.size() + 1 != feature.class_values.size()) {
        fail(ErrorKind::Data, "feature '" + feature.name + "' bin edges do not match classes");
      }
      if (std::adjacent_find(it->second.begin(), it->second.end(), std::greater_equal<>()) !=
          it->second.end()) {
        fail(ErrorKind::Data, "feature '" + feature.name + "' bin edges not increasing");
      }
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != features.size()) {
      fail(ErrorKind::Data, "row " + std::to_string(r) + " does not assign every feature");
    }
    for (std::size_t f = 0; f < features.size(); ++f) {
      if (rows[r][f] >= features[f].class_values.size()) {
        fail(ErrorKind::Data, "row " + std::to_string(r) + " has an unknown class for '" +
                                  features[f].name + "'");
      }
    }
  }
}

namespace {

struct Column {
  FeatureDescriptor descriptor;
  std::vector<double> edges;
  std::vector<std::uint32_t> classes;  // per row
};

Column measurement_column(const std::string& sensor, bool numeric,
                          const std::vector<const SensorValue*>& values, std::size_t intervals) {
  Column column;
  column.descriptor.name = sensor;
  if (numeric) {
    std::vector<double> raw;
    raw.reserve(values.size());
    for (const auto* v : values) {
      raw.push_back(std::get<double>(*v));
    }
    auto bins = discretize_equal_frequency(raw, intervals);
    column.descriptor.kind = FeatureKind::NumericBinned;
    column.descriptor.class_values = bins.labels;
    column.edges = bins.edges;
    for (auto b : bins.assignment) {
      column.classes.push_back(static_cast<std::uint32_t>(b));
    }
  } else {
    std::set<std::string> distinct;
    for (const auto* v : values) {
      distinct.insert(std::get<std::string>(*v));
    }
    column.descriptor.kind = FeatureKind::Categorical;
    column.descriptor.class_values.assign(distinct.begin(), distinct.end());
    for (const auto* v : values) {
      auto it = distinct.find(std::get<std::string>(*v));
      column.classes.push_back(static_cast<std::uint32_t>(std::distance(distinct.begin(), it)));
    }
  }
  return column;
}

Column semantic_column(const std::string& name, const SemanticItem& item,
                       const PropertyGraph& graph, std::size_t rows, std::size_t intervals) {
  Column column;
  column.descriptor.name = name;
  std::uint32_t cls = 0;
  if (const auto* number = std::get_if<double>(&item.value); number && !item.property.empty()) {
    auto population = graph.numeric_population(item.label, item.property);
    if (population.empty()) {
      population.push_back(*number);
    }
    auto bins = discretize_equal_frequency(population, intervals);
    column.descriptor.kind = FeatureKind::NumericBinned;
    column.descriptor.class_values = bins.labels;
    column.edges = bins.edges;
    cls = static_cast<std::uint32_t>(bins.classify(*number));
  } else {
    column.descriptor.kind = FeatureKind::Categorical;
    column.descriptor.class_values = {render_value(item.value)};
  }
  column.classes.assign(rows, cls);
  return column;
}

}  // namespace

TransactionTable build_transactions(const SensorSeries& series,
                                    const std::optional<Enrichment>& enrichment,
                                    std::size_t intervals) {
  if (series.empty()) {
    fail(ErrorKind::Data, "no sensor readings to build transactions from");
  }
  if (enrichment && (enrichment->graph == nullptr || enrichment->binding == nullptr)) {
    fail(ErrorKind::Usage, "enrichment requires a graph and a binding");
  }

  // Inner join on timestamps.
  std::set<std::int64_t> stamps;
  bool first = true;
  for (const auto& [sensor, readings] : series.sensors()) {
    std::set<std::int64_t> keys;
    for (const auto& [ts, value] : readings) {
      if (first || stamps.contains(ts)) {
        keys.insert(ts);
      }
    }
    stamps = std::move(keys);
    first = false;
  }
  if (stamps.empty()) {
    fail(ErrorKind::Data, "no timestamp has a reading from every sensor");
  }

  std::vector<Column> columns;
  for (const auto& [sensor, readings] : series.sensors()) {
    std::vector<const SensorValue*> values;
    values.reserve(stamps.size());
    for (auto ts : stamps) {
      values.push_back(&readings.at(ts));
    }
    columns.push_back(measurement_column(sensor, series.is_numeric(sensor), values, intervals));
  }

  if (enrichment) {
    for (const auto& [sensor, readings] : series.sensors()) {
      auto items = semantic_items_for_sensor(*enrichment->graph, *enrichment->binding, sensor,
                                             enrichment->options);
      for (const auto& item : items) {
        columns.push_back(semantic_column(sensor + "." + item.feature, item, *enrichment->graph,
                                          stamps.size(), intervals));
      }
    }
  }

  TransactionTable table;
  for (auto& column : columns) {
    if (column.descriptor.kind == FeatureKind::NumericBinned) {
      table.bin_edges.emplace(column.descriptor.name, column.edges);
    }
    table.features.push_back(std::move(column.descriptor));
  }
  table.rows.assign(stamps.size(), std::vector<std::uint32_t>(columns.size()));
  for (std::size_t f = 0; f < columns.size(); ++f) {
    for (std::size_t r = 0; r < stamps.size(); ++r) {
      table.rows[r][f] = columns[f].classes[r];
    }
  }
  table.validate();
  return table;
}

EncodedMatrix one_hot_encode(const TransactionTable& table) {
  EncodedMatrix matrix;
  matrix.layout = table.layout();
  matrix.rows = table.rows.size();
  matrix.cols = layout_width(matrix.layout);
  matrix.data.assign(matrix.rows * matrix.cols, 0.0);
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.features.size()) {
      fail(ErrorKind::Data, "row " + std::to_string(r) + " does not assign every feature");
    }
    for (const auto& slots : matrix.layout) {
      const auto cls = row[slots.feature];
      if (cls >= slots.count) {
        fail(ErrorKind::Data, "row " + std::to_string(r) + " has a class outside feature '" +
                                  table.features[slots.feature].name + "'");
      }
      matrix.data[r * matrix.cols + slots.offset + cls] = 1.0;
    }
  }
  return matrix;
}

std::vector<std::vector<std::uint32_t>> decode_rows(const EncodedMatrix& matrix) {
  std::vector<std::vector<std::uint32_t>> rows(matrix.rows,
                                               std::vector<std::uint32_t>(matrix.layout.size()));
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    auto row = matrix.row(r);
    for (const auto& slots : matrix.layout) {
      auto group = row.subspan(slots.offset, slots.count);
      rows[r][slots.feature] =
          static_cast<std::uint32_t>(std::max_element(group.begin(), group.end()) - group.begin());
    }
  }
  return rows;
}

}  // namespace aerial
