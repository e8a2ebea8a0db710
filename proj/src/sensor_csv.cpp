#include <charconv>
#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

#include "aerial/error.hpp"
#include "aerial/transact.hpp"

namespace aerial {

namespace {

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

struct Field {
  std::string text;
  bool quoted = false;
};

// RFC 4180-style split of a single line.
std::optional<std::vector<Field>> split_line(std::string_view line) {
  std::vector<Field> fields;
  std::size_t i = 0;
  while (true) {
    Field field;
    if (i < line.size() && line[i] == '"') {
      field.quoted = true;
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.text.push_back('"');
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        field.text.push_back(line[i++]);
      }
      if (!closed || (i < line.size() && line[i] != ',')) {
        return std::nullopt;
      }
    } else {
      while (i < line.size() && line[i] != ',') {
        field.text.push_back(line[i++]);
      }
    }
    fields.push_back(std::move(field));
    if (i >= line.size()) {
      break;
    }
    ++i;  // comma
  }
  return fields;
}

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') {
      out.push_back('"');
    }
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
  if (auto integer = parse_number<std::int64_t>(text)) {
    return integer;
  }
  // YYYY-MM-DD[T ]HH:MM:SS[Z|+HH:MM|-HH:MM]
  if (text.size() < 19 || text[4] != '-' || text[7] != '-' ||
      (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':') {
    return std::nullopt;
  }
  auto year = parse_number<int>(text.substr(0, 4));
  auto month = parse_number<unsigned>(text.substr(5, 2));
  auto day = parse_number<unsigned>(text.substr(8, 2));
  auto hour = parse_number<int>(text.substr(11, 2));
  auto minute = parse_number<int>(text.substr(14, 2));
  auto second = parse_number<int>(text.substr(17, 2));
  if (!year || !month || !day || !hour || !minute || !second || *hour > 23 || *minute > 59 ||
      *second > 60) {
    return std::nullopt;
  }
  const std::chrono::year_month_day date{std::chrono::year{*year}, std::chrono::month{*month},
                                         std::chrono::day{*day}};
  if (!date.ok()) {
    return std::nullopt;
  }
  std::int64_t offset = 0;
  auto zone = text.substr(19);
  if (zone == "Z" || zone.empty()) {
    offset = 0;
  } else if (zone.size() == 6 && (zone[0] == '+' || zone[0] == '-') && zone[3] == ':') {
    auto oh = parse_number<int>(zone.substr(1, 2));
    auto om = parse_number<int>(zone.substr(4, 2));
    if (!oh || !om) {
      return std::nullopt;
    }
    offset = (zone[0] == '+' ? 1 : -1) * (*oh * 3600 + *om * 60);
  } else {
    return std::nullopt;
  }
  const auto days = std::chrono::sys_days(date).time_since_epoch().count();
  return static_cast<std::int64_t>(days) * 86400 + *hour * 3600 + *minute * 60 + *second - offset;
}

SensorSeries read_sensor_csv(std::istream& in, const std::string& source_name) {
  SensorSeries series;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    auto where = source_name + ":" + std::to_string(line_no);
    if (!header_seen) {
      if (line != "timestamp,sensor_id,value") {
        fail(ErrorKind::Parse, where + ": expected header 'timestamp,sensor_id,value'");
      }
      header_seen = true;
      continue;
    }
    auto fields = split_line(line);
    if (!fields || fields->size() != 3) {
      fail(ErrorKind::Parse, where + ": expected 3 fields");
    }
    auto timestamp = parse_timestamp((*fields)[0].text);
    if (!timestamp) {
      fail(ErrorKind::Parse, where + ": bad timestamp '" + (*fields)[0].text + "'");
    }
    const auto& sensor = (*fields)[1].text;
    if (sensor.empty()) {
      fail(ErrorKind::Parse, where + ": empty sensor id");
    }
    const auto& raw = (*fields)[2];
    SensorValue value;
    if (raw.quoted) {
      value = raw.text;
    } else if (auto number = parse_number<double>(raw.text)) {
      value = *number;
    } else if (!raw.text.empty()) {
      value = raw.text;
    } else {
      fail(ErrorKind::Parse, where + ": empty value");
    }
    try {
      series.add(sensor, *timestamp, std::move(value));
    } catch (const Error& e) {
      fail(e.kind(), where + ": " + e.what());
    }
  }
  if (!header_seen) {
    fail(ErrorKind::Parse, source_name + ": missing header");
  }
  return series;
}

SensorSeries read_sensor_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(ErrorKind::Usage, "cannot open sensor CSV '" + path + "'");
  }
  return read_sensor_csv(in, path);
}

void write_sensor_csv(std::ostream& out, const SensorSeries& series) {
  // Rows ordered by timestamp, then sensor id.
  std::map<std::int64_t, std::vector<std::pair<const std::string*, const SensorValue*>>> by_time;
  for (const auto& [sensor, readings] : series.sensors()) {
    for (const auto& [ts, value] : readings) {
      by_time[ts].emplace_back(&sensor, &value);
    }
  }
  out << "timestamp,sensor_id,value\n";
  for (const auto& [ts, entries] : by_time) {
    for (const auto& [sensor, value] : entries) {
      out << ts << ',' << *sensor << ',';
      if (const auto* text = std::get_if<std::string>(value)) {
        out << quote(*text);
      } else {
        out << render_value(*value);
      }
      out << '\n';
    }
  }
}

}  // namespace aerial
