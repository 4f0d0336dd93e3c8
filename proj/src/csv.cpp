#include "rebound/csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rebound/errors.hpp"

namespace rebound {

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_value(const std::string& cell, const std::string& column, int row) {
  const std::string v = trim(cell);
  if (v.empty()) {
    throw data_error("csv row " + std::to_string(row) + ": missing value in column '" + column +
                     "'");
  }
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw data_error("csv row " + std::to_string(row) + ": unparseable value '" + v +
                     "' in column '" + column + "'");
  }
  return out;
}

}  // namespace

std::vector<TimeSeries> load_csv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw data_error("csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw data_error("csv '" + path + "': empty file");
  const auto header = split_row(line);

  int date_idx = -1;
  for (size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) == schema.date_column) date_idx = static_cast<int>(i);
  }
  if (date_idx < 0) {
    throw data_error("csv '" + path + "': no date column '" + schema.date_column + "'");
  }

  // Resolve (column index, series name) pairs.
  std::vector<std::pair<int, std::string>> cols;
  if (schema.value_columns.empty()) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (static_cast<int>(i) != date_idx) cols.emplace_back(static_cast<int>(i), trim(header[i]));
    }
  } else {
    for (const auto& [col, name] : schema.value_columns) {
      int idx = -1;
      for (size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == col) idx = static_cast<int>(i);
      }
      if (idx < 0) throw data_error("csv '" + path + "': no column '" + col + "'");
      cols.emplace_back(idx, name.empty() ? col : name);
    }
  }
  if (cols.empty()) throw data_error("csv '" + path + "': no value columns");

  std::vector<Period> dates;
  std::vector<std::vector<double>> values(cols.size());
  int row = 1;  // header is row 1
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split_row(line);
    if (static_cast<int>(cells.size()) <= date_idx) {
      throw data_error("csv row " + std::to_string(row) + ": too few cells");
    }
    Period date = [&] {
      try {
        return parse_period(trim(cells[static_cast<size_t>(date_idx)]), schema.frequency);
      } catch (const data_error& e) {
        throw data_error("csv row " + std::to_string(row) + ": " + e.what());
      }
    }();
    if (!dates.empty()) {
      const int gap = distance(dates.back(), date);
      if (gap == 0) {
        throw data_error("csv row " + std::to_string(row) + ": duplicate date " + date.str());
      }
      if (gap != 1) {
        throw data_error("csv row " + std::to_string(row) + ": date gap between " +
                         dates.back().str() + " and " + date.str());
      }
    }
    dates.push_back(date);
    for (size_t c = 0; c < cols.size(); ++c) {
      const int idx = cols[c].first;
      if (static_cast<int>(cells.size()) <= idx) {
        throw data_error("csv row " + std::to_string(row) + ": missing value in column '" +
                         cols[c].second + "'");
      }
      values[c].push_back(parse_value(cells[static_cast<size_t>(idx)], cols[c].second, row));
    }
  }
  if (dates.empty()) throw data_error("csv '" + path + "': no data rows");

  std::vector<TimeSeries> out;
  out.reserve(cols.size());
  for (size_t c = 0; c < cols.size(); ++c) {
    std::string unit;
    for (const auto& [name, u] : schema.units) {
      if (name == cols[c].second) unit = u;
    }
    out.emplace_back(cols[c].second, unit, dates.front(), std::move(values[c]));
  }
  return out;
}

void write_csv(const std::string& path, const std::vector<TimeSeries>& aligned,
               const std::string& date_column) {
  const auto series = align_intersection(aligned);  // validates alignment
  std::ofstream out(path);
  if (!out) throw data_error("csv: cannot write '" + path + "'");
  out << date_column;
  for (const auto& s : series) out << ',' << s.name();
  out << '\n';
  const int n = series.front().length();
  char buf[40];
  for (int t = 0; t < n; ++t) {
    out << series.front().period_at(t).str();
    for (const auto& s : series) {
      std::snprintf(buf, sizeof(buf), "%.17g", s.at(t));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace rebound
