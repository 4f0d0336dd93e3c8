#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rebound/time_series.hpp"

namespace rebound {

/// Column-role mapping for CSV ingestion. Dates must be strictly increasing
/// and gap-free at the declared frequency; any missing value cell is an error
/// (no imputation downstream).
struct CsvSchema {
  std::string date_column = "date";
  Frequency frequency = Frequency::monthly;
  /// (csv column, series name); empty -> every non-date column, named after
  /// its header.
  std::vector<std::pair<std::string, std::string>> value_columns;
  /// Optional (series name, unit) annotations.
  std::vector<std::pair<std::string, std::string>> units;
};

std::vector<TimeSeries> load_csv(const std::string& path, const CsvSchema& schema);

/// Writes aligned series in the same schema load_csv reads (header row,
/// date column first).
void write_csv(const std::string& path, const std::vector<TimeSeries>& aligned,
               const std::string& date_column = "date");

}  // namespace rebound
