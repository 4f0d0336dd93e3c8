#include "rebound/time_series.hpp"

#include <cmath>
#include <utility>

#include "rebound/errors.hpp"

namespace rebound {

TimeSeries::TimeSeries(std::string name, std::string unit, Period start,
                       std::vector<double> values)
    : name_(std::move(name)), unit_(std::move(unit)), start_(start), values_(std::move(values)) {
  if (values_.empty()) throw data_error("series '" + name_ + "': empty");
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw data_error("series '" + name_ + "': non-finite value at index " + std::to_string(i));
    }
  }
}

double TimeSeries::at(const Period& p) const {
  const int i = distance(start_, p);
  if (i < 0 || i >= length()) {
    throw data_error("series '" + name_ + "': period " + p.str() + " outside span " +
                     start_.str() + ".." + end().str());
  }
  return values_[static_cast<size_t>(i)];
}

bool TimeSeries::covers(const Period& p) const {
  if (p.freq != freq()) return false;
  const int i = distance(start_, p);
  return i >= 0 && i < length();
}

std::vector<TimeSeries> align_intersection(const std::vector<TimeSeries>& series) {
  if (series.empty()) throw data_error("align: no series given");
  const Frequency f = series.front().freq();
  int lo = series.front().start().ordinal();
  int hi = series.front().end().ordinal();
  for (const auto& s : series) {
    if (s.freq() != f) throw data_error("align: mixed frequencies");
    lo = std::max(lo, s.start().ordinal());
    hi = std::min(hi, s.end().ordinal());
  }
  if (lo > hi) throw data_error("align: series spans do not overlap");
  std::vector<TimeSeries> out;
  out.reserve(series.size());
  for (const auto& s : series) {
    const int offset = lo - s.start().ordinal();
    std::vector<double> v(s.values().begin() + offset,
                          s.values().begin() + offset + (hi - lo + 1));
    out.emplace_back(s.name(), s.unit(), s.start().plus(offset), std::move(v));
  }
  return out;
}

Dataset::Dataset(std::vector<TimeSeries> variables) : variables_(std::move(variables)) {
  if (variables_.empty()) throw data_error("dataset: no variables");
  const auto& first = variables_.front();
  start_ = first.start();
  for (const auto& s : variables_) {
    if (s.freq() != first.freq() || !(s.start() == first.start()) ||
        s.length() != first.length()) {
      throw data_error("dataset: variable '" + s.name() + "' is not aligned with '" +
                       first.name() + "'");
    }
  }
  matrix_.resize(first.length(), static_cast<Eigen::Index>(variables_.size()));
  for (size_t k = 0; k < variables_.size(); ++k) {
    for (int t = 0; t < first.length(); ++t) {
      matrix_(t, static_cast<Eigen::Index>(k)) = variables_[k].at(t);
    }
  }
}

Dataset Dataset::from_matrix(Eigen::MatrixXd values, Period start,
                             std::vector<std::string> names) {
  const int K = static_cast<int>(values.cols());
  std::vector<TimeSeries> vars;
  vars.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    std::string name = k < static_cast<int>(names.size()) ? names[static_cast<size_t>(k)]
                                                          : "v" + std::to_string(k + 1);
    std::vector<double> v(values.col(k).data(), values.col(k).data() + values.rows());
    vars.emplace_back(std::move(name), "", start, std::move(v));
  }
  return Dataset(std::move(vars));
}

int Dataset::index_of(const Period& p) const {
  if (p.freq != freq()) return -1;
  const int i = distance(start_, p);
  return (i >= 0 && i < T()) ? i : -1;
}

Dataset Dataset::head(int n) const {
  if (n < 1 || n > T()) throw data_error("dataset head: invalid length");
  std::vector<TimeSeries> vars;
  vars.reserve(variables_.size());
  for (const auto& s : variables_) {
    std::vector<double> v(s.values().begin(), s.values().begin() + n);
    vars.emplace_back(s.name(), s.unit(), s.start(), std::move(v));
  }
  return Dataset(std::move(vars));
}

}  // namespace rebound
