#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rebound/period.hpp"

namespace rebound {

/// A dated, gap-free scalar series. Construction validates that every value
/// is finite and that the start period matches the declared frequency.
/// Instances are immutable; transforms return new series.
class TimeSeries {
 public:
  TimeSeries(std::string name, std::string unit, Period start, std::vector<double> values);

  const std::string& name() const { return name_; }
  const std::string& unit() const { return unit_; }
  Frequency freq() const { return start_.freq; }
  const Period& start() const { return start_; }
  Period end() const { return start_.plus(length() - 1); }
  int length() const { return static_cast<int>(values_.size()); }
  double at(int i) const { return values_.at(static_cast<size_t>(i)); }
  double at(const Period& p) const;
  const std::vector<double>& values() const { return values_; }
  Period period_at(int i) const { return start_.plus(i); }
  bool covers(const Period& p) const;

 private:
  std::string name_;
  std::string unit_;
  Period start_;
  std::vector<double> values_;
};

/// Trims every series to the intersection of their spans. All series must
/// share a frequency and the intersection must be non-empty.
std::vector<TimeSeries> align_intersection(const std::vector<TimeSeries>& series);

/// T x K system of aligned variables in identification order.
class Dataset {
 public:
  explicit Dataset(std::vector<TimeSeries> variables);
  static Dataset from_matrix(Eigen::MatrixXd values, Period start,
                             std::vector<std::string> names = {});

  int T() const { return static_cast<int>(matrix_.rows()); }
  int K() const { return static_cast<int>(matrix_.cols()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const Period& start() const { return start_; }
  Frequency freq() const { return start_.freq; }
  const TimeSeries& variable(int k) const { return variables_.at(static_cast<size_t>(k)); }
  const std::vector<TimeSeries>& variables() const { return variables_; }
  Period period_at(int t) const { return start_.plus(t); }
  /// Index of `p` within the sample, or -1 when outside.
  int index_of(const Period& p) const;
  /// First n observations.
  Dataset head(int n) const;

 private:
  std::vector<TimeSeries> variables_;
  Eigen::MatrixXd matrix_;
  Period start_;
};

}  // namespace rebound
