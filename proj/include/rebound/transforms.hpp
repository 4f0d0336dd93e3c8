#pragma once

#include <vector>

#include "rebound/time_series.hpp"

namespace rebound {

/// Elementwise natural log; requires strictly positive values.
TimeSeries log_transform(const TimeSeries& s);

/// real_t = nominal_t * index_base / index_t over the overlap of the two
/// series. The base period must lie inside the index's span.
TimeSeries deflate(const TimeSeries& nominal, const TimeSeries& price_index, const Period& base);

enum class Aggregation { mean, sum, last };

/// Aggregates a monthly series to quarterly. Partial quarters at either
/// edge are dropped, never padded.
TimeSeries to_quarterly(const TimeSeries& s, Aggregation method);

struct HamiltonSpec {
  int h = 24;
  int p = 12;
};

/// Published recommendation: (24, 12) monthly, (8, 4) quarterly.
HamiltonSpec hamilton_defaults(Frequency f);

/// Regression-based trend/cycle decomposition: the cycle at t is the
/// residual of s_t regressed on a constant and (s_{t-h}, ..., s_{t-h-p+1}).
/// The output starts h+p-1 observations after the input start.
TimeSeries hamilton_filter(const TimeSeries& s, int h, int p);

struct CcfResult {
  std::vector<int> lags;            // -max_lag .. +max_lag
  std::vector<double> coefficients; // corr(x_t, y_{t+lag})
  double band = 0.0;                // +-2/sqrt(n)
  int n = 0;
};

/// Sample cross-correlation function between two aligned series.
CcfResult ccf(const TimeSeries& x, const TimeSeries& y, int max_lag);

}  // namespace rebound
