#include "rebound/transforms.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "rebound/errors.hpp"

namespace rebound {

TimeSeries log_transform(const TimeSeries& s) {
  std::vector<double> v(s.values().size());
  for (size_t i = 0; i < v.size(); ++i) {
    const double x = s.values()[i];
    if (!(x > 0.0)) {
      throw data_error("log_transform('" + s.name() + "'): nonpositive value at index " +
                       std::to_string(i));
    }
    v[i] = std::log(x);
  }
  const std::string unit = s.unit().empty() ? "log" : "log(" + s.unit() + ")";
  return TimeSeries(s.name() + "_log", unit, s.start(), std::move(v));
}

TimeSeries deflate(const TimeSeries& nominal, const TimeSeries& price_index, const Period& base) {
  if (nominal.freq() != price_index.freq()) {
    throw data_error("deflate: frequency mismatch between '" + nominal.name() + "' and '" +
                     price_index.name() + "'");
  }
  if (!price_index.covers(base)) {
    throw data_error("deflate: base period " + base.str() + " outside index span " +
                     price_index.start().str() + ".." + price_index.end().str());
  }
  for (int i = 0; i < price_index.length(); ++i) {
    if (!(price_index.at(i) > 0.0)) {
      throw data_error("deflate: nonpositive index value at " + price_index.period_at(i).str());
    }
  }
  const auto aligned = align_intersection({nominal, price_index});
  const TimeSeries& nom = aligned[0];
  const TimeSeries& idx = aligned[1];
  const double idx_base = price_index.at(base);
  std::vector<double> v(static_cast<size_t>(nom.length()));
  for (int t = 0; t < nom.length(); ++t) {
    v[static_cast<size_t>(t)] = nom.at(t) * idx_base / idx.at(t);
  }
  const std::string unit =
      nominal.unit().empty() ? "real, base " + base.str()
                             : nominal.unit() + " (real, base " + base.str() + ")";
  return TimeSeries(nominal.name() + "_real", unit, nom.start(), std::move(v));
}

TimeSeries to_quarterly(const TimeSeries& s, Aggregation method) {
  if (s.freq() != Frequency::monthly) throw data_error("to_quarterly: input must be monthly");
  // First month of the first complete quarter.
  int first = 0;
  while (first < s.length() && (s.period_at(first).sub - 1) % 3 != 0) ++first;
  const int complete = (s.length() - first) / 3;
  if (complete < 1) {
    throw data_error("to_quarterly('" + s.name() + "'): fewer than one complete quarter");
  }
  std::vector<double> v(static_cast<size_t>(complete));
  for (int q = 0; q < complete; ++q) {
    const int b = first + 3 * q;
    const double m0 = s.at(b), m1 = s.at(b + 1), m2 = s.at(b + 2);
    switch (method) {
      case Aggregation::mean: v[static_cast<size_t>(q)] = (m0 + m1 + m2) / 3.0; break;
      case Aggregation::sum: v[static_cast<size_t>(q)] = m0 + m1 + m2; break;
      case Aggregation::last: v[static_cast<size_t>(q)] = m2; break;
    }
  }
  return TimeSeries(s.name(), s.unit(), quarter_of(s.period_at(first)), std::move(v));
}

HamiltonSpec hamilton_defaults(Frequency f) {
  return f == Frequency::monthly ? HamiltonSpec{24, 12} : HamiltonSpec{8, 4};
}

TimeSeries hamilton_filter(const TimeSeries& s, int h, int p) {
  if (h < 1 || p < 1) throw data_error("hamilton_filter: h and p must be >= 1");
  const int skip = h + p - 1;  // first usable index
  const int n = s.length() - skip;
  if (s.length() <= h + p) {
    throw data_error("hamilton_filter('" + s.name() + "'): series too short for h=" +
                     std::to_string(h) + ", p=" + std::to_string(p));
  }
  Eigen::MatrixXd X(n, p + 1);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const int t = skip + i;
    y(i) = s.at(t);
    X(i, 0) = 1.0;
    for (int j = 0; j < p; ++j) X(i, j + 1) = s.at(t - h - j);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  const Eigen::VectorXd coef = qr.solve(y);
  Eigen::VectorXd cycle = y - X * coef;
  if (qr.rank() < p + 1) {
    // Degenerate designs (an exact trend, a constant) still fit exactly, in
    // which case the zero cycle is unambiguous; anything else is rejected.
    const double scale = 1.0 + y.cwiseAbs().maxCoeff();
    if (cycle.cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw data_error("hamilton_filter('" + s.name() + "'): exactly collinear regressors");
    }
  }
  std::vector<double> v(cycle.data(), cycle.data() + n);
  return TimeSeries(s.name() + "_cycle", s.unit(), s.period_at(skip), std::move(v));
}

CcfResult ccf(const TimeSeries& x, const TimeSeries& y, int max_lag) {
  const auto aligned = align_intersection({x, y});
  const auto& xs = aligned[0].values();
  const auto& ys = aligned[1].values();
  const int n = static_cast<int>(xs.size());
  if (max_lag < 0 || max_lag >= n) throw data_error("ccf: max_lag out of range");

  double xm = 0.0, ym = 0.0;
  for (int t = 0; t < n; ++t) {
    xm += xs[static_cast<size_t>(t)];
    ym += ys[static_cast<size_t>(t)];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, syy = 0.0;
  for (int t = 0; t < n; ++t) {
    sxx += (xs[static_cast<size_t>(t)] - xm) * (xs[static_cast<size_t>(t)] - xm);
    syy += (ys[static_cast<size_t>(t)] - ym) * (ys[static_cast<size_t>(t)] - ym);
  }
  if (sxx <= 0.0) throw data_error("ccf: zero-variance series '" + x.name() + "'");
  if (syy <= 0.0) throw data_error("ccf: zero-variance series '" + y.name() + "'");
  const double denom = std::sqrt(sxx * syy);

  CcfResult out;
  out.n = n;
  out.band = 2.0 / std::sqrt(static_cast<double>(n));
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    // corr(x_t, y_{t+lag}); identical term order for either lag sign keeps
    // ccf(x,y)[lag] == ccf(y,x)[-lag] exact.
    double s = 0.0;
    const int lo = std::max(0, -lag);
    const int hi = std::min(n, n - lag);
    for (int t = lo; t < hi; ++t) {
      s += (xs[static_cast<size_t>(t)] - xm) * (ys[static_cast<size_t>(t + lag)] - ym);
    }
    out.lags.push_back(lag);
    out.coefficients.push_back(s / denom);
  }
  return out;
}

}  // namespace rebound
