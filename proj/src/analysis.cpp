#include "rebound/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "rebound/errors.hpp"

namespace rebound {

Eigen::MatrixXd irf_single_draw(const TvpDraw& draw, int t_index, int horizon,
                                const ShockSpec& shock, const VarSpec& spec) {
  const int K = spec.K;
  const Eigen::MatrixXd b = build_unit_lower(draw.alpha.row(t_index).transpose(), K);
  const Eigen::MatrixXd b_inv =
      b.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(K, K));
  const Eigen::VectorXd scale = draw.logvol.row(t_index).transpose().array().exp();
  const Eigen::MatrixXd impact = b_inv * scale.asDiagonal();
  const auto coeffs = beta_row_lag_coeffs(draw.beta.row(t_index).transpose(), spec);

  Eigen::MatrixXd resp(K, horizon + 1);
  resp.col(0) = shock.sign * shock.size * impact.col(shock.variable - 1);
  for (int h = 1; h <= horizon; ++h) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(K);
    for (int i = 1; i <= std::min(h, spec.p); ++i) {
      r += coeffs[static_cast<size_t>(i - 1)] * resp.col(h - i);
    }
    resp.col(h) = r;
  }
  return resp;
}

namespace {

void check_irf_inputs(const TvpPosterior& post, const Period& date, int horizon,
                      const ShockSpec& shock, int* t_index) {
  if (post.draws.empty()) throw estimation_error("irf_at_date: empty posterior");
  if (horizon < 0) throw estimation_error("irf_at_date: horizon must be >= 0");
  if (shock.variable < 1 || shock.variable > post.spec.K || !(shock.size > 0.0)) {
    throw estimation_error("irf_at_date: invalid shock spec");
  }
  if (date.freq != post.est_start.freq) {
    throw estimation_error("irf_at_date: date frequency does not match the posterior");
  }
  const int idx = distance(post.est_start, date);
  if (idx < 0 || idx >= post.t_est) {
    throw estimation_error("irf_at_date: " + date.str() + " outside estimation sample " +
                           post.est_start.str() + ".." +
                           post.est_start.plus(post.t_est - 1).str());
  }
  *t_index = idx;
}

IrfPosterior irf_common(const TvpPosterior& post, const Period& date, int horizon,
                        const ShockSpec& shock, bool parallel) {
  int t_index = 0;
  check_irf_inputs(post, date, horizon, shock, &t_index);
  const int n = static_cast<int>(post.draws.size());

  IrfPosterior out;
  out.date = date;
  out.horizon = horizon;
  out.shock_variable = shock.variable;
  out.responses.resize(static_cast<size_t>(n));
  out.valid.assign(static_cast<size_t>(n), 1);

  // Each draw writes only its own slot, so the parallel driver is
  // deterministic and matches the serial reference exactly.
#pragma omp parallel for schedule(static) if (parallel)
  for (int d = 0; d < n; ++d) {
    Eigen::MatrixXd resp =
        irf_single_draw(post.draws[static_cast<size_t>(d)], t_index, horizon, shock, post.spec);
    if (!resp.allFinite()) out.valid[static_cast<size_t>(d)] = 0;
    out.responses[static_cast<size_t>(d)] = std::move(resp);
  }
  for (int d = 0; d < n; ++d) {
    if (!out.valid[static_cast<size_t>(d)]) ++out.excluded_count;
  }
  return out;
}

}  // namespace

IrfPosterior irf_at_date(const TvpPosterior& post, const Period& date, int horizon,
                         const ShockSpec& shock, Execution exec) {
  return irf_common(post, date, horizon, shock, exec == Execution::parallel);
}

IrfPosterior irf_at_date_serial(const TvpPosterior& post, const Period& date, int horizon,
                                const ShockSpec& shock) {
  return irf_common(post, date, horizon, shock, false);
}

std::optional<std::vector<double>> rebound_path(const Eigen::VectorXd& energy_response,
                                                int periods_per_year, int years) {
  const int H = static_cast<int>(energy_response.size()) - 1;
  if (H < periods_per_year || years < 1) return std::nullopt;
  const double x0 = energy_response(0);
  if (!energy_response.allFinite()) return std::nullopt;
  if (std::abs(x0) <= 1e-12 * energy_response.cwiseAbs().maxCoeff()) return std::nullopt;
  std::vector<double> out;
  out.reserve(static_cast<size_t>(years));
  for (int y = 1; y <= years; ++y) {
    const int h = y * periods_per_year;
    if (h > H) break;
    out.push_back((1.0 - energy_response(h) / x0) * 100.0);
  }
  return out;
}

std::vector<double> summarize(std::vector<double> values,
                              const std::vector<double>& percentiles) {
  if (values.empty()) throw estimation_error("summarize: empty input");
  std::sort(values.begin(), values.end());
  const int n = static_cast<int>(values.size());
  std::vector<double> out;
  out.reserve(percentiles.size());
  for (double p : percentiles) {
    if (p < 0.0 || p > 100.0) throw estimation_error("summarize: percentile out of [0, 100]");
    const double h = (n - 1) * (p / 100.0);
    const int lo = static_cast<int>(std::floor(h));
    const int hi = std::min(lo + 1, n - 1);
    const double frac = h - lo;
    out.push_back(values[static_cast<size_t>(lo)] +
                  frac * (values[static_cast<size_t>(hi)] - values[static_cast<size_t>(lo)]));
  }
  return out;
}

ReboundDraws rebound_draws(const IrfPosterior& irf, int periods_per_year, int years) {
  const int n = irf.draw_count();
  const int energy = irf.shock_variable - 1;
  ReboundDraws out;
  const int feasible_years = std::min(years, irf.horizon / periods_per_year);
  for (int y = 1; y <= feasible_years; ++y) out.years.push_back(y);
  out.values = Eigen::MatrixXd::Constant(n, feasible_years,
                                         std::numeric_limits<double>::quiet_NaN());
  out.valid.assign(static_cast<size_t>(n), 0);
  for (int d = 0; d < n; ++d) {
    if (!irf.valid[static_cast<size_t>(d)]) continue;
    const Eigen::VectorXd path = irf.responses[static_cast<size_t>(d)].row(energy).transpose();
    const auto reb = rebound_path(path, periods_per_year, feasible_years);
    if (!reb) continue;
    out.valid[static_cast<size_t>(d)] = 1;
    for (size_t y = 0; y < reb->size(); ++y) {
      out.values(d, static_cast<Eigen::Index>(y)) = (*reb)[y];
    }
  }
  for (int d = 0; d < n; ++d) {
    if (!out.valid[static_cast<size_t>(d)]) ++out.excluded;
  }
  return out;
}

ReboundTable rebound_table(const TvpPosterior& post, const std::vector<CycleDate>& dates,
                           const ShockSpec& shock, int horizon, Execution exec) {
  if (dates.empty()) throw estimation_error("rebound_table: no dates given");
  const int ppy = periods_per_year(post.est_start.freq);
  ReboundTable table;
  const int years = std::min(5, horizon / ppy);
  for (int y = 1; y <= years; ++y) table.years.push_back(y);

  int usable = 0;
  for (const auto& cd : dates) {
    ReboundColumn col;
    col.date = cd;
    col.total = static_cast<int>(post.draws.size());
    try {
      const IrfPosterior irf = irf_at_date(post, cd.period, horizon, shock, exec);
      const ReboundDraws rd = rebound_draws(irf, ppy, years);
      col.excluded = rd.excluded;
      if (rd.excluded > kMaxExclusionShare * col.total) {
        col.absence_reason = "summary refused: " + std::to_string(rd.excluded) + "/" +
                             std::to_string(col.total) + " draws excluded";
      } else {
        for (int y = 0; y < static_cast<int>(table.years.size()); ++y) {
          std::vector<double> vals;
          vals.reserve(static_cast<size_t>(col.total));
          for (int d = 0; d < col.total; ++d) {
            if (rd.valid[static_cast<size_t>(d)]) vals.push_back(rd.values(d, y));
          }
          const auto s = summarize(std::move(vals), {10.0, 50.0, 90.0});
          col.by_year.push_back(ReboundCell{s[1], s[0], s[2]});
        }
        col.present = true;
        ++usable;
      }
    } catch (const estimation_error& e) {
      col.absence_reason = e.what();
    }
    table.columns.push_back(std::move(col));
  }
  if (usable == 0) {
    throw estimation_error("rebound_table: no valid dates (first reason: " +
                           table.columns.front().absence_reason + ")");
  }
  return table;
}

IrfFan irf_fan(const IrfPosterior& irf, int variable, const std::vector<double>& percentiles) {
  if (variable < 1) throw estimation_error("irf_fan: variable index is 1-based");
  const int n = irf.draw_count();
  if (irf.excluded_count > kMaxExclusionShare * n) {
    throw estimation_error("irf_fan: summary refused, " + std::to_string(irf.excluded_count) +
                           "/" + std::to_string(n) + " draws excluded");
  }
  IrfFan fan;
  fan.date = irf.date;
  fan.variable = variable;
  fan.percentiles = percentiles;
  fan.bands.resize(irf.horizon + 1, static_cast<Eigen::Index>(percentiles.size()));
  for (int h = 0; h <= irf.horizon; ++h) {
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(n));
    for (int d = 0; d < n; ++d) {
      if (irf.valid[static_cast<size_t>(d)]) {
        vals.push_back(irf.responses[static_cast<size_t>(d)](variable - 1, h));
      }
    }
    const auto s = summarize(std::move(vals), percentiles);
    for (size_t i = 0; i < s.size(); ++i) fan.bands(h, static_cast<Eigen::Index>(i)) = s[i];
  }
  return fan;
}

std::vector<CycleDate> builtin_cycle_dates(const std::string& name) {
  using L = CycleDate::Label;
  auto m = [](int y, int mo) { return Period{y, mo, Frequency::monthly}; };
  auto q = [](int y, int qq) { return Period{y, qq, Frequency::quarterly}; };
  if (name == "paper-peaks-monthly") {
    return {{L::peak, m(1980, 1)},  {L::peak, m(1981, 7)}, {L::peak, m(1990, 7)},
            {L::peak, m(2001, 3)},  {L::peak, m(2007, 12)}, {L::peak, m(2020, 2)}};
  }
  if (name == "paper-troughs-monthly") {
    return {{L::trough, m(1980, 7)},  {L::trough, m(1982, 11)}, {L::trough, m(1991, 3)},
            {L::trough, m(2001, 11)}, {L::trough, m(2009, 6)},  {L::trough, m(2020, 4)}};
  }
  if (name == "paper-peaks-quarterly") {
    return {{L::peak, q(1980, 1)}, {L::peak, q(1981, 3)}, {L::peak, q(1990, 3)},
            {L::peak, q(2001, 1)}, {L::peak, q(2007, 4)}, {L::peak, q(2019, 4)}};
  }
  if (name == "paper-troughs-quarterly") {
    return {{L::trough, q(1980, 3)}, {L::trough, q(1982, 4)}, {L::trough, q(1991, 1)},
            {L::trough, q(2001, 4)}, {L::trough, q(2009, 2)}, {L::trough, q(2020, 2)}};
  }
  throw config_error("unknown built-in date set '" + name + "'");
}

}  // namespace rebound
