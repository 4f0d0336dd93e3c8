#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rebound/analysis.hpp"
#include "rebound/distributions.hpp"
#include "rebound/errors.hpp"
#include "rebound/synthetic.hpp"

using namespace rebound;

namespace {

// Posterior of n identical draws built from fixed parameters, so analysis
// output must collapse to the constant-VAR quantities.
TvpPosterior collapsed_posterior(const SyntheticSpec& spec, int t_est, int n_draws) {
  TvpPosterior post;
  post.spec = spec.var_spec();
  post.est_start = Period{1995, 1, Frequency::monthly};
  post.t_est = t_est;
  TvpDraw d;
  d.beta = spec.beta0.transpose().replicate(t_est, 1);
  d.alpha = spec.alpha0.transpose().replicate(t_est, 1);
  d.logvol = spec.logvol0.transpose().replicate(t_est, 1);
  d.q = Eigen::MatrixXd::Zero(post.spec.n_beta(), post.spec.n_beta());
  d.s = Eigen::MatrixXd::Zero(post.spec.n_alpha(), post.spec.n_alpha());
  d.w = Eigen::MatrixXd::Zero(spec.K, spec.K);
  post.draws.assign(static_cast<size_t>(n_draws), d);
  return post;
}

// Posterior with draw-to-draw variation from the synthetic generator truths.
TvpPosterior jittered_posterior(int K, int p, int t_est, int n_draws, std::uint64_t seed) {
  SyntheticSpec spec = default_synthetic_spec(K, p, t_est, seed);
  TvpPosterior post = collapsed_posterior(spec, t_est, n_draws);
  Rng rng(seed);
  for (auto& d : post.draws) {
    const double scale = 0.9 + 0.2 * uniform01(rng);
    d.beta *= scale;
    for (int i = 0; i < d.logvol.size(); ++i) {
      d.logvol(i / K, i % K) += 0.1 * std_normal(rng);
    }
    for (int i = 0; i < d.alpha.size(); ++i) {
      d.alpha(i / d.alpha.cols(), i % d.alpha.cols()) += 0.05 * std_normal(rng);
    }
  }
  return post;
}

}  // namespace

TEST_CASE("rebound_path unit cases") {
  const int ppy = 12;
  Eigen::VectorXd flat = Eigen::VectorXd::Constant(61, -1.0);
  const auto r0 = rebound_path(flat, ppy);
  REQUIRE(r0.has_value());
  REQUIRE(r0->size() == 5);
  for (double v : *r0) CHECK(v == 0.0);

  Eigen::VectorXd vanish = Eigen::VectorXd::Zero(61);
  vanish(0) = -1.0;
  const auto r1 = rebound_path(vanish, ppy);
  for (double v : *r1) CHECK(v == 100.0);

  Eigen::VectorXd backfire = Eigen::VectorXd::Zero(61);
  backfire(0) = -1.0;
  backfire(12) = 0.02;
  CHECK((*rebound_path(backfire, ppy))[0] == doctest::Approx(102.0).epsilon(1e-15));

  Eigen::VectorXd partial = Eigen::VectorXd::Zero(61);
  partial(0) = -1.0;
  partial(12) = -0.243;
  CHECK((*rebound_path(partial, ppy))[0] == doctest::Approx(75.7).epsilon(1e-12));
}

TEST_CASE("rebound_path flags a vanishing immediate response") {
  Eigen::VectorXd path = Eigen::VectorXd::Ones(25);
  path(0) = 1e-15;
  CHECK_FALSE(rebound_path(path, 4).has_value());
}

TEST_CASE("rebound is monotone when the response decays monotonically to zero") {
  Eigen::VectorXd path(61);
  for (int h = 0; h <= 60; ++h) path(h) = -std::pow(0.93, h);
  const auto r = rebound_path(path, 12);
  REQUIRE(r.has_value());
  for (size_t i = 1; i < r->size(); ++i) CHECK((*r)[i] >= (*r)[i - 1]);
}

TEST_CASE("summarize percentile conventions") {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[static_cast<size_t>(i)] = i + 1;
  CHECK(summarize(v, {50.0})[0] == doctest::Approx(50.5).epsilon(1e-15));

  std::vector<double> c(17, 3.25);
  const auto s = summarize(c, {10.0, 50.0, 90.0});
  for (double x : s) CHECK(x == 3.25);

  Rng rng(5);
  std::vector<double> r(31);
  for (auto& x : r) x = std_normal(rng);
  const auto q = summarize(r, {5.0, 25.0, 50.0, 75.0, 95.0});
  for (size_t i = 1; i < q.size(); ++i) CHECK(q[i] >= q[i - 1]);

  auto shuffled = r;
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[3], shuffled[17]);
  const auto q2 = summarize(shuffled, {5.0, 25.0, 50.0, 75.0, 95.0});
  for (size_t i = 0; i < q.size(); ++i) CHECK(q[i] == q2[i]);

  CHECK_THROWS_AS(summarize({}, {50.0}), estimation_error);
}

TEST_CASE("irf_at_date on a collapsed posterior equals irf_constant") {
  SyntheticSpec spec = default_synthetic_spec(3, 2, 60, 1);
  const TvpPosterior post = collapsed_posterior(spec, 60, 25);
  const ShockSpec shock{2, -1.0, 1.0};
  const Period date = post.est_start.plus(30);
  const IrfPosterior irf = irf_at_date(post, date, 20, shock);
  CHECK(irf.excluded_count == 0);

  VarEstimate est;
  est.spec = post.spec;
  est.lag_coeffs = beta_row_lag_coeffs(spec.beta0, post.spec);
  est.intercept = beta_row_intercept(spec.beta0, post.spec);
  const Eigen::MatrixXd b = build_unit_lower(spec.alpha0, 3);
  ImpactMatrix impact;
  impact.L = b.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(3, 3)) *
             spec.logvol0.array().exp().matrix().asDiagonal();
  est.resid_cov = impact.L * impact.L.transpose();
  const Eigen::MatrixXd oracle = irf_constant(est, impact, 20, shock);
  for (const auto& resp : irf.responses) {
    CHECK((resp - oracle).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Shock sign convention: the energy own-response is negative on impact in
  // every draw.
  for (const auto& resp : irf.responses) CHECK(resp(1, 0) < 0.0);
}

TEST_CASE("irf_at_date linearity and sign in the shock spec") {
  const TvpPosterior post = jittered_posterior(3, 2, 40, 30, 44);
  const Period date = post.est_start.plus(10);
  const IrfPosterior base = irf_at_date(post, date, 15, ShockSpec{2, -1.0, 1.0});
  const IrfPosterior doubled = irf_at_date(post, date, 15, ShockSpec{2, -1.0, 2.0});
  const IrfPosterior flipped = irf_at_date(post, date, 15, ShockSpec{2, +1.0, 1.0});
  for (int d = 0; d < base.draw_count(); ++d) {
    CHECK((doubled.responses[static_cast<size_t>(d)] -
           2.0 * base.responses[static_cast<size_t>(d)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((flipped.responses[static_cast<size_t>(d)] +
           base.responses[static_cast<size_t>(d)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("rebound values are invariant to shock sign and scale per draw") {
  const TvpPosterior post = jittered_posterior(3, 2, 70, 100, 77);
  const Period date = post.est_start.plus(33);
  const int H = 60;
  const IrfPosterior base = irf_at_date(post, date, H, ShockSpec{2, -1.0, 1.0});
  const IrfPosterior scaled = irf_at_date(post, date, H, ShockSpec{2, +1.0, 2.0});
  for (int d = 0; d < base.draw_count(); ++d) {
    const auto r1 = rebound_path(base.responses[static_cast<size_t>(d)].row(1).transpose(), 12);
    const auto r2 = rebound_path(scaled.responses[static_cast<size_t>(d)].row(1).transpose(), 12);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    for (size_t y = 0; y < r1->size(); ++y) CHECK((*r1)[y] == (*r2)[y]);
  }

  // Arbitrary (non power of two) rescaling agrees to floating tolerance.
  const IrfPosterior odd = irf_at_date(post, date, H, ShockSpec{2, -1.0, 2.5});
  for (int d = 0; d < base.draw_count(); d += 11) {
    const auto r1 = rebound_path(base.responses[static_cast<size_t>(d)].row(1).transpose(), 12);
    const auto r3 = rebound_path(odd.responses[static_cast<size_t>(d)].row(1).transpose(), 12);
    for (size_t y = 0; y < r1->size(); ++y) {
      CHECK((*r1)[y] == doctest::Approx((*r3)[y]).epsilon(1e-13));
    }
  }
}

TEST_CASE("parallel and serial analysis drivers agree bitwise") {
  const TvpPosterior post = jittered_posterior(3, 2, 50, 60, 11);
  const Period date = post.est_start.plus(25);
  const ShockSpec shock{2, -1.0, 1.0};
  const IrfPosterior par = irf_at_date(post, date, 24, shock, Execution::parallel);
  const IrfPosterior ser = irf_at_date_serial(post, date, 24, shock);
  REQUIRE(par.draw_count() == ser.draw_count());
  for (int d = 0; d < par.draw_count(); ++d) {
    CHECK((par.responses[static_cast<size_t>(d)] - ser.responses[static_cast<size_t>(d)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }

  const std::vector<CycleDate> dates = {{CycleDate::Label::peak, date},
                                        {CycleDate::Label::peak, post.est_start.plus(40)}};
  const ReboundTable tp = rebound_table(post, dates, shock, 48, Execution::parallel);
  const ReboundTable ts = rebound_table(post, dates, shock, 48, Execution::serial);
  for (size_t c = 0; c < tp.columns.size(); ++c) {
    REQUIRE(tp.columns[c].present == ts.columns[c].present);
    for (size_t y = 0; y < tp.years.size(); ++y) {
      CHECK(tp.columns[c].by_year[y].median == ts.columns[c].by_year[y].median);
      CHECK(tp.columns[c].by_year[y].p10 == ts.columns[c].by_year[y].p10);
      CHECK(tp.columns[c].by_year[y].p90 == ts.columns[c].by_year[y].p90);
    }
  }
}

TEST_CASE("irf_at_date rejects dates outside the estimation sample") {
  const TvpPosterior post = jittered_posterior(3, 1, 30, 10, 3);
  CHECK_THROWS_WITH_AS(
      irf_at_date(post, post.est_start.plus(-1), 10, ShockSpec{}),
      doctest::Contains("outside estimation sample"), estimation_error);
  CHECK_THROWS_AS(irf_at_date(post, post.est_start.plus(30), 10, ShockSpec{}),
                  estimation_error);
}

TEST_CASE("rebound_table cells are ordered and absent dates are marked") {
  const TvpPosterior post = jittered_posterior(3, 2, 80, 120, 555);
  const std::vector<CycleDate> dates = {
      {CycleDate::Label::peak, post.est_start.plus(20)},
      {CycleDate::Label::peak, post.est_start.plus(70)},
      {CycleDate::Label::peak, post.est_start.plus(500)},  // outside
  };
  const ReboundTable table = rebound_table(post, dates, ShockSpec{2, -1.0, 1.0}, 60);
  REQUIRE(table.columns.size() == 3);
  CHECK(table.years == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(table.columns[0].present);
  CHECK(table.columns[1].present);
  CHECK_FALSE(table.columns[2].present);
  CHECK(!table.columns[2].absence_reason.empty());
  for (const auto& col : table.columns) {
    if (!col.present) continue;
    for (const auto& cell : col.by_year) {
      CHECK(cell.p10 <= cell.median);
      CHECK(cell.median <= cell.p90);
    }
  }

  const std::vector<CycleDate> all_bad = {{CycleDate::Label::peak, post.est_start.plus(500)}};
  CHECK_THROWS_AS(rebound_table(post, all_bad, ShockSpec{2, -1.0, 1.0}, 60), estimation_error);
}

TEST_CASE("explosive draws are excluded from rebound summaries with a count") {
  // Rejection off can retain explosive coefficient paths; their horizon-60
  // responses dwarf the impact, so the rebound precondition drops them.
  TvpPosterior post = jittered_posterior(2, 1, 40, 30, 21);
  const int m = post.spec.coeffs_per_eq();
  for (int d = 0; d < 2; ++d) {
    for (int i = 0; i < 2; ++i) {
      post.draws[static_cast<size_t>(d)].beta.col(i * m + 1 + i).setConstant(1.6);
    }
  }
  const IrfPosterior irf = irf_at_date(post, post.est_start.plus(20), 60,
                                       ShockSpec{2, -1.0, 1.0});
  const ReboundDraws rd = rebound_draws(irf, 12);
  CHECK(rd.excluded == 2);
  CHECK_FALSE(rd.valid[0]);
  CHECK_FALSE(rd.valid[1]);
  CHECK(rd.valid[2]);
}

TEST_CASE("summaries are refused above the exclusion threshold") {
  const TvpPosterior post = jittered_posterior(2, 1, 30, 50, 9);
  IrfPosterior irf = irf_at_date(post, post.est_start.plus(5), 16, ShockSpec{2, -1.0, 1.0});
  for (int d = 0; d < 8; ++d) irf.valid[static_cast<size_t>(d)] = 0;  // 16% excluded
  irf.excluded_count = 8;
  CHECK_THROWS_WITH_AS(irf_fan(irf, 2), doctest::Contains("refused"), estimation_error);

  const ReboundDraws rd = rebound_draws(irf, 4);
  CHECK(rd.excluded >= 8);
}

TEST_CASE("irf fans keep percentile bands ordered") {
  const TvpPosterior post = jittered_posterior(3, 2, 60, 90, 313);
  const IrfPosterior irf = irf_at_date(post, post.est_start.plus(30), 40,
                                       ShockSpec{2, -1.0, 1.0});
  for (int k = 1; k <= 3; ++k) {
    const IrfFan fan = irf_fan(irf, k);
    for (int h = 0; h <= 40; ++h) {
      CHECK(fan.bands(h, 0) <= fan.bands(h, 1));
      CHECK(fan.bands(h, 1) <= fan.bands(h, 2));
    }
  }
}

TEST_CASE("builtin cycle date sets") {
  const auto peaks_m = builtin_cycle_dates("paper-peaks-monthly");
  REQUIRE(peaks_m.size() == 6);
  CHECK(peaks_m[0].period == Period{1980, 1, Frequency::monthly});
  CHECK(peaks_m[5].period == Period{2020, 2, Frequency::monthly});
  const auto troughs_q = builtin_cycle_dates("paper-troughs-quarterly");
  REQUIRE(troughs_q.size() == 6);
  CHECK(troughs_q[5].period == Period{2020, 2, Frequency::quarterly});
  CHECK(troughs_q[0].label == CycleDate::Label::trough);
  CHECK_THROWS_AS(builtin_cycle_dates("nope"), config_error);
}
