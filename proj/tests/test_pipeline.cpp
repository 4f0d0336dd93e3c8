#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rebound/csv.hpp"
#include "rebound/errors.hpp"
#include "rebound/pipeline.hpp"
#include "rebound/synthetic.hpp"

using namespace rebound;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Synthetic three-variable dataset written in the ingestion schema, plus a
// config file pointing at it.
struct Fixture {
  fs::path dir;
  std::string csv_path;
  std::string config_path;
};

Fixture make_fixture(const std::string& name, int T, const std::string& extra_config,
                     std::uint64_t seed = 912) {
  Fixture f;
  f.dir = temp_dir(name);
  SyntheticSpec spec = default_synthetic_spec(3, 2, T, seed);
  // Mild drift keeps the heteroskedasticity machinery honest.
  spec.w = 1e-4 * Eigen::MatrixXd::Identity(3, 3);
  const TvpSimulation sim = simulate_tvp(spec);
  // Positive levels so logs are well defined.
  std::vector<TimeSeries> cols;
  const char* names[3] = {"bbk", "energy_btu", "oil_cost"};
  for (int k = 0; k < 3; ++k) {
    std::vector<double> v(static_cast<size_t>(T));
    for (int t = 0; t < T; ++t) v[static_cast<size_t>(t)] = 50.0 + sim.data.matrix()(t, k);
    cols.emplace_back(names[k], "", sim.data.start(), std::move(v));
  }
  f.csv_path = (f.dir / "data.csv").string();
  write_csv(f.csv_path, cols);

  std::ostringstream cfg;
  cfg << "[data]\n"
      << "csv = " << f.csv_path << "\n"
      << "frequency = monthly\n"
      << "activity_column = bbk\n"
      << "energy_column = energy_btu\n"
      << "price_column = oil_cost\n"
      << "[transforms]\n"
      << "hamilton_h = 6\n"
      << "hamilton_p = 3\n"
      << "[output]\n"
      << "dir = " << (f.dir / "out").string() << "\n"
      << extra_config;
  f.config_path = (f.dir / "run.ini").string();
  std::ofstream out(f.config_path);
  out << cfg.str();
  return f;
}

const std::string kSmokeMcmc =
    "[mcmc]\n"
    "profile = desk\n"
    "draws = 400\n"
    "burn_in = 100\n"
    "seed = 77\n"
    "[priors]\n"
    "tau = 40\n"
    "[model]\n"
    "lag = 2\n"
    "[analysis]\n"
    "horizon = 24\n"
    "[dates]\n"
    "peaks = 2012-01,2014-06\n"
    "troughs = 2013-03,2015-09\n";

}  // namespace

TEST_CASE("config parsing applies profiles, overrides, and validation") {
  const Fixture f = make_fixture("rb_cfg", 240, kSmokeMcmc);
  const RunConfig c = RunConfig::from_file(f.config_path);
  CHECK(c.mcmc.n_draws == 400);
  CHECK(c.mcmc.burn_in == 100);
  CHECK(c.mcmc.thin == 1);  // desk profile
  CHECK(c.mcmc.seed == 77);
  CHECK(c.lag == 2);
  CHECK(c.resolved_horizon() == 24);
  CHECK(c.resolved_hamilton().h == 6);
  CHECK(c.peaks.size() == 2);
  CHECK(c.peaks[0].period == Period{2012, 1, Frequency::monthly});

  const RunConfig full = RunConfig::from_file(f.config_path, "full");
  CHECK(full.mcmc.n_draws == 400);  // explicit keys still win
  CHECK(full.mcmc.thin == 10);      // profile provides the rest

  std::ofstream bad(f.dir / "bad.ini");
  bad << "[data]\nnot_a_key = 1\n";
  bad.close();
  CHECK_THROWS_AS(RunConfig::from_file((f.dir / "bad.ini").string()), config_error);
  CHECK_THROWS_AS(RunConfig::from_file((f.dir / "missing.ini").string()), config_error);
}

TEST_CASE("config defaults fall back to the built-in chronology") {
  const Fixture f = make_fixture("rb_cfg2", 240, "[model]\nlag = 2\n");
  const RunConfig c = RunConfig::from_file(f.config_path);
  CHECK(c.peaks.size() == 6);
  CHECK(c.peaks[0].period == Period{1980, 1, Frequency::monthly});
  CHECK(c.troughs.size() == 6);
  CHECK(c.profile == "full");
  CHECK(c.mcmc.n_draws == 55000);
}

TEST_CASE("describe_cycles degenerate and arithmetic cases") {
  // Constant series plus one doubling series.
  const Period start{2000, 1, Frequency::monthly};
  std::vector<double> flat(24, 5.0);
  std::vector<double> doubling(24);
  double v = 1.0;
  for (auto& x : doubling) {
    x = v;
    v *= 2.0;
  }
  const Dataset data({TimeSeries("flat", "", start, flat),
                      TimeSeries("doubling", "", start, doubling)});
  const std::vector<Period> peaks = {start.plus(2), start.plus(10), start.plus(20)};
  const auto tables = describe_cycles(data, peaks, {0, 1});
  REQUIRE(tables.window_labels.size() == 2);
  for (int w = 0; w < 2; ++w) {
    CHECK(tables.means(w, 0) == doctest::Approx(5.0));
    CHECK(tables.variances(w, 0) == doctest::Approx(0.0));
    CHECK(tables.growth(w, 0) == doctest::Approx(0.0));
    CHECK(tables.growth(w, 1) == doctest::Approx(100.0));
  }

  // Windows partition the span: adjacent labels share the boundary period.
  CHECK(tables.window_labels[0] == "2000-03..2000-11");
  CHECK(tables.window_labels[1] == "2000-11..2001-09");

  CHECK_THROWS_AS(describe_cycles(data, {start.plus(2)}, {}), data_error);
  CHECK_THROWS_AS(describe_cycles(data, {start.plus(2), start.plus(60)}, {}), data_error);
}

TEST_CASE("full desk-scale pipeline run with manifest integrity") {
  const Fixture f = make_fixture("rb_run", 260, kSmokeMcmc);
  const RunConfig config = RunConfig::from_file(f.config_path);
  const RunManifest manifest = run(config);

  CHECK_FALSE(manifest.partial);
  CHECK(manifest.selected_lag == 2);
  CHECK(manifest.retained == 300);
  CHECK(manifest.seed == 77);
  CHECK(manifest.estimation_length > 100);

  // Truthful inventory: every listed file exists with matching byte count.
  REQUIRE(!manifest.outputs.empty());
  for (const auto& out : manifest.outputs) {
    const fs::path p = fs::path(config.output_dir) / out.name;
    REQUIRE_MESSAGE(fs::exists(p), out.name);
    CHECK(fs::file_size(p) == out.bytes);
  }
  const auto expect = [&](const std::string& name) {
    bool found = false;
    for (const auto& o : manifest.outputs) found = found || o.name == name;
    CHECK_MESSAGE(found, name);
  };
  expect("rebound_peaks.csv");
  expect("rebound_troughs.csv");
  expect("rebound_peaks.txt");
  expect("irf_fans_peaks.csv");
  expect("rebound_density_peaks.csv");
  expect("ccf.csv");
  expect("describe_moments.csv");
  expect("describe_growth.csv");
  expect("transformed_data.csv");
  expect("posterior.bin");
  CHECK(fs::exists(fs::path(config.output_dir) / "manifest.json"));
}

TEST_CASE("pipeline runs are byte-identical given the seed") {
  const Fixture f = make_fixture("rb_det", 240, kSmokeMcmc);
  RunConfig a = RunConfig::from_file(f.config_path);
  a.output_dir = (f.dir / "out_a").string();
  RunConfig b = RunConfig::from_file(f.config_path);
  b.output_dir = (f.dir / "out_b").string();
  const RunManifest ma = run(a);
  run(b);
  for (const auto& out : ma.outputs) {
    CHECK_MESSAGE(slurp(fs::path(a.output_dir) / out.name) ==
                      slurp(fs::path(b.output_dir) / out.name),
                  out.name);
  }
}

TEST_CASE("lag auto selection is recorded in the manifest") {
  const Fixture f = make_fixture("rb_auto", 260,
                                 "[mcmc]\nprofile = desk\ndraws = 120\nburn_in = 40\nseed = 5\n"
                                 "[model]\nlag = auto\nlag_max = 3\nlag_criterion = bic\n"
                                 "[analysis]\nhorizon = 12\n"
                                 "[dates]\npeaks = 2012-01,2014-06\ntroughs = 2013-03\n");
  const RunConfig config = RunConfig::from_file(f.config_path);
  const RunManifest manifest = run(config);
  CHECK(manifest.lag_mode == "auto-bic");
  CHECK(manifest.selected_lag >= 1);
  CHECK(manifest.selected_lag <= 3);
  CHECK(fs::exists(fs::path(config.output_dir) / "lag_selection.csv"));
}

TEST_CASE("draw-level plot data emission") {
  const Fixture f = make_fixture("rb_draws", 240,
                                 "[mcmc]\nprofile = desk\ndraws = 80\nburn_in = 20\nseed = 9\n"
                                 "[model]\nlag = 1\n"
                                 "[analysis]\nhorizon = 12\nplot_data = draws\n"
                                 "[dates]\npeaks = 2012-01\ntroughs = 2013-03\n");
  const RunConfig config = RunConfig::from_file(f.config_path);
  run(config);
  const std::string fans = slurp(fs::path(config.output_dir) / "irf_fans_peaks.csv");
  CHECK(fans.rfind("date,horizon,draw,response\n", 0) == 0);
  CHECK(fans.find("2012-01,0,0,") != std::string::npos);
  const std::string dens = slurp(fs::path(config.output_dir) / "rebound_density_peaks.csv");
  CHECK(dens.rfind("date,year,draw,rebound\n", 0) == 0);
  CHECK(dens.find("2012-01,1,") != std::string::npos);
}

TEST_CASE("pipeline failures are stage-tagged and leave a partial manifest") {
  const Fixture f = make_fixture("rb_fail", 240, kSmokeMcmc);
  RunConfig config = RunConfig::from_file(f.config_path);
  config.csv_files = {(f.dir / "nope.csv").string()};
  CHECK_THROWS_WITH_AS(run(config), doctest::Contains("[ingest]"), data_error);
  const std::string manifest = slurp(fs::path(config.output_dir) / "manifest.json");
  CHECK(manifest.find("\"partial\": true") != std::string::npos);
  CHECK(manifest.find("\"failed_stage\": \"ingest\"") != std::string::npos);
}

TEST_CASE("describe and ccf subcommand bodies") {
  const Fixture f = make_fixture("rb_sub", 260,
                                 "[dates]\npeaks = 2012-01,2014-06,2016-09\n"
                                 "[model]\nlag = 2\n");
  const RunConfig config = RunConfig::from_file(f.config_path);
  const auto described = run_describe(config);
  CHECK(described.size() == 3);
  const auto ccfd = run_ccf(config);
  REQUIRE(ccfd.size() == 1);
  const std::string ccf_text = slurp(fs::path(config.output_dir) / "ccf.csv");
  CHECK(ccf_text.find("energy_vs_activity") != std::string::npos);
  CHECK(ccf_text.find("price_vs_energy") != std::string::npos);
}

TEST_CASE("quarterly pipeline aggregates monthly input") {
  const Fixture f = make_fixture("rb_q", 560, "[model]\nlag = 1\n");
  {
    std::ofstream out(f.config_path);
    out << "[data]\n"
        << "csv = " << f.csv_path << "\n"
        << "csv_frequency = monthly\n"
        << "frequency = quarterly\n"
        << "activity_column = bbk\n"
        << "energy_column = energy_btu\n"
        << "price_column = oil_cost\n"
        << "[transforms]\nhamilton_h = 4\nhamilton_p = 2\n"
        << "[mcmc]\nprofile = desk\ndraws = 150\nburn_in = 50\nseed = 3\n"
        << "[model]\nlag = 1\n"
        << "[analysis]\nhorizon = 8\n"
        << "[priors]\ntau = 30\n"
        << "[dates]\npeaks = 2015Q1,2020Q1\ntroughs = 2016Q2\n"
        << "[output]\ndir = " << (f.dir / "out_q").string() << "\n";
  }
  const RunConfig config = RunConfig::from_file(f.config_path);
  CHECK(config.frequency == Frequency::quarterly);
  CHECK(config.csv_frequency == Frequency::monthly);
  const RunManifest manifest = run(config);
  CHECK_FALSE(manifest.partial);
  CHECK(manifest.frequency == "quarterly");
}
