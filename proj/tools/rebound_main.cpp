#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "rebound/csv.hpp"
#include "rebound/errors.hpp"
#include "rebound/pipeline.hpp"
#include "rebound/synthetic.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitEstimation = 3;

rebound::RunConfig load_config(const std::string& path, const std::string& profile,
                               long long seed, const std::string& out_dir) {
  rebound::RunConfig config = rebound::RunConfig::from_file(path, profile);
  if (seed >= 0) config.mcmc.seed = static_cast<std::uint64_t>(seed);
  if (!out_dir.empty()) config.output_dir = out_dir;
  return config;
}

int cmd_run(const std::string& config_path, const std::string& profile, long long seed,
            const std::string& out_dir, bool quiet) {
  rebound::RunConfig config = load_config(config_path, profile, seed, out_dir);
  std::atomic<int> last_pct{-1};
  rebound::ProgressSink progress;
  if (!quiet) {
    progress = [&last_pct](int done, int total) {
      const int pct = static_cast<int>(100LL * done / total);
      int prev = last_pct.load();
      if (pct / 5 > prev / 5 && last_pct.compare_exchange_strong(prev, pct)) {
        std::fprintf(stderr, "sampling: %d/%d sweeps (%d%%)\n", done, total, pct);
      }
    };
  }
  const rebound::RunManifest manifest = rebound::run(config, progress);
  if (!quiet) {
    std::fprintf(stderr, "run complete: %d retained draws, %zu output files in %s\n",
                 manifest.retained, manifest.outputs.size(), config.output_dir.c_str());
  }
  return 0;
}

int cmd_describe(const std::string& config_path, const std::string& out_dir) {
  rebound::RunConfig config = load_config(config_path, "", -1, out_dir);
  for (const auto& f : rebound::run_describe(config)) {
    std::fprintf(stderr, "wrote %s (%ju bytes)\n", f.name.c_str(), f.bytes);
  }
  return 0;
}

int cmd_ccf(const std::string& config_path, const std::string& out_dir) {
  rebound::RunConfig config = load_config(config_path, "", -1, out_dir);
  for (const auto& f : rebound::run_ccf(config)) {
    std::fprintf(stderr, "wrote %s (%ju bytes)\n", f.name.c_str(), f.bytes);
  }
  return 0;
}

int cmd_simulate(const std::string& out_path, int K, int p, int T, long long seed, double q,
                 double s, double w, const std::string& start, const std::string& freq_name,
                 const std::string& truth_path) {
  const rebound::Frequency freq =
      freq_name == "quarterly" ? rebound::Frequency::quarterly : rebound::Frequency::monthly;
  rebound::SyntheticSpec spec = rebound::default_synthetic_spec(K, p, T,
                                                                static_cast<std::uint64_t>(seed));
  spec.start = rebound::parse_period(start, freq);
  const auto vs = spec.var_spec();
  spec.q = q * Eigen::MatrixXd::Identity(vs.n_beta(), vs.n_beta());
  spec.s = s * Eigen::MatrixXd::Identity(vs.n_alpha(), vs.n_alpha());
  spec.w = w * Eigen::MatrixXd::Identity(K, K);
  const rebound::TvpSimulation sim = rebound::simulate_tvp(spec);
  rebound::write_csv(out_path, sim.data.variables());
  std::fprintf(stderr, "wrote %s (%d observations, K=%d)\n", out_path.c_str(), sim.data.T(), K);
  if (!truth_path.empty()) {
    std::ofstream out(truth_path);
    if (!out) throw rebound::data_error("simulate: cannot write '" + truth_path + "'");
    out << "t";
    for (int i = 0; i < sim.truth.beta.cols(); ++i) out << ",beta" << i + 1;
    for (int i = 0; i < sim.truth.alpha.cols(); ++i) out << ",alpha" << i + 1;
    for (int i = 0; i < sim.truth.logvol.cols(); ++i) out << ",logvol" << i + 1;
    out << '\n';
    char buf[40];
    for (int t = 0; t < T; ++t) {
      out << t + 1;
      auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << ',' << buf;
      };
      for (int i = 0; i < sim.truth.beta.cols(); ++i) emit(sim.truth.beta(t, i));
      for (int i = 0; i < sim.truth.alpha.cols(); ++i) emit(sim.truth.alpha(t, i));
      for (int i = 0; i < sim.truth.logvol.cols(); ++i) emit(sim.truth.logvol(t, i));
      out << '\n';
    }
    std::fprintf(stderr, "wrote %s\n", truth_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-varying VAR estimation of economy-wide rebound effects"};
  app.require_subcommand(1);

  std::string config_path, out_dir, profile;
  long long seed = -1;
  bool quiet = false;

  auto* run_cmd = app.add_subcommand("run", "Full pipeline: ingest, sample, analyze, emit");
  run_cmd->add_option("-c,--config", config_path, "Run configuration file")->required();
  run_cmd->add_option("-o,--out", out_dir, "Output directory (overrides config)");
  run_cmd->add_option("--seed", seed, "Seed override");
  run_cmd->add_option("--profile", profile, "MCMC profile override (full|desk)");
  run_cmd->add_flag("-q,--quiet", quiet, "Suppress progress output");

  auto* describe_cmd = app.add_subcommand("describe", "Descriptive peak-to-peak tables only");
  describe_cmd->add_option("-c,--config", config_path, "Run configuration file")->required();
  describe_cmd->add_option("-o,--out", out_dir, "Output directory (overrides config)");

  auto* ccf_cmd = app.add_subcommand("ccf", "Cross-correlation diagnostics only");
  ccf_cmd->add_option("-c,--config", config_path, "Run configuration file")->required();
  ccf_cmd->add_option("-o,--out", out_dir, "Output directory (overrides config)");

  std::string sim_out = "synthetic.csv", sim_truth, sim_start = "1990-01", sim_freq = "monthly";
  int sim_k = 3, sim_p = 2, sim_t = 200;
  long long sim_seed = 1;
  double sim_q = 0.0, sim_s = 0.0, sim_w = 0.0;
  auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic dataset in the input schema");
  sim_cmd->add_option("-o,--out", sim_out, "Output CSV path");
  sim_cmd->add_option("--truth", sim_truth, "Also write the true parameter paths to this CSV");
  sim_cmd->add_option("-k,--variables", sim_k, "Number of variables");
  sim_cmd->add_option("-p,--lags", sim_p, "Lag order");
  sim_cmd->add_option("-t,--length", sim_t, "Observations");
  sim_cmd->add_option("--seed", sim_seed, "Seed");
  sim_cmd->add_option("--q-scale", sim_q, "Coefficient random-walk innovation variance");
  sim_cmd->add_option("--s-scale", sim_s, "Contemporaneous-relation innovation variance");
  sim_cmd->add_option("--w-scale", sim_w, "Log-volatility innovation variance");
  sim_cmd->add_option("--start", sim_start, "Start period (YYYY-MM or YYYYQq)");
  sim_cmd->add_option("--frequency", sim_freq, "monthly|quarterly");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(config_path, profile, seed, out_dir, quiet);
    if (describe_cmd->parsed()) return cmd_describe(config_path, out_dir);
    if (ccf_cmd->parsed()) return cmd_ccf(config_path, out_dir);
    if (sim_cmd->parsed()) {
      return cmd_simulate(sim_out, sim_k, sim_p, sim_t, sim_seed, sim_q, sim_s, sim_w, sim_start,
                          sim_freq, sim_truth);
    }
  } catch (const rebound::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const rebound::data_error& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const rebound::estimation_error& e) {
    std::fprintf(stderr, "estimation error: %s\n", e.what());
    return kExitEstimation;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitEstimation;
  }
  return 0;
}
