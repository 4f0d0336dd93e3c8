#pragma once

#include <string>
#include <vector>

#include "rebound/config.hpp"
#include "rebound/time_series.hpp"

namespace rebound {

/// Datasets produced by the transform stage: the deflated levels (for the
/// descriptive tables) and the filtered/logged system the sampler sees, both
/// in identification order (activity, energy, prices).
struct PreparedData {
  Dataset levels;
  Dataset estimation;
};

PreparedData prepare_data(const RunConfig& config);

struct OutputFile {
  std::string name;
  std::uintmax_t bytes = 0;
};

/// Truthful inventory of one run; serialized as manifest.json.
struct RunManifest {
  bool partial = false;
  std::string failed_stage;
  std::string error;
  std::string sample_start, sample_end;
  int sample_length = 0;
  std::string estimation_start, estimation_end;
  int estimation_length = 0;
  std::string frequency;
  int selected_lag = 0;
  std::string lag_mode;
  std::uint64_t seed = 0;
  int sweeps = 0;
  int retained = 0;
  std::vector<std::pair<std::string, int>> exclusion_counts;  // per date label
  std::vector<std::string> absent_columns;
  std::vector<OutputFile> outputs;
  std::vector<std::pair<std::string, long>> timings_ms;
  std::vector<std::pair<std::string, std::string>> config_echo;

  std::string to_json() const;
};

/// Full pipeline: ingest, transform, lag selection, Gibbs sampling,
/// date-by-date analysis, table and plot-data emission, manifest. Writes
/// everything under config.output_dir. Deterministic given the seed.
RunManifest run(const RunConfig& config, const ProgressSink& progress = {});

/// Per consecutive-peak window: mean and variance of every variable, and
/// average per-period growth of the designated level variables.
struct DescriptiveTables {
  std::vector<std::string> window_labels;
  std::vector<std::string> variable_names;
  Eigen::MatrixXd means;      // windows x K
  Eigen::MatrixXd variances;  // windows x K
  std::vector<int> growth_variables;  // 0-based column indices
  Eigen::MatrixXd growth;     // windows x growth_variables
};

DescriptiveTables describe_cycles(const Dataset& data, const std::vector<Period>& peaks,
                                  const std::vector<int>& growth_variables);

/// `describe` subcommand body: descriptive tables only. Returns files written.
std::vector<OutputFile> run_describe(const RunConfig& config);

/// `ccf` subcommand body: cross-correlation diagnostics only.
std::vector<OutputFile> run_ccf(const RunConfig& config);

}  // namespace rebound
