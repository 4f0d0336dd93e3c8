#pragma once

#include <string>
#include <vector>

#include "rebound/analysis.hpp"
#include "rebound/transforms.hpp"
#include "rebound/tvp.hpp"

namespace rebound {

/// One flat key-value file (sections in brackets, '#' comments) captures
/// every choice of a run; see the README for the key reference.
struct RunConfig {
  // [data]
  std::vector<std::string> csv_files;
  std::string date_column = "date";
  Frequency csv_frequency = Frequency::monthly;
  Frequency frequency = Frequency::monthly;
  std::string activity_column;
  std::string energy_column;
  std::string price_column;
  std::string cpi_column;  // optional; required when deflate_price is on

  // [transforms]
  bool log_energy = true;
  bool log_price = true;
  bool deflate_price = false;
  std::string deflation_base;  // period string at the csv frequency
  bool hamilton_energy = true;
  bool hamilton_price = true;
  bool hamilton_activity = false;
  int hamilton_h = -1;  // -1: frequency default
  int hamilton_p = -1;
  Aggregation aggregate = Aggregation::mean;

  // [model]
  int lag = -1;  // -1: auto via information criteria
  std::string lag_criterion = "aic";
  int lag_max = -1;  // -1: 12 monthly, 8 quarterly
  bool intercept = true;

  // [shock]
  ShockSpec shock;  // defaults: energy (2nd variable), sign -1, size 1

  // [dates]
  std::vector<CycleDate> peaks;
  std::vector<CycleDate> troughs;

  // [priors]
  int tau = 40;
  TvpScales scales;

  // [mcmc]
  std::string profile = "full";  // "full" or "desk"
  McmcSettings mcmc;

  // [analysis]
  int horizon = -1;  // -1: 60 monthly, 20 quarterly
  std::string plot_data = "percentiles";  // or "draws"
  int ccf_max_lag = 24;
  std::vector<std::string> growth_variables = {"energy", "price"};

  // [output]
  std::string output_dir = "out";
  std::string posterior_file = "posterior.bin";

  int resolved_horizon() const;
  int resolved_lag_max() const;
  HamiltonSpec resolved_hamilton() const;

  /// Loads and validates; `profile_override` (from the CLI) replaces the
  /// file's profile before explicit mcmc keys are applied.
  static RunConfig from_file(const std::string& path, const std::string& profile_override = "");

  void validate() const;
};

/// Preset MCMC settings: "full" 55000/5000/10, "desk" 2000/500/1.
McmcSettings mcmc_profile(const std::string& name);

}  // namespace rebound
