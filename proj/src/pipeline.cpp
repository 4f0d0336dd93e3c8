#include "rebound/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "rebound/analysis.hpp"
#include "rebound/csv.hpp"
#include "rebound/errors.hpp"
#include "rebound/posterior_io.hpp"
#include "rebound/transforms.hpp"

namespace rebound {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v, const char* format = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

TimeSeries renamed(const TimeSeries& s, const std::string& name) {
  return TimeSeries(name, s.unit(), s.start(), s.values());
}

std::map<std::string, TimeSeries> load_inputs(const RunConfig& config) {
  CsvSchema schema;
  schema.date_column = config.date_column;
  schema.frequency = config.csv_frequency;
  std::map<std::string, TimeSeries> pool;
  for (const auto& path : config.csv_files) {
    for (auto& s : load_csv(path, schema)) {
      if (pool.count(s.name())) {
        throw data_error("ingest: column '" + s.name() + "' appears in more than one file");
      }
      pool.emplace(s.name(), std::move(s));
    }
  }
  return pool;
}

const TimeSeries& pick(const std::map<std::string, TimeSeries>& pool, const std::string& column,
                       const std::string& role) {
  auto it = pool.find(column);
  if (it == pool.end()) {
    throw data_error("ingest: " + role + " column '" + column + "' not found in the inputs");
  }
  return it->second;
}

PreparedData build_datasets(const RunConfig& config,
                            const std::map<std::string, TimeSeries>& pool) {
  TimeSeries activity = renamed(pick(pool, config.activity_column, "activity"), "activity");
  TimeSeries energy = renamed(pick(pool, config.energy_column, "energy"), "energy");
  TimeSeries price = renamed(pick(pool, config.price_column, "price"), "price");

  if (config.deflate_price) {
    const TimeSeries& cpi = pick(pool, config.cpi_column, "cpi");
    const Period base = parse_period(config.deflation_base, config.csv_frequency);
    price = renamed(deflate(price, cpi, base), "price");
  }
  if (config.frequency == Frequency::quarterly && config.csv_frequency == Frequency::monthly) {
    activity = to_quarterly(activity, config.aggregate);
    energy = to_quarterly(energy, config.aggregate);
    price = to_quarterly(price, config.aggregate);
  }

  Dataset levels(align_intersection({activity, energy, price}));

  if (config.log_energy) energy = renamed(log_transform(energy), "energy");
  if (config.log_price) price = renamed(log_transform(price), "price");
  const HamiltonSpec hs = config.resolved_hamilton();
  if (config.hamilton_activity) {
    activity = renamed(hamilton_filter(activity, hs.h, hs.p), "activity");
  }
  if (config.hamilton_energy) energy = renamed(hamilton_filter(energy, hs.h, hs.p), "energy");
  if (config.hamilton_price) price = renamed(hamilton_filter(price, hs.h, hs.p), "price");

  return PreparedData{std::move(levels), Dataset(align_intersection({activity, energy, price}))};
}

class OutputWriter {
 public:
  explicit OutputWriter(std::string dir) : dir_(std::move(dir)) {
    fs::create_directories(dir_);
  }

  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  std::ofstream open(const std::string& name) {
    std::ofstream out(path(name));
    if (!out) throw data_error("emit: cannot write '" + path(name) + "'");
    return out;
  }

  void record(const std::string& name) {
    written_.push_back(OutputFile{name, fs::file_size(path(name))});
  }

  const std::vector<OutputFile>& written() const { return written_; }

 private:
  std::string dir_;
  std::vector<OutputFile> written_;
};

void write_rebound_csv(OutputWriter& w, const std::string& name, const ReboundTable& table) {
  auto out = w.open(name);
  out << "horizon_years";
  for (const auto& col : table.columns) out << ',' << col.date.period.str();
  out << '\n';
  for (size_t y = 0; y < table.years.size(); ++y) {
    out << table.years[y];
    for (const auto& col : table.columns) {
      if (col.present) {
        const ReboundCell& c = col.by_year[y];
        out << ',' << fmt(c.median, "%.4f") << '|' << fmt(c.p10, "%.4f") << '|'
            << fmt(c.p90, "%.4f");
      } else {
        out << ",absent";
      }
    }
    out << '\n';
  }
  out.close();
  w.record(name);
}

void write_rebound_txt(OutputWriter& w, const std::string& name, const std::string& title,
                       const ReboundTable& table) {
  auto out = w.open(name);
  out << title << "\n";
  char buf[96];
  out << "horizon    ";
  for (const auto& col : table.columns) {
    std::snprintf(buf, sizeof(buf), " %-22s", col.date.period.str().c_str());
    out << buf;
  }
  out << '\n';
  for (size_t y = 0; y < table.years.size(); ++y) {
    std::snprintf(buf, sizeof(buf), "%d year%s    ", table.years[y],
                  table.years[y] == 1 ? " " : "s");
    out << buf;
    for (const auto& col : table.columns) {
      if (col.present) {
        const ReboundCell& c = col.by_year[y];
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.1f [%.1f, %.1f]", c.median, c.p10, c.p90);
        std::snprintf(buf, sizeof(buf), " %-22s", cell);
      } else {
        std::snprintf(buf, sizeof(buf), " %-22s", "absent");
      }
      out << buf;
    }
    out << '\n';
  }
  out << "Note: p10 and p90 in brackets; shaded columns absent when the sampler\n"
         "could not deliver a usable impulse response at that date.\n";
  out.close();
  w.record(name);
}

void write_fans_csv(OutputWriter& w, const std::string& name, const RunConfig& config,
                    const TvpPosterior& post, const std::vector<CycleDate>& dates,
                    const std::vector<std::string>& var_names) {
  const int H = config.resolved_horizon();
  auto out = w.open(name);
  if (config.plot_data == "draws") {
    out << "date,horizon,draw,response\n";
    for (const auto& cd : dates) {
      IrfPosterior irf;
      try {
        irf = irf_at_date(post, cd.period, H, config.shock);
      } catch (const estimation_error&) {
        continue;  // absent column, recorded via the rebound table
      }
      const int var = irf.shock_variable - 1;
      for (int d = 0; d < irf.draw_count(); ++d) {
        if (!irf.valid[static_cast<size_t>(d)]) continue;
        for (int h = 0; h <= H; ++h) {
          out << cd.period.str() << ',' << h << ',' << d << ','
              << fmt(irf.responses[static_cast<size_t>(d)](var, h)) << '\n';
        }
      }
    }
  } else {
    out << "date,variable,horizon,p17,p50,p83\n";
    for (const auto& cd : dates) {
      IrfPosterior irf;
      try {
        irf = irf_at_date(post, cd.period, H, config.shock);
      } catch (const estimation_error&) {
        continue;
      }
      for (int k = 1; k <= post.spec.K; ++k) {
        const IrfFan fan = irf_fan(irf, k);
        for (int h = 0; h <= H; ++h) {
          out << cd.period.str() << ',' << var_names[static_cast<size_t>(k - 1)] << ',' << h
              << ',' << fmt(fan.bands(h, 0)) << ',' << fmt(fan.bands(h, 1)) << ','
              << fmt(fan.bands(h, 2)) << '\n';
        }
      }
    }
  }
  out.close();
  w.record(name);
}

void write_density_csv(OutputWriter& w, const std::string& name, const RunConfig& config,
                       const TvpPosterior& post, const std::vector<CycleDate>& dates) {
  const int H = config.resolved_horizon();
  const int ppy = periods_per_year(config.frequency);
  auto out = w.open(name);
  if (config.plot_data == "draws") {
    out << "date,year,draw,rebound\n";
  } else {
    out << "date,year,percentile,value\n";
  }
  for (const auto& cd : dates) {
    ReboundDraws rd;
    try {
      rd = rebound_draws(irf_at_date(post, cd.period, H, config.shock), ppy);
    } catch (const estimation_error&) {
      continue;
    }
    const int n = static_cast<int>(rd.values.rows());
    if (rd.excluded > kMaxExclusionShare * n) continue;
    for (size_t y = 0; y < rd.years.size(); ++y) {
      const auto col = static_cast<Eigen::Index>(y);
      if (config.plot_data == "draws") {
        for (int d = 0; d < n; ++d) {
          if (!rd.valid[static_cast<size_t>(d)]) continue;
          out << cd.period.str() << ',' << rd.years[y] << ',' << d << ','
              << fmt(rd.values(d, col)) << '\n';
        }
      } else {
        std::vector<double> vals;
        std::vector<double> pct;
        for (int q = 5; q <= 95; q += 5) pct.push_back(static_cast<double>(q));
        for (int d = 0; d < n; ++d) {
          if (rd.valid[static_cast<size_t>(d)]) vals.push_back(rd.values(d, col));
        }
        const auto s = summarize(std::move(vals), pct);
        for (size_t i = 0; i < pct.size(); ++i) {
          out << cd.period.str() << ',' << rd.years[y] << ',' << fmt(pct[i], "%.0f") << ','
              << fmt(s[i]) << '\n';
        }
      }
    }
  }
  out.close();
  w.record(name);
}

void write_ccf_csv(OutputWriter& w, const std::string& name, const Dataset& data, int max_lag) {
  // Identification diagnostics: energy vs activity, price vs energy.
  auto out = w.open(name);
  out << "pair,lag,coefficient,band\n";
  const std::pair<int, int> pairs[2] = {{1, 0}, {2, 1}};
  for (const auto& [xi, yi] : pairs) {
    const CcfResult r = ccf(data.variable(xi), data.variable(yi), max_lag);
    const std::string label = data.variable(xi).name() + "_vs_" + data.variable(yi).name();
    for (size_t i = 0; i < r.lags.size(); ++i) {
      out << label << ',' << r.lags[i] << ',' << fmt(r.coefficients[i]) << ',' << fmt(r.band)
          << '\n';
    }
  }
  out.close();
  w.record(name);
}

void write_describe_outputs(OutputWriter& w, const DescriptiveTables& tables) {
  {
    auto out = w.open("describe_moments.csv");
    out << "window,variable,mean,variance\n";
    for (size_t wi = 0; wi < tables.window_labels.size(); ++wi) {
      for (size_t k = 0; k < tables.variable_names.size(); ++k) {
        out << tables.window_labels[wi] << ',' << tables.variable_names[k] << ','
            << fmt(tables.means(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(k)))
            << ','
            << fmt(tables.variances(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(k)))
            << '\n';
      }
    }
    out.close();
    w.record("describe_moments.csv");
  }
  {
    auto out = w.open("describe_growth.csv");
    out << "window,variable,avg_growth_pct\n";
    for (size_t wi = 0; wi < tables.window_labels.size(); ++wi) {
      for (size_t g = 0; g < tables.growth_variables.size(); ++g) {
        out << tables.window_labels[wi] << ','
            << tables.variable_names[static_cast<size_t>(tables.growth_variables[g])] << ','
            << fmt(tables.growth(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(g)))
            << '\n';
      }
    }
    out.close();
    w.record("describe_growth.csv");
  }
  {
    auto out = w.open("descriptive_stats.txt");
    out << "Mean and variance per peak-to-peak window\n";
    char buf[96];
    out << "window                ";
    for (const auto& v : tables.variable_names) {
      std::snprintf(buf, sizeof(buf), " %-24s", (v + " (mean, var)").c_str());
      out << buf;
    }
    out << '\n';
    for (size_t wi = 0; wi < tables.window_labels.size(); ++wi) {
      std::snprintf(buf, sizeof(buf), "%-22s", tables.window_labels[wi].c_str());
      out << buf;
      for (size_t k = 0; k < tables.variable_names.size(); ++k) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%.4g, %.4g",
                      tables.means(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(k)),
                      tables.variances(static_cast<Eigen::Index>(wi),
                                       static_cast<Eigen::Index>(k)));
        std::snprintf(buf, sizeof(buf), " %-24s", cell);
        out << buf;
      }
      out << '\n';
    }
    out << "\nAverage per-period growth rates (%)\n";
    for (size_t wi = 0; wi < tables.window_labels.size(); ++wi) {
      std::snprintf(buf, sizeof(buf), "%-22s", tables.window_labels[wi].c_str());
      out << buf;
      for (size_t g = 0; g < tables.growth_variables.size(); ++g) {
        char cell[64];
        std::snprintf(cell, sizeof(cell), "%s %.3f",
                      tables.variable_names[static_cast<size_t>(tables.growth_variables[g])]
                          .c_str(),
                      tables.growth(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(g)));
        std::snprintf(buf, sizeof(buf), " %-24s", cell);
        out << buf;
      }
      out << '\n';
    }
    out.close();
    w.record("descriptive_stats.txt");
  }
}

std::vector<int> growth_indices(const RunConfig& config) {
  std::vector<int> out;
  for (const auto& g : config.growth_variables) {
    if (g == "activity") out.push_back(0);
    if (g == "energy") out.push_back(1);
    if (g == "price") out.push_back(2);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& c) {
  std::vector<std::pair<std::string, std::string>> e;
  auto add = [&](const std::string& k, const std::string& v) { e.emplace_back(k, v); };
  std::string files;
  for (const auto& f : c.csv_files) files += (files.empty() ? "" : ";") + f;
  add("data.csv", files);
  add("data.frequency", std::string(frequency_name(c.frequency)));
  add("data.csv_frequency", std::string(frequency_name(c.csv_frequency)));
  add("data.activity_column", c.activity_column);
  add("data.energy_column", c.energy_column);
  add("data.price_column", c.price_column);
  add("data.cpi_column", c.cpi_column);
  add("transforms.log_energy", c.log_energy ? "true" : "false");
  add("transforms.log_price", c.log_price ? "true" : "false");
  add("transforms.deflate_price", c.deflate_price ? "true" : "false");
  add("transforms.deflation_base", c.deflation_base);
  add("transforms.hamilton",
      std::string(c.hamilton_activity ? "activity," : "") + (c.hamilton_energy ? "energy," : "") +
          (c.hamilton_price ? "price" : ""));
  add("transforms.hamilton_h", std::to_string(c.resolved_hamilton().h));
  add("transforms.hamilton_p", std::to_string(c.resolved_hamilton().p));
  add("transforms.aggregate", c.aggregate == Aggregation::mean
                                  ? "mean"
                                  : (c.aggregate == Aggregation::sum ? "sum" : "last"));
  add("model.lag", c.lag < 0 ? "auto" : std::to_string(c.lag));
  add("model.lag_criterion", c.lag_criterion);
  add("model.intercept", c.intercept ? "true" : "false");
  add("shock.variable", std::to_string(c.shock.variable));
  add("shock.sign", fmt(c.shock.sign, "%g"));
  add("shock.size", fmt(c.shock.size, "%g"));
  add("priors.tau", std::to_string(c.tau));
  add("priors.k_q", fmt(c.scales.k_q, "%g"));
  add("priors.k_s", fmt(c.scales.k_s, "%g"));
  add("priors.k_w", fmt(c.scales.k_w, "%g"));
  add("mcmc.profile", c.profile);
  add("mcmc.draws", std::to_string(c.mcmc.n_draws));
  add("mcmc.burn_in", std::to_string(c.mcmc.burn_in));
  add("mcmc.thin", std::to_string(c.mcmc.thin));
  add("mcmc.seed", std::to_string(c.mcmc.seed));
  add("mcmc.stationarity_rejection", c.mcmc.stationarity_rejection ? "true" : "false");
  add("mcmc.max_rejections", std::to_string(c.mcmc.max_rejections));
  add("analysis.horizon", std::to_string(c.resolved_horizon()));
  add("analysis.plot_data", c.plot_data);
  add("analysis.ccf_max_lag", std::to_string(c.ccf_max_lag));
  add("output.dir", c.output_dir);
  return e;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config) {
  return build_datasets(config, load_inputs(config));
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["partial"] = partial;
  if (partial) {
    j["failed_stage"] = failed_stage;
    j["error"] = error;
  }
  j["frequency"] = frequency;
  j["sample"] = {{"start", sample_start},
                 {"end", sample_end},
                 {"length", sample_length},
                 {"estimation_start", estimation_start},
                 {"estimation_end", estimation_end},
                 {"estimation_length", estimation_length}};
  j["lag"] = {{"mode", lag_mode}, {"selected", selected_lag}};
  j["seed"] = seed;
  j["mcmc"] = {{"sweeps", sweeps}, {"retained", retained}};
  nlohmann::ordered_json excl = nlohmann::ordered_json::object();
  for (const auto& [k, v] : exclusion_counts) excl[k] = v;
  j["excluded_draws"] = excl;
  j["absent_columns"] = absent_columns;
  nlohmann::ordered_json outs = nlohmann::ordered_json::array();
  for (const auto& f : outputs) outs.push_back({{"file", f.name}, {"bytes", f.bytes}});
  j["outputs"] = outs;
  nlohmann::ordered_json times = nlohmann::ordered_json::object();
  for (const auto& [k, v] : timings_ms) times[k] = v;
  j["timings_ms"] = times;
  nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_echo) cfg[k] = v;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

DescriptiveTables describe_cycles(const Dataset& data, const std::vector<Period>& peaks,
                                  const std::vector<int>& growth_variables) {
  if (peaks.size() < 2) throw data_error("describe: need at least two peak dates");
  std::vector<int> idx;
  for (const auto& p : peaks) {
    const int i = data.index_of(p);
    if (i < 0) {
      throw data_error("describe: date " + p.str() + " outside sample " + data.start().str() +
                       ".." + data.period_at(data.T() - 1).str());
    }
    idx.push_back(i);
  }
  std::sort(idx.begin(), idx.end());
  for (size_t i = 1; i < idx.size(); ++i) {
    if (idx[i] == idx[i - 1]) throw data_error("describe: duplicate peak dates");
  }
  for (int g : growth_variables) {
    if (g < 0 || g >= data.K()) throw data_error("describe: growth variable index out of range");
  }

  const int windows = static_cast<int>(idx.size()) - 1;
  DescriptiveTables out;
  out.growth_variables = growth_variables;
  for (int k = 0; k < data.K(); ++k) out.variable_names.push_back(data.variable(k).name());
  out.means.resize(windows, data.K());
  out.variances.resize(windows, data.K());
  out.growth.resize(windows, static_cast<Eigen::Index>(growth_variables.size()));

  for (int wi = 0; wi < windows; ++wi) {
    const int a = idx[static_cast<size_t>(wi)];
    const int b = idx[static_cast<size_t>(wi) + 1];  // window [a, b)
    const int n = b - a;
    out.window_labels.push_back(data.period_at(a).str() + ".." + data.period_at(b).str());
    for (int k = 0; k < data.K(); ++k) {
      const auto seg = data.matrix().col(k).segment(a, n);
      const double mean = seg.mean();
      double var = 0.0;
      if (n > 1) var = (seg.array() - mean).square().sum() / (n - 1);
      out.means(wi, k) = mean;
      out.variances(wi, k) = var;
    }
    for (size_t g = 0; g < growth_variables.size(); ++g) {
      const int k = growth_variables[g];
      double acc = 0.0;
      int count = 0;
      for (int t = a + 1; t < b; ++t) {
        const double prev = data.matrix()(t - 1, k);
        if (prev == 0.0) {
          throw data_error("describe: zero level at " + data.period_at(t - 1).str() +
                           " prevents a growth rate for '" + data.variable(k).name() + "'");
        }
        acc += 100.0 * (data.matrix()(t, k) / prev - 1.0);
        ++count;
      }
      out.growth(wi, static_cast<Eigen::Index>(g)) = count > 0 ? acc / count : 0.0;
    }
  }
  return out;
}

RunManifest run(const RunConfig& config, const ProgressSink& progress) {
  RunManifest manifest;
  manifest.seed = config.mcmc.seed;
  manifest.frequency = std::string(frequency_name(config.frequency));
  manifest.config_echo = echo_config(config);
  OutputWriter writer(config.output_dir);

  const auto t0 = std::chrono::steady_clock::now();
  auto lap = [last = t0]() mutable {
    const auto now = std::chrono::steady_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - last).count();
    last = now;
    return static_cast<long>(ms);
  };

  std::string stage = "ingest";
  try {
    std::map<std::string, TimeSeries> pool = load_inputs(config);
    manifest.timings_ms.emplace_back("ingest", lap());

    stage = "transform";
    PreparedData prepared = build_datasets(config, pool);
    const Dataset& est = prepared.estimation;
    manifest.sample_start = prepared.levels.start().str();
    manifest.sample_end = prepared.levels.period_at(prepared.levels.T() - 1).str();
    manifest.sample_length = prepared.levels.T();
    {
      std::vector<TimeSeries> vars = est.variables();
      write_csv(writer.path("transformed_data.csv"), vars, config.date_column);
      writer.record("transformed_data.csv");
    }
    manifest.timings_ms.emplace_back("transform", lap());

    stage = "lag-selection";
    int p = config.lag;
    if (p < 0) {
      const LagSelection sel = select_lag(est, config.resolved_lag_max(), config.intercept);
      p = config.lag_criterion == "bic" ? sel.p_bic : sel.p_aic;
      manifest.lag_mode = "auto-" + config.lag_criterion;
      auto out = writer.open("lag_selection.csv");
      out << "p,aic,bic\n";
      for (const auto& row : sel.table) {
        out << row.p << ',' << fmt(row.aic) << ',' << fmt(row.bic) << '\n';
      }
      out.close();
      writer.record("lag_selection.csv");
    } else {
      manifest.lag_mode = "fixed";
    }
    manifest.selected_lag = p;
    manifest.timings_ms.emplace_back("lag-selection", lap());

    stage = "sample";
    const VarSpec spec{est.K(), p, config.intercept};
    const TvpPriors priors = init_priors(est, spec, config.tau, config.scales);
    const TvpPosterior post = gibbs_run(est, spec, priors, config.mcmc, progress);
    manifest.sweeps = config.mcmc.n_draws;
    manifest.retained = static_cast<int>(post.draws.size());
    manifest.estimation_start = post.est_start.str();
    manifest.estimation_end = post.est_start.plus(post.t_est - 1).str();
    manifest.estimation_length = post.t_est;
    save_posterior(writer.path(config.posterior_file), post);
    writer.record(config.posterior_file);
    manifest.timings_ms.emplace_back("sample", lap());

    stage = "analysis";
    const int H = config.resolved_horizon();
    std::vector<std::string> var_names;
    for (int k = 0; k < est.K(); ++k) var_names.push_back(est.variable(k).name());

    const ReboundTable peaks_table =
        rebound_table(post, config.peaks, config.shock, H, Execution::parallel);
    const ReboundTable troughs_table =
        rebound_table(post, config.troughs, config.shock, H, Execution::parallel);
    for (const auto& table : {peaks_table, troughs_table}) {
      for (const auto& col : table.columns) {
        manifest.exclusion_counts.emplace_back(col.date.period.str(), col.excluded);
        if (!col.present) {
          manifest.absent_columns.push_back(col.date.period.str() + ": " + col.absence_reason);
        }
      }
    }
    write_rebound_csv(writer, "rebound_peaks.csv", peaks_table);
    write_rebound_csv(writer, "rebound_troughs.csv", troughs_table);
    write_rebound_txt(writer, "rebound_peaks.txt",
                      "Posterior median rebound effect, business-cycle peaks", peaks_table);
    write_rebound_txt(writer, "rebound_troughs.txt",
                      "Posterior median rebound effect, business-cycle troughs", troughs_table);
    write_fans_csv(writer, "irf_fans_peaks.csv", config, post, config.peaks, var_names);
    write_fans_csv(writer, "irf_fans_troughs.csv", config, post, config.troughs, var_names);
    write_density_csv(writer, "rebound_density_peaks.csv", config, post, config.peaks);
    write_density_csv(writer, "rebound_density_troughs.csv", config, post, config.troughs);
    write_ccf_csv(writer, "ccf.csv", est, config.ccf_max_lag);

    stage = "describe";
    std::vector<Period> peak_periods;
    for (const auto& d : config.peaks) peak_periods.push_back(d.period);
    bool all_inside = peak_periods.size() >= 2;
    for (const auto& p2 : peak_periods) {
      if (prepared.levels.index_of(p2) < 0) all_inside = false;
    }
    if (all_inside) {
      const DescriptiveTables tables =
          describe_cycles(prepared.levels, peak_periods, growth_indices(config));
      write_describe_outputs(writer, tables);
    } else {
      manifest.absent_columns.push_back(
          "descriptive tables skipped: peak dates not all inside the level sample");
    }
    manifest.timings_ms.emplace_back("analysis", lap());
  } catch (const std::exception& e) {
    manifest.partial = true;
    manifest.failed_stage = stage;
    manifest.error = e.what();
    manifest.outputs = writer.written();
    auto out = writer.open("manifest.json");
    out << manifest.to_json();
    out.close();
    const std::string tagged = "[" + stage + "] " + e.what();
    // Preserve the error class so the CLI exit code stays truthful.
    if (dynamic_cast<const config_error*>(&e)) throw config_error(tagged);
    if (dynamic_cast<const data_error*>(&e)) throw data_error(tagged);
    throw estimation_error(tagged);
  }

  manifest.outputs = writer.written();
  const auto total =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0)
          .count();
  manifest.timings_ms.emplace_back("total", static_cast<long>(total));
  auto out = writer.open("manifest.json");
  out << manifest.to_json();
  out.close();
  return manifest;
}

std::vector<OutputFile> run_describe(const RunConfig& config) {
  const PreparedData prepared = prepare_data(config);
  std::vector<Period> peak_periods;
  for (const auto& d : config.peaks) peak_periods.push_back(d.period);
  const DescriptiveTables tables =
      describe_cycles(prepared.levels, peak_periods, growth_indices(config));
  OutputWriter writer(config.output_dir);
  write_describe_outputs(writer, tables);
  return writer.written();
}

std::vector<OutputFile> run_ccf(const RunConfig& config) {
  const PreparedData prepared = prepare_data(config);
  OutputWriter writer(config.output_dir);
  write_ccf_csv(writer, "ccf.csv", prepared.estimation, config.ccf_max_lag);
  return writer.written();
}

}  // namespace rebound
