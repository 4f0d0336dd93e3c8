#include "rebound/config.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "rebound/errors.hpp"

namespace rebound {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !out.empty()) out.push_back(last);
  return out;
}

class KeyValues {
 public:
  void add(const std::string& key, const std::string& value) { pairs_.emplace_back(key, value); }

  bool has(const std::string& key) const {
    for (const auto& [k, v] : pairs_) {
      if (k == key) return true;
    }
    return false;
  }

  std::string get(const std::string& key, const std::string& fallback = "") const {
    std::string out = fallback;
    for (const auto& [k, v] : pairs_) {
      if (k == key) out = v;
    }
    return out;
  }

  std::vector<std::string> get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : pairs_) {
      if (k == key) out.push_back(v);
    }
    return out;
  }

  int get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw config_error("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
    return out;
  }

  double get_double(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
      throw config_error("config: key '" + key + "' expects a number, got '" + v + "'");
    }
    return out;
  }

  bool get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = get(key);
    if (v == "true" || v == "on" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "off" || v == "0" || v == "no") return false;
    throw config_error("config: key '" + key + "' expects a boolean, got '" + v + "'");
  }

  const std::vector<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

 private:
  std::vector<std::pair<std::string, std::string>> pairs_;
};

KeyValues parse_ini(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  KeyValues kv;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("config line " + std::to_string(lineno) + ": malformed section");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw config_error("config line " + std::to_string(lineno) + ": empty key");
    }
    kv.add(section.empty() ? key : section + "." + key, value);
  }
  return kv;
}

Frequency parse_frequency(const std::string& v, const std::string& key) {
  if (v == "monthly") return Frequency::monthly;
  if (v == "quarterly") return Frequency::quarterly;
  throw config_error("config: key '" + key + "' expects monthly|quarterly, got '" + v + "'");
}

std::vector<CycleDate> parse_dates(const std::string& value, CycleDate::Label label,
                                   Frequency freq) {
  if (value.empty()) return {};
  if (value.rfind("paper-", 0) == 0) return builtin_cycle_dates(value);
  std::vector<CycleDate> out;
  for (const auto& item : split_list(value)) {
    try {
      out.push_back(CycleDate{label, parse_period(item, freq)});
    } catch (const data_error& e) {
      throw config_error(std::string("config: bad cycle date: ") + e.what());
    }
  }
  return out;
}

const char* const kKnownKeys[] = {
    "data.csv", "data.date_column", "data.csv_frequency", "data.frequency",
    "data.activity_column", "data.energy_column", "data.price_column", "data.cpi_column",
    "transforms.log_energy", "transforms.log_price", "transforms.deflate_price",
    "transforms.deflation_base", "transforms.hamilton_energy", "transforms.hamilton_price",
    "transforms.hamilton_activity", "transforms.hamilton_h", "transforms.hamilton_p",
    "transforms.aggregate",
    "model.lag", "model.lag_criterion", "model.lag_max", "model.intercept",
    "shock.variable", "shock.sign", "shock.size",
    "dates.peaks", "dates.troughs",
    "priors.tau", "priors.k_q", "priors.k_s", "priors.k_w",
    "mcmc.profile", "mcmc.draws", "mcmc.burn_in", "mcmc.thin", "mcmc.seed",
    "mcmc.stationarity_rejection", "mcmc.max_rejections",
    "analysis.horizon", "analysis.plot_data", "analysis.ccf_max_lag",
    "analysis.growth_variables",
    "output.dir", "output.posterior",
};

}  // namespace

int RunConfig::resolved_horizon() const {
  if (horizon > 0) return horizon;
  return frequency == Frequency::monthly ? 60 : 20;
}

int RunConfig::resolved_lag_max() const {
  if (lag_max > 0) return lag_max;
  return frequency == Frequency::monthly ? 12 : 8;
}

HamiltonSpec RunConfig::resolved_hamilton() const {
  HamiltonSpec spec = hamilton_defaults(frequency);
  if (hamilton_h > 0) spec.h = hamilton_h;
  if (hamilton_p > 0) spec.p = hamilton_p;
  return spec;
}

McmcSettings mcmc_profile(const std::string& name) {
  McmcSettings s;
  if (name == "full") {
    s.n_draws = 55000;
    s.burn_in = 5000;
    s.thin = 10;
  } else if (name == "desk") {
    s.n_draws = 2000;
    s.burn_in = 500;
    s.thin = 1;
  } else {
    throw config_error("config: unknown mcmc profile '" + name + "' (full|desk)");
  }
  return s;
}

RunConfig RunConfig::from_file(const std::string& path, const std::string& profile_override) {
  const KeyValues kv = parse_ini(path);
  for (const auto& [key, value] : kv.pairs()) {
    bool known = false;
    for (const char* k : kKnownKeys) {
      if (key == k) known = true;
    }
    if (!known) throw config_error("config: unknown key '" + key + "'");
  }

  RunConfig c;
  c.csv_files = kv.get_all("data.csv");
  c.date_column = kv.get("data.date_column", c.date_column);
  c.csv_frequency = parse_frequency(kv.get("data.csv_frequency", "monthly"), "csv_frequency");
  c.frequency = parse_frequency(
      kv.get("data.frequency", std::string(frequency_name(c.csv_frequency))), "frequency");
  c.activity_column = kv.get("data.activity_column");
  c.energy_column = kv.get("data.energy_column");
  c.price_column = kv.get("data.price_column");
  c.cpi_column = kv.get("data.cpi_column");

  c.log_energy = kv.get_bool("transforms.log_energy", c.log_energy);
  c.log_price = kv.get_bool("transforms.log_price", c.log_price);
  c.deflate_price = kv.get_bool("transforms.deflate_price", !c.cpi_column.empty());
  c.deflation_base = kv.get("transforms.deflation_base");
  c.hamilton_energy = kv.get_bool("transforms.hamilton_energy", c.hamilton_energy);
  c.hamilton_price = kv.get_bool("transforms.hamilton_price", c.hamilton_price);
  c.hamilton_activity = kv.get_bool("transforms.hamilton_activity", c.hamilton_activity);
  c.hamilton_h = kv.get_int("transforms.hamilton_h", c.hamilton_h);
  c.hamilton_p = kv.get_int("transforms.hamilton_p", c.hamilton_p);
  if (kv.has("transforms.aggregate")) {
    const std::string a = kv.get("transforms.aggregate");
    if (a == "mean") c.aggregate = Aggregation::mean;
    else if (a == "sum") c.aggregate = Aggregation::sum;
    else if (a == "last") c.aggregate = Aggregation::last;
    else throw config_error("config: aggregate expects mean|sum|last, got '" + a + "'");
  }

  if (kv.has("model.lag")) {
    const std::string lag = kv.get("model.lag");
    if (lag == "auto") {
      c.lag = -1;
    } else {
      c.lag = kv.get_int("model.lag", -1);
      if (c.lag < 1) throw config_error("config: model.lag expects 'auto' or a positive integer");
    }
  }
  c.lag_criterion = kv.get("model.lag_criterion", c.lag_criterion);
  if (c.lag_criterion != "aic" && c.lag_criterion != "bic") {
    throw config_error("config: lag_criterion expects aic|bic");
  }
  c.lag_max = kv.get_int("model.lag_max", c.lag_max);
  c.intercept = kv.get_bool("model.intercept", c.intercept);

  c.shock.variable = kv.get_int("shock.variable", c.shock.variable);
  c.shock.sign = kv.get_double("shock.sign", c.shock.sign);
  c.shock.size = kv.get_double("shock.size", c.shock.size);

  c.peaks = parse_dates(kv.get("dates.peaks"), CycleDate::Label::peak, c.frequency);
  c.troughs = parse_dates(kv.get("dates.troughs"), CycleDate::Label::trough, c.frequency);
  if (c.peaks.empty()) {
    c.peaks = builtin_cycle_dates(c.frequency == Frequency::monthly ? "paper-peaks-monthly"
                                                                    : "paper-peaks-quarterly");
  }
  if (c.troughs.empty()) {
    c.troughs = builtin_cycle_dates(c.frequency == Frequency::monthly
                                        ? "paper-troughs-monthly"
                                        : "paper-troughs-quarterly");
  }

  c.tau = kv.get_int("priors.tau", c.tau);
  c.scales.k_q = kv.get_double("priors.k_q", c.scales.k_q);
  c.scales.k_s = kv.get_double("priors.k_s", c.scales.k_s);
  c.scales.k_w = kv.get_double("priors.k_w", c.scales.k_w);

  c.profile = profile_override.empty() ? kv.get("mcmc.profile", c.profile) : profile_override;
  c.mcmc = mcmc_profile(c.profile);
  c.mcmc.n_draws = kv.get_int("mcmc.draws", c.mcmc.n_draws);
  c.mcmc.burn_in = kv.get_int("mcmc.burn_in", c.mcmc.burn_in);
  c.mcmc.thin = kv.get_int("mcmc.thin", c.mcmc.thin);
  c.mcmc.seed = static_cast<std::uint64_t>(kv.get_int("mcmc.seed", 0));
  c.mcmc.stationarity_rejection =
      kv.get_bool("mcmc.stationarity_rejection", c.mcmc.stationarity_rejection);
  c.mcmc.max_rejections = kv.get_int("mcmc.max_rejections", c.mcmc.max_rejections);

  c.horizon = kv.get_int("analysis.horizon", c.horizon);
  c.plot_data = kv.get("analysis.plot_data", c.plot_data);
  if (c.plot_data != "percentiles" && c.plot_data != "draws") {
    throw config_error("config: plot_data expects percentiles|draws");
  }
  c.ccf_max_lag = kv.get_int("analysis.ccf_max_lag", c.ccf_max_lag);
  if (kv.has("analysis.growth_variables")) {
    c.growth_variables = split_list(kv.get("analysis.growth_variables"));
  }

  c.output_dir = kv.get("output.dir", c.output_dir);
  c.posterior_file = kv.get("output.posterior", c.posterior_file);

  c.validate();
  return c;
}

void RunConfig::validate() const {
  if (csv_files.empty()) throw config_error("config: at least one data.csv entry is required");
  if (activity_column.empty() || energy_column.empty() || price_column.empty()) {
    throw config_error(
        "config: activity_column, energy_column, and price_column are all required "
        "(identification order y, e, pr)");
  }
  if (deflate_price) {
    if (cpi_column.empty()) {
      throw config_error("config: deflate_price needs a cpi_column");
    }
    if (deflation_base.empty()) {
      throw config_error("config: deflate_price needs a deflation_base period");
    }
  }
  if (frequency == Frequency::monthly && csv_frequency == Frequency::quarterly) {
    throw config_error("config: cannot disaggregate quarterly input to monthly");
  }
  if (shock.variable < 1 || shock.variable > 3) {
    throw config_error("config: shock.variable must be 1..3 (y, e, pr)");
  }
  if (!(shock.size > 0.0)) throw config_error("config: shock.size must be positive");
  if (tau < 1) throw config_error("config: priors.tau must be positive");
  for (const auto& g : growth_variables) {
    if (g != "activity" && g != "energy" && g != "price") {
      throw config_error("config: growth_variables entries must be activity|energy|price");
    }
  }
  mcmc.validate();
  for (const auto& d : peaks) {
    if (d.period.freq != frequency) {
      throw config_error("config: peak date " + d.period.str() +
                         " does not match the estimation frequency");
    }
  }
  for (const auto& d : troughs) {
    if (d.period.freq != frequency) {
      throw config_error("config: trough date " + d.period.str() +
                         " does not match the estimation frequency");
    }
  }
}

}  // namespace rebound
