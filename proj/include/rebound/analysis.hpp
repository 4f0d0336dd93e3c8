#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "rebound/tvp.hpp"

namespace rebound {

/// Per-draw impulse responses of every variable to one shock at one date.
/// Draws flagged invalid (non-finite propagation, only possible with
/// stationarity rejection off) are kept in place but excluded from
/// summaries; the exclusion count is always reported.
struct IrfPosterior {
  Period date;
  int horizon = 0;
  int shock_variable = 0;                   // 1-based
  std::vector<Eigen::MatrixXd> responses;   // per draw, K x (H+1)
  std::vector<char> valid;
  int excluded_count = 0;

  int draw_count() const { return static_cast<int>(responses.size()); }
};

enum class Execution { serial, parallel };

/// Responses with parameters frozen at their date-t values over the whole
/// horizon; the shock size is each draw's own date-t standard deviation
/// scaled by the shock spec. Intercepts play no role in propagation.
/// The parallel driver and the serial reference produce identical output.
IrfPosterior irf_at_date(const TvpPosterior& post, const Period& date, int horizon,
                         const ShockSpec& shock, Execution exec = Execution::parallel);
IrfPosterior irf_at_date_serial(const TvpPosterior& post, const Period& date, int horizon,
                                const ShockSpec& shock);

/// Single-draw kernel shared by both drivers.
Eigen::MatrixXd irf_single_draw(const TvpDraw& draw, int t_index, int horizon,
                                const ShockSpec& shock, const VarSpec& spec);

/// Rebound percentages at years 1..years from one draw's energy-response
/// path: (1 - x_{i*ppy}/x_0) * 100. Returns nullopt when the immediate
/// response is numerically zero (draw excluded, never silently patched).
std::optional<std::vector<double>> rebound_path(const Eigen::VectorXd& energy_response,
                                                int periods_per_year, int years = 5);

/// Empirical percentiles by linear interpolation of order statistics.
/// `percentiles` in [0, 100]; at least 2 values required.
std::vector<double> summarize(std::vector<double> values,
                              const std::vector<double>& percentiles);

struct CycleDate {
  enum class Label { peak, trough };
  Label label = Label::peak;
  Period period;

  std::string label_name() const { return label == Label::peak ? "peak" : "trough"; }
};

struct ReboundCell {
  double median = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

/// One table column per business-cycle date; a date whose computation fails
/// (outside the sample, or more than 10% of draws excluded) is present in
/// the table but marked absent with the reason recorded.
struct ReboundColumn {
  CycleDate date;
  bool present = false;
  std::string absence_reason;
  int excluded = 0;
  int total = 0;
  std::vector<ReboundCell> by_year;
};

struct ReboundTable {
  std::vector<int> years;  // 1..5
  std::vector<ReboundColumn> columns;
};

ReboundTable rebound_table(const TvpPosterior& post, const std::vector<CycleDate>& dates,
                           const ShockSpec& shock, int horizon,
                           Execution exec = Execution::parallel);

/// Per-draw rebound values for one date (density plot data); parallel to
/// the posterior draws, invalid entries flagged.
struct ReboundDraws {
  std::vector<int> years;
  Eigen::MatrixXd values;  // draws x years, NaN where excluded
  std::vector<char> valid;
  int excluded = 0;
};

ReboundDraws rebound_draws(const IrfPosterior& irf, int periods_per_year, int years = 5);

/// Fraction of draws excluded above which summaries are refused.
inline constexpr double kMaxExclusionShare = 0.10;

/// Fan of percentile paths for one variable's response.
struct IrfFan {
  Period date;
  int variable = 0;  // 1-based
  std::vector<double> percentiles;
  Eigen::MatrixXd bands;  // (H+1) x percentiles
};

IrfFan irf_fan(const IrfPosterior& irf, int variable,
               const std::vector<double>& percentiles = {17.0, 50.0, 83.0});

/// The NBER chronology used throughout as named built-in date sets:
/// "paper-peaks-monthly", "paper-troughs-monthly", "paper-peaks-quarterly",
/// "paper-troughs-quarterly".
std::vector<CycleDate> builtin_cycle_dates(const std::string& name);

}  // namespace rebound
