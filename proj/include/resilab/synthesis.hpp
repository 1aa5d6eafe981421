#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "resilab/market_data.hpp"
#include "resilab/svix.hpp"

namespace resilab::synth {

// Deterministic scenario description. Identical spec (seed included) yields
// bitwise-identical panels on every platform.
struct ScenarioSpec {
  std::uint64_t seed = 42;
  int n_firms = 200;
  int n_industries = 10;
  Date start = Date(2019, 1, 1);
  Date end = Date(2020, 3, 31);

  // Daily factor volatilities; factors are i.i.d. normal with mean zero.
  double vol_mktrf = 0.010;
  double vol_smb = 0.005;
  double vol_hml = 0.005;
  double vol_rmw = 0.004;
  double vol_cma = 0.004;
  double vol_mom = 0.006;
  double rf_daily = 0.0;

  // Industry measure values (affected-share style, higher = less resilient).
  // Empty means evenly spaced over [20, 80].
  std::vector<double> industry_values;

  double beta_mkt_lo = 0.5;
  double beta_mkt_hi = 1.5;
  double beta_other_lo = -0.5;
  double beta_other_hi = 0.5;
  double idio_vol = 0.020;
  double alpha_daily = 0.0;

  double cap_lo = 50.0;     // initial market caps, USD millions
  double cap_hi = 5000.0;

  Date crash_start = Date(2020, 2, 24);
  Date crash_end = Date(2020, 3, 20);
  double crash_drift_low = 0.0;   // added per day to low-resilience firms
  double crash_drift_high = 0.0;

  void validate() const;  // throws InvalidSpec
};

struct FirmTruth {
  std::string firm_id;
  std::string naics;
  double measure_value = 0.0;
  bool low_group = false;  // receives crash_drift_low
  double alpha = 0.0;
  std::map<std::string, double> betas;
  double crash_drift = 0.0;
};

struct ScenarioData {
  data::ReturnPanel panel;
  data::FactorSeries factors;
  data::ResilienceMeasure measure;
  data::AttentionSeries attention;
  std::vector<FirmTruth> truth;
  std::vector<Date> trading_days;
};

// r_it = alpha_i + sum_f beta_if f_t + drift_it + eps_it on weekday dates in
// [start, end]; market caps compound with raw returns. The crash window adds
// the configured per-group drifts, where the low group is the set of firms
// whose measure value lies strictly above the firm-level lower median.
ScenarioData generate_panel(const ScenarioSpec& spec);

struct GridSpec {
  int n_strikes = 800;
  double k_min_rel = 0.01;  // lowest strike as a fraction of the forward
  double k_max_rel = 10.0;
};

struct GeneratedSurface {
  svix::OptionSurfaceSlice slice;
  double truth_svix2 = 0.0;  // e^{sigma^2 T} - 1
};

// Lognormal-model surface: out-of-the-money side priced directly, the other
// side derived through parity so parity holds bitwise. sigma > 0.
GeneratedSurface generate_surface(const std::string& id, Date date, int maturity_days,
                                  double spot, double rf_gross, double sigma,
                                  const GridSpec& grid = {});

// Writes returns.csv, factors.csv, resilience.csv, attention.csv, truth.csv
// into `dir`.
void write_scenario(const ScenarioData& data, const std::string& dir);

std::vector<Date> weekdays_between(Date start, Date end);

}  // namespace resilab::synth
