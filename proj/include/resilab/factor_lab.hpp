#pragma once

#include <map>
#include <string>
#include <vector>

#include "resilab/market_data.hpp"

namespace resilab::factor {

enum class Model { CAPM, FF3, FF4, FF5, FF6 };

struct ModelSpec {
  Model name = Model::CAPM;
  std::vector<std::string> factor_list;

  static ModelSpec get(Model m);
  static ModelSpec parse(const std::string& s);  // "capm", "ff3", ... case-insensitive
  const char* label() const;                     // lower-case column label
};

const char* model_name(Model m);  // "CAPM", "FF3", ...

struct ExposureSet {
  std::string firm_id;
  Model model = Model::CAPM;
  double alpha = 0.0;
  std::map<std::string, double> betas;  // keys exactly the model's factor_list
  int n_obs = 0;
  Date window_start;
  Date window_end;
};

struct ExposureEstimates {
  std::vector<ExposureSet> exposures;    // sorted by firm_id
  std::vector<std::string> diagnostics;  // firms omitted for too few observations
};

// Per-firm OLS of daily excess returns on intercept + model factors over
// [window_start, window_end]. Firms with fewer than min_obs factor-matched
// in-window days are omitted and listed in diagnostics. Throws
// RankDeficientDesign naming the firm if its design is singular.
ExposureEstimates estimate_exposures(const data::ReturnPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, Date window_start,
                                     Date window_end, int min_obs = 127);
ExposureEstimates estimate_exposures(const data::MatchedPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, Date window_start,
                                     Date window_end, int min_obs = 127);

// excess_return - sum_f beta_f * factor_f(date). Alpha is not subtracted.
// Throws MissingFactorDate if factors_on_date is for a different date.
double risk_adjusted_return(const data::ReturnObservation& obs, const ExposureSet& exposure,
                            const data::FactorObservation& factors_on_date);

struct AdjustedObservation {
  Date date;
  std::string firm_id;
  double adjusted_return = 0.0;
  double market_cap = 0.0;
  std::string naics;
};

struct AdjustedPanel {
  std::vector<AdjustedObservation> rows;  // sorted by (firm_id, date)
  std::vector<std::string> diagnostics;
};

// Applies the given exposures to every panel row in [start, end] whose firm
// has an exposure; rows of other firms are dropped.
AdjustedPanel adjust_panel(const data::ReturnPanel& panel, const data::FactorSeries& factors,
                           const std::vector<ExposureSet>& exposures, Date start, Date end);

// For each calendar year Y in `years` (consecutive), exposures estimated on Y
// produce adjusted returns throughout Y+1.
AdjustedPanel rolling_adjusted_panel(const data::ReturnPanel& panel,
                                     const data::FactorSeries& factors,
                                     const ModelSpec& model, const std::vector<int>& years,
                                     int min_obs = 127);

double factor_value(const data::FactorObservation& obs, const std::string& factor);

// exposures.csv:
// firm_id,model,window_start,window_end,n_obs,alpha,beta_mktrf,beta_smb,
// beta_hml,beta_mom,beta_rmw,beta_cma (absent betas blank).
void write_exposures(const std::vector<ExposureSet>& exposures, const std::string& path);
std::vector<ExposureSet> read_exposures(const std::string& path);

}  // namespace resilab::factor
