#pragma once

#include <string>
#include <vector>

#include "resilab/market_data.hpp"
#include "resilab/portfolio.hpp"

namespace resilab::svix {

inline constexpr int kMaturities[] = {30, 91, 182, 365, 730};
bool valid_maturity(int days);

struct OptionSurfaceSlice {
  std::string underlying_id;
  Date date;
  int maturity_days = 365;
  double spot = 0.0;
  double forward = 0.0;
  double rf_gross = 1.0;  // gross risk-free return over the horizon
  std::vector<double> strikes;      // strictly increasing, positive
  std::vector<double> call_prices;  // discounted, aligned with strikes
  std::vector<double> put_prices;

  // Arbitrage sanity (calls nonincreasing, puts nondecreasing within
  // 1e-8*spot) and put-call parity |c - p - (F-K)/R_f| <= 1e-6*spot.
  // Throws NegativePrice / InvalidGrid with a diagnostic.
  void validate() const;
};

struct SvixValue {
  std::string underlying_id;
  Date date;
  int maturity_days = 365;
  double svix2_raw = 0.0;         // over the horizon
  double svix2_annualized = 0.0;  // svix2_raw * 365 / maturity_days
  double tail_share = 0.0;        // fraction contributed by the two tails
};

// SVIX^2 = (2 / (R_f S^2)) [ int_0^F put(K) dK + int_F^inf call(K) dK ]
// by trapezoid quadrature on the strike grid: the forward is inserted as a
// grid point via parity-consistent interpolation, the lower tail runs
// linearly to put(0) = 0, and the upper tail continues the last quote's
// implied vol in closed form. Requires the grid to span [0.5F, 2F].
SvixValue svix_squared(const OptionSurfaceSlice& slice);

// Value-weighted average: weights positive, summing to 1 within 1e-12, all
// values sharing one date and maturity.
SvixValue svix_bar(const std::vector<SvixValue>& values, const std::vector<double>& weights,
                   const std::string& label = "AVG");

struct ExpectedReturn {
  std::string underlying_id;
  Date date;
  int maturity_days = 365;
  double premium_over_rf = 0.0;  // (E R_i - R_f)/R_f over the horizon
  double premium = 0.0;          // E R_i - R_f over the horizon
  double premium_pa = 0.0;       // premium * 365 / maturity_days
};

// (E R_i - R_f)/R_f = SVIX_m^2 + (SVIX_i^2 - SVIX-bar^2)/2.
ExpectedReturn expected_return(const SvixValue& stock, const SvixValue& market,
                               const SvixValue& bar, double rf_gross);

struct GroupSvixPoint {
  Date date;
  int maturity_days = 365;
  double high_bar2 = 0.0;        // value-weighted SVIX^2, High resilience group
  double low_bar2 = 0.0;
  int n_high = 0;
  int n_low = 0;
  double diff_premium = 0.0;     // (low - high)/2 over the horizon, over R_f
  double diff_premium_pa = 0.0;  // annualized
};

// Per date and maturity, value-weighted SVIX^2 within the High and Low
// resilience groups (daily median assignment from the matched panel, lagged
// market-cap weights) and the Low-minus-High expected-return spread.
std::vector<GroupSvixPoint> resilience_svix_indices(
    const std::vector<SvixValue>& firm_svix, const data::MatchedPanel& matched,
    portfolio::TieRule tie = portfolio::TieRule::High);
std::vector<GroupSvixPoint> resilience_svix_indices(
    const std::vector<OptionSurfaceSlice>& slices, const data::MatchedPanel& matched,
    portfolio::TieRule tie = portfolio::TieRule::High);

// surface.csv: date,underlying_id,days,spot,forward,rf_gross,strike,call,put
// (long format, one row per strike).
std::vector<OptionSurfaceSlice> read_surfaces(const std::string& path);
void write_surfaces(const std::vector<OptionSurfaceSlice>& slices, const std::string& path);

// svix_out.csv: date,underlying_id,days,svix2_raw,svix2_pa,tail_share.
void write_svix_values(const std::vector<SvixValue>& values, const std::string& path);

}  // namespace resilab::svix
