#pragma once

#include <stdexcept>
#include <string>

namespace resilab {

enum class Errc {
  // ingestion / data model
  missing_column,
  non_finite_value,
  unknown_date_in_factors,
  non_positive_market_cap,
  duplicate_row,
  naics_too_short,
  bad_row,
  // factor lab
  rank_deficient_design,
  missing_factor_date,
  // portfolio engine
  empty_universe,
  missing_cap,
  window_out_of_range,
  insufficient_overlap,
  // inference
  series_too_short,
  rank_deficient,
  // svix engine
  grid_too_narrow,
  negative_price,
  weight_mismatch,
  maturity_mismatch,
  // synthesis
  invalid_spec,
  invalid_grid,
  // cli / io
  bad_config,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace resilab
