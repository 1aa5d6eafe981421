#include "resilab/errors.hpp"

namespace resilab {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::missing_column: return "MissingColumn";
    case Errc::non_finite_value: return "NonFiniteValue";
    case Errc::unknown_date_in_factors: return "UnknownDateInFactors";
    case Errc::non_positive_market_cap: return "NonPositiveMarketCap";
    case Errc::duplicate_row: return "DuplicateRow";
    case Errc::naics_too_short: return "NaicsTooShort";
    case Errc::bad_row: return "BadRow";
    case Errc::rank_deficient_design: return "RankDeficientDesign";
    case Errc::missing_factor_date: return "MissingFactorDate";
    case Errc::empty_universe: return "EmptyUniverse";
    case Errc::missing_cap: return "MissingCap";
    case Errc::window_out_of_range: return "WindowOutOfRange";
    case Errc::insufficient_overlap: return "InsufficientOverlap";
    case Errc::series_too_short: return "SeriesTooShort";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::grid_too_narrow: return "GridTooNarrow";
    case Errc::negative_price: return "NegativePrice";
    case Errc::weight_mismatch: return "WeightMismatch";
    case Errc::maturity_mismatch: return "MaturityMismatch";
    case Errc::invalid_spec: return "InvalidSpec";
    case Errc::invalid_grid: return "InvalidGrid";
    case Errc::bad_config: return "BadConfig";
    case Errc::io_error: return "IoError";
  }
  return "UnknownError";
}

}  // namespace resilab
