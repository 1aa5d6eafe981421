#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "resilab/factor_lab.hpp"
#include "resilab/inference.hpp"
#include "resilab/market_data.hpp"

namespace resilab::portfolio {

enum class Label { High, Low, HminusL };
const char* label_name(Label l);  // "High", "Low", "HminusL"

struct PortfolioSeries {
  Label label = Label::High;
  std::vector<Date> dates;
  std::vector<double> daily_return;
  std::vector<int> constituents_count;
};

// Uniform per-date observation rows: the same engine runs on excess, raw,
// or factor-adjusted returns depending on which builder filled `ret`.
struct FlatRow {
  Date date;
  std::string firm_id;
  double ret = 0.0;
  double cap = 0.0;
};

class FlatPanel {
 public:
  static FlatPanel from_excess(const data::ReturnPanel& panel);
  static FlatPanel from_raw(const data::ReturnPanel& panel);
  static FlatPanel from_adjusted(const factor::AdjustedPanel& panel);
  static FlatPanel from_rows(std::vector<FlatRow> rows);

  const std::vector<FlatRow>& rows() const { return rows_; }
  const std::vector<Date>& dates() const { return dates_; }
  const FlatRow* find(const std::string& firm, Date d) const;
  // Contiguous [begin, end) range of rows on date d.
  std::pair<std::size_t, std::size_t> date_range(Date d) const;
  // Previous trading date in this panel, if any.
  std::optional<Date> prev_date(Date d) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::vector<FlatRow> rows_;  // sorted by (date, firm_id)
  std::vector<Date> dates_;    // unique, ascending
  std::unordered_map<std::string, std::unordered_map<std::int32_t, std::size_t>> firm_index_;
  void build_index();
};

enum class TieRule { High, Low };

struct Assignment {
  std::vector<std::string> high;  // sorted firm ids
  std::vector<std::string> low;
  double median = 0.0;  // firm-level median measure value on the date
};

// Daily median split of the firms present on `date` (and carrying a measure
// value) into High/Low resilience sets. Lower median for even counts; firms
// exactly at the median follow `tie`. Throws EmptyUniverse when fewer than
// two firms qualify.
Assignment assign_portfolios(const FlatPanel& panel,
                             const std::unordered_map<std::string, double>& firm_value,
                             data::Direction direction, Date date,
                             TieRule tie = TieRule::High);
Assignment assign_portfolios(const data::MatchedPanel& matched, Date date,
                             TieRule tie = TieRule::High);

struct VwReturn {
  double ret = 0.0;
  int n = 0;
  bool same_date_cap_fallback = false;  // first sample date has no lagged caps
};

// Value-weighted return of `members` on `date`, weighted by the previous
// trading date's market caps; the panel's first date falls back to same-date
// caps. Throws MissingCap when a member lacks the lagged cap or the return.
VwReturn value_weighted_return(const FlatPanel& panel,
                               const std::vector<std::string>& members, Date date);

struct SeriesBundle {
  PortfolioSeries high;
  PortfolioSeries low;
  PortfolioSeries hml;
  bool same_date_cap_fallback = false;
};

// Daily re-sorted High/Low/H-L value-weighted series over panel dates in
// [from, to]. Each date's universe is the set of firms with a measure value,
// a return on the date, and a lagged cap (every firm qualifies on the first
// panel date).
SeriesBundle build_series(const FlatPanel& panel,
                          const std::unordered_map<std::string, double>& firm_value,
                          data::Direction direction, Date from, Date to,
                          TieRule tie = TieRule::High);

enum class CumulationMode { ArithmeticSum, GeometricCompound };

// C_t = sum_{s<=t} r_s, or prod(1+r_s) - 1. Fractions in, fractions out.
std::vector<double> cumulative_series(const std::vector<double>& daily, CumulationMode mode);

struct EventStats {
  stats::HacMeanTest test;
  std::string stars;
};

// Mean daily return over window dates with Newey-West(Andrews) SE.
EventStats event_window_stats(const PortfolioSeries& series, Date from, Date to);

struct IndustryRow {
  std::string naics;
  std::string description;
  int n_firms = 0;
  double resilience = 0.0;                    // percent-style score
  std::map<std::string, double> cum_by_model;  // model label -> cumulative %, window end
};

// Top-N industries by in-window firm count; per industry, the value-weighted
// cumulative adjusted return (arithmetic, percent) for each supplied model
// panel and the resilience score (100 - value when higher value means lower
// resilience).
std::vector<IndustryRow> industry_cross_section(
    const data::MatchedPanel& matched,
    const std::vector<std::pair<std::string, const factor::AdjustedPanel*>>& adjusted_by_model,
    Date from, Date to, int top_n = 25,
    const std::map<std::string, std::string>* descriptions = nullptr);

struct AttentionRegression {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int n_obs = 0;
};

// OLS of the daily H-L return on the first difference of the attention
// index over overlapping dates. Throws InsufficientOverlap below 10.
AttentionRegression attention_regression(const PortfolioSeries& hl,
                                         const data::AttentionSeries& attention);

// portfolio_series.csv: date,label,ret,n_constituents.
void write_portfolio_series(const std::vector<const PortfolioSeries*>& series,
                            const std::string& path);

}  // namespace resilab::portfolio
