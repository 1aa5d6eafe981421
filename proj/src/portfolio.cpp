#include "resilab/portfolio.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <set>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"

namespace resilab::portfolio {

const char* label_name(Label l) {
  switch (l) {
    case Label::High: return "High";
    case Label::Low: return "Low";
    case Label::HminusL: return "HminusL";
  }
  return "?";
}

void FlatPanel::build_index() {
  std::sort(rows_.begin(), rows_.end(), [](const FlatRow& a, const FlatRow& b) {
    if (a.date != b.date) return a.date < b.date;
    return a.firm_id < b.firm_id;
  });
  dates_.clear();
  firm_index_.clear();
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (dates_.empty() || dates_.back() != rows_[i].date) dates_.push_back(rows_[i].date);
    firm_index_[rows_[i].firm_id][rows_[i].date.count()] = i;
  }
}

FlatPanel FlatPanel::from_rows(std::vector<FlatRow> rows) {
  FlatPanel p;
  p.rows_ = std::move(rows);
  p.build_index();
  return p;
}

FlatPanel FlatPanel::from_excess(const data::ReturnPanel& panel) {
  std::vector<FlatRow> rows;
  rows.reserve(panel.rows.size());
  for (const auto& r : panel.rows) {
    rows.push_back({r.date, r.firm_id, r.excess_return, r.market_cap});
  }
  return from_rows(std::move(rows));
}

FlatPanel FlatPanel::from_raw(const data::ReturnPanel& panel) {
  std::vector<FlatRow> rows;
  rows.reserve(panel.rows.size());
  for (const auto& r : panel.rows) {
    rows.push_back({r.date, r.firm_id, r.raw_return, r.market_cap});
  }
  return from_rows(std::move(rows));
}

FlatPanel FlatPanel::from_adjusted(const factor::AdjustedPanel& panel) {
  std::vector<FlatRow> rows;
  rows.reserve(panel.rows.size());
  for (const auto& r : panel.rows) {
    rows.push_back({r.date, r.firm_id, r.adjusted_return, r.market_cap});
  }
  return from_rows(std::move(rows));
}

const FlatRow* FlatPanel::find(const std::string& firm, Date d) const {
  auto fit = firm_index_.find(firm);
  if (fit == firm_index_.end()) return nullptr;
  auto dit = fit->second.find(d.count());
  if (dit == fit->second.end()) return nullptr;
  return &rows_[dit->second];
}

std::pair<std::size_t, std::size_t> FlatPanel::date_range(Date d) const {
  auto lo = std::lower_bound(rows_.begin(), rows_.end(), d,
                             [](const FlatRow& r, Date x) { return r.date < x; });
  auto hi = std::upper_bound(rows_.begin(), rows_.end(), d,
                             [](Date x, const FlatRow& r) { return x < r.date; });
  return {static_cast<std::size_t>(lo - rows_.begin()),
          static_cast<std::size_t>(hi - rows_.begin())};
}

std::optional<Date> FlatPanel::prev_date(Date d) const {
  auto it = std::lower_bound(dates_.begin(), dates_.end(), d);
  if (it == dates_.begin()) return std::nullopt;
  return *(it - 1);
}

namespace {

double lower_median(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t k = (n - 1) / 2;  // order statistic floor((n+1)/2), 1-based
  std::nth_element(values.begin(), values.begin() + static_cast<long>(k), values.end());
  return values[k];
}

}  // namespace

Assignment assign_portfolios(const FlatPanel& panel,
                             const std::unordered_map<std::string, double>& firm_value,
                             data::Direction direction, Date date, TieRule tie) {
  auto [begin, end] = panel.date_range(date);
  std::vector<std::pair<std::string, double>> firms;
  for (std::size_t i = begin; i < end; ++i) {
    auto it = firm_value.find(panel.rows()[i].firm_id);
    if (it == firm_value.end()) continue;
    firms.emplace_back(panel.rows()[i].firm_id, it->second);
  }
  if (firms.size() < 2) {
    throw Error(Errc::empty_universe, "fewer than 2 firms with measure values on " +
                                          date.to_string());
  }

  std::vector<double> values;
  values.reserve(firms.size());
  for (const auto& [_, v] : firms) values.push_back(v);
  const double median = lower_median(std::move(values));

  Assignment out;
  out.median = median;
  for (const auto& [firm, v] : firms) {
    bool to_high;
    if (v == median) {
      to_high = (tie == TieRule::High);
    } else if (direction == data::Direction::LowResIfHigh) {
      to_high = v < median;
    } else {
      to_high = v > median;
    }
    (to_high ? out.high : out.low).push_back(firm);
  }
  std::sort(out.high.begin(), out.high.end());
  std::sort(out.low.begin(), out.low.end());
  return out;
}

Assignment assign_portfolios(const data::MatchedPanel& matched, Date date, TieRule tie) {
  return assign_portfolios(FlatPanel::from_excess(matched.panel), matched.firm_value,
                           matched.direction, date, tie);
}

VwReturn value_weighted_return(const FlatPanel& panel,
                               const std::vector<std::string>& members, Date date) {
  if (members.empty()) {
    throw Error(Errc::empty_universe, "no members on " + date.to_string());
  }
  const std::optional<Date> prev = panel.prev_date(date);

  VwReturn out;
  out.n = static_cast<int>(members.size());
  out.same_date_cap_fallback = !prev.has_value();

  double total_cap = 0.0;
  std::vector<double> caps(members.size());
  std::vector<double> rets(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const FlatRow* today = panel.find(members[i], date);
    if (!today) {
      throw Error(Errc::missing_cap,
                  "firm '" + members[i] + "' has no observation on " + date.to_string());
    }
    rets[i] = today->ret;
    if (prev) {
      const FlatRow* lag = panel.find(members[i], *prev);
      if (!lag) {
        throw Error(Errc::missing_cap, "firm '" + members[i] + "' has no market cap on " +
                                           prev->to_string());
      }
      caps[i] = lag->cap;
    } else {
      caps[i] = today->cap;
    }
    total_cap += caps[i];
  }
  if (total_cap <= 0.0) {
    throw Error(Errc::missing_cap, "total weight cap is zero on " + date.to_string());
  }
  double r = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i) {
    r += (caps[i] / total_cap) * rets[i];
  }
  out.ret = r;
  return out;
}

SeriesBundle build_series(const FlatPanel& panel,
                          const std::unordered_map<std::string, double>& firm_value,
                          data::Direction direction, Date from, Date to, TieRule tie) {
  SeriesBundle out;
  out.high.label = Label::High;
  out.low.label = Label::Low;
  out.hml.label = Label::HminusL;
  if (panel.empty()) {
    throw Error(Errc::empty_universe, "panel has no rows");
  }

  const Date first = panel.dates().front();
  for (Date d : panel.dates()) {
    if (d < from || to < d) continue;

    // Universe: measure value present, and the lagged cap exists (trivially
    // true on the panel's first date, where same-date caps are used).
    const std::optional<Date> prev = panel.prev_date(d);
    std::vector<FlatRow> universe_rows;
    auto [begin, end] = panel.date_range(d);
    for (std::size_t i = begin; i < end; ++i) {
      const FlatRow& r = panel.rows()[i];
      if (!firm_value.count(r.firm_id)) continue;
      if (d != first && prev && !panel.find(r.firm_id, *prev)) continue;
      universe_rows.push_back(r);
    }
    // Assignment over the qualified universe only.
    std::unordered_map<std::string, double> values;
    for (const auto& r : universe_rows) values.emplace(r.firm_id, firm_value.at(r.firm_id));
    const Assignment a = assign_portfolios(panel, values, direction, d, tie);
    if (a.high.empty() || a.low.empty()) {
      throw Error(Errc::empty_universe, "one-sided split on " + d.to_string());
    }

    const VwReturn hi = value_weighted_return(panel, a.high, d);
    const VwReturn lo = value_weighted_return(panel, a.low, d);
    out.same_date_cap_fallback |= hi.same_date_cap_fallback || lo.same_date_cap_fallback;

    out.high.dates.push_back(d);
    out.high.daily_return.push_back(hi.ret);
    out.high.constituents_count.push_back(hi.n);
    out.low.dates.push_back(d);
    out.low.daily_return.push_back(lo.ret);
    out.low.constituents_count.push_back(lo.n);
    out.hml.dates.push_back(d);
    out.hml.daily_return.push_back(hi.ret - lo.ret);
    out.hml.constituents_count.push_back(hi.n + lo.n);
  }
  if (out.high.dates.empty()) {
    throw Error(Errc::window_out_of_range,
                "no panel dates in [" + from.to_string() + ", " + to.to_string() + "]");
  }
  return out;
}

std::vector<double> cumulative_series(const std::vector<double>& daily, CumulationMode mode) {
  std::vector<double> out(daily.size());
  if (mode == CumulationMode::ArithmeticSum) {
    double acc = 0.0;
    for (std::size_t i = 0; i < daily.size(); ++i) {
      acc += daily[i];
      out[i] = acc;
    }
  } else {
    double acc = 1.0;
    for (std::size_t i = 0; i < daily.size(); ++i) {
      acc *= 1.0 + daily[i];
      out[i] = acc - 1.0;
    }
  }
  return out;
}

EventStats event_window_stats(const PortfolioSeries& series, Date from, Date to) {
  if (series.dates.empty() || from < series.dates.front() || series.dates.back() < to) {
    throw Error(Errc::window_out_of_range,
                "window [" + from.to_string() + ", " + to.to_string() +
                    "] not covered by the series");
  }
  std::vector<double> window;
  for (std::size_t i = 0; i < series.dates.size(); ++i) {
    if (series.dates[i] < from || to < series.dates[i]) continue;
    window.push_back(series.daily_return[i]);
  }
  if (window.empty()) {
    throw Error(Errc::window_out_of_range, "no series dates in the window");
  }
  EventStats out;
  out.test = stats::newey_west_mean(window, stats::kAutoLag);
  out.stars = out.test.degenerate ? "" : stats::stars(out.test.t_stat);
  return out;
}

std::vector<IndustryRow> industry_cross_section(
    const data::MatchedPanel& matched,
    const std::vector<std::pair<std::string, const factor::AdjustedPanel*>>& adjusted_by_model,
    Date from, Date to, int top_n,
    const std::map<std::string, std::string>* descriptions) {
  const auto level = static_cast<std::size_t>(matched.naics_level);

  // Industry membership and in-window firm counts from the matched panel.
  std::map<std::string, std::set<std::string>> industry_firms;
  for (const auto& r : matched.panel.rows) {
    if (r.date < from || to < r.date) continue;
    industry_firms[r.naics.substr(0, level)].insert(r.firm_id);
  }

  std::vector<std::pair<std::string, int>> ranked;
  for (const auto& [code, firms] : industry_firms) {
    ranked.emplace_back(code, static_cast<int>(firms.size()));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (static_cast<int>(ranked.size()) > top_n) ranked.resize(static_cast<std::size_t>(top_n));

  std::vector<IndustryRow> out;
  for (const auto& [code, n_firms] : ranked) {
    IndustryRow row;
    row.naics = code;
    row.n_firms = n_firms;
    if (descriptions) {
      auto it = descriptions->find(code);
      row.description = it != descriptions->end() ? it->second : "Industry " + code;
    } else {
      row.description = "Industry " + code;
    }
    const auto& members = industry_firms[code];
    const double value = matched.firm_value.at(*members.begin());
    row.resilience =
        matched.direction == data::Direction::LowResIfHigh ? 100.0 - value : value;

    for (const auto& [label, adjusted] : adjusted_by_model) {
      std::vector<FlatRow> rows;
      for (const auto& a : adjusted->rows) {
        if (!members.count(a.firm_id)) continue;
        rows.push_back({a.date, a.firm_id, a.adjusted_return, a.market_cap});
      }
      FlatPanel ipanel = FlatPanel::from_rows(std::move(rows));
      double cum = 0.0;
      for (Date d : ipanel.dates()) {
        if (d < from || to < d) continue;
        auto [begin, end] = ipanel.date_range(d);
        const std::optional<Date> prev = ipanel.prev_date(d);
        std::vector<std::string> present;
        for (std::size_t i = begin; i < end; ++i) {
          const auto& fr = ipanel.rows()[i];
          if (d != ipanel.dates().front() && prev && !ipanel.find(fr.firm_id, *prev)) continue;
          present.push_back(fr.firm_id);
        }
        if (present.empty()) continue;
        cum += value_weighted_return(ipanel, present, d).ret;
      }
      row.cum_by_model[label] = 100.0 * cum;
    }
    out.push_back(std::move(row));
  }
  return out;
}

AttentionRegression attention_regression(const PortfolioSeries& hl,
                                         const data::AttentionSeries& attention) {
  std::map<Date, double> att;
  for (const auto& [d, v] : attention.points) att.emplace(d, v);

  std::vector<double> y;
  std::vector<double> dx;
  for (std::size_t i = 0; i < hl.dates.size(); ++i) {
    auto it = att.find(hl.dates[i]);
    if (it == att.end() || it == att.begin()) continue;
    y.push_back(hl.daily_return[i]);
    dx.push_back(it->second - std::prev(it)->second);
  }
  if (y.size() < 10) {
    throw Error(Errc::insufficient_overlap,
                "only " + std::to_string(y.size()) + " overlapping dates, need 10");
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(y.size()), 2);
  Eigen::VectorXd yv(static_cast<Eigen::Index>(y.size()));
  for (std::size_t i = 0; i < y.size(); ++i) {
    X(static_cast<Eigen::Index>(i), 0) = 1.0;
    X(static_cast<Eigen::Index>(i), 1) = dx[i];
    yv(static_cast<Eigen::Index>(i)) = y[i];
  }

  AttentionRegression out;
  out.n_obs = static_cast<int>(y.size());
  bool constant_dx = true;
  for (double v : dx) {
    if (v != dx.front()) { constant_dx = false; break; }
  }
  if (constant_dx) {
    out.slope = 0.0;
    double mean = 0.0;
    for (double v : y) mean += v;
    out.intercept = mean / static_cast<double>(y.size());
    out.r_squared = 0.0;
    return out;
  }
  const stats::RegressionResult fit = stats::ols(yv, X);
  out.intercept = fit.coefficients(0);
  out.slope = fit.coefficients(1);
  out.r_squared = fit.r_squared;
  return out;
}

void write_portfolio_series(const std::vector<const PortfolioSeries*>& series,
                            const std::string& path) {
  std::string out = "date,label,ret,n_constituents\n";
  for (const PortfolioSeries* s : series) {
    for (std::size_t i = 0; i < s->dates.size(); ++i) {
      out += s->dates[i].to_string();
      out += ',';
      out += label_name(s->label);
      out += ',';
      out += fmt_full(s->daily_return[i]);
      out += ',';
      out += std::to_string(s->constituents_count[i]);
      out += '\n';
    }
  }
  atomic_write_file(path, out);
}

}  // namespace resilab::portfolio
