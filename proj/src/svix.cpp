#include "resilab/svix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"
#include "resilab/mathx.hpp"

namespace resilab::svix {

bool valid_maturity(int days) {
  for (int m : kMaturities) {
    if (days == m) return true;
  }
  return false;
}

void OptionSurfaceSlice::validate() const {
  if (!valid_maturity(maturity_days)) {
    throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                        ": unsupported maturity " +
                                        std::to_string(maturity_days) + " days");
  }
  if (spot <= 0.0 || forward <= 0.0 || rf_gross <= 0.0) {
    throw Error(Errc::invalid_grid,
                underlying_id + " " + date.to_string() + ": spot/forward/rf must be positive");
  }
  const std::size_t n = strikes.size();
  if (n < 2 || call_prices.size() != n || put_prices.size() != n) {
    throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                        ": need >= 2 strikes with aligned call/put prices");
  }
  const double mono_tol = 1e-8 * spot;
  const double parity_tol = 1e-6 * spot;
  for (std::size_t i = 0; i < n; ++i) {
    if (strikes[i] <= 0.0 || (i > 0 && strikes[i] <= strikes[i - 1])) {
      throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                          ": strikes must be positive and strictly increasing");
    }
    if (call_prices[i] < 0.0 || put_prices[i] < 0.0) {
      throw Error(Errc::negative_price,
                  underlying_id + " " + date.to_string() + ": negative option price at strike " +
                      fmt_full(strikes[i]));
    }
    if (i > 0 && call_prices[i] > call_prices[i - 1] + mono_tol) {
      throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                          ": call prices increase at strike " +
                                          fmt_full(strikes[i]));
    }
    if (i > 0 && put_prices[i] + mono_tol < put_prices[i - 1]) {
      throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                          ": put prices decrease at strike " +
                                          fmt_full(strikes[i]));
    }
    const double parity_gap =
        call_prices[i] - put_prices[i] - (forward - strikes[i]) / rf_gross;
    if (std::fabs(parity_gap) > parity_tol) {
      throw Error(Errc::invalid_grid, underlying_id + " " + date.to_string() +
                                          ": put-call parity violated at strike " +
                                          fmt_full(strikes[i]) + " by " + fmt_full(parity_gap));
    }
  }
}

SvixValue svix_squared(const OptionSurfaceSlice& slice) {
  slice.validate();
  const double F = slice.forward;
  if (slice.strikes.front() > 0.5 * F || slice.strikes.back() < 2.0 * F) {
    throw Error(Errc::grid_too_narrow,
                slice.underlying_id + " " + slice.date.to_string() + ": grid [" +
                    fmt_full(slice.strikes.front()) + ", " + fmt_full(slice.strikes.back()) +
                    "] does not span [0.5F, 2F] with F = " + fmt_full(F));
  }
  const double T = static_cast<double>(slice.maturity_days) / 365.0;
  const auto& K = slice.strikes;
  const auto& C = slice.call_prices;
  const auto& P = slice.put_prices;
  const std::size_t n = K.size();

  // Forward insertion: linear interpolation of both quote curves at F.
  // Parity is linear in K, so interpolated call and put agree at F up to
  // input parity error; their average is used for both integrands.
  std::size_t hi = 0;
  while (hi < n && K[hi] < F) ++hi;
  double v_at_f;
  bool f_on_grid = (hi < n && K[hi] == F);
  if (f_on_grid) {
    v_at_f = 0.5 * (C[hi] + P[hi]);
  } else {
    const std::size_t lo = hi - 1;  // K[lo] < F < K[hi]; span check guarantees both exist
    const double w = (F - K[lo]) / (K[hi] - K[lo]);
    const double c_f = C[lo] + w * (C[hi] - C[lo]);
    const double p_f = P[lo] + w * (P[hi] - P[lo]);
    v_at_f = 0.5 * (c_f + p_f);
  }

  // Lower tail: put integrand linear from (K[0], P[0]) down to (0, 0).
  const double lower_tail = 0.5 * K[0] * P[0];

  // Put leg on [K[0], F] and call leg on [F, K[n-1]] by composite trapezoid.
  double puts_mid = 0.0;
  for (std::size_t i = 1; i < n && K[i] <= F; ++i) {
    puts_mid += 0.5 * (P[i - 1] + P[i]) * (K[i] - K[i - 1]);
  }
  if (!f_on_grid) {
    const std::size_t lo = hi - 1;
    puts_mid += 0.5 * (P[lo] + v_at_f) * (F - K[lo]);
  }

  double calls_mid = 0.0;
  if (!f_on_grid) {
    calls_mid += 0.5 * (v_at_f + C[hi]) * (K[hi] - F);
  }
  for (std::size_t i = hi + 1; i < n; ++i) {
    calls_mid += 0.5 * (C[i - 1] + C[i]) * (K[i] - K[i - 1]);
  }

  // Upper tail: continue the last quote's implied vol in closed form. The
  // lognormal tail integral runs to infinity, so far-out-of-the-money mass
  // is never truncated away.
  double upper_tail = 0.0;
  if (C[n - 1] > 0.0) {
    const double fwd_price = C[n - 1] * slice.rf_gross;  // undiscounted
    const double iv = implied_vol_call_fwd(F, K[n - 1], T, fwd_price);
    upper_tail = lognormal_upper_call_integral(F, iv, T, K[n - 1]) / slice.rf_gross;
  }

  const double scale = 2.0 / (slice.rf_gross * slice.spot * slice.spot);
  const double total = scale * (lower_tail + puts_mid + calls_mid + upper_tail);

  SvixValue out;
  out.underlying_id = slice.underlying_id;
  out.date = slice.date;
  out.maturity_days = slice.maturity_days;
  out.svix2_raw = std::max(total, 0.0);
  out.svix2_annualized = out.svix2_raw * 365.0 / static_cast<double>(slice.maturity_days);
  out.tail_share =
      total > 0.0 ? scale * (lower_tail + upper_tail) / total : 0.0;
  return out;
}

SvixValue svix_bar(const std::vector<SvixValue>& values, const std::vector<double>& weights,
                   const std::string& label) {
  if (values.empty() || values.size() != weights.size()) {
    throw Error(Errc::weight_mismatch, "values and weights must align and be nonempty");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w <= 0.0) {
      throw Error(Errc::weight_mismatch, "weights must be positive");
    }
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-12) {
    throw Error(Errc::weight_mismatch,
                "weights sum to " + fmt_full(sum) + ", expected 1 within 1e-12");
  }
  for (const auto& v : values) {
    if (v.date != values.front().date || v.maturity_days != values.front().maturity_days) {
      throw Error(Errc::maturity_mismatch,
                  "svix values must share one date and maturity");
    }
  }
  SvixValue out;
  out.underlying_id = label;
  out.date = values.front().date;
  out.maturity_days = values.front().maturity_days;
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += weights[i] * values[i].svix2_raw;
  }
  out.svix2_raw = acc;
  out.svix2_annualized = acc * 365.0 / static_cast<double>(out.maturity_days);
  out.tail_share = 0.0;
  return out;
}

ExpectedReturn expected_return(const SvixValue& stock, const SvixValue& market,
                               const SvixValue& bar, double rf_gross) {
  if (stock.maturity_days != market.maturity_days || stock.maturity_days != bar.maturity_days ||
      stock.date != market.date || stock.date != bar.date) {
    throw Error(Errc::maturity_mismatch,
                "stock, market, and average inputs must share one date and maturity");
  }
  ExpectedReturn out;
  out.underlying_id = stock.underlying_id;
  out.date = stock.date;
  out.maturity_days = stock.maturity_days;
  out.premium_over_rf = market.svix2_raw + 0.5 * (stock.svix2_raw - bar.svix2_raw);
  out.premium = out.premium_over_rf * rf_gross;
  out.premium_pa = out.premium * 365.0 / static_cast<double>(out.maturity_days);
  return out;
}

std::vector<GroupSvixPoint> resilience_svix_indices(
    const std::vector<SvixValue>& firm_svix, const data::MatchedPanel& matched,
    portfolio::TieRule tie) {
  const portfolio::FlatPanel caps = portfolio::FlatPanel::from_excess(matched.panel);

  std::map<std::pair<std::int32_t, int>, std::vector<const SvixValue*>> groups;
  for (const auto& v : firm_svix) {
    groups[{v.date.count(), v.maturity_days}].push_back(&v);
  }

  std::vector<GroupSvixPoint> out;
  for (const auto& [key, members] : groups) {
    const Date date(key.first);
    const int days = key.second;
    const portfolio::Assignment a =
        portfolio::assign_portfolios(caps, matched.firm_value, matched.direction, date, tie);

    auto side_bar = [&](const std::vector<std::string>& side, int& n_out) -> double {
      std::vector<SvixValue> vals;
      std::vector<double> raw_weights;
      const std::optional<Date> prev = caps.prev_date(date);
      for (const std::string& firm : side) {
        const SvixValue* sv = nullptr;
        for (const SvixValue* m : members) {
          if (m->underlying_id == firm) { sv = m; break; }
        }
        if (!sv) continue;
        const portfolio::FlatRow* row =
            prev ? caps.find(firm, *prev) : caps.find(firm, date);
        if (!row) continue;
        vals.push_back(*sv);
        raw_weights.push_back(row->cap);
      }
      if (vals.empty()) {
        throw Error(Errc::empty_universe, "no option coverage on " + date.to_string() +
                                              " at " + std::to_string(days) + " days");
      }
      double total = 0.0;
      for (double w : raw_weights) total += w;
      for (double& w : raw_weights) w /= total;
      n_out = static_cast<int>(vals.size());
      return svix_bar(vals, raw_weights).svix2_raw;
    };

    GroupSvixPoint p;
    p.date = date;
    p.maturity_days = days;
    p.high_bar2 = side_bar(a.high, p.n_high);
    p.low_bar2 = side_bar(a.low, p.n_low);
    p.diff_premium = 0.5 * (p.low_bar2 - p.high_bar2);
    p.diff_premium_pa = p.diff_premium * 365.0 / static_cast<double>(days);
    out.push_back(p);
  }
  return out;
}

std::vector<GroupSvixPoint> resilience_svix_indices(
    const std::vector<OptionSurfaceSlice>& slices, const data::MatchedPanel& matched,
    portfolio::TieRule tie) {
  std::vector<SvixValue> values;
  values.reserve(slices.size());
  for (const auto& s : slices) values.push_back(svix_squared(s));
  return resilience_svix_indices(values, matched, tie);
}

namespace {

const std::vector<std::string> kSurfaceHeader = {"date",    "underlying_id", "days",
                                                 "spot",    "forward",       "rf_gross",
                                                 "strike",  "call",          "put"};
const std::vector<std::string> kSvixHeader = {"date",       "underlying_id", "days",
                                              "svix2_raw",  "svix2_pa",      "tail_share"};

}  // namespace

std::vector<OptionSurfaceSlice> read_surfaces(const std::string& path) {
  CsvReader reader(path, kSurfaceHeader);
  // Preserve first-seen order of (date, id, days) groups.
  std::vector<OptionSurfaceSlice> slices;
  std::map<std::tuple<std::int32_t, std::string, int>, std::size_t> index;

  std::vector<std::string> f;
  while (reader.next(f)) {
    const std::size_t line = reader.line_number();
    if (f.size() != kSurfaceHeader.size()) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": expected 9 fields, got " + std::to_string(f.size()));
    }
    const Date date = Date::parse(f[0]);
    const std::string& id = f[1];
    auto days = parse_int(f[2]);
    auto spot = parse_double(f[3]);
    auto fwd = parse_double(f[4]);
    auto rf = parse_double(f[5]);
    auto strike = parse_double(f[6]);
    auto call = parse_double(f[7]);
    auto put = parse_double(f[8]);
    if (!days || !spot || !fwd || !rf || !strike || !call || !put) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) + ": bad numerics");
    }

    auto key = std::make_tuple(date.count(), id, static_cast<int>(*days));
    auto it = index.find(key);
    if (it == index.end()) {
      OptionSurfaceSlice s;
      s.underlying_id = id;
      s.date = date;
      s.maturity_days = static_cast<int>(*days);
      s.spot = *spot;
      s.forward = *fwd;
      s.rf_gross = *rf;
      index.emplace(key, slices.size());
      slices.push_back(std::move(s));
      it = index.find(key);
    }
    OptionSurfaceSlice& s = slices[it->second];
    if (s.spot != *spot || s.forward != *fwd || s.rf_gross != *rf) {
      throw Error(Errc::bad_row, path + " line " + std::to_string(line) +
                                     ": spot/forward/rf inconsistent within the slice");
    }
    s.strikes.push_back(*strike);
    s.call_prices.push_back(*call);
    s.put_prices.push_back(*put);
  }

  for (auto& s : slices) {
    std::vector<std::size_t> order(s.strikes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s.strikes[a] < s.strikes[b]; });
    OptionSurfaceSlice sorted = s;
    for (std::size_t i = 0; i < order.size(); ++i) {
      sorted.strikes[i] = s.strikes[order[i]];
      sorted.call_prices[i] = s.call_prices[order[i]];
      sorted.put_prices[i] = s.put_prices[order[i]];
    }
    s = std::move(sorted);
    s.validate();
  }
  return slices;
}

void write_surfaces(const std::vector<OptionSurfaceSlice>& slices, const std::string& path) {
  std::string out = "date,underlying_id,days,spot,forward,rf_gross,strike,call,put\n";
  for (const auto& s : slices) {
    for (std::size_t i = 0; i < s.strikes.size(); ++i) {
      out += s.date.to_string();
      out += ',';
      out += s.underlying_id;
      out += ',';
      out += std::to_string(s.maturity_days);
      out += ',';
      out += fmt_full(s.spot);
      out += ',';
      out += fmt_full(s.forward);
      out += ',';
      out += fmt_full(s.rf_gross);
      out += ',';
      out += fmt_full(s.strikes[i]);
      out += ',';
      out += fmt_full(s.call_prices[i]);
      out += ',';
      out += fmt_full(s.put_prices[i]);
      out += '\n';
    }
  }
  atomic_write_file(path, out);
}

void write_svix_values(const std::vector<SvixValue>& values, const std::string& path) {
  std::string out = "date,underlying_id,days,svix2_raw,svix2_pa,tail_share\n";
  for (const auto& v : values) {
    out += v.date.to_string();
    out += ',';
    out += v.underlying_id;
    out += ',';
    out += std::to_string(v.maturity_days);
    out += ',';
    out += fmt_full(v.svix2_raw);
    out += ',';
    out += fmt_full(v.svix2_annualized);
    out += ',';
    out += fmt_full(v.tail_share);
    out += '\n';
  }
  atomic_write_file(path, out);
}

}  // namespace resilab::svix
