#include "resilab/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "resilab/csv.hpp"
#include "resilab/errors.hpp"
#include "resilab/mathx.hpp"
#include "resilab/rng.hpp"

namespace resilab::synth {

namespace {

// Stream layout: one substream per logical object so values never depend on
// generation order.
constexpr std::uint64_t kFactorStreamBase = 1;       // + factor index
constexpr std::uint64_t kAttentionStream = 50;
constexpr std::uint64_t kFirmParamStreamBase = 1000;    // + firm index
constexpr std::uint64_t kFirmShockStreamBase = 100000;  // + firm index

}  // namespace

std::vector<Date> weekdays_between(Date start, Date end) {
  std::vector<Date> days;
  for (Date d = start; d <= end; ++d) {
    if (!d.is_weekend()) days.push_back(d);
  }
  return days;
}

void ScenarioSpec::validate() const {
  if (n_firms < 2 || n_firms > 9999) {
    throw Error(Errc::invalid_spec, "n_firms must be in [2, 9999]");
  }
  if (n_industries < 2 || n_industries > 99) {
    throw Error(Errc::invalid_spec, "n_industries must be in [2, 99]");
  }
  if (end < start) {
    throw Error(Errc::invalid_spec, "date range is empty");
  }
  if (!industry_values.empty() &&
      static_cast<int>(industry_values.size()) != n_industries) {
    throw Error(Errc::invalid_spec, "industry_values size must equal n_industries");
  }
  for (double v : {vol_mktrf, vol_smb, vol_hml, vol_rmw, vol_cma, vol_mom, idio_vol}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw Error(Errc::invalid_spec, "volatilities must be finite and nonnegative");
    }
  }
  if (beta_mkt_hi < beta_mkt_lo || beta_other_hi < beta_other_lo) {
    throw Error(Errc::invalid_spec, "beta ranges are inverted");
  }
  if (cap_lo <= 0.0 || cap_hi < cap_lo) {
    throw Error(Errc::invalid_spec, "cap range must be positive and ordered");
  }
  if (crash_end < crash_start) {
    throw Error(Errc::invalid_spec, "crash window is inverted");
  }
}

ScenarioData generate_panel(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioData out;
  out.trading_days = weekdays_between(spec.start, spec.end);
  const auto n_days = out.trading_days.size();
  if (n_days == 0) {
    throw Error(Errc::invalid_spec, "no weekdays in the date range");
  }

  // Factors.
  const double vols[6] = {spec.vol_mktrf, spec.vol_smb, spec.vol_hml,
                          spec.vol_rmw,   spec.vol_cma, spec.vol_mom};
  std::vector<data::FactorObservation> frows(n_days);
  for (int f = 0; f < 6; ++f) {
    CounterRng rng(spec.seed, kFactorStreamBase + static_cast<std::uint64_t>(f));
    for (std::size_t t = 0; t < n_days; ++t) {
      const double v = vols[f] * rng.next_normal();
      auto& row = frows[t];
      row.date = out.trading_days[t];
      switch (f) {
        case 0: row.mktrf = v; break;
        case 1: row.smb = v; break;
        case 2: row.hml = v; break;
        case 3: row.rmw = v; break;
        case 4: row.cma = v; break;
        case 5: row.mom = v; break;
      }
    }
  }
  for (auto& row : frows) row.rf = spec.rf_daily;
  out.factors = data::FactorSeries::from_rows(std::move(frows));

  // Measure.
  std::vector<double> values = spec.industry_values;
  if (values.empty()) {
    values.resize(static_cast<std::size_t>(spec.n_industries));
    for (int j = 0; j < spec.n_industries; ++j) {
      values[static_cast<std::size_t>(j)] =
          20.0 + 60.0 * static_cast<double>(j) / static_cast<double>(spec.n_industries - 1);
    }
  }
  out.measure.family = data::Family::KP;
  out.measure.name = "affected_share";
  out.measure.naics_level = 3;
  out.measure.direction = data::Direction::LowResIfHigh;
  std::vector<std::string> industry_codes(static_cast<std::size_t>(spec.n_industries));
  for (int j = 0; j < spec.n_industries; ++j) {
    industry_codes[static_cast<std::size_t>(j)] = std::to_string(201 + j);
    out.measure.entries[industry_codes[static_cast<std::size_t>(j)]] =
        values[static_cast<std::size_t>(j)];
  }
  out.measure.validate();

  // Firm-level lower median decides which group takes which crash drift;
  // firms at the median sit in the high-resilience group, matching the
  // assignment tie rule downstream.
  std::vector<double> firm_values(static_cast<std::size_t>(spec.n_firms));
  for (int i = 0; i < spec.n_firms; ++i) {
    firm_values[static_cast<std::size_t>(i)] =
        values[static_cast<std::size_t>(i % spec.n_industries)];
  }
  {
    std::vector<double> sorted = firm_values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[(sorted.size() - 1) / 2];
    out.truth.resize(static_cast<std::size_t>(spec.n_firms));
    for (int i = 0; i < spec.n_firms; ++i) {
      out.truth[static_cast<std::size_t>(i)].low_group =
          firm_values[static_cast<std::size_t>(i)] > median;
    }
  }

  // Firms.
  out.panel.rows.reserve(static_cast<std::size_t>(spec.n_firms) * n_days);
  for (int i = 0; i < spec.n_firms; ++i) {
    FirmTruth& ft = out.truth[static_cast<std::size_t>(i)];
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "F%04d", i + 1);
    ft.firm_id = idbuf;
    const int j = i % spec.n_industries;
    char sub[8];
    std::snprintf(sub, sizeof(sub), "%03d", (i / spec.n_industries) % 1000);
    ft.naics = industry_codes[static_cast<std::size_t>(j)] + sub;
    ft.measure_value = values[static_cast<std::size_t>(j)];
    ft.alpha = spec.alpha_daily;
    ft.crash_drift = ft.low_group ? spec.crash_drift_low : spec.crash_drift_high;

    CounterRng param(spec.seed, kFirmParamStreamBase + static_cast<std::uint64_t>(i));
    ft.betas["mktrf"] = param.next_uniform(spec.beta_mkt_lo, spec.beta_mkt_hi);
    for (const char* name : {"smb", "hml", "rmw", "cma", "mom"}) {
      ft.betas[name] = param.next_uniform(spec.beta_other_lo, spec.beta_other_hi);
    }
    double cap = param.next_uniform(spec.cap_lo, spec.cap_hi);

    CounterRng shock(spec.seed, kFirmShockStreamBase + static_cast<std::uint64_t>(i));
    for (std::size_t t = 0; t < n_days; ++t) {
      const Date d = out.trading_days[t];
      const data::FactorObservation& f = *out.factors.find(d);
      double m = ft.alpha;
      m += ft.betas.at("mktrf") * f.mktrf;
      m += ft.betas.at("smb") * f.smb;
      m += ft.betas.at("hml") * f.hml;
      m += ft.betas.at("rmw") * f.rmw;
      m += ft.betas.at("cma") * f.cma;
      m += ft.betas.at("mom") * f.mom;
      if (spec.crash_start <= d && d <= spec.crash_end) m += ft.crash_drift;
      m += spec.idio_vol * shock.next_normal();

      const double raw = m + spec.rf_daily;
      data::ReturnObservation obs;
      obs.date = d;
      obs.firm_id = ft.firm_id;
      obs.raw_return = raw;
      obs.excess_return = raw - spec.rf_daily;  // matches ingestion arithmetic
      obs.market_cap = cap;
      obs.naics = ft.naics;
      out.panel.rows.push_back(std::move(obs));
      cap *= 1.0 + raw;
    }
  }
  std::sort(out.panel.rows.begin(), out.panel.rows.end(),
            [](const data::ReturnObservation& a, const data::ReturnObservation& b) {
              if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
              return a.date < b.date;
            });

  // Attention index: calm baseline, crash-window surge, post-crash plateau.
  CounterRng att(spec.seed, kAttentionStream);
  for (std::size_t t = 0; t < n_days; ++t) {
    const Date d = out.trading_days[t];
    double base = 20.0;
    if (d >= spec.crash_start && d <= spec.crash_end) {
      base = 80.0;
    } else if (d > spec.crash_end) {
      base = 50.0;
    }
    const double v = std::max(0.0, base + 5.0 * att.next_normal());
    out.attention.points.emplace_back(d, v);
  }
  return out;
}

GeneratedSurface generate_surface(const std::string& id, Date date, int maturity_days,
                                  double spot, double rf_gross, double sigma,
                                  const GridSpec& grid) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(Errc::invalid_grid, "sigma must be positive");
  }
  if (spot <= 0.0 || rf_gross <= 0.0) {
    throw Error(Errc::invalid_grid, "spot and rf_gross must be positive");
  }
  if (grid.n_strikes < 2 || grid.k_min_rel <= 0.0 || grid.k_max_rel <= grid.k_min_rel) {
    throw Error(Errc::invalid_grid, "strike grid spec is invalid");
  }

  GeneratedSurface out;
  svix::OptionSurfaceSlice& s = out.slice;
  s.underlying_id = id;
  s.date = date;
  s.maturity_days = maturity_days;
  s.spot = spot;
  s.rf_gross = rf_gross;
  s.forward = rf_gross * spot;
  const double T = static_cast<double>(maturity_days) / 365.0;
  const double F = s.forward;

  const auto n = static_cast<std::size_t>(grid.n_strikes);
  s.strikes.resize(n);
  s.call_prices.resize(n);
  s.put_prices.resize(n);
  const double k_lo = grid.k_min_rel * F;
  const double k_hi = grid.k_max_rel * F;
  for (std::size_t i = 0; i < n; ++i) {
    const double K =
        k_lo + (k_hi - k_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    s.strikes[i] = K;
    // Price the out-of-the-money side directly and derive the other side
    // through parity, so parity holds bitwise and both legs stay nonnegative.
    const double parity_leg = (F - K) / rf_gross;
    if (K <= F) {
      const double put = std::fmax(black_put_fwd(F, K, sigma, T) / rf_gross, 0.0);
      s.put_prices[i] = put;
      s.call_prices[i] = put + parity_leg;
    } else {
      const double call = std::fmax(black_call_fwd(F, K, sigma, T) / rf_gross, 0.0);
      s.call_prices[i] = call;
      s.put_prices[i] = call - parity_leg;
    }
  }
  s.validate();
  out.truth_svix2 = std::expm1(sigma * sigma * T);
  return out;
}

void write_scenario(const ScenarioData& data, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = dir.empty() ? "." : dir;
  data::serialize_returns(data.panel, base + "/returns.csv");
  data::serialize_factors(data.factors, base + "/factors.csv");
  data::serialize_resilience({data.measure}, base + "/resilience.csv");
  data::serialize_attention(data.attention, base + "/attention.csv");

  std::string truth =
      "firm_id,naics,value,group,alpha,beta_mktrf,beta_smb,beta_hml,beta_mom,beta_rmw,"
      "beta_cma,crash_drift\n";
  for (const auto& ft : data.truth) {
    truth += ft.firm_id;
    truth += ',';
    truth += ft.naics;
    truth += ',';
    truth += fmt_full(ft.measure_value);
    truth += ',';
    truth += ft.low_group ? "low" : "high";
    truth += ',';
    truth += fmt_full(ft.alpha);
    for (const char* name : {"mktrf", "smb", "hml", "mom", "rmw", "cma"}) {
      truth += ',';
      truth += fmt_full(ft.betas.at(name));
    }
    truth += ',';
    truth += fmt_full(ft.crash_drift);
    truth += '\n';
  }
  atomic_write_file(base + "/truth.csv", truth);
}

}  // namespace resilab::synth
