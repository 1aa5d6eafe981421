#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "resilab/errors.hpp"
#include "resilab/csv.hpp"
#include "resilab/mathx.hpp"
#include "resilab/svix.hpp"
#include "resilab/synthesis.hpp"

using namespace resilab;
using namespace resilab::svix;
using resilab::synth::generate_surface;
using resilab::synth::GridSpec;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

OptionSurfaceSlice lognormal_slice(double sigma, int days, double spot = 100.0,
                                   double rf_gross = 1.0, const GridSpec& grid = {}) {
  return generate_surface("X", Date(2020, 3, 2), days, spot, rf_gross, sigma, grid).slice;
}

}  // namespace

TEST_CASE("maturity whitelist") {
  for (int d : {30, 91, 182, 365, 730}) CHECK(valid_maturity(d));
  for (int d : {0, 1, 29, 31, 90, 92, 181, 183, 364, 366, 729, 731, -30}) {
    CHECK(!valid_maturity(d));
  }
}

TEST_CASE("quadrature matches the lognormal closed form on dense grids") {
  // Truth for lognormal prices: SVIX^2 over the horizon is e^{sigma^2 T} - 1.
  const GridSpec dense{800, 0.01, 10.0};
  for (double sigma : {0.1, 0.2, 0.4, 0.8}) {
    for (int days : {30, 91, 365, 730}) {
      const double T = days / 365.0;
      const auto gen = generate_surface("X", Date(2020, 3, 2), days, 100.0, 1.0,
                                        sigma, dense);
      CHECK(gen.truth_svix2 == doctest::Approx(std::expm1(sigma * sigma * T))
                                   .epsilon(1e-14));
      const SvixValue v = svix_squared(gen.slice);
      CHECK(std::fabs(v.svix2_raw - gen.truth_svix2) <= 1e-4);
      CHECK(v.underlying_id == "X");
      CHECK(v.maturity_days == days);
      CHECK(v.tail_share >= 0.0);
      CHECK(v.tail_share < 1.0);
    }
  }
}

TEST_CASE("a nonunit risk-free rate moves the forward but not the truth") {
  // rf_gross enters the forward (F = S R_f here) and the discounting; the
  // risk-neutral variance of R/R_f is unchanged.
  const GridSpec dense{800, 0.01, 10.0};
  const double sigma = 0.3;
  const int days = 365;
  const auto gen = generate_surface("Y", Date(2020, 6, 1), days, 100.0, 1.02, sigma,
                                    dense);
  CHECK(gen.slice.forward == doctest::Approx(102.0).epsilon(1e-12));
  const SvixValue v = svix_squared(gen.slice);
  CHECK(std::fabs(v.svix2_raw - std::expm1(sigma * sigma)) <= 1e-4);
}

TEST_CASE("grid refinement converges toward the closed form") {
  const double sigma = 0.4;
  const int days = 365;
  const double truth = std::expm1(sigma * sigma);
  double prev_err = 1e9;
  for (int n : {100, 300, 900}) {
    const GridSpec g{n, 0.01, 10.0};
    const SvixValue v = svix_squared(lognormal_slice(sigma, days, 100.0, 1.0, g));
    const double err = std::fabs(v.svix2_raw - truth);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 5e-5);
}

TEST_CASE("svix is monotone in volatility and annualizes exactly") {
  const GridSpec dense{800, 0.01, 10.0};
  double prev = -1.0;
  for (double sigma : {0.05, 0.1, 0.2, 0.3, 0.5, 0.7}) {
    const SvixValue v = svix_squared(lognormal_slice(sigma, 91, 100.0, 1.0, dense));
    CHECK(v.svix2_raw > prev);
    prev = v.svix2_raw;
    CHECK(v.svix2_annualized == v.svix2_raw * 365.0 / 91.0);
  }
  // Annualization is the identity at 365 days.
  const SvixValue y = svix_squared(lognormal_slice(0.2, 365, 100.0, 1.0, dense));
  CHECK(y.svix2_annualized == y.svix2_raw);
  const SvixValue y2 = svix_squared(lognormal_slice(0.2, 730, 100.0, 1.0, dense));
  CHECK(y2.svix2_annualized == y2.svix2_raw * 365.0 / 730.0);
}

TEST_CASE("tail share grows with total volatility") {
  const GridSpec g{400, 0.2, 3.0};  // narrow-ish grid so tails matter
  double prev = -1.0;
  for (double sigma : {0.1, 0.3, 0.6}) {
    const SvixValue v = svix_squared(lognormal_slice(sigma, 365, 100.0, 1.0, g));
    CHECK(v.tail_share > prev);
    CHECK(v.tail_share < 1.0);
    prev = v.tail_share;
  }
}

TEST_CASE("slice validation rejects broken inputs") {
  const GridSpec g{200, 0.2, 3.0};
  OptionSurfaceSlice ok = lognormal_slice(0.3, 91, 100.0, 1.0, g);
  ok.validate();

  OptionSurfaceSlice neg = ok;
  neg.put_prices[5] = -0.01;
  try {
    neg.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::negative_price);
  }

  // Break call monotonicity beyond tolerance.
  OptionSurfaceSlice mono = ok;
  mono.call_prices[10] = mono.call_prices[9] + 1.0;
  CHECK_THROWS_AS(mono.validate(), Error);

  // Break parity (shifting one call also risks monotonicity; either trips).
  OptionSurfaceSlice par = ok;
  par.call_prices[60] += 0.01;
  try {
    par.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.code() == Errc::negative_price || e.code() == Errc::invalid_grid));
  }

  // Unsorted strikes.
  OptionSurfaceSlice uns = ok;
  std::swap(uns.strikes[3], uns.strikes[4]);
  CHECK_THROWS_AS(uns.validate(), Error);
}

TEST_CASE("grids that fail to bracket the forward are rejected") {
  // Grid spans [0.8F, 1.5F]: narrower than the required [0.5F, 2F].
  const GridSpec g{200, 0.8, 1.5};
  const OptionSurfaceSlice s = lognormal_slice(0.3, 91, 100.0, 1.0, g);
  try {
    svix_squared(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::grid_too_narrow);
  }
}

TEST_CASE("group averages are order-invariant and respect the weights") {
  const GridSpec dense{400, 0.05, 6.0};
  std::vector<SvixValue> vals;
  for (double sigma : {0.15, 0.25, 0.35, 0.50}) {
    vals.push_back(svix_squared(lognormal_slice(sigma, 91, 100.0, 1.0, dense)));
  }
  const std::vector<double> w = {0.4, 0.3, 0.2, 0.1};
  const SvixValue bar = svix_bar(vals, w, "BAR");
  CHECK(bar.underlying_id == "BAR");
  CHECK(bar.maturity_days == 91);
  double manual = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) manual += w[i] * vals[i].svix2_raw;
  CHECK(bar.svix2_raw == doctest::Approx(manual).epsilon(1e-15));
  CHECK(bar.svix2_raw > vals[0].svix2_raw);
  CHECK(bar.svix2_raw < vals[3].svix2_raw);

  // Reordering values together with weights changes nothing.
  std::vector<SvixValue> rev(vals.rbegin(), vals.rend());
  const std::vector<double> wrev(w.rbegin(), w.rend());
  CHECK(svix_bar(rev, wrev, "BAR").svix2_raw ==
        doctest::Approx(bar.svix2_raw).epsilon(1e-15));

  // Weights must sum to one.
  try {
    svix_bar(vals, {0.4, 0.3, 0.2, 0.2}, "BAR");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::weight_mismatch);
  }
  CHECK_THROWS_AS(svix_bar(vals, {0.5, 0.5}, "BAR"), Error);

  // Mixed maturities are rejected.
  std::vector<SvixValue> mixed = vals;
  mixed[1].maturity_days = 30;
  try {
    svix_bar(mixed, w, "BAR");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::maturity_mismatch);
  }
}

TEST_CASE("value-weighted expected returns aggregate to the market premium") {
  // Cross-section identity: with bar = sum w_i svix_i^2, the weighted
  // average of per-name premia collapses to the market premium.
  const GridSpec dense{400, 0.03, 8.0};
  const int n = 50;
  std::vector<SvixValue> firms;
  std::vector<double> w;
  double wtot = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sigma = 0.15 + 0.01 * i;
    firms.push_back(svix_squared(lognormal_slice(sigma, 91, 100.0, 1.0, dense)));
    firms.back().underlying_id = "F" + std::to_string(i);
    const double wi = 1.0 + (i % 7);
    w.push_back(wi);
    wtot += wi;
  }
  for (auto& x : w) x /= wtot;

  const SvixValue market = svix_squared(lognormal_slice(0.22, 91, 100.0, 1.0, dense));
  const SvixValue bar = svix_bar(firms, w);

  // The relative terms cancel under the same weights, leaving the market
  // premium (E R_m - R_f)/R_f = SVIX_m^2.
  long double acc = 0.0L;
  for (int i = 0; i < n; ++i) {
    const ExpectedReturn er = expected_return(firms[i], market, bar, 1.0);
    // Per-name decomposition holds exactly.
    CHECK(er.premium_over_rf ==
          doctest::Approx(market.svix2_raw +
                          0.5 * (firms[i].svix2_raw - bar.svix2_raw))
              .epsilon(1e-15));
    acc += static_cast<long double>(w[i]) * er.premium_over_rf;
  }
  CHECK(std::fabs(static_cast<double>(acc) - market.svix2_raw) < 1e-14);

  // premium scales by rf_gross, premium_pa by 365/days.
  const ExpectedReturn er = expected_return(firms[0], market, bar, 1.05);
  CHECK(er.premium == doctest::Approx(er.premium_over_rf * 1.05).epsilon(1e-15));
  CHECK(er.premium_pa == doctest::Approx(er.premium * 365.0 / 91.0).epsilon(1e-15));
}

TEST_CASE("resilience groups split firm svix values with lagged cap weights") {
  // Six firms, two industries: naics 201 carries value 80 (low resilience
  // under LowResIfHigh), 202 carries 20. Distinct sigmas per group.
  const GridSpec dense{400, 0.03, 8.0};
  const Date d0(2020, 3, 2), d1(2020, 3, 3);
  data::MatchedPanel matched;
  matched.direction = data::Direction::LowResIfHigh;
  std::vector<SvixValue> vals;
  std::vector<OptionSurfaceSlice> slices;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "F" + std::to_string(i);
    const bool lowres = i < 3;
    matched.firm_value[id] = lowres ? 80.0 : 20.0;
    for (Date d : {d0, d1}) {
      data::ReturnObservation o;
      o.date = d;
      o.firm_id = id;
      o.naics = lowres ? "201" : "202";
      o.market_cap = 100.0 + 50.0 * i + (d == d1 ? 7.0 : 0.0);
      o.excess_return = o.raw_return = 0.0;
      matched.panel.rows.push_back(o);
    }
    const double sigma = lowres ? 0.40 + 0.05 * i : 0.15 + 0.02 * i;
    auto gen = generate_surface(id, d1, 91, 100.0, 1.0, sigma, dense);
    slices.push_back(gen.slice);
    SvixValue v = svix_squared(gen.slice);
    vals.push_back(v);
  }
  std::sort(matched.panel.rows.begin(), matched.panel.rows.end(),
            [](const auto& a, const auto& b) {
              if (a.firm_id != b.firm_id) return a.firm_id < b.firm_id;
              return a.date < b.date;
            });

  const auto pts = resilience_svix_indices(vals, matched);
  REQUIRE(pts.size() == 1);
  const GroupSvixPoint& p = pts[0];
  CHECK(p.date == d1);
  CHECK(p.maturity_days == 91);
  CHECK(p.n_high == 3);
  CHECK(p.n_low == 3);

  // Oracle with lagged (d0) caps.
  auto vw = [&](int lo, int hi) {
    long double ws = 0.0L, vs = 0.0L;
    for (int i = lo; i < hi; ++i) {
      const double cap = 100.0 + 50.0 * i;  // caps on d0
      ws += cap;
      vs += cap * static_cast<long double>(vals[i].svix2_raw);
    }
    return static_cast<double>(vs / ws);
  };
  CHECK(p.low_bar2 == doctest::Approx(vw(0, 3)).epsilon(1e-14));
  CHECK(p.high_bar2 == doctest::Approx(vw(3, 6)).epsilon(1e-14));
  CHECK(p.low_bar2 > p.high_bar2);
  CHECK(p.diff_premium == doctest::Approx(0.5 * (p.low_bar2 - p.high_bar2))
                              .epsilon(1e-14));
  CHECK(p.diff_premium_pa ==
        doctest::Approx(p.diff_premium * 365.0 / 91.0).epsilon(1e-14));

  // The slice overload computes the same numbers.
  const auto pts2 = resilience_svix_indices(slices, matched);
  REQUIRE(pts2.size() == 1);
  CHECK(pts2[0].high_bar2 == p.high_bar2);
  CHECK(pts2[0].low_bar2 == p.low_bar2);
}

TEST_CASE("surface files round-trip bitwise") {
  const GridSpec g{50, 0.2, 3.0};
  std::vector<OptionSurfaceSlice> slices;
  slices.push_back(lognormal_slice(0.25, 91, 100.0, 1.0, g));
  slices.push_back(lognormal_slice(0.45, 30, 80.0, 1.01, g));
  slices[1].underlying_id = "Z";

  const std::string path = temp_path("resilab_surface_rt.csv");
  write_surfaces(slices, path);
  const auto back = read_surfaces(path);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].underlying_id == slices[i].underlying_id);
    CHECK(back[i].date == slices[i].date);
    CHECK(back[i].maturity_days == slices[i].maturity_days);
    CHECK(back[i].spot == slices[i].spot);
    CHECK(back[i].forward == slices[i].forward);
    CHECK(back[i].rf_gross == slices[i].rf_gross);
    CHECK(back[i].strikes == slices[i].strikes);
    CHECK(back[i].call_prices == slices[i].call_prices);
    CHECK(back[i].put_prices == slices[i].put_prices);
    CHECK(svix_squared(back[i]).svix2_raw == svix_squared(slices[i]).svix2_raw);
  }
  std::filesystem::remove(path);
}

TEST_CASE("svix value files round-trip bitwise") {
  const GridSpec g{200, 0.05, 6.0};
  std::vector<SvixValue> vals;
  vals.push_back(svix_squared(lognormal_slice(0.2, 91, 100.0, 1.0, g)));
  vals.push_back(svix_squared(lognormal_slice(0.6, 365, 100.0, 1.0, g)));
  const std::string path = temp_path("resilab_svix_rt.csv");
  write_svix_values(vals, path);

  CsvReader reader(path,
                   {"date", "underlying_id", "days", "svix2_raw", "svix2_pa", "tail_share"});
  std::vector<std::string> rec;
  std::size_t i = 0;
  while (reader.next(rec)) {
    REQUIRE(i < vals.size());
    CHECK(Date::parse(rec[0]) == vals[i].date);
    CHECK(rec[1] == vals[i].underlying_id);
    CHECK(parse_int(rec[2]).value() == vals[i].maturity_days);
    CHECK(parse_double(rec[3]).value() == vals[i].svix2_raw);
    CHECK(parse_double(rec[4]).value() == vals[i].svix2_annualized);
    CHECK(parse_double(rec[5]).value() == vals[i].tail_share);
    ++i;
  }
  CHECK(i == 2);
  std::filesystem::remove(path);
}
