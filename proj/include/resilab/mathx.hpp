#pragma once

namespace resilab {

// Standard normal CDF via erfc, accurate in both tails.
double norm_cdf(double x);

// Inverse standard normal CDF (Wichura's PPND16). Relative error ~1e-16.
// Uses only log/sqrt so results are bit-stable across platforms.
double norm_ppf(double p);

// Undiscounted Black-76 option values on the forward:
//   call = F N(d1) - K N(d2),  put = K N(-d2) - F N(-d1),
//   d1 = (ln(F/K) + s^2 T/2) / (s sqrt(T)),  d2 = d1 - s sqrt(T).
// Discounted prices are these divided by the gross rate.
double black_call_fwd(double fwd, double strike, double vol, double ttm);
double black_put_fwd(double fwd, double strike, double vol, double ttm);

// Implied vol of an undiscounted forward call price, by bisection.
// Returns a vol in [lo, hi] with |price(vol) - target| driven below tol
// in ~100 iterations; clamps to the bracket if the target is outside it.
double implied_vol_call_fwd(double fwd, double strike, double ttm, double target,
                            double lo = 1e-6, double hi = 6.0);

// Lognormal partial second moment used by closed-form tail integrals:
// with S_T lognormal, E S_T = fwd and log-variance s^2 T,
//   E[S_T^2 1{S_T > a}] = fwd^2 e^{s^2 T} N(2 s sqrt(T) - z_a)
//   E[S_T   1{S_T > a}] = fwd N(s sqrt(T) - z_a)
//   P[S_T > a]          = N(-z_a)
// where z_a = (ln(a/fwd) + s^2 T / 2) / (s sqrt(T)).
// integral_{a}^{inf} call_fwd(K) dK = E[((S_T - a)^+)^2] / 2.
double lognormal_upper_call_integral(double fwd, double vol, double ttm, double a);

}  // namespace resilab
