#include "resilab/mathx.hpp"

#include <cmath>
#include <limits>

namespace resilab {

double norm_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

// Wichura (1988), algorithm AS 241, PPND16.
double norm_ppf(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }

  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return (q < 0.0) ? -val : val;
}

double black_call_fwd(double fwd, double strike, double vol, double ttm) {
  if (strike <= 0.0) return fwd - strike;
  const double st = vol * std::sqrt(ttm);
  if (st <= 0.0) return std::fmax(fwd - strike, 0.0);
  const double d1 = (std::log(fwd / strike) + 0.5 * st * st) / st;
  const double d2 = d1 - st;
  return fwd * norm_cdf(d1) - strike * norm_cdf(d2);
}

double black_put_fwd(double fwd, double strike, double vol, double ttm) {
  if (strike <= 0.0) return 0.0;
  const double st = vol * std::sqrt(ttm);
  if (st <= 0.0) return std::fmax(strike - fwd, 0.0);
  const double d1 = (std::log(fwd / strike) + 0.5 * st * st) / st;
  const double d2 = d1 - st;
  return strike * norm_cdf(-d2) - fwd * norm_cdf(-d1);
}

double implied_vol_call_fwd(double fwd, double strike, double ttm, double target,
                            double lo, double hi) {
  if (black_call_fwd(fwd, strike, lo, ttm) >= target) return lo;
  if (black_call_fwd(fwd, strike, hi, ttm) <= target) return hi;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (black_call_fwd(fwd, strike, mid, ttm) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lognormal_upper_call_integral(double fwd, double vol, double ttm, double a) {
  const double st = vol * std::sqrt(ttm);
  if (st <= 0.0) {
    const double x = std::fmax(fwd - a, 0.0);
    return 0.5 * x * x;
  }
  if (a <= 0.0) {
    // E[S_T^2]/2 - 0*E[S_T] ... degenerate; strikes are positive in practice.
    return 0.5 * fwd * fwd * std::exp(st * st);
  }
  const double z = (std::log(a / fwd) + 0.5 * st * st) / st;
  const double m2 = fwd * fwd * std::exp(st * st) * norm_cdf(2.0 * st - z);
  const double m1 = fwd * norm_cdf(st - z);
  const double m0 = norm_cdf(-z);
  return 0.5 * (m2 - 2.0 * a * m1 + a * a * m0);
}

}  // namespace resilab
