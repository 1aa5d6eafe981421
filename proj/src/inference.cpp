#include "resilab/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "resilab/errors.hpp"

namespace resilab::stats {

namespace {

void fill_se_t_stars(RegressionResult& r) {
  const auto k = r.coefficients.size();
  r.se.resize(k);
  r.t_stats.resize(k);
  r.stars.resize(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    const double v = r.covariance(i, i);
    r.se(i) = v > 0.0 ? std::sqrt(v) : 0.0;
    if (r.se(i) > 0.0) {
      r.t_stats(i) = r.coefficients(i) / r.se(i);
    } else {
      r.t_stats(i) = r.coefficients(i) == 0.0
                         ? 0.0
                         : std::copysign(std::numeric_limits<double>::infinity(),
                                         r.coefficients(i));
    }
    r.stars[static_cast<std::size_t>(i)] = stars(r.t_stats(i));
  }
}

void check_rank(const Eigen::MatrixXd& X) {
  if (X.rows() <= X.cols() || X.cols() == 0) {
    throw Error(Errc::rank_deficient,
                "design needs rows > cols, got " + std::to_string(X.rows()) + "x" +
                    std::to_string(X.cols()));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0 || sv(sv.size() - 1) <= 1e-12 * sv(0)) {
    throw Error(Errc::rank_deficient, "design matrix rank deficient at tolerance 1e-12");
  }
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  if (y.size() != X.rows()) {
    throw Error(Errc::rank_deficient, "y length does not match design rows");
  }
  check_rank(X);

  RegressionResult r;
  r.se_type = SeType::OLS;
  r.n_obs = static_cast<int>(X.rows());
  r.coefficients = X.colPivHouseholderQr().solve(y);
  r.residuals = y - X * r.coefficients;

  const double ssr = r.residuals.squaredNorm();
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  if (sst > 0.0) {
    r.r_squared = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  } else {
    r.r_squared = ssr <= 1e-24 ? 1.0 : 0.0;
  }

  const double dof = static_cast<double>(X.rows() - X.cols());
  const double sigma2 = ssr / dof;
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  r.covariance = symmetrized(sigma2 * xtx_inv);
  fill_se_t_stars(r);
  return r;
}

Eigen::MatrixXd white_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals) {
  const Eigen::MatrixXd xtx_inv =
      (X.transpose() * X).ldlt().solve(Eigen::MatrixXd::Identity(X.cols(), X.cols()));
  Eigen::MatrixXd weighted = X;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    weighted.row(i) *= residuals(i) * residuals(i);
  }
  const Eigen::MatrixXd meat = X.transpose() * weighted;
  return symmetrized(xtx_inv * meat * xtx_inv);
}

RegressionResult ols_white(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
  RegressionResult r = ols(y, X);
  r.se_type = SeType::White;
  r.covariance = white_covariance(X, r.residuals);
  fill_se_t_stars(r);
  return r;
}

int andrews_lag(const std::vector<double>& series) {
  const auto T = series.size();
  if (T < 8) {
    throw Error(Errc::series_too_short,
                "Andrews lag needs at least 8 observations, got " + std::to_string(T));
  }
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(T);

  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double x = series[t] - mean;
    den += x * x;
    if (t > 0) num += x * (series[t - 1] - mean);
  }
  double rho = den > 0.0 ? num / den : 0.0;
  rho = std::clamp(rho, -0.97, 0.97);
  if (rho == 0.0) return 0;

  const double one_m = (1.0 - rho) * (1.0 - rho);
  const double one_p = (1.0 + rho) * (1.0 + rho);
  const double alpha = 4.0 * rho * rho / (one_m * one_p);
  const double s_star = 1.1447 * std::cbrt(alpha * static_cast<double>(T));
  const auto lag = static_cast<long long>(std::floor(s_star));
  return static_cast<int>(std::clamp(lag, 0LL, static_cast<long long>(T) - 1));
}

HacMeanTest newey_west_mean(const std::vector<double>& series, int lag) {
  const auto T = series.size();
  if (T < 2) {
    throw Error(Errc::series_too_short,
                "HAC mean test needs at least 2 observations, got " + std::to_string(T));
  }
  int L = (lag == kAutoLag) ? andrews_lag(series)
                            : std::clamp(lag, 0, static_cast<int>(T) - 1);

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(T);

  std::vector<double> x(T);
  for (std::size_t t = 0; t < T; ++t) x[t] = series[t] - mean;

  auto gamma = [&](int j) {
    double s = 0.0;
    for (std::size_t t = static_cast<std::size_t>(j); t < T; ++t) {
      s += x[t] * x[t - static_cast<std::size_t>(j)];
    }
    return s / static_cast<double>(T);
  };

  double omega = gamma(0);
  for (int j = 1; j <= L; ++j) {
    const double w = 1.0 - static_cast<double>(j) / static_cast<double>(L + 1);
    omega += 2.0 * w * gamma(j);
  }

  HacMeanTest out;
  out.mean = mean;
  out.lag = L;
  out.n_obs = static_cast<int>(T);
  out.hac_se = std::sqrt(std::max(omega, 0.0) / static_cast<double>(T));
  if (out.hac_se > 0.0) {
    out.t_stat = mean / out.hac_se;
    out.degenerate = false;
  } else {
    out.degenerate = true;
    out.t_stat = mean == 0.0 ? 0.0
                             : std::copysign(std::numeric_limits<double>::infinity(), mean);
  }
  return out;
}

std::string stars(double t) {
  const double a = std::fabs(t);
  if (a >= 2.576) return "***";
  if (a >= 1.960) return "**";
  if (a >= 1.645) return "*";
  return "";
}

}  // namespace resilab::stats
