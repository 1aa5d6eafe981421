#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace resilab::stats {

enum class SeType { OLS, White, NeweyWest };

struct RegressionResult {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  SeType se_type = SeType::OLS;
  int n_obs = 0;
  double r_squared = 0.0;
  Eigen::VectorXd se;
  Eigen::VectorXd t_stats;
  std::vector<std::string> stars;
  Eigen::VectorXd residuals;
};

struct HacMeanTest {
  double mean = 0.0;
  double hac_se = 0.0;
  int lag = 0;
  double t_stat = 0.0;
  int n_obs = 0;
  bool degenerate = false;  // hac_se collapsed to zero (constant series)
};

// Least squares via column-pivoted QR. X must include the intercept column.
// Classical covariance SSR/(n-k) (X'X)^-1. Throws RankDeficient when the
// smallest singular value is below 1e-12 of the largest or n <= k.
RegressionResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

// HC0 sandwich (X'X)^-1 (sum_i e_i^2 x_i x_i') (X'X)^-1.
Eigen::MatrixXd white_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals);

// ols() with the covariance block replaced by the White sandwich.
RegressionResult ols_white(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

// Andrews (1991) AR(1) plug-in truncation lag for the Bartlett kernel:
// floor(1.1447 * (4 rho^2 T / ((1-rho)^2 (1+rho)^2))^(1/3)), rho clamped to
// [-0.97, 0.97], result clamped to [0, T-1]. Requires length >= 8.
int andrews_lag(const std::vector<double>& series);

inline constexpr int kAutoLag = -1;

// Mean of the series with Bartlett-kernel HAC standard error:
// Omega = g0 + 2 sum_{j=1..L} (1 - j/(L+1)) g_j, autocovariances with
// divisor T, hac_se = sqrt(max(Omega,0)/T). lag = kAutoLag delegates the
// truncation choice to andrews_lag.
HacMeanTest newey_west_mean(const std::vector<double>& series, int lag = kAutoLag);

// Two-sided normal significance markers: |t| >= 1.645 "*", 1.960 "**",
// 2.576 "***".
std::string stars(double t);

}  // namespace resilab::stats
