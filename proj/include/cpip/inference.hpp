#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "cpip/estimation.hpp"

namespace cpip {

double normal_quantile(double p);

// Gaussian-multiplier sup statistic over the grid: for each draw b,
//   zeta_b = sup_delta | n^{-1/2} sum_i chi_i^b (D_delta(O_i) - mu_delta) / sigma_delta |,
// returning the empirical ceil((1-alpha) B) order statistic. The multiplier
// vectors are a deterministic function of (seed, b), so two calls with the
// same seed share draws across grids and policies.
double multiplier_critical_value(const Eigen::MatrixXd& eif, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& sigma, int B, double alpha,
                                 std::uint64_t seed, int threads = 1);

struct BandResult {
  std::vector<double> delta_grid;
  std::vector<double> estimate;
  std::vector<double> lo_pointwise, hi_pointwise;
  std::vector<double> lo_uniform, hi_uniform;
  double critical_value = 0.0;  // uniform xi
  double z_pointwise = 0.0;
  int bootstrap_draws = 0;
  double alpha = 0.05;
};

// Intervals mu_hat -/+ xi sigma_hat / sqrt(n) for both policies; pointwise
// half-widths use the normal quantile at 1 - alpha/2.
std::pair<BandResult, BandResult> build_bands(const EstimateCurve& curve, double xi_S,
                                              double xi_T, int n, double alpha = 0.05,
                                              int bootstrap_draws = 0);

}  // namespace cpip
