#include "cpip/inference.hpp"

#include <algorithm>
#include <cmath>

#include "cpip/errors.hpp"
#include "cpip/parallel.hpp"
#include "cpip/rng.hpp"

namespace cpip {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation, then one Halley refinement.
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425, phigh = 1 - plow;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= phigh) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    const double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * 2.5066282746310002 * std::exp(x * x / 2.0);  // sqrt(2 pi)
  return x - u / (1.0 + x * u / 2.0);
}

double multiplier_critical_value(const Eigen::MatrixXd& eif, const Eigen::VectorXd& mu,
                                 const Eigen::VectorXd& sigma, int B, double alpha,
                                 std::uint64_t seed, int threads) {
  const int n = static_cast<int>(eif.rows());
  const int g = static_cast<int>(eif.cols());
  if (g == 0 || n == 0) throw ConfigError("multiplier bootstrap: empty EIF matrix");
  if (mu.size() != g || sigma.size() != g)
    throw ConfigError("multiplier bootstrap: grid size mismatch");
  if (B < 100) throw ConfigError("multiplier bootstrap: need at least 100 draws");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("multiplier bootstrap: bad alpha");
  for (int j = 0; j < g; ++j)
    if (!(sigma(j) > 0.0)) throw NumericError("degenerate EIF variance");

  // Standardized, centered process scaled by n^{-1/2}: column-major G x n.
  Eigen::MatrixXd m(g, n);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < n; ++i) m(j, i) = (eif(i, j) - mu(j)) / (sigma(j) * root_n);

  std::vector<double> zeta(static_cast<std::size_t>(B), 0.0);
  parallel_for(B, threads, [&](int b) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(b) + 1));
    Eigen::VectorXd chi(n);
    for (int i = 0; i < n; ++i) chi(i) = rng.normal();
    zeta[static_cast<std::size_t>(b)] = (m * chi).cwiseAbs().maxCoeff();
  });

  std::sort(zeta.begin(), zeta.end());
  const int rank = static_cast<int>(std::ceil((1.0 - alpha) * B));  // 1-indexed order statistic
  const int idx = std::clamp(rank - 1, 0, B - 1);
  return zeta[static_cast<std::size_t>(idx)];
}

namespace {

BandResult one_band(const std::vector<EstimatePoint>& pts, bool source, double xi, int n,
                    double alpha, int bootstrap_draws) {
  BandResult band;
  band.alpha = alpha;
  band.bootstrap_draws = bootstrap_draws;
  band.critical_value = xi;
  band.z_pointwise = normal_quantile(1.0 - alpha / 2.0);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (const EstimatePoint& pt : pts) {
    const double est = source ? pt.mu_S_onestep : pt.mu_T_onestep;
    const double se = (source ? pt.sigma_S : pt.sigma_T) / root_n;
    band.delta_grid.push_back(pt.delta);
    band.estimate.push_back(est);
    band.lo_pointwise.push_back(est - band.z_pointwise * se);
    band.hi_pointwise.push_back(est + band.z_pointwise * se);
    band.lo_uniform.push_back(est - xi * se);
    band.hi_uniform.push_back(est + xi * se);
  }
  return band;
}

}  // namespace

std::pair<BandResult, BandResult> build_bands(const EstimateCurve& curve, double xi_S,
                                              double xi_T, int n, double alpha,
                                              int bootstrap_draws) {
  if (n < 1) throw ConfigError("build_bands: n must be positive");
  return {one_band(curve.points, true, xi_S, n, alpha, bootstrap_draws),
          one_band(curve.points, false, xi_T, n, alpha, bootstrap_draws)};
}

}  // namespace cpip
