#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "cpip/data.hpp"
#include "cpip/nuisance.hpp"
#include "cpip/tilt.hpp"

namespace cpip {

struct EifSourcePart {
  double s1 = 0.0;
  double s2 = 0.0;
  double value() const { return s1 + s2; }
};

struct EifTargetPart {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double value() const { return t1 + t2 + t3; }
};

struct EifRow {
  double d_source = 0.0;
  double d_target = 0.0;
  double s1 = 0.0, s2 = 0.0;
  double t1 = 0.0, t2 = 0.0, t3 = 0.0;
};

// Uncentered influence function for the source-policy outcome:
//   s1 = pi*(A|W)/pi_hat(A|W) * (Y - sum_a pi*(a|W) q_hat(a))
//   s2 = sum_a pi*(a|W) q_hat(a)
EifSourcePart eif_source(const Observation& obs, const Simplex& pi_hat,
                         const std::vector<double>& q_hat, const TiltConfig& config,
                         double delta);

// Uncentered influence function for the target-policy outcome (destination
// costs only):
//   t1 = nu*(A|W)/pi_hat(A|W) * (Y - q_hat(A))
//   t2 = [2 - pi*(A|W)/pi_hat(A|W)] * sum_a nu*(a|W) q_hat(a)
//   t3 = pi*(A|W)/pi_hat(A|W) * rho(A) q_hat(A) - sum_a pi*(a|W) rho(a) q_hat(a)
EifTargetPart eif_target(const Observation& obs, const Simplex& pi_hat,
                         const std::vector<double>& q_hat, const TiltConfig& config,
                         double delta);

EifRow eif_row(const Observation& obs, const Simplex& pi_hat, const std::vector<double>& q_hat,
               const TiltConfig& config, double delta);

// Fast path sharing precomputed per-delta terms.
EifRow eif_row_from_terms(double y, int a, const Simplex& pi_hat,
                          const std::vector<double>& q_hat, const DestTiltTerms& terms);

struct EstimatePoint {
  double delta = 0.0;
  double mu_S_plugin = 0.0;
  double mu_T_plugin = 0.0;
  double mu_S_onestep = 0.0;
  double mu_T_onestep = 0.0;
  double sigma_S = 0.0;
  double sigma_T = 0.0;
};

struct EstimateCurve {
  std::vector<EstimatePoint> points;
  Eigen::MatrixXd eif_S;  // n x |grid|, cross-fitted uncentered EIF values
  Eigen::MatrixXd eif_T;
};

// Plug-in functionals (1/n) sum_i sum_a tilt(a|W_i) q_hat(Z_i, a) with tilts
// built from the fold complement's propensity fit.
std::pair<double, double> plugin_functionals(const Dataset& data,
                                             const std::vector<NuisancePair>& nuisances,
                                             const FoldAssignment& folds,
                                             const TiltConfig& config, double delta);

// One-step and plug-in estimates over config.delta_grid, with pooled
// cross-fitted EIF standard deviations. Output ordering is deterministic
// regardless of thread count.
EstimateCurve one_step_curve(const Dataset& data, const FoldAssignment& folds,
                             const std::vector<NuisancePair>& nuisances,
                             const TiltConfig& config, int threads = 1);

struct PositivityReport {
  std::vector<double> delta;
  std::vector<double> max_ratio;  // max_i max_{a: nu*(a|W_i)>0} nu*(a|W_i)/pi_hat(a|W_i)
  std::vector<char> flagged;
  double threshold = 100.0;

  bool any_flagged() const;
};

PositivityReport positivity_diagnostic(const Dataset& data,
                                       const std::vector<NuisancePair>& nuisances,
                                       const FoldAssignment& folds, const TiltConfig& config,
                                       const std::vector<double>& delta_grid,
                                       double threshold = 100.0);

}  // namespace cpip
