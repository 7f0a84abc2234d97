#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "cpip/data.hpp"
#include "cpip/types.hpp"

namespace cpip {

// Feature map used by a fitted model. nonlinear3 replaces a length-4
// covariate vector with the 3 transformed features
//   (10 + w2/(1+e^{w1}), (0.6 + w1 w3 / 25)^3, (w2 + w4 + 20)^2).
enum class Features { raw, nonlinear3 };

const char* features_name(Features f);
Features features_from_name(const std::string& name);
std::vector<double> apply_features(Features f, const std::vector<double>& w);

struct PropensityFitOptions {
  double ridge = 1e-6;
  double floor_eps = 1e-4;
  int max_iter = 500;
  double grad_tol = 1e-8;
  Features features = Features::raw;
};

// Baseline-category multinomial logistic model; the last action is the
// baseline. Coefficients are stored on the original feature scale.
struct PropensityModel {
  Eigen::MatrixXd coef;  // (K-1) x (m+1), column 0 is the intercept
  Features features = Features::raw;
  double floor_eps = 1e-4;
  bool converged = true;
  int iterations = 0;

  int actions() const { return static_cast<int>(coef.rows()) + 1; }
  // Floored at floor_eps and renormalized: every entry >= eps / (1 + K eps).
  Simplex predict(const std::vector<double>& w) const;
  Simplex predict_raw(const std::vector<double>& w) const;
};

struct OutcomeFitOptions {
  Features features = Features::raw;
};

// Arm-saturated linear outcome model: per-action OLS of Y on [1, Z].
struct OutcomeModel {
  std::vector<Eigen::VectorXd> arm_coef;
  Features features = Features::raw;
  std::vector<int> adjust_idx;  // applied when features == raw
  bool pseudo_inverse = false;

  int actions() const { return static_cast<int>(arm_coef.size()); }
  double predict(const std::vector<double>& w, int a) const;
  std::vector<double> predict_all(const std::vector<double>& w) const;
  OutcomeModel scaled(double factor) const;
};

struct FoldAssignment {
  std::vector<int> fold_of;
  int k_folds = 0;
};

// Near-equal random partition, deterministic in seed.
FoldAssignment assign_folds(int n, int k_folds, std::uint64_t seed);

PropensityModel fit_propensity(const Dataset& train, const PropensityFitOptions& opts = {});
OutcomeModel fit_outcome(const Dataset& train, const OutcomeFitOptions& opts = {});

Simplex predict_propensity(const PropensityModel& m, const std::vector<double>& w);
double predict_outcome(const OutcomeModel& m, const std::vector<double>& w, int a);

struct NuisancePair {
  PropensityModel propensity;
  OutcomeModel outcome;
};

// pairs[k] is fitted on every row outside fold k.
std::vector<NuisancePair> fit_cross_fit(const Dataset& data, const FoldAssignment& folds,
                                        const PropensityFitOptions& p_opts = {},
                                        const OutcomeFitOptions& o_opts = {});

nlohmann::json propensity_to_json(const PropensityModel& m);
PropensityModel propensity_from_json(const nlohmann::json& j);
nlohmann::json outcome_to_json(const OutcomeModel& m);
OutcomeModel outcome_from_json(const nlohmann::json& j);

}  // namespace cpip
