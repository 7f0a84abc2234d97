#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpip/data.hpp"
#include "cpip/types.hpp"

namespace cpip {

// Synthetic benchmark generator: W ~ N(0, I_4); a 3-arm multinomial-logit
// exposure with linear log-odds; per-arm linear outcome means; Gaussian
// outcome noise with variance 50.
inline constexpr double kDgpNoiseVariance = 50.0;

Simplex dgp_propensity(const std::vector<double>& w);
double dgp_outcome_mean(const std::vector<double>& w, int a);

struct DgpSample {
  Dataset data;
  std::uint64_t seed = 0;
};

DgpSample generate(int n, std::uint64_t seed);

// Nonlinear covariate substitution used to induce nuisance misspecification;
// equals apply_features(Features::nonlinear3, w).
std::vector<double> misspecify(const std::vector<double>& w);

struct TruthCurve {
  std::vector<double> delta;
  std::vector<double> mu_S, mu_T;
  std::vector<double> se_S, se_T;  // Monte Carlo standard errors
};

// Monte Carlo ground truth for both policy functionals under the true
// propensity and outcome mean. Deterministic in (seed); independent of
// thread count.
TruthCurve truth_oracle(const TiltConfig& config, const std::vector<double>& delta_grid,
                        long n_mc, std::uint64_t seed, int threads = 1);

enum class Regime { correct, q_misspec, pi_misspec };
const char* regime_name(Regime r);

struct BenchmarkOptions {
  long n_mc_truth = 1000000;
  int k_folds = 5;
  double prop_floor = 1e-4;
  int threads = 1;
};

struct BenchmarkCell {
  int setup = 0;
  std::string estimator;  // "plug-in" | "one-step"
  std::string regime;     // "correct" | "Q" | "pi"
  std::string policy;     // "S" | "T"
  double ibias = 0.0;
  double irmse = 0.0;
};

struct BenchmarkReport {
  std::vector<BenchmarkCell> cells;
  int n = 0;
  int reps = 0;
  std::vector<double> grid;
  std::uint64_t seed = 0;
};

// Preset (cost, target) pairs for setups 1..3; delta_grid set to `grid`.
TiltConfig benchmark_setup(int id, const std::vector<double>& grid);

std::vector<double> linspace(double lo, double hi, int points);

// Repeated-simulation comparison of the plug-in and one-step estimators
// against the Monte Carlo truth. iBias averages |mean error| over the grid;
// iRMSE averages per-delta root mean squared error. Bit-reproducible from
// (seed, n, reps, grid, setups); a failing rep aborts.
BenchmarkReport run_benchmark(const std::vector<TiltConfig>& setups, int n, int reps,
                              const std::vector<double>& grid,
                              const std::vector<Regime>& regimes, std::uint64_t seed,
                              const BenchmarkOptions& opts = {});

}  // namespace cpip
