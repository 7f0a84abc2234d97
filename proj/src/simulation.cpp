#include "cpip/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpip/errors.hpp"
#include "cpip/estimation.hpp"
#include "cpip/nuisance.hpp"
#include "cpip/parallel.hpp"
#include "cpip/rng.hpp"
#include "cpip/tilt.hpp"

namespace cpip {

Simplex dgp_propensity(const std::vector<double>& w) {
  const double eta1 = std::exp(-2.0 * w[0] + w[1] - 0.5 * w[2] - 0.25 * w[3]);
  const double eta2 = std::exp(-w[0] + 0.25 * w[1] + 2.0 * w[2] + 0.5 * w[3]);
  const double denom = eta1 + eta2 + 1.0;
  return Simplex({eta1 / denom, eta2 / denom, 1.0 / denom});
}

double dgp_outcome_mean(const std::vector<double>& w, int a) {
  const double q = 2.0 * w[0] + w[1] + w[2] + w[3];
  switch (a) {
    case 0: return 10.0 - 8.7 * q;
    case 1: return 40.0 + 17.4 * q;
    case 2: return 50.0 + 26.1 * q;
    default: throw DataError("dgp outcome: action out of range");
  }
}

DgpSample generate(int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("generate: n must be positive");
  Rng rng(derive_seed(seed, 0x646770 /* "dgp" */));
  const double noise_sd = std::sqrt(kDgpNoiseVariance);

  DgpSample sample;
  sample.seed = seed;
  sample.data.action_space = ActionSpace::indexed(3);
  sample.data.adjust_idx = all_indices(4);
  sample.data.rows.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Observation o;
    o.w = {rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    o.a = rng.categorical(dgp_propensity(o.w).probs);
    o.y = dgp_outcome_mean(o.w, o.a) + noise_sd * rng.normal();
    sample.data.rows.push_back(std::move(o));
  }
  return sample;
}

std::vector<double> misspecify(const std::vector<double>& w) {
  return apply_features(Features::nonlinear3, w);
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw ConfigError("linspace: need at least one point");
  std::vector<double> g(static_cast<std::size_t>(points));
  if (points == 1) {
    g[0] = lo;
    return g;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
  g.back() = hi;
  return g;
}

TruthCurve truth_oracle(const TiltConfig& config, const std::vector<double>& delta_grid,
                        long n_mc, std::uint64_t seed, int threads) {
  config.validate();
  if (!config.cost.is_destination())
    throw ConfigError("truth oracle requires destination costs");
  if (n_mc < 1) throw ConfigError("truth oracle: n_mc must be positive");
  const int g = static_cast<int>(delta_grid.size());
  const int k = config.k();
  if (k != 3) throw ConfigError("truth oracle: the synthetic generator has 3 actions");

  std::vector<DestTiltTerms> terms;
  terms.reserve(static_cast<std::size_t>(g));
  for (double d : delta_grid) terms.push_back(dest_tilt_terms(config.nu, config.cost.dest, d));

  // Fixed-size blocks keep the reduction order independent of threading.
  const long block_size = 8192;
  const int blocks = static_cast<int>((n_mc + block_size - 1) / block_size);
  struct BlockSums {
    std::vector<double> s, t, s2, t2;
    long count = 0;
  };
  std::vector<BlockSums> partial(static_cast<std::size_t>(blocks));

  parallel_for(blocks, threads, [&](int bi) {
    BlockSums& bs = partial[static_cast<std::size_t>(bi)];
    bs.s.assign(static_cast<std::size_t>(g), 0.0);
    bs.t.assign(static_cast<std::size_t>(g), 0.0);
    bs.s2.assign(static_cast<std::size_t>(g), 0.0);
    bs.t2.assign(static_cast<std::size_t>(g), 0.0);
    Rng rng(derive_seed(seed, 0x6f7261636c65ULL + static_cast<std::uint64_t>(bi)));
    const long lo = static_cast<long>(bi) * block_size;
    const long hi = std::min(n_mc, lo + block_size);
    bs.count = hi - lo;
    std::vector<double> w(4);
    std::vector<double> q(static_cast<std::size_t>(k));
    for (long it = lo; it < hi; ++it) {
      for (int j = 0; j < 4; ++j) w[static_cast<std::size_t>(j)] = rng.normal();
      const Simplex pi = dgp_propensity(w);
      for (int a = 0; a < k; ++a) q[static_cast<std::size_t>(a)] = dgp_outcome_mean(w, a);
      for (int gi = 0; gi < g; ++gi) {
        const Simplex pi_star = tilted_source_from_terms(pi, terms[static_cast<std::size_t>(gi)]);
        const Simplex nu_star = tilted_target_from_terms(pi, terms[static_cast<std::size_t>(gi)]);
        double vs = 0.0, vt = 0.0;
        for (int a = 0; a < k; ++a) {
          vs += pi_star[a] * q[static_cast<std::size_t>(a)];
          vt += nu_star[a] * q[static_cast<std::size_t>(a)];
        }
        bs.s[static_cast<std::size_t>(gi)] += vs;
        bs.t[static_cast<std::size_t>(gi)] += vt;
        bs.s2[static_cast<std::size_t>(gi)] += vs * vs;
        bs.t2[static_cast<std::size_t>(gi)] += vt * vt;
      }
    }
  });

  TruthCurve curve;
  curve.delta = delta_grid;
  curve.mu_S.assign(static_cast<std::size_t>(g), 0.0);
  curve.mu_T.assign(static_cast<std::size_t>(g), 0.0);
  curve.se_S.assign(static_cast<std::size_t>(g), 0.0);
  curve.se_T.assign(static_cast<std::size_t>(g), 0.0);
  for (int gi = 0; gi < g; ++gi) {
    double s = 0.0, t = 0.0, s2 = 0.0, t2 = 0.0;
    for (const BlockSums& bs : partial) {
      s += bs.s[static_cast<std::size_t>(gi)];
      t += bs.t[static_cast<std::size_t>(gi)];
      s2 += bs.s2[static_cast<std::size_t>(gi)];
      t2 += bs.t2[static_cast<std::size_t>(gi)];
    }
    const double nd = static_cast<double>(n_mc);
    curve.mu_S[static_cast<std::size_t>(gi)] = s / nd;
    curve.mu_T[static_cast<std::size_t>(gi)] = t / nd;
    const double var_s = std::max(0.0, s2 / nd - (s / nd) * (s / nd));
    const double var_t = std::max(0.0, t2 / nd - (t / nd) * (t / nd));
    curve.se_S[static_cast<std::size_t>(gi)] = std::sqrt(var_s / nd);
    curve.se_T[static_cast<std::size_t>(gi)] = std::sqrt(var_t / nd);
  }
  return curve;
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::correct: return "correct";
    case Regime::q_misspec: return "Q";
    case Regime::pi_misspec: return "pi";
  }
  return "?";
}

TiltConfig benchmark_setup(int id, const std::vector<double>& grid) {
  TiltConfig cfg;
  cfg.actions = ActionSpace::indexed(3);
  cfg.delta_grid = grid;
  switch (id) {
    case 1:
      cfg.cost = CostSpec::destination({2.0, 1.0, 1.0});
      cfg.nu = Simplex({0.4, 0.4, 0.2});
      break;
    case 2:
      cfg.cost = CostSpec::destination({1.0, 0.5, 2.0});
      cfg.nu = Simplex({0.5, 0.3, 0.2});
      break;
    case 3:
      cfg.cost = CostSpec::destination({1.0, 1.0, 2.0});
      cfg.nu = Simplex({0.0, 0.2, 0.8});
      break;
    default:
      throw ConfigError("benchmark setup id must be 1, 2, or 3");
  }
  return cfg;
}

namespace {

struct RepCurves {
  // per grid point: estimates for (plug-in, one-step) x (S, T)
  std::vector<double> plug_s, plug_t, os_s, os_t;
};

RepCurves run_rep(const TiltConfig& config, Regime regime, int n, std::uint64_t rep_seed,
                  int k_folds, double prop_floor) {
  const DgpSample sample = generate(n, rep_seed);
  const FoldAssignment folds = assign_folds(n, k_folds, derive_seed(rep_seed, 0x666f6c6473ULL));

  PropensityFitOptions p_opts;
  p_opts.floor_eps = prop_floor;
  p_opts.features = regime == Regime::pi_misspec ? Features::nonlinear3 : Features::raw;
  OutcomeFitOptions o_opts;
  o_opts.features = regime == Regime::q_misspec ? Features::nonlinear3 : Features::raw;

  const std::vector<NuisancePair> nuis = fit_cross_fit(sample.data, folds, p_opts, o_opts);
  const EstimateCurve curve = one_step_curve(sample.data, folds, nuis, config);

  RepCurves rc;
  for (const EstimatePoint& pt : curve.points) {
    rc.plug_s.push_back(pt.mu_S_plugin);
    rc.plug_t.push_back(pt.mu_T_plugin);
    rc.os_s.push_back(pt.mu_S_onestep);
    rc.os_t.push_back(pt.mu_T_onestep);
  }
  return rc;
}

struct CellAccum {
  // error matrices: reps x grid
  std::vector<std::vector<double>> err;
  void resize(int reps) { err.assign(static_cast<std::size_t>(reps), {}); }
};

void integrate_metrics(const std::vector<std::vector<double>>& err, int g, double* ibias,
                       double* irmse) {
  const int reps = static_cast<int>(err.size());
  double bias_acc = 0.0, rmse_acc = 0.0;
  for (int gi = 0; gi < g; ++gi) {
    double mean = 0.0, sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      mean += err[static_cast<std::size_t>(r)][static_cast<std::size_t>(gi)];
      sq += err[static_cast<std::size_t>(r)][static_cast<std::size_t>(gi)] *
            err[static_cast<std::size_t>(r)][static_cast<std::size_t>(gi)];
    }
    mean /= reps;
    bias_acc += std::abs(mean);
    rmse_acc += std::sqrt(sq / reps);
  }
  *ibias = bias_acc / g;
  *irmse = rmse_acc / g;
}

}  // namespace

BenchmarkReport run_benchmark(const std::vector<TiltConfig>& setups, int n, int reps,
                              const std::vector<double>& grid,
                              const std::vector<Regime>& regimes, std::uint64_t seed,
                              const BenchmarkOptions& opts) {
  if (setups.empty()) throw ConfigError("benchmark: need at least one setup");
  if (reps < 1) throw ConfigError("benchmark: reps must be positive");

  BenchmarkReport report;
  report.n = n;
  report.reps = reps;
  report.grid = grid;
  report.seed = seed;
  const int g = static_cast<int>(grid.size());

  for (std::size_t si = 0; si < setups.size(); ++si) {
    TiltConfig config = setups[si];
    config.delta_grid = grid;
    config.validate();
    const int setup_id = static_cast<int>(si) + 1;

    const TruthCurve truth =
        truth_oracle(config, grid, opts.n_mc_truth, derive_seed(seed, 0x747275746800ULL + si),
                     opts.threads);

    for (Regime regime : regimes) {
      // (estimator, policy) error matrices; same generated data across cells.
      CellAccum plug_s, plug_t, os_s, os_t;
      plug_s.resize(reps);
      plug_t.resize(reps);
      os_s.resize(reps);
      os_t.resize(reps);

      parallel_for(reps, opts.threads, [&](int rep) {
        const std::uint64_t rep_seed = derive_seed(seed, 0x726570ULL * 1000003ULL +
                                                             static_cast<std::uint64_t>(rep));
        const RepCurves rc =
            run_rep(config, regime, n, rep_seed, opts.k_folds, opts.prop_floor);
        std::vector<double>&es = os_s.err[static_cast<std::size_t>(rep)];
        std::vector<double>&et = os_t.err[static_cast<std::size_t>(rep)];
        std::vector<double>&eps = plug_s.err[static_cast<std::size_t>(rep)];
        std::vector<double>&ept = plug_t.err[static_cast<std::size_t>(rep)];
        es.resize(static_cast<std::size_t>(g));
        et.resize(static_cast<std::size_t>(g));
        eps.resize(static_cast<std::size_t>(g));
        ept.resize(static_cast<std::size_t>(g));
        for (int gi = 0; gi < g; ++gi) {
          es[static_cast<std::size_t>(gi)] =
              rc.os_s[static_cast<std::size_t>(gi)] - truth.mu_S[static_cast<std::size_t>(gi)];
          et[static_cast<std::size_t>(gi)] =
              rc.os_t[static_cast<std::size_t>(gi)] - truth.mu_T[static_cast<std::size_t>(gi)];
          eps[static_cast<std::size_t>(gi)] =
              rc.plug_s[static_cast<std::size_t>(gi)] - truth.mu_S[static_cast<std::size_t>(gi)];
          ept[static_cast<std::size_t>(gi)] =
              rc.plug_t[static_cast<std::size_t>(gi)] - truth.mu_T[static_cast<std::size_t>(gi)];
        }
      });

      const struct {
        const CellAccum* acc;
        const char* estimator;
        const char* policy;
      } cells[] = {{&plug_s, "plug-in", "S"},
                   {&plug_t, "plug-in", "T"},
                   {&os_s, "one-step", "S"},
                   {&os_t, "one-step", "T"}};
      for (const auto& cell : cells) {
        BenchmarkCell out;
        out.setup = setup_id;
        out.estimator = cell.estimator;
        out.regime = regime_name(regime);
        out.policy = cell.policy;
        integrate_metrics(cell.acc->err, g, &out.ibias, &out.irmse);
        report.cells.push_back(std::move(out));
      }
    }
  }
  return report;
}

}  // namespace cpip
