#include "cpip/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "cpip/errors.hpp"
#include "cpip/parallel.hpp"

namespace cpip {

namespace {

void check_dest_cost(const TiltConfig& config, const char* what) {
  if (!config.cost.is_destination())
    throw ConfigError(std::string(what) + " requires destination costs");
}

struct RowCache {
  Simplex pi_hat;
  std::vector<double> q_hat;
};

std::vector<RowCache> cache_cross_fit(const Dataset& data,
                                      const std::vector<NuisancePair>& nuisances,
                                      const FoldAssignment& folds) {
  if (static_cast<int>(folds.fold_of.size()) != data.n())
    throw DataError("fold assignment does not match dataset size");
  if (static_cast<int>(nuisances.size()) != folds.k_folds)
    throw DataError("nuisance pairs do not match fold count");
  std::vector<RowCache> cache(static_cast<std::size_t>(data.n()));
  for (int i = 0; i < data.n(); ++i) {
    const Observation& o = data.rows[static_cast<std::size_t>(i)];
    const NuisancePair& np =
        nuisances[static_cast<std::size_t>(folds.fold_of[static_cast<std::size_t>(i)])];
    cache[static_cast<std::size_t>(i)].pi_hat = np.propensity.predict(o.w);
    cache[static_cast<std::size_t>(i)].q_hat = np.outcome.predict_all(o.w);
  }
  return cache;
}

struct RowEval {
  EifRow row;
  double m_source = 0.0;  // sum_a pi*(a) q(a), the source plug-in integrand
  double m_target = 0.0;  // sum_a nu*(a) q(a), the target plug-in integrand
};

RowEval eval_row(double y, int a, const Simplex& pi_hat, const std::vector<double>& q_hat,
                 const DestTiltTerms& terms) {
  const int k = pi_hat.size();
  const Simplex pi_star = tilted_source_from_terms(pi_hat, terms);
  const Simplex nu_star = tilted_target_from_terms(pi_hat, terms);

  RowEval ev;
  double m_rho = 0.0;  // sum_a pi*(a) rho(a) q(a)
  for (int b = 0; b < k; ++b) {
    const double q = q_hat[static_cast<std::size_t>(b)];
    ev.m_source += pi_star[b] * q;
    ev.m_target += nu_star[b] * q;
    m_rho += pi_star[b] * terms.rho[static_cast<std::size_t>(b)] * q;
  }

  const double ratio_s = pi_star[a] / pi_hat[a];
  const double ratio_t = nu_star[a] / pi_hat[a];
  const double q_a = q_hat[static_cast<std::size_t>(a)];

  EifRow& row = ev.row;
  row.s1 = ratio_s * (y - ev.m_source);
  row.s2 = ev.m_source;
  row.t1 = ratio_t * (y - q_a);
  row.t2 = (2.0 - ratio_s) * ev.m_target;
  row.t3 = ratio_s * terms.rho[static_cast<std::size_t>(a)] * q_a - m_rho;
  row.d_source = row.s1 + row.s2;
  row.d_target = row.t1 + row.t2 + row.t3;
  return ev;
}

}  // namespace

EifRow eif_row_from_terms(double y, int a, const Simplex& pi_hat,
                          const std::vector<double>& q_hat, const DestTiltTerms& terms) {
  return eval_row(y, a, pi_hat, q_hat, terms).row;
}

EifSourcePart eif_source(const Observation& obs, const Simplex& pi_hat,
                         const std::vector<double>& q_hat, const TiltConfig& config,
                         double delta) {
  const Simplex pi_star = tilted_source(pi_hat, config, delta);
  double m_source = 0.0;
  for (int b = 0; b < pi_hat.size(); ++b)
    m_source += pi_star[b] * q_hat[static_cast<std::size_t>(b)];
  EifSourcePart part;
  part.s1 = pi_star[obs.a] / pi_hat[obs.a] * (obs.y - m_source);
  part.s2 = m_source;
  return part;
}

EifTargetPart eif_target(const Observation& obs, const Simplex& pi_hat,
                         const std::vector<double>& q_hat, const TiltConfig& config,
                         double delta) {
  check_dest_cost(config, "target EIF");
  const DestTiltTerms terms = dest_tilt_terms(config.nu, config.cost.dest, delta);
  const EifRow row = eif_row_from_terms(obs.y, obs.a, pi_hat, q_hat, terms);
  EifTargetPart part;
  part.t1 = row.t1;
  part.t2 = row.t2;
  part.t3 = row.t3;
  return part;
}

EifRow eif_row(const Observation& obs, const Simplex& pi_hat, const std::vector<double>& q_hat,
               const TiltConfig& config, double delta) {
  check_dest_cost(config, "EIF row");
  const DestTiltTerms terms = dest_tilt_terms(config.nu, config.cost.dest, delta);
  return eif_row_from_terms(obs.y, obs.a, pi_hat, q_hat, terms);
}

std::pair<double, double> plugin_functionals(const Dataset& data,
                                             const std::vector<NuisancePair>& nuisances,
                                             const FoldAssignment& folds,
                                             const TiltConfig& config, double delta) {
  const std::vector<RowCache> cache = cache_cross_fit(data, nuisances, folds);
  double mu_s = 0.0, mu_t = 0.0;
  for (int i = 0; i < data.n(); ++i) {
    const RowCache& rc = cache[static_cast<std::size_t>(i)];
    const Simplex pi_star = tilted_source(rc.pi_hat, config, delta);
    const Simplex nu_star = tilted_target(rc.pi_hat, config, delta);
    for (int a = 0; a < config.k(); ++a) {
      mu_s += pi_star[a] * rc.q_hat[static_cast<std::size_t>(a)];
      mu_t += nu_star[a] * rc.q_hat[static_cast<std::size_t>(a)];
    }
  }
  return {mu_s / data.n(), mu_t / data.n()};
}

EstimateCurve one_step_curve(const Dataset& data, const FoldAssignment& folds,
                             const std::vector<NuisancePair>& nuisances,
                             const TiltConfig& config, int threads) {
  config.validate();
  check_dest_cost(config, "one_step_curve");
  data.validate();
  const int n = data.n();
  const int g = static_cast<int>(config.delta_grid.size());
  const std::vector<RowCache> cache = cache_cross_fit(data, nuisances, folds);

  EstimateCurve curve;
  curve.points.resize(static_cast<std::size_t>(g));
  curve.eif_S.resize(n, g);
  curve.eif_T.resize(n, g);

  parallel_for(g, threads, [&](int gi) {
    const double delta = config.delta_grid[static_cast<std::size_t>(gi)];
    const DestTiltTerms terms = dest_tilt_terms(config.nu, config.cost.dest, delta);

    double plug_s = 0.0, plug_t = 0.0;
    double sum_s = 0.0, sum_t = 0.0;
    for (int i = 0; i < n; ++i) {
      const RowCache& rc = cache[static_cast<std::size_t>(i)];
      const Observation& o = data.rows[static_cast<std::size_t>(i)];
      const RowEval ev = eval_row(o.y, o.a, rc.pi_hat, rc.q_hat, terms);
      curve.eif_S(i, gi) = ev.row.d_source;
      curve.eif_T(i, gi) = ev.row.d_target;
      sum_s += ev.row.d_source;
      sum_t += ev.row.d_target;
      plug_s += ev.m_source;
      plug_t += ev.m_target;
    }

    EstimatePoint pt;
    pt.delta = delta;
    pt.mu_S_plugin = plug_s / n;
    pt.mu_T_plugin = plug_t / n;
    pt.mu_S_onestep = sum_s / n;
    pt.mu_T_onestep = sum_t / n;

    double ss_s = 0.0, ss_t = 0.0;
    for (int i = 0; i < n; ++i) {
      const double ds = curve.eif_S(i, gi) - pt.mu_S_onestep;
      const double dt = curve.eif_T(i, gi) - pt.mu_T_onestep;
      ss_s += ds * ds;
      ss_t += dt * dt;
    }
    pt.sigma_S = n > 1 ? std::sqrt(ss_s / (n - 1)) : 0.0;
    pt.sigma_T = n > 1 ? std::sqrt(ss_t / (n - 1)) : 0.0;
    curve.points[static_cast<std::size_t>(gi)] = pt;
  });

  return curve;
}

bool PositivityReport::any_flagged() const {
  return std::any_of(flagged.begin(), flagged.end(), [](char f) { return f != 0; });
}

PositivityReport positivity_diagnostic(const Dataset& data,
                                       const std::vector<NuisancePair>& nuisances,
                                       const FoldAssignment& folds, const TiltConfig& config,
                                       const std::vector<double>& delta_grid,
                                       double threshold) {
  const std::vector<RowCache> cache = cache_cross_fit(data, nuisances, folds);
  PositivityReport report;
  report.threshold = threshold;
  report.delta = delta_grid;
  report.max_ratio.assign(delta_grid.size(), 0.0);
  report.flagged.assign(delta_grid.size(), 0);

  for (std::size_t gi = 0; gi < delta_grid.size(); ++gi) {
    double worst = 0.0;
    for (int i = 0; i < data.n(); ++i) {
      const RowCache& rc = cache[static_cast<std::size_t>(i)];
      const Simplex nu_star = tilted_target(rc.pi_hat, config, delta_grid[gi]);
      for (int a = 0; a < config.k(); ++a)
        if (nu_star[a] > 0.0) worst = std::max(worst, nu_star[a] / rc.pi_hat[a]);
    }
    report.max_ratio[gi] = worst;
    report.flagged[gi] = worst > threshold ? 1 : 0;
  }
  return report;
}

}  // namespace cpip
