#include "cpip/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpip/errors.hpp"

namespace cpip {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

void check_pair(const Simplex& pi_w, const Simplex& nu, int k_cost, double delta) {
  pi_w.validate("pi_w");
  nu.validate("nu");
  if (pi_w.size() != nu.size() || pi_w.size() != k_cost)
    throw ConfigError("tilt: pi_w, nu, and cost sizes must agree");
  if (!std::isfinite(delta)) throw ConfigError("delta: must be finite");
}

}  // namespace

DestTiltTerms dest_tilt_terms(const Simplex& nu, const std::vector<double>& dest_costs,
                              double delta) {
  const int k = nu.size();
  DestTiltTerms t;
  t.delta = delta;
  t.nu_em.assign(static_cast<std::size_t>(k), 0.0);
  t.nu_u.assign(static_cast<std::size_t>(k), 0.0);
  t.xi_s.assign(static_cast<std::size_t>(k), 0.0);
  t.rho.assign(static_cast<std::size_t>(k), 0.0);

  // Shift every exponent by -M so the largest nu-supported weight is exactly 1.
  double m = 0.0;
  for (int a = 0; a < k; ++a)
    if (nu[a] > 0.0) m = std::max(m, -delta * dest_costs[static_cast<std::size_t>(a)]);
  t.e_neg_m = std::exp(-m);

  t.zeta_s = 0.0;
  for (int a = 0; a < k; ++a) {
    const std::size_t ai = static_cast<std::size_t>(a);
    t.nu_em[ai] = nu[a] * t.e_neg_m;
    if (nu[a] > 0.0) t.nu_u[ai] = nu[a] * std::exp(-delta * dest_costs[ai] - m);
    t.xi_s[ai] = t.nu_em[ai] - t.nu_u[ai];
    t.zeta_s += t.nu_u[ai];
  }
  if (!(t.zeta_s > 0.0) || !std::isfinite(t.zeta_s))
    throw NumericError("degenerate kernel: tilt weights underflowed");
  for (int a = 0; a < k; ++a) {
    const double xi = t.xi_s[static_cast<std::size_t>(a)];
    t.rho[static_cast<std::size_t>(a)] = xi / (t.zeta_s + xi);
  }
  return t;
}

Simplex tilted_source_from_terms(const Simplex& pi_w, const DestTiltTerms& t) {
  const int k = pi_w.size();
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (int a = 0; a < k; ++a)
    out[static_cast<std::size_t>(a)] = (t.zeta_s + t.xi_s[static_cast<std::size_t>(a)]) * pi_w[a];
  Simplex s(std::move(out));
  s.renormalize();
  return s;
}

Simplex tilted_target_from_terms(const Simplex& pi_w, const DestTiltTerms& t) {
  const int k = pi_w.size();
  // nu(a) - xi(a)(1 - pi(a)), written as pi(a) nu_em(a) + (1-pi(a)) nu_u(a),
  // which is nonnegative for every real delta.
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (int a = 0; a < k; ++a) {
    const std::size_t ai = static_cast<std::size_t>(a);
    out[ai] = pi_w[a] * t.nu_em[ai] + (1.0 - pi_w[a]) * t.nu_u[ai];
  }
  Simplex s(std::move(out));
  s.renormalize();
  return s;
}

Coupling cpip_coupling(const Simplex& pi_w, const Simplex& nu, const CostSpec& cost,
                       double delta) {
  check_pair(pi_w, nu, cost.actions(), delta);
  const int k = pi_w.size();

  std::vector<double> log_kernel(static_cast<std::size_t>(k * k), kNegInf);
  double max_log = kNegInf;
  for (int i = 0; i < k; ++i) {
    if (pi_w[i] <= 0.0) continue;
    const double lp = safe_log(pi_w[i]);
    for (int j = 0; j < k; ++j) {
      if (nu[j] <= 0.0) continue;
      const double v = lp + safe_log(nu[j]) - delta * cost.at(i, j);
      log_kernel[static_cast<std::size_t>(i * k + j)] = v;
      max_log = std::max(max_log, v);
    }
  }
  if (max_log == kNegInf || !std::isfinite(max_log))
    throw NumericError("degenerate kernel: all Boltzmann-Gibbs weights vanished");

  Coupling c;
  c.k = k;
  c.joint.assign(static_cast<std::size_t>(k * k), 0.0);
  double z = 0.0;
  for (int idx = 0; idx < k * k; ++idx) {
    const double lv = log_kernel[static_cast<std::size_t>(idx)];
    if (lv == kNegInf) continue;
    const double v = std::exp(lv - max_log);
    c.joint[static_cast<std::size_t>(idx)] = v;
    z += v;
  }
  if (!(z > 0.0) || !std::isfinite(z))
    throw NumericError("degenerate kernel: normalizer underflowed to zero");
  for (double& v : c.joint) v /= z;
  return c;
}

namespace {

Simplex marginal_from_kernel(const Simplex& pi_w, const Simplex& nu, const CostSpec& cost,
                             double delta, bool source) {
  const Coupling c = cpip_coupling(pi_w, nu, cost, delta);
  Simplex s(source ? c.row_sums() : c.col_sums());
  s.renormalize();
  return s;
}

}  // namespace

Simplex tilted_source(const Simplex& pi_w, const TiltConfig& config, double delta) {
  check_pair(pi_w, config.nu, config.cost.actions(), delta);
  if (config.cost.is_destination())
    return tilted_source_from_terms(pi_w, dest_tilt_terms(config.nu, config.cost.dest, delta));
  return marginal_from_kernel(pi_w, config.nu, config.cost, delta, /*source=*/true);
}

Simplex tilted_target(const Simplex& pi_w, const TiltConfig& config, double delta) {
  check_pair(pi_w, config.nu, config.cost.actions(), delta);
  if (config.cost.is_destination())
    return tilted_target_from_terms(pi_w, dest_tilt_terms(config.nu, config.cost.dest, delta));
  return marginal_from_kernel(pi_w, config.nu, config.cost, delta, /*source=*/false);
}

TiltWeights tilt_weights(const TiltConfig& config, double delta) {
  if (!config.cost.is_destination())
    throw ConfigError("tilt weights undefined for general cost matrices");
  config.nu.validate("nu");
  if (!std::isfinite(delta)) throw ConfigError("delta: must be finite");
  const int k = config.nu.size();

  TiltWeights w;
  w.xi.assign(static_cast<std::size_t>(k), 0.0);
  w.rho.assign(static_cast<std::size_t>(k), 0.0);
  w.zeta = 0.0;
  for (int a = 0; a < k; ++a) {
    const double e = std::exp(-delta * config.cost.dest[static_cast<std::size_t>(a)]);
    w.xi[static_cast<std::size_t>(a)] = config.nu[a] * (1.0 - e);
    w.zeta += config.nu[a] * e;
  }
  // rho from the rescaled terms: identical value, stable for large |delta c|.
  const DestTiltTerms t = dest_tilt_terms(config.nu, config.cost.dest, delta);
  w.rho = t.rho;
  return w;
}

std::pair<Simplex, Simplex> tilted_limits(const Simplex& pi_w, const TiltConfig& config) {
  if (!config.cost.is_destination())
    throw ConfigError("tilted limits require destination costs");
  check_pair(pi_w, config.nu, config.cost.actions(), 0.0);
  const int k = pi_w.size();
  const std::vector<double>& c = config.cost.dest;

  double zero_cost_mass = 0.0;
  for (int a = 0; a < k; ++a)
    if (c[static_cast<std::size_t>(a)] == 0.0) zero_cost_mass += config.nu[a];

  // Limiting source weights: nu(a) 1{c(a)>0} + sum_{c=0} nu.
  std::vector<double> source_w(static_cast<std::size_t>(k), 0.0);
  double source_norm = 0.0;
  for (int a = 0; a < k; ++a) {
    const double nu_dagger =
        (c[static_cast<std::size_t>(a)] > 0.0 ? config.nu[a] : 0.0) + zero_cost_mass;
    source_w[static_cast<std::size_t>(a)] = pi_w[a] * nu_dagger;
    source_norm += source_w[static_cast<std::size_t>(a)];
  }
  if (!(source_norm > 0.0)) {
    // All limit weights of first order vanish (cost-separated supports); the
    // tilted source then stays at pi for every delta.
    source_w = pi_w.probs;
  }

  // Limiting target weights: nu(a) [pi(a) + (1-pi(a)) 1{c(a)=0}].
  std::vector<double> target_w(static_cast<std::size_t>(k), 0.0);
  double target_norm = 0.0;
  for (int a = 0; a < k; ++a) {
    const double pi_dagger =
        pi_w[a] + (c[static_cast<std::size_t>(a)] == 0.0 ? 1.0 - pi_w[a] : 0.0);
    target_w[static_cast<std::size_t>(a)] = config.nu[a] * pi_dagger;
    target_norm += target_w[static_cast<std::size_t>(a)];
  }
  if (!(target_norm > 0.0))
    throw NumericError("degenerate kernel: target limit has no support overlap");

  Simplex s(std::move(source_w));
  Simplex t(std::move(target_w));
  s.renormalize();
  t.renormalize();
  return {std::move(s), std::move(t)};
}

double ipi_propensity(double pi1_w, double delta) {
  if (!(pi1_w > 0.0) || !(pi1_w < 1.0))
    throw ConfigError("ipi_propensity: pi must lie strictly inside (0, 1)");
  if (!std::isfinite(delta)) throw ConfigError("delta: must be finite");
  // pi / (pi + (1-pi) e^{-delta}): overflow of e^{-delta} drives the result
  // to the correct 0 limit.
  const double r = (1.0 - pi1_w) * std::exp(-delta);
  return pi1_w / (pi1_w + r);
}

Simplex pushforward(const Simplex& pi_w, const TiltConfig& config, double delta) {
  check_pair(pi_w, config.nu, config.cost.actions(), delta);
  const int k = pi_w.size();
  const Coupling c = cpip_coupling(pi_w, config.nu, config.cost, delta);
  const std::vector<double> rows = c.row_sums();

  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  bool any = false;
  for (int i = 0; i < k; ++i) {
    if (pi_w[i] <= 0.0) continue;  // zero-probability origins contribute nothing
    const double r = rows[static_cast<std::size_t>(i)];
    if (!(r > 0.0)) continue;
    any = true;
    for (int j = 0; j < k; ++j) out[static_cast<std::size_t>(j)] += pi_w[i] * c.at(i, j) / r;
  }
  if (!any) throw NumericError("degenerate kernel: pushforward lost all mass");
  Simplex s(std::move(out));
  s.renormalize();
  return s;
}

}  // namespace cpip
