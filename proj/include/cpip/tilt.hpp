#pragma once

#include <utility>
#include <vector>

#include "cpip/types.hpp"

namespace cpip {

// Per-delta quantities for destination-cost tilts, rescaled by e^{-M} with
// M = max(0, max_{nu(a)>0} -delta*c(a)) so every entry stays finite even for
// strongly negative delta. All downstream formulas are scale invariant.
struct DestTiltTerms {
  double delta = 0.0;
  double e_neg_m = 1.0;       // e^{-M}
  std::vector<double> nu_em;  // nu(a) e^{-M}
  std::vector<double> nu_u;   // nu(a) e^{-delta c(a) - M}
  std::vector<double> xi_s;   // nu_em(a) - nu_u(a), the rescaled xi
  double zeta_s = 1.0;        // sum_a nu_u(a), the rescaled zeta
  std::vector<double> rho;    // xi / (zeta + xi)
};

DestTiltTerms dest_tilt_terms(const Simplex& nu, const std::vector<double>& dest_costs,
                              double delta);

Simplex tilted_source_from_terms(const Simplex& pi_w, const DestTiltTerms& t);
Simplex tilted_target_from_terms(const Simplex& pi_w, const DestTiltTerms& t);

// Minimizer of KL(gamma | pi (x) nu) + delta E_gamma[c]: the Boltzmann-Gibbs
// kernel gamma(a',a'') proportional to pi(a') nu(a'') e^{-delta c(a',a'')}.
// Evaluated in the log domain; negative delta is allowed (finite actions and
// bounded costs keep the kernel normalizable).
Coupling cpip_coupling(const Simplex& pi_w, const Simplex& nu, const CostSpec& cost,
                       double delta);

// Marginals of the coupling. Destination-cost inputs use the O(K) closed
// form; matrix costs go through the kernel's row/column sums.
Simplex tilted_source(const Simplex& pi_w, const TiltConfig& config, double delta);
Simplex tilted_target(const Simplex& pi_w, const TiltConfig& config, double delta);

// (xi, zeta, rho) for destination costs; undefined for matrix costs.
TiltWeights tilt_weights(const TiltConfig& config, double delta);

// delta -> +inf limits of (tilted source, tilted target). With all costs
// positive both collapse to the product of experts pi(a|w) nu(a); zero-cost
// actions absorb mass per the limiting weights.
std::pair<Simplex, Simplex> tilted_limits(const Simplex& pi_w, const TiltConfig& config);

// Binary-action incremental tilt: e^delta pi / (e^delta pi + 1 - pi).
double ipi_propensity(double pi1_w, double delta);

// Distribution obtained by pushing the organic law through the coupling's
// conditional kernel: sum_{a'} gamma(a', a | w) / pi*(a' | w) * pi(a' | w).
Simplex pushforward(const Simplex& pi_w, const TiltConfig& config, double delta);

}  // namespace cpip
