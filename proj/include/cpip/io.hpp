#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpip/config.hpp"
#include "cpip/estimation.hpp"
#include "cpip/inference.hpp"
#include "cpip/simulation.hpp"

namespace cpip {

// Fixed "%.15g" rendering so identical runs produce identical bytes.
std::string fmt_double(double v);

struct OutputMeta {
  std::string version;
  std::uint64_t seed = 0;
  std::string config_hash;
};

void write_meta_header(std::ostream& out, const OutputMeta& meta);

// One row per (delta, action): pi_star, nu_star, nu_pushforward.
void write_tilt_csv(std::ostream& out, const OutputMeta& meta, const TiltConfig& config,
                    const std::vector<Simplex>& pi_star, const std::vector<Simplex>& nu_star,
                    const std::vector<Simplex>& nu_push);

// Coupling matrix with row/column marginal footer.
void write_coupling_csv(std::ostream& out, const OutputMeta& meta, const ActionSpace& actions,
                        const Coupling& coupling);

// One row per delta: estimates, sigmas, pointwise and uniform bands.
void write_curve_csv(std::ostream& out, const OutputMeta& meta, const EstimateCurve& curve,
                     const BandResult& bands_S, const BandResult& bands_T);

nlohmann::json estimate_meta_json(const OutputMeta& meta, int n, int k_folds,
                                  const BandResult& bands_S, const BandResult& bands_T,
                                  const PositivityReport& positivity);

void write_benchmark_csv(std::ostream& out, const OutputMeta& meta,
                         const BenchmarkReport& report);
nlohmann::json benchmark_meta_json(const OutputMeta& meta, const BenchmarkReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace cpip
