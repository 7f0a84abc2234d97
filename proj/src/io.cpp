#include "cpip/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "cpip/errors.hpp"
#include "cpip/version.hpp"

namespace cpip {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return std::string(buf);
}

void write_meta_header(std::ostream& out, const OutputMeta& meta) {
  out << "# cpip_version=" << meta.version << "\n";
  out << "# seed=" << meta.seed << "\n";
  out << "# config_hash=" << meta.config_hash << "\n";
}

void write_tilt_csv(std::ostream& out, const OutputMeta& meta, const TiltConfig& config,
                    const std::vector<Simplex>& pi_star, const std::vector<Simplex>& nu_star,
                    const std::vector<Simplex>& nu_push) {
  write_meta_header(out, meta);
  out << "delta,action,pi_star,nu_star,nu_pushforward\n";
  for (std::size_t gi = 0; gi < config.delta_grid.size(); ++gi) {
    for (int a = 0; a < config.k(); ++a) {
      out << fmt_double(config.delta_grid[gi]) << ","
          << config.actions.labels[static_cast<std::size_t>(a)] << ","
          << fmt_double(pi_star[gi][a]) << "," << fmt_double(nu_star[gi][a]) << ","
          << fmt_double(nu_push[gi][a]) << "\n";
    }
  }
}

void write_coupling_csv(std::ostream& out, const OutputMeta& meta, const ActionSpace& actions,
                        const Coupling& coupling) {
  write_meta_header(out, meta);
  out << "action";
  for (const std::string& l : actions.labels) out << "," << l;
  out << ",row_marginal\n";
  const std::vector<double> rows = coupling.row_sums();
  const std::vector<double> cols = coupling.col_sums();
  for (int i = 0; i < coupling.k; ++i) {
    out << actions.labels[static_cast<std::size_t>(i)];
    for (int j = 0; j < coupling.k; ++j) out << "," << fmt_double(coupling.at(i, j));
    out << "," << fmt_double(rows[static_cast<std::size_t>(i)]) << "\n";
  }
  out << "col_marginal";
  double total = 0.0;
  for (int j = 0; j < coupling.k; ++j) {
    out << "," << fmt_double(cols[static_cast<std::size_t>(j)]);
    total += cols[static_cast<std::size_t>(j)];
  }
  out << "," << fmt_double(total) << "\n";
}

void write_curve_csv(std::ostream& out, const OutputMeta& meta, const EstimateCurve& curve,
                     const BandResult& bands_S, const BandResult& bands_T) {
  write_meta_header(out, meta);
  out << "delta,"
      << "mu_S_plugin,mu_S_onestep,sigma_S,S_lo_pointwise,S_hi_pointwise,S_lo_uniform,"
         "S_hi_uniform,"
      << "mu_T_plugin,mu_T_onestep,sigma_T,T_lo_pointwise,T_hi_pointwise,T_lo_uniform,"
         "T_hi_uniform\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const EstimatePoint& pt = curve.points[i];
    out << fmt_double(pt.delta) << "," << fmt_double(pt.mu_S_plugin) << ","
        << fmt_double(pt.mu_S_onestep) << "," << fmt_double(pt.sigma_S) << ","
        << fmt_double(bands_S.lo_pointwise[i]) << "," << fmt_double(bands_S.hi_pointwise[i])
        << "," << fmt_double(bands_S.lo_uniform[i]) << "," << fmt_double(bands_S.hi_uniform[i])
        << "," << fmt_double(pt.mu_T_plugin) << "," << fmt_double(pt.mu_T_onestep) << ","
        << fmt_double(pt.sigma_T) << "," << fmt_double(bands_T.lo_pointwise[i]) << ","
        << fmt_double(bands_T.hi_pointwise[i]) << "," << fmt_double(bands_T.lo_uniform[i])
        << "," << fmt_double(bands_T.hi_uniform[i]) << "\n";
  }
}

nlohmann::json estimate_meta_json(const OutputMeta& meta, int n, int k_folds,
                                  const BandResult& bands_S, const BandResult& bands_T,
                                  const PositivityReport& positivity) {
  nlohmann::json j;
  j["version"] = meta.version;
  j["seed"] = meta.seed;
  j["config_hash"] = meta.config_hash;
  j["n"] = n;
  j["k_folds"] = k_folds;
  j["bootstrap"] = bands_S.bootstrap_draws;
  j["alpha"] = bands_S.alpha;
  j["xi_S"] = bands_S.critical_value;
  j["xi_T"] = bands_T.critical_value;
  j["z_pointwise"] = bands_S.z_pointwise;
  j["positivity"] = {{"threshold", positivity.threshold},
                     {"delta", positivity.delta},
                     {"max_ratio", positivity.max_ratio},
                     {"flagged", std::vector<int>(positivity.flagged.begin(),
                                                  positivity.flagged.end())}};
  return j;
}

void write_benchmark_csv(std::ostream& out, const OutputMeta& meta,
                         const BenchmarkReport& report) {
  write_meta_header(out, meta);
  out << "setup,estimator,misspec,policy,iBias,iRMSE\n";
  for (const BenchmarkCell& c : report.cells)
    out << c.setup << "," << c.estimator << "," << c.regime << "," << c.policy << ","
        << fmt_double(c.ibias) << "," << fmt_double(c.irmse) << "\n";
}

nlohmann::json benchmark_meta_json(const OutputMeta& meta, const BenchmarkReport& report) {
  nlohmann::json j;
  j["version"] = meta.version;
  j["seed"] = report.seed;
  j["config_hash"] = meta.config_hash;
  j["n"] = report.n;
  j["reps"] = report.reps;
  j["grid"] = {{"min", report.grid.front()},
               {"max", report.grid.back()},
               {"points", report.grid.size()}};
  return j;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open output file: " + path);
  out << content;
}

}  // namespace cpip
