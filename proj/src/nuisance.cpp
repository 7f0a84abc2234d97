#include "cpip/nuisance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cpip/errors.hpp"
#include "cpip/rng.hpp"

namespace cpip {

const char* features_name(Features f) {
  return f == Features::raw ? "raw" : "nonlinear3";
}

Features features_from_name(const std::string& name) {
  if (name == "raw") return Features::raw;
  if (name == "nonlinear3") return Features::nonlinear3;
  throw ConfigError("unknown feature transform: " + name);
}

std::vector<double> apply_features(Features f, const std::vector<double>& w) {
  if (f == Features::raw) return w;
  if (w.size() < 4) throw DataError("nonlinear3 transform needs at least 4 covariates");
  const double w1 = w[0], w2 = w[1], w3 = w[2], w4 = w[3];
  const double x1 = 10.0 + w2 / (1.0 + std::exp(w1));
  const double x2c = 0.6 + w1 * w3 / 25.0;
  const double x3b = w2 + w4 + 20.0;
  return {x1, x2c * x2c * x2c, x3b * x3b};
}

FoldAssignment assign_folds(int n, int k_folds, std::uint64_t seed) {
  if (k_folds < 2) throw ConfigError("k_folds must be at least 2");
  if (n < k_folds) throw DataError("fewer rows than folds");
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(derive_seed(seed, 0x666f6c64 /* "fold" */));
  rng.shuffle(order);

  FoldAssignment fa;
  fa.k_folds = k_folds;
  fa.fold_of.assign(static_cast<std::size_t>(n), 0);
  const int base = n / k_folds, rem = n % k_folds;
  int pos = 0;
  for (int f = 0; f < k_folds; ++f) {
    const int size = base + (f < rem ? 1 : 0);
    for (int j = 0; j < size; ++j) fa.fold_of[static_cast<std::size_t>(order[static_cast<std::size_t>(pos++)])] = f;
  }
  return fa;
}

namespace {

struct StandardizedDesign {
  Eigen::MatrixXd x;  // n x (m+1), first column ones, rest standardized
  Eigen::VectorXd mean, scale;
};

StandardizedDesign build_design(const std::vector<std::vector<double>>& feats) {
  const int n = static_cast<int>(feats.size());
  const int m = static_cast<int>(feats.front().size());
  StandardizedDesign d;
  d.mean = Eigen::VectorXd::Zero(m);
  d.scale = Eigen::VectorXd::Ones(m);
  for (const auto& f : feats)
    for (int j = 0; j < m; ++j) d.mean(j) += f[static_cast<std::size_t>(j)];
  d.mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(m);
  for (const auto& f : feats)
    for (int j = 0; j < m; ++j) {
      const double c = f[static_cast<std::size_t>(j)] - d.mean(j);
      var(j) += c * c;
    }
  var /= std::max(n - 1, 1);
  for (int j = 0; j < m; ++j) d.scale(j) = var(j) > 0.0 ? std::sqrt(var(j)) : 1.0;

  d.x.resize(n, m + 1);
  d.x.col(0).setOnes();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      d.x(i, j + 1) = (feats[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - d.mean(j)) / d.scale(j);
  return d;
}

// Class probabilities for one standardized row under coefficients B.
void softmax_probs(const Eigen::MatrixXd& beta, const Eigen::VectorXd& xrow,
                   Eigen::VectorXd& out) {
  const int km1 = static_cast<int>(beta.rows());
  out.resize(km1 + 1);
  double mx = 0.0;  // baseline logit is 0
  for (int c = 0; c < km1; ++c) {
    out(c) = beta.row(c).dot(xrow);
    mx = std::max(mx, out(c));
  }
  double z = std::exp(-mx);
  for (int c = 0; c < km1; ++c) {
    out(c) = std::exp(out(c) - mx);
    z += out(c);
  }
  out(km1) = std::exp(-mx);
  out /= z;
}

}  // namespace

PropensityModel fit_propensity(const Dataset& train, const PropensityFitOptions& opts) {
  train.validate();
  const int n = train.n();
  const int k = train.action_space.size();

  std::vector<int> arm_count(static_cast<std::size_t>(k), 0);
  for (const Observation& o : train.rows) ++arm_count[static_cast<std::size_t>(o.a)];
  for (int a = 0; a < k; ++a)
    if (arm_count[static_cast<std::size_t>(a)] == 0)
      throw DataError("empty arm: no observations for action '" +
                      train.action_space.labels[static_cast<std::size_t>(a)] + "'");

  std::vector<std::vector<double>> feats;
  feats.reserve(static_cast<std::size_t>(n));
  for (const Observation& o : train.rows) feats.push_back(apply_features(opts.features, o.w));
  const StandardizedDesign d = build_design(feats);
  const int m1 = static_cast<int>(d.x.cols());
  const int km1 = k - 1;
  const int dim = km1 * m1;

  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(km1, m1);
  Eigen::VectorXd probs;
  Eigen::VectorXd grad(dim);
  Eigen::MatrixXd hess(dim, dim);

  bool converged = false;
  int iter = 0;
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (; iter < opts.max_iter; ++iter) {
    grad.setZero();
    hess.setZero();
    double ll = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd xrow = d.x.row(i);
      softmax_probs(beta, xrow, probs);
      const int ai = train.rows[static_cast<std::size_t>(i)].a;
      ll += std::log(std::max(probs(ai), 1e-300));
      for (int c = 0; c < km1; ++c) {
        const double resid = (ai == c ? 1.0 : 0.0) - probs(c);
        grad.segment(c * m1, m1) += resid * xrow;
      }
      for (int c = 0; c < km1; ++c)
        for (int c2 = c; c2 < km1; ++c2) {
          const double wgt = probs(c) * ((c == c2 ? 1.0 : 0.0) - probs(c2));
          hess.block(c * m1, c2 * m1, m1, m1) -= wgt * (xrow * xrow.transpose());
        }
    }
    for (int c = 0; c < km1; ++c)
      for (int c2 = 0; c2 < c; ++c2)
        hess.block(c * m1, c2 * m1, m1, m1) = hess.block(c2 * m1, c * m1, m1, m1).transpose();

    // ridge on the standardized scale
    if (opts.ridge > 0.0) {
      for (int c = 0; c < km1; ++c)
        for (int j = 0; j < m1; ++j) {
          grad(c * m1 + j) -= opts.ridge * beta(c, j);
          hess(c * m1 + j, c * m1 + j) -= opts.ridge;
        }
      ll -= 0.5 * opts.ridge * beta.squaredNorm();
    }

    if (grad.norm() <= opts.grad_tol) {
      converged = true;
      break;
    }

    Eigen::LDLT<Eigen::MatrixXd> ldlt(-hess);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) break;

    // step halving when the penalized log-likelihood fails to improve
    double scale = 1.0;
    Eigen::MatrixXd candidate;
    bool improved = false;
    for (int h = 0; h < 30; ++h) {
      candidate = beta;
      for (int c = 0; c < km1; ++c) candidate.row(c) += scale * step.segment(c * m1, m1).transpose();
      double cand_ll = 0.0;
      for (int i = 0; i < n; ++i) {
        softmax_probs(candidate, d.x.row(i), probs);
        cand_ll += std::log(std::max(probs(train.rows[static_cast<std::size_t>(i)].a), 1e-300));
      }
      if (opts.ridge > 0.0) cand_ll -= 0.5 * opts.ridge * candidate.squaredNorm();
      if (cand_ll >= ll - 1e-12) {
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
    beta = candidate;
    if (beta.cwiseAbs().maxCoeff() > 250.0) break;  // separation: odds beyond e^250
    prev_ll = ll;
  }
  (void)prev_ll;

  // destandardize: beta_j / s_j, intercept absorbs the means
  PropensityModel model;
  model.features = opts.features;
  model.floor_eps = opts.floor_eps;
  model.converged = converged;
  model.iterations = iter;
  model.coef = Eigen::MatrixXd::Zero(km1, m1);
  for (int c = 0; c < km1; ++c) {
    double b0 = beta(c, 0);
    for (int j = 1; j < m1; ++j) {
      const double bj = beta(c, j) / d.scale(j - 1);
      model.coef(c, j) = bj;
      b0 -= bj * d.mean(j - 1);
    }
    model.coef(c, 0) = b0;
  }
  return model;
}

Simplex PropensityModel::predict_raw(const std::vector<double>& w) const {
  const std::vector<double> f = apply_features(features, w);
  if (static_cast<int>(f.size()) + 1 != coef.cols())
    throw DataError("propensity prediction: feature dimension mismatch");
  Eigen::VectorXd xrow(coef.cols());
  xrow(0) = 1.0;
  for (std::size_t j = 0; j < f.size(); ++j) xrow(static_cast<int>(j) + 1) = f[j];
  Eigen::VectorXd probs;
  softmax_probs(coef, xrow, probs);
  std::vector<double> p(probs.data(), probs.data() + probs.size());
  return Simplex(std::move(p));
}

Simplex PropensityModel::predict(const std::vector<double>& w) const {
  Simplex s = predict_raw(w);
  if (floor_eps > 0.0) {
    for (double& v : s.probs) v = std::max(v, floor_eps);
    s.renormalize();
  }
  return s;
}

Simplex predict_propensity(const PropensityModel& m, const std::vector<double>& w) {
  return m.predict(w);
}

namespace {

std::vector<double> outcome_features(const OutcomeModel& m, const std::vector<double>& w) {
  if (m.features == Features::nonlinear3) return apply_features(Features::nonlinear3, w);
  std::vector<double> f;
  f.reserve(m.adjust_idx.size());
  for (int idx : m.adjust_idx) f.push_back(w[static_cast<std::size_t>(idx)]);
  return f;
}

}  // namespace

OutcomeModel fit_outcome(const Dataset& train, const OutcomeFitOptions& opts) {
  train.validate();
  const int k = train.action_space.size();

  OutcomeModel model;
  model.features = opts.features;
  model.adjust_idx = train.adjust_idx.empty() ? all_indices(train.p()) : train.adjust_idx;
  model.arm_coef.resize(static_cast<std::size_t>(k));

  for (int a = 0; a < k; ++a) {
    std::vector<int> rows;
    for (int i = 0; i < train.n(); ++i)
      if (train.rows[static_cast<std::size_t>(i)].a == a) rows.push_back(i);

    std::vector<double> probe = outcome_features(model, train.rows.front().w);
    const int m = static_cast<int>(probe.size());
    if (static_cast<int>(rows.size()) < m + 2)
      throw DataError("empty arm: need at least " + std::to_string(m + 2) +
                      " observations for action '" +
                      train.action_space.labels[static_cast<std::size_t>(a)] + "'");

    Eigen::MatrixXd x(rows.size(), m + 1);
    Eigen::VectorXd y(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const Observation& o = train.rows[static_cast<std::size_t>(rows[r])];
      const std::vector<double> f = outcome_features(model, o.w);
      x(static_cast<int>(r), 0) = 1.0;
      for (int j = 0; j < m; ++j) x(static_cast<int>(r), j + 1) = f[static_cast<std::size_t>(j)];
      y(static_cast<int>(r)) = o.y;
    }

    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::VectorXd xty = x.transpose() * y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    Eigen::VectorXd beta = ldlt.solve(xty);
    const double resid = (xtx * beta - xty).norm();
    if (ldlt.info() != Eigen::Success || !beta.allFinite() ||
        resid > 1e-8 * std::max(1.0, xty.norm())) {
      // rank-deficient design: minimum-norm least squares
      beta = x.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(y);
      model.pseudo_inverse = true;
    }
    model.arm_coef[static_cast<std::size_t>(a)] = beta;
  }
  return model;
}

double OutcomeModel::predict(const std::vector<double>& w, int a) const {
  if (a < 0 || a >= actions()) throw DataError("outcome prediction: action out of range");
  const std::vector<double> f = outcome_features(*this, w);
  const Eigen::VectorXd& beta = arm_coef[static_cast<std::size_t>(a)];
  if (static_cast<int>(f.size()) + 1 != beta.size())
    throw DataError("outcome prediction: feature dimension mismatch");
  double v = beta(0);
  for (std::size_t j = 0; j < f.size(); ++j) v += beta(static_cast<int>(j) + 1) * f[j];
  return v;
}

std::vector<double> OutcomeModel::predict_all(const std::vector<double>& w) const {
  std::vector<double> out(static_cast<std::size_t>(actions()), 0.0);
  for (int a = 0; a < actions(); ++a) out[static_cast<std::size_t>(a)] = predict(w, a);
  return out;
}

OutcomeModel OutcomeModel::scaled(double factor) const {
  OutcomeModel m = *this;
  for (Eigen::VectorXd& beta : m.arm_coef) beta *= factor;
  return m;
}

double predict_outcome(const OutcomeModel& m, const std::vector<double>& w, int a) {
  return m.predict(w, a);
}

std::vector<NuisancePair> fit_cross_fit(const Dataset& data, const FoldAssignment& folds,
                                        const PropensityFitOptions& p_opts,
                                        const OutcomeFitOptions& o_opts) {
  if (static_cast<int>(folds.fold_of.size()) != data.n())
    throw DataError("fold assignment does not match dataset size");
  std::vector<NuisancePair> pairs(static_cast<std::size_t>(folds.k_folds));
  for (int f = 0; f < folds.k_folds; ++f) {
    Dataset train;
    train.action_space = data.action_space;
    train.adjust_idx = data.adjust_idx;
    for (int i = 0; i < data.n(); ++i)
      if (folds.fold_of[static_cast<std::size_t>(i)] != f)
        train.rows.push_back(data.rows[static_cast<std::size_t>(i)]);
    pairs[static_cast<std::size_t>(f)].propensity = fit_propensity(train, p_opts);
    pairs[static_cast<std::size_t>(f)].outcome = fit_outcome(train, o_opts);
  }
  return pairs;
}

nlohmann::json propensity_to_json(const PropensityModel& m) {
  nlohmann::json j;
  j["type"] = "multinomial_logit";
  j["features"] = features_name(m.features);
  j["floor"] = m.floor_eps;
  j["converged"] = m.converged;
  j["iterations"] = m.iterations;
  std::vector<std::vector<double>> coef;
  for (int r = 0; r < m.coef.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.coef.cols()));
    for (int c = 0; c < m.coef.cols(); ++c) row[static_cast<std::size_t>(c)] = m.coef(r, c);
    coef.push_back(std::move(row));
  }
  j["coefficients"] = coef;
  return j;
}

PropensityModel propensity_from_json(const nlohmann::json& j) {
  PropensityModel m;
  m.features = features_from_name(j.at("features").get<std::string>());
  m.floor_eps = j.at("floor").get<double>();
  m.converged = j.value("converged", true);
  m.iterations = j.value("iterations", 0);
  const auto coef = j.at("coefficients").get<std::vector<std::vector<double>>>();
  if (coef.empty()) throw ConfigError("propensity model: empty coefficients");
  m.coef.resize(static_cast<int>(coef.size()), static_cast<int>(coef.front().size()));
  for (std::size_t r = 0; r < coef.size(); ++r)
    for (std::size_t c = 0; c < coef[r].size(); ++c)
      m.coef(static_cast<int>(r), static_cast<int>(c)) = coef[r][c];
  return m;
}

nlohmann::json outcome_to_json(const OutcomeModel& m) {
  nlohmann::json j;
  j["type"] = "arm_linear";
  j["features"] = features_name(m.features);
  j["adjust_idx"] = m.adjust_idx;
  j["pseudo_inverse"] = m.pseudo_inverse;
  std::vector<std::vector<double>> arms;
  for (const Eigen::VectorXd& beta : m.arm_coef)
    arms.emplace_back(beta.data(), beta.data() + beta.size());
  j["coefficients"] = arms;
  return j;
}

OutcomeModel outcome_from_json(const nlohmann::json& j) {
  OutcomeModel m;
  m.features = features_from_name(j.at("features").get<std::string>());
  m.adjust_idx = j.at("adjust_idx").get<std::vector<int>>();
  m.pseudo_inverse = j.value("pseudo_inverse", false);
  for (const auto& arm : j.at("coefficients")) {
    const auto vals = arm.get<std::vector<double>>();
    Eigen::VectorXd beta(static_cast<int>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) beta(static_cast<int>(i)) = vals[i];
    m.arm_coef.push_back(std::move(beta));
  }
  return m;
}

}  // namespace cpip
