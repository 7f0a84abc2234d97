#include "cpip/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "cpip/errors.hpp"

namespace cpip {

ActionSpace ActionSpace::indexed(int k) {
  ActionSpace s;
  s.labels.reserve(static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) s.labels.push_back("a" + std::to_string(i));
  return s;
}

int ActionSpace::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

void ActionSpace::validate() const {
  if (labels.size() < 2) throw ConfigError("actions: need at least 2 labels");
  std::set<std::string> distinct(labels.begin(), labels.end());
  if (distinct.size() != labels.size()) throw ConfigError("actions: labels must be distinct");
}

Simplex Simplex::uniform(int k) {
  return Simplex(std::vector<double>(static_cast<std::size_t>(k), 1.0 / k));
}

Simplex Simplex::point_mass(int k, int at) {
  std::vector<double> p(static_cast<std::size_t>(k), 0.0);
  p[static_cast<std::size_t>(at)] = 1.0;
  return Simplex(std::move(p));
}

void Simplex::renormalize() {
  double sum = 0.0;
  for (double& v : probs) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (!(sum > 0.0) || !std::isfinite(sum))
    throw NumericError("simplex renormalization: mass underflowed to zero");
  for (double& v : probs) v /= sum;
}

void Simplex::validate(const char* what) const {
  using std::string;
  if (probs.size() < 2) throw ConfigError(string(what) + ": need at least 2 entries");
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v)) throw ConfigError(string(what) + ": entries must be finite");
    if (v < -kSimplexTol) throw ConfigError(string(what) + ": entries must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw ConfigError(string(what) + ": entries must sum to 1 (got " + std::to_string(sum) + ")");
}

CostSpec CostSpec::destination(std::vector<double> c) {
  CostSpec spec;
  spec.kind = Kind::destination;
  spec.dest = std::move(c);
  return spec;
}

CostSpec CostSpec::matrix(std::vector<double> m, int k) {
  if (static_cast<int>(m.size()) != k * k) throw ConfigError("cost: matrix must be KxK");
  CostSpec spec;
  spec.kind = Kind::matrix;
  spec.mat = std::move(m);
  return spec;
}

CostSpec CostSpec::hamming(int k) {
  return destination(std::vector<double>(static_cast<std::size_t>(k), 1.0));
}

int CostSpec::actions() const {
  if (kind == Kind::destination) return static_cast<int>(dest.size());
  return static_cast<int>(std::lround(std::sqrt(static_cast<double>(mat.size()))));
}

double CostSpec::at(int from, int to) const {
  if (kind == Kind::destination)
    return from == to ? 0.0 : dest[static_cast<std::size_t>(to)];
  return mat[static_cast<std::size_t>(from * actions() + to)];
}

CostSpec CostSpec::as_matrix() const {
  if (kind == Kind::matrix) return *this;
  const int k = actions();
  std::vector<double> m(static_cast<std::size_t>(k * k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j) m[static_cast<std::size_t>(i * k + j)] = dest[static_cast<std::size_t>(j)];
  return matrix(std::move(m), k);
}

void CostSpec::validate(int k, const char* what) const {
  const std::vector<double>& vals = kind == Kind::destination ? dest : mat;
  const std::size_t want =
      kind == Kind::destination ? static_cast<std::size_t>(k) : static_cast<std::size_t>(k * k);
  if (vals.size() != want) throw ConfigError(std::string(what) + ": wrong size for action count");
  for (double v : vals) {
    if (!std::isfinite(v) || v < 0.0)
      throw ConfigError(std::string(what) + ": entries must be finite and nonnegative");
  }
}

void TiltConfig::validate() const {
  actions.validate();
  nu.validate("nu");
  if (nu.size() != k()) throw ConfigError("nu: length must match action count");
  cost.validate(k());
  if (delta_grid.empty()) throw ConfigError("delta: grid must be nonempty");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!std::isfinite(delta_grid[i])) throw ConfigError("delta: values must be finite");
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
      throw ConfigError("delta: grid must be strictly increasing");
  }
}

std::vector<double> Coupling::row_sums() const {
  std::vector<double> r(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) r[static_cast<std::size_t>(i)] += at(i, j);
  return r;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> c(static_cast<std::size_t>(k), 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) c[static_cast<std::size_t>(j)] += at(i, j);
  return c;
}

}  // namespace cpip
