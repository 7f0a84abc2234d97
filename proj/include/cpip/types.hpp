#pragma once

#include <string>
#include <vector>

namespace cpip {

inline constexpr double kSimplexTol = 1e-12;

// Ordered set of treatment labels.
struct ActionSpace {
  std::vector<std::string> labels;

  int size() const { return static_cast<int>(labels.size()); }
  static ActionSpace indexed(int k);  // "a1", ..., "aK"
  int index_of(const std::string& label) const;  // -1 when absent
  void validate() const;
};

// Probability vector over the action set.
struct Simplex {
  std::vector<double> probs;

  Simplex() = default;
  explicit Simplex(std::vector<double> p) : probs(std::move(p)) {}

  int size() const { return static_cast<int>(probs.size()); }
  double operator[](int i) const { return probs[static_cast<std::size_t>(i)]; }

  static Simplex uniform(int k);
  static Simplex point_mass(int k, int at);

  // Clamps round-off negatives to zero and rescales to sum one.
  void renormalize();
  void validate(const char* what = "simplex") const;
};

// Reallocation costs: either one cost per destination action (charged on any
// move into that action, zero for staying put) or a full KxK matrix.
struct CostSpec {
  enum class Kind { destination, matrix };

  Kind kind = Kind::destination;
  std::vector<double> dest;  // size K when kind == destination
  std::vector<double> mat;   // row-major KxK when kind == matrix

  static CostSpec destination(std::vector<double> c);
  static CostSpec matrix(std::vector<double> m, int k);
  static CostSpec hamming(int k);

  bool is_destination() const { return kind == Kind::destination; }
  int actions() const;
  double at(int from, int to) const;
  CostSpec as_matrix() const;
  void validate(int k, const char* what = "cost") const;
};

// Policy design input: target distribution, costs, and the tilt grid.
struct TiltConfig {
  ActionSpace actions;
  Simplex nu;
  CostSpec cost;
  std::vector<double> delta_grid;

  int k() const { return actions.size(); }
  void validate() const;
};

// Joint distribution over action pairs; rows index the origin action,
// columns the destination action.
struct Coupling {
  int k = 0;
  std::vector<double> joint;  // row-major KxK, sums to 1

  double at(int from, int to) const { return joint[static_cast<std::size_t>(from * k + to)]; }
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

// Destination-cost tilt weights: xi(a) = nu(a)(1 - e^{-delta c(a)}),
// zeta = sum_a nu(a) e^{-delta c(a)}, rho(a) = xi(a) / (zeta + xi(a)).
struct TiltWeights {
  std::vector<double> xi;
  double zeta = 1.0;
  std::vector<double> rho;
};

}  // namespace cpip
