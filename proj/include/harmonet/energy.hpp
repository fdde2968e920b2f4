#pragma once

#include "harmonet/graph.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace harmonet {

// E(v) = v^T A v + b^T v + c0 over interior degrees of freedom, expanded from
// the ordered-pair energy with boundary data f_r. No 1/2 convention on A;
// stationarity is 2 A v + b = 0.
struct QuadraticForm {
  std::vector<int> interior_ids;        // vertex id per interior index
  std::vector<int> vertex_to_interior;  // -1 for exterior vertices
  Eigen::SparseMatrix<double> A;        // symmetric, assembled bit-exactly
  Vec b;
  double c0 = 0.0;
  double r = 0.0;
  std::uint64_t net_uid = 0;

  int unknowns() const { return static_cast<int>(interior_ids.size()); }
};

QuadraticForm assemble_form(const Graph& g, const Net& net, const DiscreteField& f_r);

double evaluate_form(const QuadraticForm& form, const Vec& v);

// Zero-extension of an interior vector to a field on the whole net.
DiscreteField extend_interior(const QuadraticForm& form, const Net& net, const Vec& v);

struct CoercivityRow {
  double scale = 0.0;
  double energy_v = 0.0;      // raw graph energy of the extended v
  double energy_f = 0.0;      // raw graph energy of f_r
  double energy_total = 0.0;  // E_r(v) with boundary data
  double chain_lhs = 0.0;     // sqrt(E_r(v))
  double chain_rhs = 0.0;     // (sqrt(energy_v) - sqrt(energy_f))_+
  bool ok = false;
};

struct CoercivityReport {
  std::vector<CoercivityRow> rows;
  bool all_ok = true;
  // The continuum constants entering the coercivity minorant are not
  // computable from the discrete data; they are reported as unset.
  double c1 = std::numeric_limits<double>::quiet_NaN();
  double c2 = std::numeric_limits<double>::quiet_NaN();
};

// Verifies the reverse-triangle step sqrt(E_r(v)) >= (sqrt(E(v)) - sqrt(E(f)))_+
// on random interior vectors of growing norm.
CoercivityReport coercivity_report(const QuadraticForm& form, const Graph& g, const Net& net,
                                   const DiscreteField& f_r, int trials, std::uint64_t seed);

struct ComparabilityRow {
  double r = 0.0;
  int vertex_count = 0;
  double raw_energy = 0.0;
  double ratio = 0.0;
};

struct ComparabilityReport {
  double grad_energy = 0.0;
  std::vector<ComparabilityRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool within_bounds = true;  // ratios inside [1e-3, 1e3]
};

// Ratio of the boundary-free graph energy of u_r to the caller-supplied
// continuum gradient energy, across an r-ladder.
ComparabilityReport comparability_report(const Space& s, const ScalarField& u, double grad_energy,
                                         const std::vector<double>& r_ladder, std::uint64_t seed,
                                         int quad_n = 32);

}  // namespace harmonet
