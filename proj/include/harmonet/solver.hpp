#pragma once

#include "harmonet/energy.hpp"

namespace harmonet {

enum class SolveStatus { converged, max_iterations, indefinite_detected };

const char* to_string(SolveStatus s);

struct SolveResult {
  DiscreteField minimizer;        // zero outside Omega_r
  Vec interior;                   // minimizer restricted to interior indices
  int iterations = 0;
  double relative_residual = 0.0; // ||2 A u + b|| / ||b||
  double energy_value = 0.0;      // E_r at the minimizer
  SolveStatus status = SolveStatus::converged;
  std::vector<double> energy_trace;  // E_r at x0, x1, ... (nonincreasing for SPD)
};

struct ConnectivityReport {
  int component_count = 0;
  std::vector<int> component_of;   // per interior index
  std::vector<int> component_size;
  std::vector<char> component_anchored;  // has an edge to an exterior vertex
  bool all_anchored = true;
};

// Components of the interior subgraph; a component with no edge to the
// exterior puts constants in the kernel of A.
ConnectivityReport connectivity_check(const Graph& g, const Net& net);

// Jacobi-preconditioned conjugate gradient on 2 A u + b = 0.
SolveResult solve(const QuadraticForm& form, const Net& net, double tol = 1e-10, int max_iter = 0);

struct OptimalityReport {
  int trials = 0;
  int failures = 0;
  double max_violation = 0.0;      // max of E(u) - E(u + delta) over trials
  double stationarity_residual = 0.0;
  bool ok = true;
};

OptimalityReport optimality_check(const QuadraticForm& form, const SolveResult& result, int trials,
                                  std::uint64_t seed);

}  // namespace harmonet
