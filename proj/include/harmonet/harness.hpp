#pragma once

#include "harmonet/config.hpp"
#include "harmonet/project.hpp"
#include "harmonet/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace harmonet {

struct HarnessOptions {
  std::uint64_t seed = 1;
  double margin_factor = 20.0;
  int quad_n = 32;
  double solver_tol = 1e-10;
  int solver_max_iter = 0;
  double lattice_pitch_factor = 1.0 / 8.0;
  int cube_depth_cap = 40;
  double fd_pitch_factor = 1.0 / 16.0;
  int probes = 1000;
  bool full_diagnostics = true;  // per-rung projection/domination diagnostics
  int workers = 1;
  std::optional<double> f_grad_energy;  // analytic upper-gradient energy of f
};

struct RungRecord {
  double r = 0.0;
  bool failed = false;
  std::string error;
  int vertex_count = 0;
  int interior_count = 0;
  std::int64_t edge_count = 0;
  int max_degree = 0;
  int solve_iterations = 0;
  std::string solve_status;
  double relative_residual = 0.0;
  double energy_total = 0.0;    // E_r(u_bar)
  double energy_zero = 0.0;     // E_r(0) = c0
  double energy_u_alone = 0.0;  // raw graph energy of u_bar
  double energy_f_alone = 0.0;  // raw graph energy of f_r
  bool energy_chain_ok = false; // E_r(u_bar) <= E_r(0) + slack
  bool connectivity_anchored = true;
  double comparability_ratio = 0.0;  // vs analytic f gradient energy, when known

  // per projection kind (index 0 whitney, 1 path_integral)
  struct ProjectionStats {
    bool available = false;
    double l2_error = 0.0;   // ||u_k + f - reference||_L2(probe grid)
    double sup_error = 0.0;
    bool consistency_ok = false;
    bool boundary_ok = true;
    double domination_ratio = 0.0;
    double n12_surrogate = 0.0;  // sqrt(L2^2 + fd gradient energy) of u_k
  };
  ProjectionStats proj[2];

  double mazya_cm = 0.0;  // max of sum(u^2 mu) / energy over random supported u

  struct Timing {
    double net_ms = 0.0, graph_ms = 0.0, assemble_ms = 0.0, solve_ms = 0.0, project_ms = 0.0;
  } timing;
};

struct ExperimentReport {
  std::string report_version = "1";
  std::uint64_t space_hash = 0;
  std::string boundary_name;
  std::string reference_name;
  std::uint64_t seed = 0;
  double margin_factor = 20.0;
  double probe_pitch = 0.0;
  double doubling_constant = 0.0;  // empirical C_D for the instance
  std::vector<RungRecord> records; // sorted by decreasing r
  bool minimizer_bound_ok = true;  // N^{1,2} surrogate stays within 10x coarsest
};

ExperimentReport run_convergence(const Space& s, const ScalarField& f,
                                 const std::vector<double>& r_ladder, const HarnessOptions& opt,
                                 const ScalarField& reference = nullptr);

std::string report_to_json(const ExperimentReport& rep, bool include_timings = true);
std::string report_to_csv(const ExperimentReport& rep);

// Empirical doubling constant over a log-spaced radius grid at seeded centers.
double empirical_doubling_constant(const Space& s, int centers, int radii, std::uint64_t seed);

struct VerifyCheck {
  std::string name;
  bool hard = true;     // hard failures drive the exit status
  bool passed = false;
  bool skipped = false;
  std::string detail;
};

struct VerifyOutcome {
  std::vector<VerifyCheck> checks;
  int hard_failures() const {
    int n = 0;
    for (const auto& c : checks) n += c.hard && !c.skipped && !c.passed;
    return n;
  }
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  double r = 0.0;          // 0 = derive a desk-scale default from the instance
  int metric_triples = 10000;
  int net_probes = 10000;
  int random_fields = 20;
  double margin_factor = 20.0;
  int quad_n = 16;
  double degree_cap = 0.0;  // 0 = dimension default
  std::function<void(Net&)> tamper;  // test hook: corrupt the net before checking
};

// Runs every module-level invariant at desk scale; failures are the output.
VerifyOutcome verify_suite(const Space& s, const VerifyOptions& opt);

}  // namespace harmonet
