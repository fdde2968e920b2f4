#pragma once

#include "harmonet/graph.hpp"

#include <atomic>
#include <memory>
#include <mutex>

namespace harmonet {

enum class ProjectionKind { whitney, path_integral };

const char* to_string(ProjectionKind k);

// Localized discrete-gradient aggregate:
// gbar(p) = 2 * sum over vertices w with d(w, p) < 3r of |grad_r u|(w).
double gbar(const Space& s, const Graph& g, const Net& net, const DiscreteField& u,
            const Point& p);

// McShane-type extension: value at p is the infimum over net vertices x of
// u(x) plus the gbar-weighted shortest-path cost from p to the ball
// B(x, r/4), computed on an auxiliary lattice. Inside any net ball the value
// is the vertex value exactly.
class PathIntegralProjector {
 public:
  PathIntegralProjector(const Space& s, const Graph& g, const Net& net, const DiscreteField& u,
                        double lattice_pitch);

  double operator()(const Point& p) const;
  double pitch() const { return pitch_; }
  std::int64_t lattice_nodes() const { return total_; }

 private:
  const Space* space_;
  const Net* net_;
  Vec u_;
  Vec grad_;  // |grad_r u| per vertex
  double pitch_ = 0.0;
  Vec axis_pitch_;
  Vec lo_;
  std::vector<int> counts_;
  std::int64_t total_ = 0;
  double shift_ = 0.0;

  // The lattice sweep costs far more than ball-branch lookups, so it runs on
  // the first query that actually needs it.
  mutable std::once_flag sweep_flag_;
  mutable std::vector<double> value_;     // shifted potentials on lattice nodes
  mutable std::vector<float> node_gbar_;  // gbar sampled per node, for query relax

  double gbar_at(const Point& p) const;
  Point node_point(const std::vector<int>& idx) const;
  std::vector<float> scatter_gbar(const Vec& shift) const;
  void ensure_swept() const;
  void run_sweep() const;
};

// Partition-of-unity blend over a dyadic Whitney decomposition of the
// complement of the net balls; available on euclidean-chart instances only.
class WhitneyProjector {
 public:
  WhitneyProjector(const Space& s, const Graph& g, const Net& net, const DiscreteField& u,
                   int depth_cap = 40);

  double operator()(const Point& p) const;

  // The net-dependent part of the evaluation: normalized (vertex, weight)
  // pairs whose dot product with any field gives that field's projection at p.
  // Inside a net ball this is a single (vertex, 1) pair.
  void stencil(const Point& p, std::vector<std::pair<int, double>>& out) const;

  std::int64_t fallback_count() const { return fallbacks_.load(); }

 private:
  const Space* space_;
  const Net* net_;
  Vec u_;
  int depth_cap_ = 40;
  int max_level_ = 0;      // depth cap translated to an absolute dyadic level
  double diam_scale_ = 1;  // metric diameter of a unit cube
  mutable std::atomic<std::int64_t> fallbacks_{0};

  bool maximal_admissible(const std::int64_t* cube, int level, double* dist_c) const;
  double dist_to_balls(const Point& p) const;
};

struct ProjectionVerifyOptions {
  int quad_n = 4;
  int probes = 1000;
  std::uint64_t seed = 7;
  double fd_pitch_factor = 1.0 / 16.0;
  double lattice_pitch_factor = 1.0 / 8.0;
  int depth_cap = 40;
  bool extended = false;  // sampled-curve upper gradient surrogate
  int curve_pairs = 32;
};

struct ProjectionVerifyReport {
  ProjectionKind kind = ProjectionKind::whitney;
  bool applicable = true;

  // (a) ball-average consistency at every vertex
  double consistency_max_err = 0.0;
  bool consistency_ok = false;

  // (b) finite-difference gradient energy vs graph energy
  bool domination_applicable = false;
  double fd_grad_energy = 0.0;
  double graph_energy_u = 0.0;
  double domination_ratio = 0.0;

  // (c) exterior vanishing, evaluated when u is compactly supported
  bool boundary_applicable = false;
  int boundary_probes = 0;
  int boundary_violations = 0;
  bool boundary_ok = true;

  // extended: |P(y) - P(x)| <= int_gamma gbar along sampled segments
  int curve_pairs = 0;
  int curve_violations = 0;
  double curve_worst_slack = 0.0;
};

ProjectionVerifyReport verify_projection(const Space& s, const Graph& g, const Net& net,
                                         const DiscreteField& u, ProjectionKind kind,
                                         const ProjectionVerifyOptions& opt = {});

struct LipschitzReport {
  int pairs = 0;
  int used = 0;     // pairs with nonzero denominator
  int flagged = 0;  // zero denominator but nonzero numerator
  double max_ratio = 0.0;
  double cap = 200.0;
  bool ok = true;
};

// Empirical local-Lipschitz ratios of the Whitney projection on close pairs.
LipschitzReport lipschitz_probe(const Space& s, const Graph& g, const Net& net,
                                const DiscreteField& u, int pairs, std::uint64_t seed,
                                double cap = 200.0);

// Forward-difference estimate of the upper-gradient energy of an arbitrary
// evaluator over X at grid pitch h (euclidean-chart instances).
double fd_gradient_energy(const Space& s, const std::function<double(const Point&)>& eval,
                          double h);

// Same estimate for many fields sharing one Whitney stencil structure; one
// entry per field, in order.
std::vector<double> fd_gradient_energy_fields(const Space& s, const WhitneyProjector& proj,
                                              const std::vector<const Vec*>& fields, double h);

}  // namespace harmonet
