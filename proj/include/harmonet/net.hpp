#pragma once

#include "harmonet/grid_index.hpp"
#include "harmonet/space.hpp"

#include <vector>

namespace harmonet {

// Maximal r-separated vertex set over X with per-vertex masses and the
// discrete interior mask. Construction is deterministic for fixed inputs.
struct Net {
  double r = 0.0;
  std::vector<Point> vertices;
  Vec weights;                 // mu_r({x}) = mu(B(x, r/4)); empty until assigned
  std::vector<char> interior;  // membership in Omega_r; empty until assigned
  GridIndex index;             // bucket grid at cell scale r
  std::uint64_t uid = 0;       // identity token binding fields/graphs to this net
  std::uint64_t space_hash = 0;
  std::uint64_t seed = 0;
  double margin_factor = 20.0;

  int size() const { return static_cast<int>(vertices.size()); }
  int interior_count() const {
    int c = 0;
    for (char m : interior) c += m != 0;
    return c;
  }
};

// Greedy insertion over a deterministic candidate stream: a lexicographic
// grid of pitch r/2 over the bounding box (clipped to X), then
// `extra_candidates` random points drawn from `seed`.
Net build_net(const Space& s, double r, std::uint64_t seed, int extra_candidates = 0);

Net& assign_weights(const Space& s, Net& net);

// Sets the interior mask: vertex is interior iff domain_margin >= margin_factor * r.
// Returns the interior count (zero means Omega_r is empty at this r).
int discretize_domain(const Space& s, Net& net, double margin_factor = 20.0);

// build + weights + interior in one step.
Net make_net(const Space& s, double r, std::uint64_t seed, double margin_factor = 20.0,
             int extra_candidates = 0);

// Nearest vertex to p under the space metric; ties resolved by lowest id.
// Returns -1 only for an empty net.
int nearest_vertex(const Space& s, const Net& net, const Point& p, double* dist_out = nullptr);

struct NetCertificate {
  bool separation_ok = false;
  bool covering_ok = false;
  double min_pair_distance = 0.0;
  double max_probe_distance = 0.0;
  int probes = 0;
};

// Empirical separation/covering certificates on seeded probe points.
NetCertificate certify_net(const Space& s, const Net& net, int probes, std::uint64_t seed);

}  // namespace harmonet
