#pragma once

#include "harmonet/net.hpp"

#include <vector>

namespace harmonet {

// 3r-adjacency graph over a net. Adjacency is x ~ y iff x != y and
// d(x, y) <= 3r, with the threshold compared exactly on computed distances.
struct Graph {
  std::uint64_t net_uid = 0;
  double r = 0.0;
  std::vector<std::vector<int>> adjacency;  // sorted neighbor ids
  int max_degree = 0;
  std::int64_t edge_count = 0;  // unordered edges

  int size() const { return static_cast<int>(adjacency.size()); }
};

// One real value per net vertex (u, u_r, f_r, solutions, gradients, ...).
struct DiscreteField {
  std::uint64_t net_uid = 0;
  Vec values;
};

Graph build_graph(const Space& s, const Net& net);

DiscreteField make_field(const Net& net, Vec values);
DiscreteField zero_field(const Net& net);

// u_r(x) = mean of u over B(x, r/4), via sample_ball quadrature.
DiscreteField discretize_function(const Space& s, const Net& net, const ScalarField& u, int quad_n,
                                  std::uint64_t seed);

// |grad_r u|(x) = sum over neighbors w of |u(x) - u(w)| / r.
DiscreteField graph_gradient(const Graph& g, const DiscreteField& u);

// Raw energy: sum over ordered adjacent pairs (x, y) of
// |u(y) - u(x)|^2 / r^2 * mu_r({x}). Boundary data is the caller's business.
double graph_energy(const Graph& g, const Net& net, const DiscreteField& u);

void require_same_net(const Graph& g, const DiscreteField& u, const char* what);
void require_same_net(const Net& net, const DiscreteField& u, const char* what);

}  // namespace harmonet
