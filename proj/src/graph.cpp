#include "harmonet/graph.hpp"

#include <algorithm>
#include <cmath>

namespace harmonet {

void require_same_net(const Graph& g, const DiscreteField& u, const char* what) {
  if (g.net_uid != u.net_uid)
    throw UsageError(std::string(what) + ": field and graph belong to different nets");
}

void require_same_net(const Net& net, const DiscreteField& u, const char* what) {
  if (net.uid != u.net_uid)
    throw UsageError(std::string(what) + ": field and net belong to different nets");
}

Graph build_graph(const Space& s, const Net& net) {
  Graph g;
  g.net_uid = net.uid;
  g.r = net.r;
  g.adjacency.assign(net.size(), {});
  std::vector<int> cand;
  for (int i = 0; i < net.size(); ++i) {
    const Vec hw = ball_coord_halfwidths(s, net.vertices[i], 3.0 * net.r);
    net.index.query_box(net.vertices[i], hw, cand);
    for (int j : cand) {
      if (j == i) continue;
      if (distance(s, net.vertices[i], net.vertices[j]) <= 3.0 * net.r)
        g.adjacency[i].push_back(j);
    }
    // query_box returns sorted ids, so neighbor lists arrive sorted
    g.max_degree = std::max(g.max_degree, static_cast<int>(g.adjacency[i].size()));
    g.edge_count += static_cast<std::int64_t>(g.adjacency[i].size());
  }
  g.edge_count /= 2;
  return g;
}

DiscreteField make_field(const Net& net, Vec values) {
  if (values.size() != net.size())
    throw UsageError("make_field: value count does not match the net");
  return DiscreteField{net.uid, std::move(values)};
}

DiscreteField zero_field(const Net& net) { return make_field(net, Vec::Zero(net.size())); }

DiscreteField discretize_function(const Space& s, const Net& net, const ScalarField& u, int quad_n,
                                  std::uint64_t seed) {
  Vec values(net.size());
  for (int i = 0; i < net.size(); ++i) {
    const auto nodes = sample_ball(s, net.vertices[i], net.r / 4.0, quad_n, seed);
    double acc = 0.0, mass = 0.0;
    for (const auto& q : nodes) {
      acc += q.w * u(q.p);
      mass += q.w;
    }
    values[i] = acc / mass;
  }
  return make_field(net, std::move(values));
}

DiscreteField graph_gradient(const Graph& g, const DiscreteField& u) {
  require_same_net(g, u, "graph_gradient");
  Vec out(g.size());
  for (int i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (int j : g.adjacency[i]) acc += std::abs(u.values[i] - u.values[j]);
    out[i] = acc / g.r;
  }
  return DiscreteField{u.net_uid, std::move(out)};
}

double graph_energy(const Graph& g, const Net& net, const DiscreteField& u) {
  require_same_net(g, u, "graph_energy");
  if (net.uid != g.net_uid) throw UsageError("graph_energy: net and graph mismatch");
  if (net.weights.size() != net.size())
    throw UsageError("graph_energy: net weights not assigned");
  const double inv_r2 = 1.0 / (g.r * g.r);
  std::vector<double> per_vertex(g.size(), 0.0);
  for (int i = 0; i < g.size(); ++i) {
    double acc = 0.0;
    for (int j : g.adjacency[i]) {
      const double d = u.values[j] - u.values[i];
      acc += d * d;
    }
    per_vertex[i] = acc * inv_r2 * net.weights[i];
  }
  return pairwise_sum(per_vertex);
}

}  // namespace harmonet
