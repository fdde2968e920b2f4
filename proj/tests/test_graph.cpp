#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmonet/graph.hpp"

#include <cmath>

using namespace harmonet;

namespace {

Point pt(double x) {
  Point p(1);
  p << x;
  return p;
}

Space unit_interval() {
  Space s;
  s.ambient_dim = 1;
  s.bounds.lo = pt(0.0);
  s.bounds.hi = pt(1.0);
  s.domain_kind = DomainKind::interval;
  s.domain_params = Vec(2);
  s.domain_params << 0.2, 0.8;
  return s;
}

Space unit_square() {
  Space s;
  s.ambient_dim = 2;
  s.bounds.lo = Vec::Constant(2, 0.0);
  s.bounds.hi = Vec::Constant(2, 1.0);
  s.domain_kind = DomainKind::rectangle;
  s.domain_params = Vec(4);
  s.domain_params << 0.15, 0.85, 0.15, 0.85;
  return s;
}

}  // namespace

TEST_CASE("complete graph on the 1D example") {
  // net {0, 0.3, 0.6, 0.9} at r = 0.3: every pair sits within 3r = 0.9,
  // including the extreme pair at distance exactly 0.9 (inclusive rule)
  Space s = unit_interval();
  Net net = build_net(s, 0.3, 1);
  Graph g = build_graph(s, net);
  REQUIRE(g.size() == 4);
  CHECK(g.edge_count == 6);
  CHECK(g.max_degree == 3);
  for (int i = 0; i < 4; ++i) CHECK(g.adjacency[i].size() == 3);
}

TEST_CASE("adjacency is symmetric and loop-free") {
  Space s = unit_square();
  Net net = build_net(s, 0.05, 1);
  Graph g = build_graph(s, net);
  for (int i = 0; i < g.size(); ++i) {
    for (int j : g.adjacency[i]) {
      CHECK(j != i);
      CHECK(std::binary_search(g.adjacency[j].begin(), g.adjacency[j].end(), i));
    }
  }
}

TEST_CASE("adjacency matches the brute-force oracle") {
  Space s = unit_square();
  Net net = build_net(s, 0.06, 1);
  REQUIRE(net.size() <= 2000);
  Graph g = build_graph(s, net);
  for (int i = 0; i < net.size(); ++i) {
    std::vector<int> brute;
    for (int j = 0; j < net.size(); ++j)
      if (j != i && distance(s, net.vertices[i], net.vertices[j]) <= 3.0 * net.r)
        brute.push_back(j);
    CHECK(brute == g.adjacency[i]);
  }
}

TEST_CASE("single-vertex net has empty adjacency") {
  Space s = unit_interval();
  Net net = build_net(s, 0.99, 1);
  REQUIRE(net.size() == 1);
  Graph g = build_graph(s, net);
  CHECK(g.adjacency[0].empty());
  CHECK(g.edge_count == 0);
}

TEST_CASE("discretize_function on constants and monomials") {
  Space s = unit_interval();
  Net net = make_net(s, 0.4, 1);  // vertices {0, 0.4, 0.8}
  // constants are reproduced up to roundoff for any quadrature size
  for (int qn : {1, 3, 16}) {
    DiscreteField c = discretize_function(s, net, [](const Point&) { return 2.5; }, qn, 1);
    for (int i = 0; i < net.size(); ++i) CHECK(c.values[i] == doctest::Approx(2.5).epsilon(1e-15));
  }
  // linear functions average to the center on symmetric balls
  DiscreteField lin = discretize_function(s, net, [](const Point& p) { return p[0]; }, 64, 1);
  const int mid = nearest_vertex(s, net, pt(0.4), nullptr);
  CHECK(lin.values[mid] == doctest::Approx(0.4).epsilon(1e-12));
  // x^2 over B(0.4, 0.1): 0.16 + 0.01/3
  DiscreteField sq = discretize_function(s, net, [](const Point& p) { return p[0] * p[0]; }, 400, 1);
  CHECK(sq.values[mid] == doctest::Approx(0.16 + 0.01 / 3.0).epsilon(1e-7));
}

TEST_CASE("graph gradient hand values") {
  Space s = unit_interval();
  Net net = make_net(s, 0.3, 1);
  Graph g = build_graph(s, net);
  Vec coords(net.size());
  for (int i = 0; i < net.size(); ++i) coords[i] = net.vertices[i][0];
  DiscreteField u = make_field(net, coords);
  DiscreteField grad = graph_gradient(g, u);
  // |0-0.3| + |0-0.6| + |0-0.9| over r = 0.3
  CHECK(grad.values[0] == doctest::Approx(6.0).epsilon(1e-12));
  // constant fields have zero gradient
  DiscreteField c = make_field(net, Vec::Constant(net.size(), 4.0));
  CHECK(graph_gradient(g, c).values.cwiseAbs().maxCoeff() == 0.0);
  // two-vertex example: r=1, u=(0,1) gives (1,1) on an adjacent pair
  Net pair;
  pair.r = 1.0;
  pair.uid = 7;
  pair.vertices = {pt(0.0), pt(0.5)};
  pair.weights = Vec::Ones(2);
  pair.interior = {1, 0};
  Graph pg;
  pg.net_uid = 7;
  pg.r = 1.0;
  pg.adjacency = {{1}, {0}};
  pg.max_degree = 1;
  pg.edge_count = 1;
  DiscreteField pu{7, Vec(2)};
  pu.values << 0.0, 1.0;
  DiscreteField pgrad = graph_gradient(pg, pu);
  CHECK(pgrad.values[0] == doctest::Approx(1.0));
  CHECK(pgrad.values[1] == doctest::Approx(1.0));
}

TEST_CASE("graph energy hand values and weighting") {
  Net pair;
  pair.r = 1.0;
  pair.uid = 7;
  pair.vertices = {pt(0.0), pt(0.5)};
  pair.weights = Vec::Ones(2);
  pair.interior = {1, 0};
  Graph pg;
  pg.net_uid = 7;
  pg.r = 1.0;
  pg.adjacency = {{1}, {0}};
  pg.max_degree = 1;
  pg.edge_count = 1;
  DiscreteField u{7, Vec(2)};
  u.values << 0.0, 1.0;
  CHECK(graph_energy(pg, pair, u) == doctest::Approx(2.0).epsilon(1e-15));
  // the first-coordinate weighting is asymmetric across the ordered pairs
  pair.weights << 1.0, 3.0;
  CHECK(graph_energy(pg, pair, u) == doctest::Approx(4.0).epsilon(1e-15));
  // constant field has zero energy
  DiscreteField c{7, Vec::Constant(2, 9.0)};
  CHECK(graph_energy(pg, pair, c) == 0.0);
}

TEST_CASE("graph energy algebra: scaling and seminorm triangle") {
  Space s = unit_square();
  Net net = make_net(s, 0.06, 1);
  Graph g = build_graph(s, net);
  Rng rng(17);
  Vec a(net.size()), b(net.size());
  for (int i = 0; i < net.size(); ++i) {
    a[i] = 2.0 * rng.uniform() - 1.0;
    b[i] = 2.0 * rng.uniform() - 1.0;
  }
  const double ea = graph_energy(g, net, make_field(net, a));
  const double eb = graph_energy(g, net, make_field(net, b));
  const double e3a = graph_energy(g, net, make_field(net, 3.0 * a));
  const double eab = graph_energy(g, net, make_field(net, a + b));
  CHECK(e3a == doctest::Approx(9.0 * ea).epsilon(1e-12));
  CHECK(std::sqrt(eab) <= std::sqrt(ea) + std::sqrt(eb) + 1e-10);
}

TEST_CASE("net mismatch is rejected") {
  Space s = unit_interval();
  Net n1 = make_net(s, 0.3, 1);
  Net n2 = make_net(s, 0.25, 1);
  Graph g1 = build_graph(s, n1);
  DiscreteField u2 = zero_field(n2);
  CHECK_THROWS_AS(graph_gradient(g1, u2), UsageError);
  CHECK_THROWS_AS(graph_energy(g1, n1, u2), UsageError);
}

TEST_CASE("energy comparability against analytic gradient energy") {
  // u(x) = x on [0,1]: the continuum upper-gradient energy is 1
  Space s = unit_interval();
  for (double r : {0.05, 0.025, 0.0125}) {
    Net net = make_net(s, r, 1);
    Graph g = build_graph(s, net);
    DiscreteField ur = discretize_function(s, net, [](const Point& p) { return p[0]; }, 32, 1);
    const double ratio = graph_energy(g, net, ur) / 1.0;
    CHECK(ratio > 1e-3);
    CHECK(ratio < 1e3);
  }
}
