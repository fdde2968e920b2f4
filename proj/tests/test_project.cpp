#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmonet/project.hpp"

#include <cmath>

using namespace harmonet;

namespace {

Point pt(double x) {
  Point p(1);
  p << x;
  return p;
}
Point pt(double x, double y) {
  Point p(2);
  p << x, y;
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

Space koranyi_box() {
  Space s;
  s.ambient_dim = 3;
  s.metric_kind = MetricKind::koranyi;
  s.bounds.lo = Vec(3);
  s.bounds.lo << -1, -1, -0.12;
  s.bounds.hi = Vec(3);
  s.bounds.hi << 1, 1, 0.12;
  s.domain_kind = DomainKind::disk;
  s.domain_params = Vec(4);
  s.domain_params << 0, 0, 0, 0.5;
  return s;
}

struct Pair {
  Net net;
  Graph graph;
};

Pair adjacent_pair() {
  Pair t;
  t.net.r = 1.0;
  t.net.uid = 42;
  t.net.vertices = {pt(0.0), pt(0.5)};
  t.net.weights = Vec::Ones(2);
  t.net.interior = {1, 0};
  t.graph.net_uid = 42;
  t.graph.r = 1.0;
  t.graph.adjacency = {{1}, {0}};
  t.graph.max_degree = 1;
  t.graph.edge_count = 1;
  return t;
}

DiscreteField random_field(const Net& net, std::uint64_t seed) {
  Rng rng(seed);
  Vec v(net.size());
  for (int i = 0; i < net.size(); ++i) v[i] = 2.0 * rng.uniform() - 1.0;
  return make_field(net, v);
}

DiscreteField compact_field(const Net& net, std::uint64_t seed) {
  DiscreteField u = random_field(net, seed);
  for (int i = 0; i < net.size(); ++i)
    if (!net.interior[i]) u.values[i] = 0.0;
  return u;
}

// --- independent replay oracle for the Whitney construction -----------------
// Enumerates every dyadic cube over a wide level range with brute-force
// nearest-vertex distances and the same admissibility and bump rules.

double brute_dist_to_balls(const Space& s, const Net& net, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : net.vertices) best = std::min(best, distance(s, p, v));
  return best - net.r / 4.0;
}

int brute_nearest(const Space& s, const Net& net, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  int id = -1;
  for (int i = 0; i < net.size(); ++i) {
    const double d = distance(s, p, net.vertices[i]);
    if (d < best) {
      best = d;
      id = i;
    }
  }
  return id;
}

double oracle_eta(double t) {
  if (t >= 1.0) return 0.0;
  const double u = 1.0 - t * t;
  return u * u;
}

double whitney_oracle(const Space& s, const Net& net, const DiscreteField& u, const Point& p) {
  const int d = s.ambient_dim;
  const int vn = brute_nearest(s, net, p);
  if (distance(s, p, net.vertices[vn]) <= net.r / 4.0) return u.values[vn];
  const double diam_scale = std::sqrt(static_cast<double>(d));
  auto admissible = [&](const Point& center, double side) {
    return brute_dist_to_balls(s, net, center) >= 2.0 * side * diam_scale;
  };
  double num = 0.0, den = 0.0;
  for (int level = 1; level <= 40; ++level) {
    const double side = std::exp2(-level);
    // every cube at this level whose center lies within one side of p per axis
    std::vector<std::int64_t> base(d), idx(d);
    for (int a = 0; a < d; ++a) base[a] = static_cast<std::int64_t>(std::floor(p[a] / side));
    std::vector<int> off(d, -2);
    for (;;) {
      Point c(d), parent(d);
      for (int a = 0; a < d; ++a) {
        idx[a] = base[a] + off[a];
        c[a] = (static_cast<double>(idx[a]) + 0.5) * side;
        const std::int64_t pa = idx[a] >= 0 ? idx[a] / 2 : -((-idx[a] + 1) / 2);
        parent[a] = (static_cast<double>(pa) + 0.5) * 2.0 * side;
      }
      bool support = true;
      for (int a = 0; a < d; ++a)
        if (std::abs(p[a] - c[a]) >= (9.0 / 16.0) * side) support = false;
      if (support && admissible(c, side) && !admissible(parent, 2.0 * side)) {
        double psi = 1.0;
        for (int a = 0; a < d; ++a)
          psi *= oracle_eta(std::abs(p[a] - c[a]) / ((9.0 / 16.0) * side));
        if (psi > 0.0) {
          num += psi * u.values[brute_nearest(s, net, c)];
          den += psi;
        }
      }
      int a = 0;
      for (; a < d; ++a) {
        if (++off[a] <= 2) break;
        off[a] = -2;
      }
      if (a == d) break;
    }
  }
  REQUIRE(den > 0.0);
  return num / den;
}

}  // namespace

TEST_CASE("gbar hand values") {
  Pair t = adjacent_pair();
  DiscreteField u{42, Vec(2)};
  u.values << 0.0, 1.0;
  Space s = unit_interval();
  // both vertices within 3r of the probe: 2 * (1 + 1)
  CHECK(gbar(s, t.graph, t.net, u, pt(0.25)) == doctest::Approx(4.0).epsilon(1e-15));
  // constant field: zero everywhere
  DiscreteField c{42, Vec::Constant(2, 7.0)};
  CHECK(gbar(s, t.graph, t.net, c, pt(0.25)) == 0.0);
}

TEST_CASE("gbar vanishes far from every vertex") {
  Space s = unit_interval();
  Net net = make_net(s, 0.3, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 3);
  // probe beyond the bounds, farther than 3r from all vertices
  CHECK(gbar(s, g, net, u, pt(7.5)) == 0.0);
}

TEST_CASE("path projection: ball values exact, constants preserved") {
  Space s = unit_interval();
  Net net = make_net(s, 0.1, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 5);
  PathIntegralProjector proj(s, g, net, u, net.r / 8.0);
  for (int i = 0; i < net.size(); ++i) {
    CHECK(proj(net.vertices[i]) == u.values[i]);
    Point inner = net.vertices[i];
    inner[0] += 0.2 * net.r / 4.0;
    if (s.in_X(inner)) CHECK(proj(inner) == u.values[i]);
  }
  DiscreteField c = make_field(net, Vec::Constant(net.size(), -2.5));
  PathIntegralProjector cproj(s, g, net, c, net.r / 8.0);
  Rng rng(6);
  for (int k = 0; k < 200; ++k)
    CHECK(cproj(pt(rng.uniform(0, 1))) == doctest::Approx(-2.5).epsilon(1e-14));
}

TEST_CASE("path projection on a single-vertex net") {
  Net net;
  net.r = 1.0;
  net.uid = 9;
  net.vertices = {pt(0.5)};
  net.weights = Vec::Ones(1);
  net.interior = {0};
  Space s = unit_interval();
  net.index = GridIndex(s.bounds.lo, Vec::Constant(1, 1.0));
  net.index.insert(net.vertices[0], 0);
  Graph g;
  g.net_uid = 9;
  g.r = 1.0;
  g.adjacency = {{}};
  DiscreteField u{9, Vec::Constant(1, 3.75)};
  PathIntegralProjector proj(s, g, net, u, 0.125);
  for (double x : {0.0, 0.2, 0.5, 0.77, 1.0}) CHECK(proj(pt(x)) == 3.75);
}

TEST_CASE("path projection rejects oversized lattice pitch and exterior queries") {
  Space s = unit_interval();
  Net net = make_net(s, 0.1, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 5);
  CHECK_THROWS_AS(PathIntegralProjector(s, g, net, u, net.r / 4.0), AccuracyError);
  PathIntegralProjector proj(s, g, net, u, net.r / 8.0);
  CHECK_THROWS_AS(proj(pt(1.5)), UsageError);
}

TEST_CASE("path projection lattice self-convergence") {
  Space s = unit_interval();
  Net net = make_net(s, 0.08, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 11);
  PathIntegralProjector p1(s, g, net, u, net.r / 8.0);
  PathIntegralProjector p2(s, g, net, u, net.r / 16.0);
  PathIntegralProjector p3(s, g, net, u, net.r / 32.0);
  const double scale = u.values.cwiseAbs().maxCoeff();
  Rng rng(123);
  double d12 = 0.0, d23 = 0.0;
  for (int k = 0; k < 100; ++k) {
    Point p = pt(rng.uniform(0, 1));
    d12 = std::max(d12, std::abs(p2(p) - p1(p)) / scale);
    d23 = std::max(d23, std::abs(p3(p) - p2(p)) / scale);
  }
  CHECK(d12 <= 0.05);
  CHECK(d23 <= 0.025);
}

TEST_CASE("whitney projection: ball values exact, constants preserved") {
  Space s = unit_square();
  Net net = make_net(s, 0.05, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 7);
  WhitneyProjector proj(s, g, net, u);
  for (int i = 0; i < net.size(); i += 3) CHECK(proj(net.vertices[i]) == u.values[i]);
  DiscreteField c = make_field(net, Vec::Constant(net.size(), 1.5));
  WhitneyProjector cproj(s, g, net, c);
  Rng rng(8);
  for (int k = 0; k < 500; ++k)
    CHECK(cproj(pt(rng.uniform(0, 1), rng.uniform(0, 1))) ==
          doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("whitney 1D example against the replay oracle") {
  // net {0, 1} at r = 1: balls of radius 1/4 around each end, u jumps 0 -> 1
  Net net;
  net.r = 1.0;
  net.uid = 4;
  net.vertices = {pt(0.0), pt(1.0)};
  net.weights = Vec::Ones(2);
  net.interior = {0, 0};
  Space s = unit_interval();
  net.index = GridIndex(s.bounds.lo, Vec::Constant(1, 1.0));
  net.index.insert(net.vertices[0], 0);
  net.index.insert(net.vertices[1], 1);
  Graph g;
  g.net_uid = 4;
  g.r = 1.0;
  g.adjacency = {{1}, {0}};
  g.max_degree = 1;
  g.edge_count = 1;
  DiscreteField u{4, Vec(2)};
  u.values << 0.0, 1.0;
  WhitneyProjector proj(s, g, net, u);
  const double mid = proj(pt(0.5));
  CHECK(mid >= 0.0);
  CHECK(mid <= 1.0);
  for (double x : {0.3, 0.42, 0.5, 0.61, 0.7}) {
    CHECK(proj(pt(x)) == doctest::Approx(whitney_oracle(s, net, u, pt(x))).epsilon(1e-12));
  }
  // inside the balls the projection short-circuits to the vertex value
  CHECK(proj(pt(0.2)) == 0.0);
  CHECK(proj(pt(0.8)) == 1.0);
}

TEST_CASE("whitney 2D blend against the replay oracle") {
  Space s = unit_square();
  Net net = make_net(s, 0.12, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 13);
  WhitneyProjector proj(s, g, net, u);
  Rng rng(14);
  int compared = 0;
  for (int k = 0; k < 300 && compared < 60; ++k) {
    Point p = pt(rng.uniform(0, 1), rng.uniform(0, 1));
    if (brute_dist_to_balls(s, net, p) <= 0.0) continue;
    ++compared;
    CHECK(proj(p) == doctest::Approx(whitney_oracle(s, net, u, p)).epsilon(1e-12));
  }
  CHECK(compared >= 40);
}

TEST_CASE("whitney is unavailable on the koranyi instance") {
  Space s = koranyi_box();
  Net net = make_net(s, 0.6, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 2);
  CHECK_THROWS_AS(WhitneyProjector(s, g, net, u), UsageError);
}

TEST_CASE("path projection consistency on the koranyi instance") {
  Space s = koranyi_box();
  Net net = make_net(s, 0.6, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 2);
  ProjectionVerifyOptions opt;
  opt.quad_n = 4;
  opt.probes = 50;
  const auto rep = verify_projection(s, g, net, u, ProjectionKind::path_integral, opt);
  CHECK(rep.applicable);
  CHECK(rep.consistency_ok);
}

TEST_CASE("verify_projection full checks on euclidean instances") {
  for (Space s : {unit_interval(), unit_square()}) {
    const double r = s.ambient_dim == 1 ? 0.01 : 0.02;
    Net net = make_net(s, r, 1);
    Graph g = build_graph(s, net);
    REQUIRE(net.interior_count() > 0);
    for (auto kind : {ProjectionKind::whitney, ProjectionKind::path_integral}) {
      ProjectionVerifyOptions opt;
      opt.quad_n = 4;
      opt.probes = 500;
      // compactly supported field: boundary vanishing applies
      const auto rep = verify_projection(s, g, net, compact_field(net, 3), kind, opt);
      CHECK(rep.applicable);
      CHECK(rep.consistency_ok);
      CHECK(rep.boundary_applicable);
      CHECK(rep.boundary_ok);
      CHECK(rep.domination_applicable);
      CHECK(std::isfinite(rep.domination_ratio));
      if (kind == ProjectionKind::whitney) CHECK(rep.domination_ratio < 1e3);
    }
  }
}

TEST_CASE("upper-gradient surrogate along sampled curves (path kind)") {
  Space s = unit_interval();
  Net net = make_net(s, 0.04, 1);
  Graph g = build_graph(s, net);
  DiscreteField u = random_field(net, 21);
  ProjectionVerifyOptions opt;
  opt.quad_n = 2;
  opt.probes = 50;
  opt.extended = true;
  opt.curve_pairs = 40;
  const auto rep = verify_projection(s, g, net, u, ProjectionKind::path_integral, opt);
  CHECK(rep.curve_pairs == 40);
  CHECK(rep.curve_violations == 0);
}

TEST_CASE("lipschitz probe stays bounded") {
  Space s = unit_square();
  Net net = make_net(s, 0.03, 1);
  Graph g = build_graph(s, net);
  // linear field
  Vec lin(net.size());
  for (int i = 0; i < net.size(); ++i) lin[i] = net.vertices[i][0];
  auto rep = lipschitz_probe(s, g, net, make_field(net, lin), 400, 5);
  CHECK(rep.ok);
  CHECK(rep.max_ratio < 200.0);
  // adversarial alternating field
  Rng rng(6);
  Vec alt(net.size());
  for (int i = 0; i < net.size(); ++i) alt[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  rep = lipschitz_probe(s, g, net, make_field(net, alt), 400, 5);
  CHECK(rep.ok);
  // constant field: zero numerators, no flags
  rep = lipschitz_probe(s, g, net, make_field(net, Vec::Constant(net.size(), 2.0)), 100, 5);
  CHECK(rep.flagged == 0);
  CHECK(rep.max_ratio == 0.0);
}

TEST_CASE("fd_gradient_energy recovers analytic energies") {
  Space s = unit_interval();
  // u(x) = x has upper-gradient energy 1
  const double e1 = fd_gradient_energy(s, [](const Point& p) { return p[0]; }, 1e-3);
  CHECK(e1 == doctest::Approx(1.0).epsilon(1e-3));
  Space q = unit_square();
  // u = x^2 - y^2: integral of 4(x^2 + y^2) over the unit square = 8/3
  const double e2 = fd_gradient_energy(
      q, [](const Point& p) { return p[0] * p[0] - p[1] * p[1]; }, 2e-3);
  CHECK(e2 == doctest::Approx(8.0 / 3.0).epsilon(5e-3));
}

TEST_CASE("fd_gradient_energy_fields matches the single-field path") {
  Space s = unit_square();
  Net net = make_net(s, 0.05, 1);
  Graph g = build_graph(s, net);
  DiscreteField u1 = random_field(net, 31);
  DiscreteField u2 = random_field(net, 32);
  WhitneyProjector proj(s, g, net, u1);
  const std::vector<const Vec*> fields = {&u1.values, &u2.values};
  const auto multi = fd_gradient_energy_fields(s, proj, fields, net.r / 8.0);
  REQUIRE(multi.size() == 2);
  const double single1 =
      fd_gradient_energy(s, [&](const Point& p) { return proj(p); }, net.r / 8.0);
  CHECK(multi[0] == doctest::Approx(single1).epsilon(1e-9));
  WhitneyProjector proj2(s, g, net, u2);
  const double single2 =
      fd_gradient_energy(s, [&](const Point& p) { return proj2(p); }, net.r / 8.0);
  CHECK(multi[1] == doctest::Approx(single2).epsilon(1e-9));
}
