#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmonet/net.hpp"

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

Space koranyi_box() {
  Space s;
  s.ambient_dim = 3;
  s.metric_kind = MetricKind::koranyi;
  s.bounds.lo = Vec(3);
  s.bounds.lo << -1, -1, -0.5;
  s.bounds.hi = Vec(3);
  s.bounds.hi << 1, 1, 0.5;
  s.domain_kind = DomainKind::disk;
  s.domain_params = Vec(4);
  s.domain_params << 0, 0, 0, 0.55;
  return s;
}

}  // namespace

TEST_CASE("greedy 1D net at r = 0.3") {
  // hand-run of the candidate stream {0, 0.15, 0.3, ..., 0.9, 1.0}:
  // 1.0 is rejected because it sits 0.1 < r from the accepted 0.9
  Space s = unit_interval();
  Net net = build_net(s, 0.3, 1);
  REQUIRE(net.size() == 4);
  const double expected[4] = {0.0, 0.3, 0.6, 0.9};
  for (int i = 0; i < 4; ++i)
    CHECK(net.vertices[i][0] == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("r above the diameter is rejected") {
  Space s = unit_interval();
  CHECK_THROWS_AS(build_net(s, 2.0, 1), UsageError);
  CHECK_THROWS_AS(build_net(s, -0.5, 1), UsageError);
}

TEST_CASE("separation and covering certificates") {
  for (double r : {0.05, 0.02}) {
    Space s = unit_square();
    Net net = build_net(s, r, 1);
    const auto cert = certify_net(s, net, 10000, 424242);
    CHECK(cert.separation_ok);
    CHECK(cert.covering_ok);
    CHECK(cert.min_pair_distance >= r * (1.0 - 1e-12));
    CHECK(cert.max_probe_distance < r);
  }
}

TEST_CASE("separation and covering on the koranyi instance") {
  Space s = koranyi_box();
  Net net = build_net(s, 0.45, 1);
  CHECK(net.size() > 10);
  const auto cert = certify_net(s, net, 4000, 7);
  CHECK(cert.separation_ok);
  CHECK(cert.covering_ok);
}

TEST_CASE("determinism of construction") {
  Space s = unit_square();
  Net a = build_net(s, 0.03, 5);
  Net b = build_net(s, 0.03, 5);
  REQUIRE(a.size() == b.size());
  CHECK(a.uid == b.uid);
  for (int i = 0; i < a.size(); ++i)
    CHECK((a.vertices[i] - b.vertices[i]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random tail candidates still respect separation") {
  Space s = unit_square();
  Net net = build_net(s, 0.07, 99, 500);
  const auto cert = certify_net(s, net, 5000, 3);
  CHECK(cert.separation_ok);
  CHECK(cert.covering_ok);
}

TEST_CASE("weights are clipped ball masses") {
  Space s = unit_interval();
  Net net = build_net(s, 0.4, 1);  // vertices {0, 0.4, 0.8}
  assign_weights(s, net);
  REQUIRE(net.size() == 3);
  CHECK(net.weights[0] == doctest::Approx(0.1).epsilon(1e-13));   // clipped at 0
  CHECK(net.weights[1] == doctest::Approx(0.2).epsilon(1e-13));   // interior
  CHECK(net.weights.minCoeff() > 0.0);
}

TEST_CASE("2D interior weight is the r/4 disk area") {
  Space s = unit_square();
  Net net = build_net(s, 0.2, 1);
  assign_weights(s, net);
  int found = 0;
  for (int i = 0; i < net.size(); ++i) {
    const Point& v = net.vertices[i];
    if (v[0] > 0.2 && v[0] < 0.8 && v[1] > 0.2 && v[1] < 0.8) {
      CHECK(net.weights[i] == doctest::Approx(M_PI * 0.05 * 0.05).epsilon(1e-12));
      ++found;
    }
  }
  CHECK(found > 0);
}

TEST_CASE("interior mask follows the margin rule") {
  Space s = unit_interval();
  Net net = build_net(s, 0.01, 1);
  assign_weights(s, net);
  const int count = discretize_domain(s, net, 20.0);
  CHECK(count > 0);
  for (int i = 0; i < net.size(); ++i) {
    const bool expect = domain_margin(s, net.vertices[i]) >= 20.0 * net.r;
    CHECK(static_cast<bool>(net.interior[i]) == expect);
  }
  // the margin rule: vertex at 0.5 has margin 0.3 >= 0.2; at 0.35 margin 0.15 < 0.2
  int idx_mid = nearest_vertex(s, net, pt(0.5), nullptr);
  CHECK(net.interior[idx_mid]);
}

TEST_CASE("coarse r empties the discrete interior") {
  // margin_factor * r = 20 * 0.03 = 0.6 exceeds the maximal margin 0.3
  Space s = unit_interval();
  Net net = build_net(s, 0.03, 1);
  assign_weights(s, net);
  CHECK(discretize_domain(s, net, 20.0) == 0);
  // a configurable margin factor restores interior vertices
  CHECK(discretize_domain(s, net, 5.0) > 0);
}

TEST_CASE("vertex count scales like r^{-dim}") {
  Space s = unit_square();
  const int n1 = build_net(s, 0.08, 1).size();
  const int n2 = build_net(s, 0.04, 1).size();
  const double ratio = static_cast<double>(n2) / n1;
  CHECK(ratio > 4.0 / 8.0);
  CHECK(ratio < 4.0 * 8.0);
}

TEST_CASE("nearest_vertex ties break to the lowest id") {
  Space s = unit_interval();
  Net net = build_net(s, 0.3, 1);  // {0, 0.3, 0.6, 0.9}
  // 0.45 is equidistant from 0.3 (id 1) and 0.6 (id 2)
  double d = 0.0;
  const int id = nearest_vertex(s, net, pt(0.45), &d);
  CHECK(id == 1);
  CHECK(d == doctest::Approx(0.15).epsilon(1e-12));
}
