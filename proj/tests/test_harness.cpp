#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "harmonet/harness.hpp"

#include <cmath>

using namespace harmonet;

namespace {

Space interval_3(double a = 1.0, double b = 2.0) {
  Space s;
  s.ambient_dim = 1;
  s.bounds.lo = Vec::Constant(1, 0.0);
  s.bounds.hi = Vec::Constant(1, 3.0);
  s.domain_kind = DomainKind::interval;
  s.domain_params = Vec(2);
  s.domain_params << a, b;
  s.reference = [](const Point& p) { return p[0]; };
  s.reference_name = "coordinate:0";
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

TEST_CASE("zero boundary data produces an all-zero sweep") {
  Space s = interval_3();
  s.reference = nullptr;
  s.reference_name = "none";
  HarnessOptions opt;
  opt.quad_n = 8;
  opt.probes = 100;
  opt.full_diagnostics = false;
  ExperimentReport rep =
      run_convergence(s, [](const Point&) { return 0.0; }, {0.02, 0.01}, opt);
  REQUIRE(rep.records.size() == 2);
  for (const auto& rec : rep.records) {
    CHECK_FALSE(rec.failed);
    CHECK(rec.energy_total == 0.0);
    CHECK(rec.energy_f_alone == 0.0);
    CHECK(rec.energy_chain_ok);
  }
}

TEST_CASE("1D sweep with linear data tracks the classical solution") {
  Space s = interval_3();
  HarnessOptions opt;
  opt.quad_n = 16;
  opt.probes = 200;
  opt.f_grad_energy = 3.0;  // integral of 1 over [0, 3]
  ExperimentReport rep = run_convergence(
      s, [](const Point& p) { return p[0]; }, {0.02, 0.01, 0.005}, opt,
      s.reference);
  REQUIRE(rep.records.size() == 3);
  for (const auto& rec : rep.records) {
    REQUIRE_FALSE(rec.failed);
    CHECK(rec.solve_status == "converged");
    CHECK(rec.energy_chain_ok);
    CHECK(rec.connectivity_anchored);
    // comparability ratio of E_r(0) to the analytic gradient energy
    CHECK(rec.comparability_ratio > 1e-3);
    CHECK(rec.comparability_ratio < 1e3);
    for (int k = 0; k < 2; ++k) {
      REQUIRE(rec.proj[k].available);
      CHECK(rec.proj[k].consistency_ok);
      CHECK(rec.proj[k].boundary_ok);
      CHECK(std::isfinite(rec.proj[k].l2_error));
      // the linear function is harmonic; errors stay small at desk scale
      CHECK(rec.proj[k].l2_error < 0.5);
    }
    CHECK(rec.mazya_cm > 0.0);
    CHECK(std::isfinite(rec.mazya_cm));
  }
  CHECK(rep.minimizer_bound_ok);
  CHECK(rep.doubling_constant > 1.0);
  CHECK(rep.doubling_constant < 100.0);
}

TEST_CASE("per-rung failures are recorded without aborting the sweep") {
  Space s = interval_3();
  HarnessOptions opt;
  opt.quad_n = 4;
  opt.full_diagnostics = false;
  // the second rung exceeds the diameter and must fail in isolation
  ExperimentReport rep = run_convergence(
      s, [](const Point& p) { return p[0]; }, {5.0, 0.02}, opt, s.reference);
  REQUIRE(rep.records.size() == 2);
  CHECK(rep.records[0].failed);
  CHECK_FALSE(rep.records[1].failed);
}

TEST_CASE("reports are bit-identical across runs modulo timings") {
  Space s = interval_3();
  HarnessOptions opt;
  opt.quad_n = 8;
  opt.probes = 100;
  ExperimentReport a = run_convergence(
      s, [](const Point& p) { return p[0]; }, {0.02, 0.01}, opt, s.reference);
  ExperimentReport b = run_convergence(
      s, [](const Point& p) { return p[0]; }, {0.02, 0.01}, opt, s.reference);
  CHECK(report_to_json(a, false) == report_to_json(b, false));
  CHECK(report_to_csv(a) == report_to_csv(b));
}

TEST_CASE("parallel rungs reproduce the sequential report") {
  Space s = interval_3();
  HarnessOptions opt;
  opt.quad_n = 8;
  opt.probes = 100;
  opt.full_diagnostics = false;
  ExperimentReport seq = run_convergence(
      s, [](const Point& p) { return p[0]; }, {0.02, 0.01}, opt, s.reference);
  opt.workers = 2;
  ExperimentReport par = run_convergence(
      s, [](const Point& p) { return p[0]; }, {0.02, 0.01}, opt, s.reference);
  CHECK(report_to_json(seq, false) == report_to_json(par, false));
}

TEST_CASE("ladder validation") {
  Space s = interval_3();
  HarnessOptions opt;
  CHECK_THROWS_AS(run_convergence(s, [](const Point&) { return 0.0; }, {}, opt), UsageError);
  CHECK_THROWS_AS(
      run_convergence(s, [](const Point&) { return 0.0; }, {0.01, 0.02}, opt), UsageError);
}

TEST_CASE("verify suite passes on the 1D instance") {
  Space s = interval_3();
  VerifyOptions opt;
  opt.metric_triples = 2000;
  opt.net_probes = 2000;
  opt.random_fields = 6;
  const VerifyOutcome out = verify_suite(s, opt);
  for (const auto& c : out.checks) {
    INFO(c.name, ": ", c.detail);
    if (c.hard && !c.skipped) CHECK(c.passed);
  }
  CHECK(out.hard_failures() == 0);
}

TEST_CASE("verify suite passes on a density square") {
  Space s = unit_square();
  s.measure_kind = MeasureKind::density;
  s.density_name = "cosine";
  s.density = [](const Point& p) {
    return 1.0 + 0.5 * std::cos(M_PI * p[0]) * std::cos(M_PI * p[1]);
  };
  VerifyOptions opt;
  opt.metric_triples = 1000;
  opt.net_probes = 1000;
  opt.random_fields = 4;
  opt.r = 0.03;
  const VerifyOutcome out = verify_suite(s, opt);
  for (const auto& c : out.checks) {
    INFO(c.name, ": ", c.detail);
    if (c.hard && !c.skipped) CHECK(c.passed);
  }
  CHECK(out.hard_failures() == 0);
}

TEST_CASE("fault injection: corrupted weights are caught") {
  Space s = interval_3();
  VerifyOptions opt;
  opt.metric_triples = 500;
  opt.net_probes = 500;
  opt.random_fields = 2;
  opt.tamper = [](Net& net) { net.weights[net.size() / 2] = -1.0; };
  const VerifyOutcome out = verify_suite(s, opt);
  bool weight_check_failed = false;
  for (const auto& c : out.checks)
    if (c.name == "weight-positivity" && !c.passed) weight_check_failed = true;
  CHECK(weight_check_failed);
  CHECK(out.hard_failures() >= 1);
}

TEST_CASE("doubling constant estimate") {
  Space s = interval_3();
  const double cd = empirical_doubling_constant(s, 4, 4, 9);
  // Lebesgue on the line doubles balls by exactly 2 away from the boundary
  CHECK(cd >= 2.0 - 1e-9);
  CHECK(cd < 10.0);
}
