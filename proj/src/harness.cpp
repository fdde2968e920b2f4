#include "harmonet/harness.hpp"

#include "harmonet/io.hpp"

#include <Eigen/Cholesky>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <future>
#include <sstream>

namespace harmonet {

namespace {

double ms_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<Point> probe_grid(const Space& s, double pitch, std::int64_t max_points = 2'000'000) {
  const int d = s.ambient_dim;
  for (;;) {
    std::int64_t total = 1;
    std::vector<int> counts(d);
    for (int a = 0; a < d; ++a) {
      counts[a] = static_cast<int>(std::floor((s.bounds.hi[a] - s.bounds.lo[a]) / pitch)) + 1;
      total *= counts[a];
    }
    if (total > max_points) {
      pitch *= 1.5;
      continue;
    }
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(total));
    std::vector<int> cur(d, 0);
    Point p(d);
    for (std::int64_t k = 0; k < total; ++k) {
      for (int a = 0; a < d; ++a) p[a] = s.bounds.lo[a] + cur[a] * pitch;
      out.push_back(p);
      for (int a = 0; a < d; ++a) {
        if (++cur[a] < counts[a]) break;
        cur[a] = 0;
      }
    }
    return out;
  }
}

// Evaluates `eval` at all probes, chunked over `workers` threads. Output
// ordering is positional, so the result is scheduling-independent.
std::vector<double> evaluate_probes(const std::vector<Point>& probes,
                                    const std::function<double(const Point&)>& eval,
                                    int workers) {
  std::vector<double> values(probes.size());
  if (workers <= 1 || probes.size() < 1024) {
    for (std::size_t i = 0; i < probes.size(); ++i) values[i] = eval(probes[i]);
    return values;
  }
  const std::size_t chunk = (probes.size() + workers - 1) / workers;
  std::vector<std::future<void>> futs;
  for (int w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk;
    const std::size_t e = std::min(probes.size(), b + chunk);
    if (b >= e) break;
    futs.push_back(std::async(std::launch::async, [&, b, e] {
      for (std::size_t i = b; i < e; ++i) values[i] = eval(probes[i]);
    }));
  }
  for (auto& f : futs) f.get();
  return values;
}

}  // namespace

double empirical_doubling_constant(const Space& s, int centers, int radii, std::uint64_t seed) {
  Rng rng(seed);
  double cd = 0.0;
  Point p(s.ambient_dim);
  const double rho_max = 0.25 * (s.bounds.hi - s.bounds.lo).minCoeff();
  for (int c = 0; c < centers; ++c) {
    for (int a = 0; a < s.ambient_dim; ++a) p[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
    for (int k = 0; k < radii; ++k) {
      const double rho = rho_max * std::pow(0.5, k);
      const double m1 = ball_measure(s, p, rho);
      const double m2 = ball_measure(s, p, 2.0 * rho);
      if (m1 > 0.0) cd = std::max(cd, m2 / m1);
    }
  }
  return cd;
}

ExperimentReport run_convergence(const Space& s, const ScalarField& f,
                                 const std::vector<double>& r_ladder, const HarnessOptions& opt,
                                 const ScalarField& reference) {
  if (r_ladder.empty()) throw UsageError("run_convergence: empty r ladder");
  for (std::size_t i = 1; i < r_ladder.size(); ++i)
    if (!(r_ladder[i] < r_ladder[i - 1]))
      throw UsageError("run_convergence: r ladder must be strictly decreasing");

  ExperimentReport rep;
  rep.space_hash = s.hash();
  rep.seed = opt.seed;
  rep.margin_factor = opt.margin_factor;
  rep.reference_name = s.reference_name;
  rep.probe_pitch = r_ladder.back() / 4.0;
  rep.doubling_constant = empirical_doubling_constant(s, 4, 5, opt.seed ^ 0xD0B);

  const std::vector<Point> probes = probe_grid(s, rep.probe_pitch);
  std::vector<double> probe_w(probes.size());
  {
    double cell = 1.0;
    for (int a = 0; a < s.ambient_dim; ++a) cell *= rep.probe_pitch;
    for (std::size_t i = 0; i < probes.size(); ++i)
      probe_w[i] =
          cell * (s.measure_kind == MeasureKind::density ? s.density(probes[i]) : 1.0);
  }
  std::vector<double> f_at(probes.size()), ref_at(probes.size(), 0.0);
  for (std::size_t i = 0; i < probes.size(); ++i) f_at[i] = f(probes[i]);
  const bool has_ref = static_cast<bool>(reference);
  if (has_ref)
    for (std::size_t i = 0; i < probes.size(); ++i) ref_at[i] = reference(probes[i]);

  auto run_rung = [&](double r) -> RungRecord {
    RungRecord rec;
    rec.r = r;
    try {
      auto t0 = std::chrono::steady_clock::now();
      Net net = make_net(s, r, opt.seed, opt.margin_factor);
      rec.timing.net_ms = ms_since(t0);
      rec.vertex_count = net.size();
      rec.interior_count = net.interior_count();

      t0 = std::chrono::steady_clock::now();
      Graph g = build_graph(s, net);
      rec.timing.graph_ms = ms_since(t0);
      rec.edge_count = g.edge_count;
      rec.max_degree = g.max_degree;

      t0 = std::chrono::steady_clock::now();
      DiscreteField f_r = discretize_function(s, net, f, opt.quad_n, opt.seed);
      QuadraticForm form = assemble_form(g, net, f_r);
      rec.timing.assemble_ms = ms_since(t0);

      rec.connectivity_anchored = connectivity_check(g, net).all_anchored;

      t0 = std::chrono::steady_clock::now();
      SolveResult sol = solve(form, net, opt.solver_tol, opt.solver_max_iter);
      rec.timing.solve_ms = ms_since(t0);
      rec.solve_iterations = sol.iterations;
      rec.solve_status = to_string(sol.status);
      rec.relative_residual = sol.relative_residual;
      rec.energy_total = sol.energy_value;
      rec.energy_zero = form.c0;
      rec.energy_f_alone = form.c0;
      rec.energy_u_alone = graph_energy(g, net, sol.minimizer);
      rec.energy_chain_ok = sol.energy_value <= form.c0 + 1e-12 * (1.0 + std::abs(form.c0));
      if (opt.f_grad_energy && *opt.f_grad_energy > 0.0)
        rec.comparability_ratio = form.c0 / *opt.f_grad_energy;

      // Maz'ya surrogate on random compactly supported fields
      {
        Rng rng(opt.seed ^ 0x3A2);
        double cm = 0.0;
        for (int t = 0; t < 20 && form.unknowns() > 0; ++t) {
          Vec v(form.unknowns());
          for (int k = 0; k < v.size(); ++k) v[k] = 2.0 * rng.uniform() - 1.0;
          DiscreteField uf = extend_interior(form, net, v);
          const double e = graph_energy(g, net, uf);
          double l2 = 0.0;
          for (int k = 0; k < form.unknowns(); ++k)
            l2 += v[k] * v[k] * net.weights[form.interior_ids[k]];
          if (e > 0.0) cm = std::max(cm, l2 / e);
        }
        rec.mazya_cm = cm;
      }

      t0 = std::chrono::steady_clock::now();
      for (int kind_ix = 0; kind_ix < 2; ++kind_ix) {
        const auto kind = kind_ix == 0 ? ProjectionKind::whitney : ProjectionKind::path_integral;
        auto& stat = rec.proj[kind_ix];
        if (kind == ProjectionKind::whitney && s.metric_kind == MetricKind::koranyi) continue;
        stat.available = true;

        std::function<double(const Point&)> eval;
        std::unique_ptr<WhitneyProjector> wp;
        std::unique_ptr<PathIntegralProjector> pp;
        if (kind == ProjectionKind::whitney) {
          wp = std::make_unique<WhitneyProjector>(s, g, net, sol.minimizer, opt.cube_depth_cap);
          eval = [&w = *wp](const Point& p) { return w(p); };
        } else {
          pp = std::make_unique<PathIntegralProjector>(s, g, net, sol.minimizer,
                                                       r * opt.lattice_pitch_factor);
          eval = [&pj = *pp](const Point& p) { return pj(p); };
        }

        const std::vector<double> uk = evaluate_probes(probes, eval, opt.workers);
        std::vector<double> l2_terms(probes.size(), 0.0), l2_uk(probes.size(), 0.0);
        double sup = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
          l2_uk[i] = probe_w[i] * uk[i] * uk[i];
          if (has_ref) {
            const double diff = uk[i] + f_at[i] - ref_at[i];
            l2_terms[i] = probe_w[i] * diff * diff;
            sup = std::max(sup, std::abs(diff));
          }
        }
        if (has_ref) {
          stat.l2_error = std::sqrt(pairwise_sum(l2_terms));
          stat.sup_error = sup;
        }

        if (opt.full_diagnostics) {
          ProjectionVerifyOptions vopt;
          vopt.quad_n = 4;
          vopt.probes = opt.probes;
          vopt.seed = opt.seed ^ 0x77;
          vopt.fd_pitch_factor = opt.fd_pitch_factor;
          vopt.lattice_pitch_factor = opt.lattice_pitch_factor;
          vopt.depth_cap = opt.cube_depth_cap;
          const auto vrep = verify_projection(s, g, net, sol.minimizer, kind, vopt);
          stat.consistency_ok = vrep.consistency_ok;
          stat.boundary_ok = !vrep.boundary_applicable || vrep.boundary_ok;
          stat.domination_ratio = vrep.domination_ratio;
          stat.n12_surrogate =
              std::sqrt(pairwise_sum(l2_uk) + std::max(0.0, vrep.fd_grad_energy));
        } else {
          stat.n12_surrogate = std::sqrt(pairwise_sum(l2_uk));
        }
      }
      rec.timing.project_ms = ms_since(t0);
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
    return rec;
  };

  if (opt.workers > 1) {
    std::vector<std::future<RungRecord>> futs;
    for (double r : r_ladder)
      futs.push_back(std::async(std::launch::async, run_rung, r));
    for (auto& fu : futs) rep.records.push_back(fu.get());
  } else {
    for (double r : r_ladder) rep.records.push_back(run_rung(r));
  }

  // regression guard on the minimizer-norm surrogate
  for (int kind_ix = 0; kind_ix < 2; ++kind_ix) {
    double coarsest = -1.0;
    for (const auto& rec : rep.records) {
      if (rec.failed || !rec.proj[kind_ix].available) continue;
      if (coarsest < 0.0) {
        coarsest = rec.proj[kind_ix].n12_surrogate;
        continue;
      }
      if (coarsest > 0.0 && rec.proj[kind_ix].n12_surrogate > 10.0 * coarsest)
        rep.minimizer_bound_ok = false;
    }
  }
  return rep;
}

std::string report_to_json(const ExperimentReport& rep, bool include_timings) {
  nlohmann::ordered_json j;
  j["report_version"] = rep.report_version;
  j["space_hash"] = rep.space_hash;
  j["boundary"] = rep.boundary_name;
  j["reference"] = rep.reference_name;
  j["seed"] = rep.seed;
  j["margin_factor"] = rep.margin_factor;
  j["probe_pitch"] = rep.probe_pitch;
  j["doubling_constant"] = rep.doubling_constant;
  j["minimizer_bound_ok"] = rep.minimizer_bound_ok;
  j["records"] = nlohmann::ordered_json::array();
  for (const auto& rec : rep.records) {
    nlohmann::ordered_json r;
    r["r"] = rec.r;
    r["failed"] = rec.failed;
    if (rec.failed) r["error"] = rec.error;
    r["vertex_count"] = rec.vertex_count;
    r["interior_count"] = rec.interior_count;
    r["edge_count"] = rec.edge_count;
    r["max_degree"] = rec.max_degree;
    r["solve_iterations"] = rec.solve_iterations;
    r["solve_status"] = rec.solve_status;
    r["relative_residual"] = rec.relative_residual;
    r["energy_total"] = rec.energy_total;
    r["energy_zero"] = rec.energy_zero;
    r["energy_u_alone"] = rec.energy_u_alone;
    r["energy_f_alone"] = rec.energy_f_alone;
    r["energy_chain_ok"] = rec.energy_chain_ok;
    r["connectivity_anchored"] = rec.connectivity_anchored;
    r["comparability_ratio"] = rec.comparability_ratio;
    r["mazya_cm"] = rec.mazya_cm;
    for (int k = 0; k < 2; ++k) {
      nlohmann::ordered_json pj;
      const auto& st = rec.proj[k];
      pj["available"] = st.available;
      pj["l2_error"] = st.l2_error;
      pj["sup_error"] = st.sup_error;
      pj["consistency_ok"] = st.consistency_ok;
      pj["boundary_ok"] = st.boundary_ok;
      pj["domination_ratio"] = st.domination_ratio;
      pj["n12_surrogate"] = st.n12_surrogate;
      r[k == 0 ? "whitney" : "path_integral"] = pj;
    }
    if (include_timings) {
      nlohmann::ordered_json t;
      t["net_ms"] = rec.timing.net_ms;
      t["graph_ms"] = rec.timing.graph_ms;
      t["assemble_ms"] = rec.timing.assemble_ms;
      t["solve_ms"] = rec.timing.solve_ms;
      t["project_ms"] = rec.timing.project_ms;
      r["timings"] = t;
    }
    j["records"].push_back(r);
  }
  return j.dump(2) + "\n";
}

std::string report_to_csv(const ExperimentReport& rep) {
  std::ostringstream out;
  out << "r,vertex_count,interior_count,edge_count,max_degree,solve_iterations,solve_status,"
         "relative_residual,energy_total,energy_zero,energy_u_alone,energy_f_alone,"
         "energy_chain_ok,comparability_ratio,mazya_cm,"
         "whitney_l2,whitney_sup,whitney_domination,whitney_n12,"
         "path_l2,path_sup,path_domination,path_n12,failed\n";
  for (const auto& rec : rep.records) {
    out << format_double(rec.r) << ',' << rec.vertex_count << ',' << rec.interior_count << ','
        << rec.edge_count << ',' << rec.max_degree << ',' << rec.solve_iterations << ','
        << rec.solve_status << ',' << format_double(rec.relative_residual) << ','
        << format_double(rec.energy_total) << ',' << format_double(rec.energy_zero) << ','
        << format_double(rec.energy_u_alone) << ',' << format_double(rec.energy_f_alone) << ','
        << (rec.energy_chain_ok ? 1 : 0) << ',' << format_double(rec.comparability_ratio) << ','
        << format_double(rec.mazya_cm) << ',';
    for (int k = 0; k < 2; ++k) {
      const auto& st = rec.proj[k];
      out << format_double(st.l2_error) << ',' << format_double(st.sup_error) << ','
          << format_double(st.domination_ratio) << ',' << format_double(st.n12_surrogate) << ',';
    }
    out << (rec.failed ? 1 : 0) << '\n';
  }
  return out.str();
}

// --- verify suite ---------------------------------------------------------------

namespace {

void add_check(VerifyOutcome& out, const std::string& name, bool hard, bool passed,
               const std::string& detail, bool skipped = false) {
  out.checks.push_back({name, hard, passed, skipped, detail});
}

Point random_point(const Space& s, Rng& rng) {
  Point p(s.ambient_dim);
  for (int a = 0; a < s.ambient_dim; ++a) p[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
  return p;
}

}  // namespace

VerifyOutcome verify_suite(const Space& s, const VerifyOptions& opt) {
  VerifyOutcome out;
  std::ostringstream detail;
  Rng rng(opt.seed);

  // metric axioms
  {
    bool sym = true, tri = true;
    double worst_tri = 0.0;
    for (int t = 0; t < opt.metric_triples; ++t) {
      const Point p = random_point(s, rng), q = random_point(s, rng), w = random_point(s, rng);
      const double dpq = distance(s, p, q);
      if (dpq != distance(s, q, p)) sym = false;
      const double slack = dpq - (distance(s, p, w) + distance(s, w, q));
      worst_tri = std::max(worst_tri, slack);
      if (slack > 1e-12) tri = false;
    }
    add_check(out, "metric-symmetry", true, sym, sym ? "exact on all triples" : "violated");
    detail.str("");
    detail << "max slack " << worst_tri;
    add_check(out, "metric-triangle", true, tri, detail.str());
  }

  // ball measure monotonicity and doubling
  {
    bool mono = true;
    const double slack = s.measure_kind == MeasureKind::lebesgue &&
                                 s.metric_kind != MetricKind::koranyi
                             ? 0.0
                             : 4.0 * s.mc_rel_tol;
    for (int t = 0; t < 24; ++t) {
      const Point c = random_point(s, rng);
      const double r1 = 0.02 + 0.1 * rng.uniform();
      const double r2 = r1 * (1.0 + rng.uniform());
      const double m1 = ball_measure(s, c, r1);
      const double m2 = ball_measure(s, c, r2);
      if (m1 > m2 * (1.0 + slack)) mono = false;
    }
    add_check(out, "ball-measure-monotonicity", true, mono, "sampled radii pairs");

    const double cd = empirical_doubling_constant(s, 4, 5, opt.seed ^ 0xD0B);
    detail.str("");
    detail << "C_D = " << cd;
    add_check(out, "empirical-doubling", false, std::isfinite(cd) && cd > 0.0, detail.str());
  }

  // Monte Carlo determinism
  {
    const Point c = random_point(s, rng);
    const double m1 = ball_measure(s, c, 0.05);
    const double m2 = ball_measure(s, c, 0.05);
    add_check(out, "measure-determinism", true, m1 == m2, "repeated call bit-identical");
  }

  double r = opt.r;
  if (!(r > 0.0)) {
    // desk-scale default: a rung with a nonempty interior when possible
    double max_margin = 0.0;
    for (int t = 0; t < 4096; ++t)
      max_margin = std::max(max_margin, domain_margin(s, random_point(s, rng)));
    r = max_margin > 0.0 ? 0.8 * max_margin / opt.margin_factor
                         : 0.05 * s.diameter_estimate();
    // the gauge lattice refines quadratically along t, so keep koranyi coarse
    if (s.metric_kind == MetricKind::koranyi) r = std::max(r, 0.6);
  }

  Net net = make_net(s, r, opt.seed, opt.margin_factor);
  if (opt.tamper) opt.tamper(net);
  Graph g = build_graph(s, net);

  {
    const auto cert = certify_net(s, net, opt.net_probes, opt.seed ^ 0xC0);
    detail.str("");
    detail << "min pair distance " << cert.min_pair_distance << " at r = " << r;
    add_check(out, "net-separation", true, cert.separation_ok, detail.str());
    detail.str("");
    detail << "max probe distance " << cert.max_probe_distance << " vs r = " << r;
    add_check(out, "net-covering", true, cert.covering_ok, detail.str());
  }

  {
    Net net2 = make_net(s, r, opt.seed, opt.margin_factor);
    bool same = net2.size() == net.size() && net2.uid == net.uid;
    for (int i = 0; same && i < net.size(); ++i)
      if ((net.vertices[i] - net2.vertices[i]).cwiseAbs().maxCoeff() != 0.0) same = false;
    add_check(out, "net-determinism", true, same, "rebuild is bit-identical");
  }

  {
    bool positive = net.weights.minCoeff() > 0.0;
    detail.str("");
    detail << "min weight " << net.weights.minCoeff();
    add_check(out, "weight-positivity", true, positive, detail.str());
  }

  // adjacency oracle on small nets
  if (net.size() <= 2000) {
    bool same = true;
    for (int i = 0; i < net.size() && same; ++i) {
      std::vector<int> brute;
      for (int j = 0; j < net.size(); ++j)
        if (j != i && distance(s, net.vertices[i], net.vertices[j]) <= 3.0 * net.r)
          brute.push_back(j);
      if (brute != g.adjacency[i]) same = false;
    }
    add_check(out, "graph-adjacency-oracle", true, same, "matches O(n^2) rebuild");
  } else {
    add_check(out, "graph-adjacency-oracle", true, true, "skipped: net above oracle size", true);
  }

  {
    double cap = opt.degree_cap;
    if (cap <= 0.0) cap = s.ambient_dim == 1 ? 16 : s.ambient_dim == 2 ? 64 : 1024;
    detail.str("");
    detail << "max degree " << g.max_degree << " vs cap " << cap;
    add_check(out, "graph-degree-cap", true, g.max_degree <= cap, detail.str());
  }

  // graph energy algebra on random fields
  {
    Rng frng(opt.seed ^ 0xE1);
    Vec a(net.size()), b(net.size());
    for (int i = 0; i < net.size(); ++i) {
      a[i] = 2.0 * frng.uniform() - 1.0;
      b[i] = 2.0 * frng.uniform() - 1.0;
    }
    DiscreteField ua = make_field(net, a), ub = make_field(net, b);
    DiscreteField uab = make_field(net, a + b);
    DiscreteField u3 = make_field(net, 3.0 * a);
    const double ea = graph_energy(g, net, ua), eb = graph_energy(g, net, ub);
    const double eab = graph_energy(g, net, uab), e3 = graph_energy(g, net, u3);
    const bool scaling = std::abs(e3 - 9.0 * ea) <= 1e-12 * (1.0 + std::abs(e3));
    const bool triangle = std::sqrt(eab) <= std::sqrt(ea) + std::sqrt(eb) + 1e-10;
    add_check(out, "energy-scaling", true, scaling, "E(3u) = 9 E(u)");
    add_check(out, "energy-triangle", true, triangle, "seminorm triangle inequality");
  }

  // quadratic form checks against direct energies
  DiscreteField f_r = discretize_function(
      s, net, [](const Point& p) { return p[0]; }, opt.quad_n, opt.seed);
  QuadraticForm form = assemble_form(g, net, f_r);
  {
    bool sym = true;
    Eigen::SparseMatrix<double> at = form.A.transpose();
    if ((at - form.A).squaredNorm() != 0.0) sym = false;
    add_check(out, "form-symmetry", true, sym, "A equals its transpose exactly");

    Rng vrng(opt.seed ^ 0xF2);
    bool equiv = true, psd = true;
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      Vec v(form.unknowns());
      for (int k = 0; k < v.size(); ++k) v[k] = 2.0 * vrng.uniform() - 1.0;
      const double direct =
          graph_energy(g, net, make_field(net, extend_interior(form, net, v).values + f_r.values));
      const double via_form = evaluate_form(form, v);
      const double err = std::abs(direct - via_form) / (1.0 + std::abs(direct));
      worst = std::max(worst, err);
      if (err > 1e-10) equiv = false;
      if (form.unknowns() > 0 && v.dot(form.A * v) < -1e-12 * v.squaredNorm()) psd = false;
    }
    detail.str("");
    detail << "max relative error " << worst;
    add_check(out, "form-direct-equivalence", true, equiv, detail.str());
    add_check(out, "form-psd", true, psd, "v^T A v >= -1e-12 |v|^2");

    // analytic gradient vs central differences
    bool grad_ok = true;
    if (form.unknowns() > 0) {
      Rng grng(opt.seed ^ 0xF3);
      for (int t = 0; t < 10; ++t) {
        Vec v(form.unknowns());
        for (int k = 0; k < v.size(); ++k) v[k] = 2.0 * grng.uniform() - 1.0;
        const Vec grad = 2.0 * (form.A * v) + form.b;
        const int k = static_cast<int>(grng.index(form.unknowns()));
        const double h = 1e-6 * (1.0 + std::abs(v[k]));
        Vec vp = v, vm = v;
        vp[k] += h;
        vm[k] -= h;
        const double fd = (evaluate_form(form, vp) - evaluate_form(form, vm)) / (2.0 * h);
        if (std::abs(fd - grad[k]) > 1e-6 * (1.0 + std::abs(grad[k]))) grad_ok = false;
      }
    }
    add_check(out, "form-gradient-fd", true, grad_ok, "2Av + b matches central differences");
  }

  const auto conn = connectivity_check(g, net);
  detail.str("");
  detail << conn.component_count << " interior components";
  add_check(out, "connectivity-anchored", false, conn.all_anchored, detail.str());

  SolveResult sol = solve(form, net, 1e-10, 0);
  {
    add_check(out, "solve-converged", true,
              sol.status == SolveStatus::converged || form.unknowns() == 0,
              std::string("status ") + to_string(sol.status));

    bool mono = true;
    for (std::size_t i = 1; i < sol.energy_trace.size(); ++i)
      if (sol.energy_trace[i] > sol.energy_trace[i - 1] + 1e-12 * (1.0 + std::abs(sol.energy_trace[i - 1])))
        mono = false;
    add_check(out, "solve-energy-monotone", true, mono, "E nonincreasing along CG iterates");

    const bool chain =
        sol.energy_value <= form.c0 + 1e-12 * (1.0 + std::abs(form.c0));
    add_check(out, "solve-energy-chain", true, chain, "E(u) <= E(0)");

    if (form.unknowns() > 0 && form.unknowns() <= 500) {
      Eigen::MatrixXd dense = Eigen::MatrixXd(form.A) * 2.0;
      const Vec x = dense.ldlt().solve(-form.b);
      const double rel = (x - sol.interior).norm() / (1.0 + x.norm());
      detail.str("");
      detail << "CG vs dense relative error " << rel;
      add_check(out, "solve-dense-oracle", true, rel <= 1e-8, detail.str());
    } else {
      add_check(out, "solve-dense-oracle", true, true, "skipped: > 500 unknowns", true);
    }

    const auto optrep = optimality_check(form, sol, 100, opt.seed ^ 0xAB);
    detail.str("");
    detail << optrep.failures << "/" << optrep.trials
           << " failures, stationarity " << optrep.stationarity_residual;
    add_check(out, "solve-optimality", true, optrep.ok, detail.str());

    // zero boundary data forces the zero minimizer
    DiscreteField zf = zero_field(net);
    QuadraticForm zform = assemble_form(g, net, zf);
    SolveResult zsol = solve(zform, net, 1e-10, 0);
    add_check(out, "solve-zero-data", true,
              zsol.interior.size() == 0 || zsol.interior.cwiseAbs().maxCoeff() == 0.0,
              "f = 0 gives u = 0");
  }

  {
    const auto crep = coercivity_report(form, g, net, f_r, 50, opt.seed ^ 0xCC);
    add_check(out, "coercivity-chain", true, crep.all_ok, "reverse-triangle lower bound");
  }

  // projections
  for (int kind_ix = 0; kind_ix < 2; ++kind_ix) {
    const auto kind = kind_ix == 0 ? ProjectionKind::whitney : ProjectionKind::path_integral;
    const std::string prefix = std::string(to_string(kind)) + "-";
    if (kind == ProjectionKind::whitney && s.metric_kind == MetricKind::koranyi) {
      add_check(out, prefix + "suite", true, true, "skipped on the koranyi instance", true);
      continue;
    }
    Rng frng(opt.seed ^ (0x91 + kind_ix));
    bool consistency = true, boundary = true;
    double worst_cons = 0.0, worst_dom = 0.0;
    for (int t = 0; t < std::min(4, opt.random_fields); ++t) {
      Vec v(net.size());
      for (int i = 0; i < net.size(); ++i) v[i] = 2.0 * frng.uniform() - 1.0;
      if (t % 2 == 1)  // alternate: compactly supported fields exercise (c)
        for (int i = 0; i < net.size(); ++i)
          if (!net.interior[i]) v[i] = 0.0;
      DiscreteField u = make_field(net, v);
      ProjectionVerifyOptions vopt;
      vopt.quad_n = 4;
      vopt.probes = opt.net_probes / 10;
      vopt.seed = opt.seed ^ (0x800 + t);
      const auto vrep = verify_projection(s, g, net, u, kind, vopt);
      consistency = consistency && vrep.consistency_ok;
      worst_cons = std::max(worst_cons, vrep.consistency_max_err);
      if (vrep.boundary_applicable) boundary = boundary && vrep.boundary_ok;
      if (vrep.domination_applicable) worst_dom = std::max(worst_dom, vrep.domination_ratio);
    }
    detail.str("");
    detail << "max ball-average error " << worst_cons;
    add_check(out, prefix + "consistency", true, consistency, detail.str());
    add_check(out, prefix + "boundary-vanishing", true, boundary, "exterior probes exactly zero");
    if (s.metric_kind != MetricKind::koranyi) {
      detail.str("");
      detail << "max ratio " << worst_dom;
      add_check(out, prefix + "gradient-domination", true, worst_dom <= 1e3, detail.str());
    }
  }

  // path-integral lattice self-convergence; pitch halving is quadratic along
  // the gauge t-axis, so this stays on euclidean charts
  if (s.metric_kind != MetricKind::koranyi && net.size() <= 4000) {
    Rng frng(opt.seed ^ 0xAA1);
    Vec v(net.size());
    for (int i = 0; i < net.size(); ++i) v[i] = 2.0 * frng.uniform() - 1.0;
    DiscreteField u = make_field(net, v);
    PathIntegralProjector p1(s, g, net, u, net.r / 8.0);
    PathIntegralProjector p2(s, g, net, u, net.r / 16.0);
    PathIntegralProjector p3(s, g, net, u, net.r / 32.0);
    const double scale = v.cwiseAbs().maxCoeff();
    double d12 = 0.0, d23 = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Point p = random_point(s, rng);
      const double a = p1(p), b = p2(p), c = p3(p);
      d12 = std::max(d12, std::abs(b - a) / (scale + 1e-12));
      d23 = std::max(d23, std::abs(c - b) / (scale + 1e-12));
    }
    detail.str("");
    detail << "halving changes " << d12 << " then " << d23;
    add_check(out, "path-lattice-convergence", true, d12 <= 0.05 && d23 <= 0.025, detail.str());
  } else {
    add_check(out, "path-lattice-convergence", true, true, "skipped: net too large", true);
  }

  // Lipschitz probe (whitney construction)
  if (s.metric_kind != MetricKind::koranyi) {
    Rng frng(opt.seed ^ 0xAB2);
    Vec v(net.size());
    for (int i = 0; i < net.size(); ++i) v[i] = 2.0 * frng.uniform() - 1.0;
    const auto lrep =
        lipschitz_probe(s, g, net, make_field(net, v), opt.net_probes / 10, opt.seed ^ 0xAB3);
    detail.str("");
    detail << "max ratio " << lrep.max_ratio << " on " << lrep.used << " pairs";
    add_check(out, "whitney-lipschitz-probe", true, lrep.ok, detail.str());
  } else {
    add_check(out, "whitney-lipschitz-probe", true, true, "skipped on the koranyi instance", true);
  }

  // Maz'ya surrogate
  {
    Rng frng(opt.seed ^ 0xAD4);
    double cm = 0.0;
    bool finite = true;
    for (int t = 0; t < opt.random_fields && form.unknowns() > 0; ++t) {
      Vec v(form.unknowns());
      for (int k = 0; k < v.size(); ++k) v[k] = 2.0 * frng.uniform() - 1.0;
      DiscreteField uf = extend_interior(form, net, v);
      const double e = graph_energy(g, net, uf);
      double l2 = 0.0;
      for (int k = 0; k < form.unknowns(); ++k)
        l2 += v[k] * v[k] * net.weights[form.interior_ids[k]];
      if (e > 0.0)
        cm = std::max(cm, l2 / e);
      else if (l2 > 0.0)
        finite = false;
    }
    detail.str("");
    detail << "C_M = " << cm;
    add_check(out, "mazya-surrogate", false, finite, detail.str());
  }

  return out;
}

}  // namespace harmonet
