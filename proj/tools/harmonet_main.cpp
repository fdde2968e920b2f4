#include "harmonet/config.hpp"
#include "harmonet/harness.hpp"
#include "harmonet/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>

namespace {

using namespace harmonet;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed = 0;  // 0 = keep config value
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "configuration file (key = value lines)");
  cmd->add_option("--set", args.overrides, "override a config key, KEY=VALUE (repeatable)");
  cmd->add_option("--out", args.out_dir, "output directory (overrides io.out_dir)");
  cmd->add_option("--workers", args.workers, "parallel workers for rungs and probe batches")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", args.seed, "override net.seed");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig::from_overrides(args.overrides)
                                           : RunConfig::load(args.config_path, args.overrides);
  if (!args.out_dir.empty()) cfg.set("io.out_dir", args.out_dir);
  if (args.seed != 0) cfg.set("net.seed", std::to_string(args.seed));
  if (cfg.lattice_pitch_factor() > 0.125)
    std::cerr << "warning: project.lattice_pitch_factor above 1/8; projection will refuse it\n";
  return cfg;
}

HarnessOptions harness_options(const RunConfig& cfg, int workers) {
  HarnessOptions opt;
  opt.seed = cfg.net_seed();
  opt.margin_factor = cfg.margin_factor();
  opt.quad_n = cfg.harness_quad_n();
  opt.solver_tol = cfg.solver_tol();
  opt.solver_max_iter = cfg.solver_max_iter();
  opt.lattice_pitch_factor = cfg.lattice_pitch_factor();
  opt.cube_depth_cap = cfg.cube_depth_cap();
  opt.fd_pitch_factor = cfg.harness_fd_pitch_factor();
  opt.probes = cfg.harness_probes();
  opt.full_diagnostics = cfg.harness_full_diagnostics();
  opt.workers = workers;
  return opt;
}

int cmd_net(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const Space space = cfg.make_space();
  Net net = build_net(space, cfg.net_r(), cfg.net_seed(), cfg.extra_candidates());
  assign_weights(space, net);
  const int interior = discretize_domain(space, net, cfg.margin_factor());
  if (interior == 0)
    std::cerr << "warning: Omega_r is empty at r = " << cfg.net_r()
              << "; the solve step will return the zero field\n";
  const Graph g = build_graph(space, net);

  const std::filesystem::path out(cfg.out_dir());
  write_net(out / "net", net);
  write_graph(out / "graph", g);
  std::cout << "net: vertex_count=" << net.size() << " interior_count=" << interior
            << " edge_count=" << g.edge_count << " max_degree=" << g.max_degree << "\n";
  return 0;
}

int cmd_solve(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const Space space = cfg.make_space();
  Net net = make_net(space, cfg.net_r(), cfg.net_seed(), cfg.margin_factor(),
                     cfg.extra_candidates());
  if (net.interior_count() == 0)
    std::cerr << "warning: Omega_r is empty; solution is the zero field\n";
  const Graph g = build_graph(space, net);
  const NamedFunction f = cfg.boundary_function();
  const DiscreteField f_r =
      discretize_function(space, net, f.f, cfg.harness_quad_n(), cfg.net_seed());
  const QuadraticForm form = assemble_form(g, net, f_r);
  const SolveResult sol = solve(form, net, cfg.solver_tol(), cfg.solver_max_iter());

  const std::filesystem::path out(cfg.out_dir());
  write_net(out / "net", net);
  write_graph(out / "graph", g);
  write_form(out / "form", form);
  nlohmann::ordered_json side;
  side["iterations"] = sol.iterations;
  side["relative_residual"] = sol.relative_residual;
  side["energy_value"] = sol.energy_value;
  side["status"] = to_string(sol.status);
  write_field(out / "solution", sol.minimizer, side.dump(2));
  std::cout << "solve: status=" << to_string(sol.status) << " iterations=" << sol.iterations
            << " relative_residual=" << sol.relative_residual
            << " energy=" << sol.energy_value << "\n";
  return sol.status == SolveStatus::converged ? 0 : 2;
}

int cmd_project(const CommonArgs& args, const std::string& probes_path) {
  const RunConfig cfg = load_config(args);
  const Space space = cfg.make_space();
  Net net = make_net(space, cfg.net_r(), cfg.net_seed(), cfg.margin_factor(),
                     cfg.extra_candidates());
  const Graph g = build_graph(space, net);
  const NamedFunction f = cfg.boundary_function();
  const DiscreteField f_r =
      discretize_function(space, net, f.f, cfg.harness_quad_n(), cfg.net_seed());
  const QuadraticForm form = assemble_form(g, net, f_r);
  const SolveResult sol = solve(form, net, cfg.solver_tol(), cfg.solver_max_iter());
  if (sol.status != SolveStatus::converged) {
    std::cerr << "error: solve did not converge, cannot project\n";
    return 2;
  }

  const auto probes = read_probes(probes_path, space.ambient_dim);
  std::vector<double> values(probes.size());
  nlohmann::ordered_json side;
  side["kind"] = cfg.project_kind();
  if (cfg.project_kind() == "whitney") {
    WhitneyProjector proj(space, g, net, sol.minimizer, cfg.cube_depth_cap());
    for (std::size_t i = 0; i < probes.size(); ++i) values[i] = proj(probes[i]);
    side["cube_depth_cap"] = cfg.cube_depth_cap();
    side["fallbacks"] = proj.fallback_count();
  } else if (cfg.project_kind() == "path_integral") {
    PathIntegralProjector proj(space, g, net, sol.minimizer,
                               cfg.net_r() * cfg.lattice_pitch_factor());
    for (std::size_t i = 0; i < probes.size(); ++i) values[i] = proj(probes[i]);
    side["lattice_pitch"] = proj.pitch();
    side["lattice_nodes"] = proj.lattice_nodes();
  } else {
    throw UsageError("project.kind must be whitney or path_integral");
  }

  const std::filesystem::path out(cfg.out_dir());
  write_probe_values(out / "projection.csv", probes, values);
  write_text(out / "projection.json", side.dump(2) + "\n");
  std::cout << "project: evaluated " << probes.size() << " probes with " << cfg.project_kind()
            << "\n";
  return 0;
}

int cmd_converge(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const Space space = cfg.make_space();
  const NamedFunction f = cfg.boundary_function();
  HarnessOptions opt = harness_options(cfg, std::max(1, args.workers));
  if (f.has_grad && space.metric_kind != MetricKind::koranyi)
    opt.f_grad_energy = gradient_energy(space, f);

  const auto ladder = cfg.net_r_ladder();
  const auto ref = cfg.reference();
  ExperimentReport rep =
      run_convergence(space, f.f, ladder, opt, ref ? ref->f : ScalarField());
  rep.boundary_name = f.name;

  const std::filesystem::path out(cfg.out_dir());
  write_text(out / "report.json", report_to_json(rep, true));
  write_text(out / "report.csv", report_to_csv(rep));

  int failures = 0;
  for (const auto& rec : rep.records) {
    std::cout << "r=" << rec.r << " vertices=" << rec.vertex_count
              << " interior=" << rec.interior_count << " status="
              << (rec.failed ? "FAILED" : rec.solve_status);
    if (rec.proj[0].available) std::cout << " whitney_l2=" << rec.proj[0].l2_error;
    if (rec.proj[1].available) std::cout << " path_l2=" << rec.proj[1].l2_error;
    std::cout << "\n";
    failures += rec.failed ? 1 : 0;
  }
  return failures == static_cast<int>(rep.records.size()) && failures > 0 ? 2 : 0;
}

int cmd_verify(const CommonArgs& args) {
  const RunConfig cfg = load_config(args);
  const Space space = cfg.make_space();
  VerifyOptions opt;
  opt.seed = cfg.net_seed();
  opt.margin_factor = cfg.margin_factor();
  opt.quad_n = cfg.harness_quad_n();
  if (cfg.has("net.r")) opt.r = cfg.net_r();
  const VerifyOutcome outcome = verify_suite(space, opt);
  for (const auto& c : outcome.checks) {
    std::cout << (c.skipped ? "[SKIP]" : c.passed ? "[PASS]" : "[FAIL]")
              << (c.hard ? " " : " (diagnostic) ") << c.name << ": " << c.detail << "\n";
  }
  const int failures = outcome.hard_failures();
  std::cout << failures << " hard failure(s)\n";
  return failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet problems on metric measure spaces via net-graph energies"};
  app.require_subcommand(1);

  CommonArgs net_args, solve_args, project_args, converge_args, verify_args;
  std::string probes_path;

  auto* net_cmd = app.add_subcommand("net", "build and write the net and its 3r-graph");
  attach_common(net_cmd, net_args);
  auto* solve_cmd = app.add_subcommand("solve", "assemble the energy form and minimize it");
  attach_common(solve_cmd, solve_args);
  auto* project_cmd =
      app.add_subcommand("project", "evaluate the projected minimizer at probe points");
  attach_common(project_cmd, project_args);
  project_cmd->add_option("--probes", probes_path, "CSV of probe coordinates")->required();
  auto* converge_cmd = app.add_subcommand("converge", "full r-sweep with error reporting");
  attach_common(converge_cmd, converge_args);
  auto* verify_cmd = app.add_subcommand("verify", "run every module invariant at desk scale");
  attach_common(verify_cmd, verify_args);

  bool show_schema = false;
  app.add_flag("--schema", show_schema, "print all config keys with defaults and exit");

  try {
    app.parse(argc, argv);
    if (show_schema) {
      for (const auto& line : harmonet::RunConfig::schema_lines()) std::cout << line << "\n";
      return 0;
    }
    if (net_cmd->parsed()) return cmd_net(net_args);
    if (solve_cmd->parsed()) return cmd_solve(solve_args);
    if (project_cmd->parsed()) return cmd_project(project_args, probes_path);
    if (converge_cmd->parsed()) return cmd_converge(converge_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const harmonet::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const harmonet::AccuracyError& e) {
    std::cerr << "accuracy error: " << e.what() << " (estimate " << e.estimate << ", std error "
              << e.std_error << ")\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
