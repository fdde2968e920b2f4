#pragma once

#include "harmonet/functions.hpp"
#include "harmonet/space.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace harmonet {

// Flat key = value configuration with dotted section keys. Unknown keys are
// rejected at load; every getter materializes its documented default.
class RunConfig {
 public:
  static RunConfig load(const std::filesystem::path& path,
                        const std::vector<std::string>& overrides = {});
  static RunConfig from_overrides(const std::vector<std::string>& overrides);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t def) const;
  std::vector<double> get_list(const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  Space make_space() const;
  NamedFunction boundary_function() const;        // boundary.f, default "zero"
  std::optional<NamedFunction> reference() const; // reference.kind, default "none"

  // net section
  double net_r() const;
  std::vector<double> net_r_ladder() const;                 // explicit or derived
  std::uint64_t net_seed() const { return get_uint("net.seed", 1); }
  double margin_factor() const { return get_double("net.margin_factor", 20.0); }
  int extra_candidates() const { return get_int("net.extra_candidates", 0); }

  // solver section
  double solver_tol() const { return get_double("solver.tol", 1e-10); }
  int solver_max_iter() const { return get_int("solver.max_iter", 0); }

  // project section
  std::string project_kind() const { return get_string("project.kind", "whitney"); }
  double lattice_pitch_factor() const { return get_double("project.lattice_pitch_factor", 0.125); }
  int cube_depth_cap() const { return get_int("project.cube_depth_cap", 40); }

  // io section
  std::string out_dir() const { return get_string("io.out_dir", "out"); }

  // harness section
  int harness_quad_n() const { return get_int("harness.quad_n", 32); }
  int harness_probes() const { return get_int("harness.probes", 1000); }
  double harness_fd_pitch_factor() const {
    return get_double("harness.fd_pitch_factor", 1.0 / 16.0);
  }
  int harness_rungs() const { return get_int("harness.rungs", 4); }
  double harness_ladder_ratio() const { return get_double("harness.ladder_ratio", 0.5); }
  bool harness_full_diagnostics() const {
    return get_string("harness.full_diagnostics", "true") == "true";
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

  // One documentation line per known key: "key | default | meaning".
  static std::vector<std::string> schema_lines();

 private:
  void validate_keys() const;
  std::map<std::string, std::string> kv_;
};

}  // namespace harmonet
