#include "harmonet/config.hpp"

#include "harmonet/net.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace harmonet {

namespace {

struct KeyDoc {
  const char* key;
  const char* def;
  const char* doc;
};

const KeyDoc kSchema[] = {
    {"space.kind", "euclidean", "metric: euclidean | weighted_euclidean | koranyi"},
    {"space.dim", "1", "ambient dimension (1 or 2 euclidean, 3 koranyi)"},
    {"space.bounds", "0,1", "bounding box, lo,hi per axis"},
    {"space.measure", "lebesgue", "lebesgue | density:cosine | density:tilt"},
    {"space.metric_weights", "", "per-axis weights for weighted_euclidean"},
    {"space.mc_rel_tol", "1e-3", "relative std-error target for Monte Carlo measures"},
    {"space.measure_seed", "1", "base seed for Monte Carlo measures"},
    {"domain.kind", "interval", "interval | rectangle | disk (gauge ball on koranyi)"},
    {"domain.params", "0.2,0.8", "interval a,b; rectangle a1,b1,a2,b2; disk cx,..,R"},
    {"reference.kind", "none", "classical comparison solution, none or a function spec"},
    {"boundary.f", "zero", "Dirichlet boundary-data function spec"},
    {"net.r", "", "separation scale for single-scale commands"},
    {"net.r_ladder", "", "comma list of decreasing r for converge"},
    {"net.seed", "1", "seed for the random tail of the candidate stream"},
    {"net.margin_factor", "20", "interior rule: margin >= factor * r"},
    {"net.extra_candidates", "0", "random candidates appended to the grid stream"},
    {"solver.tol", "1e-10", "CG relative residual target"},
    {"solver.max_iter", "0", "CG iteration cap, 0 = 20*sqrt(n)+200"},
    {"project.kind", "whitney", "whitney | path_integral"},
    {"project.lattice_pitch_factor", "0.125", "lattice pitch = factor * r, factor <= 1/8"},
    {"project.cube_depth_cap", "40", "dyadic levels below r before fallback"},
    {"io.out_dir", "out", "output directory"},
    {"io.formats", "csv,json", "emitted formats (informational)"},
    {"harness.quad_n", "32", "ball-average quadrature nodes"},
    {"harness.probes", "1000", "probe count for verification checks"},
    {"harness.fd_pitch_factor", "0.0625", "finite-difference grid pitch = factor * r"},
    {"harness.rungs", "4", "default ladder length when net.r_ladder is absent"},
    {"harness.ladder_ratio", "0.5", "default ladder ratio"},
    {"harness.full_diagnostics", "true", "record per-rung projection diagnostics"},
};

bool known_key(const std::string& k) {
  for (const auto& d : kSchema)
    if (k == d.key) return true;
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> RunConfig::schema_lines() {
  std::vector<std::string> out;
  for (const auto& d : kSchema) {
    std::string line = d.key;
    line += " (default: ";
    line += *d.def ? d.def : "unset";
    line += ") - ";
    line += d.doc;
    out.push_back(std::move(line));
  }
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!known_key(key)) throw UsageError("unknown config key '" + key + "'");
  kv_[key] = value;
}

RunConfig RunConfig::load(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path.string() + ":" + std::to_string(lineno) +
                       ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key))
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown config key '" +
                       key + "'");
    cfg.kv_[key] = value;
  }
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + ov + "'");
    cfg.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_overrides(const std::vector<std::string>& overrides) {
  RunConfig cfg;
  for (const auto& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects KEY=VALUE, got '" + ov + "'");
    cfg.set(trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)));
  }
  return cfg;
}

std::string RunConfig::get_string(const std::string& key, const std::string& def) const {
  const auto it = kv_.find(key);
  return it == kv_.end() ? def : it->second;
}

double RunConfig::get_double(const std::string& key, double def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad number '" + it->second + "'");
  }
}

int RunConfig::get_int(const std::string& key, int def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad integer '" + it->second + "'");
  }
}

std::uint64_t RunConfig::get_uint(const std::string& key, std::uint64_t def) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) return def;
  try {
    return std::stoull(it->second);
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': bad integer '" + it->second + "'");
  }
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw UsageError("config key '" + key + "': bad number '" + item + "'");
    }
  }
  return out;
}

Space RunConfig::make_space() const {
  if (!has("space.kind")) throw UsageError("config: missing required key 'space.kind'");
  Space s;
  const std::string kind = get_string("space.kind", "euclidean");
  if (kind == "euclidean")
    s.metric_kind = MetricKind::euclidean;
  else if (kind == "weighted_euclidean")
    s.metric_kind = MetricKind::weighted_euclidean;
  else if (kind == "koranyi")
    s.metric_kind = MetricKind::koranyi;
  else
    throw UsageError("config: space.kind must be euclidean|weighted_euclidean|koranyi");

  s.ambient_dim = get_int("space.dim", s.metric_kind == MetricKind::koranyi ? 3 : 1);
  if (s.metric_kind == MetricKind::koranyi && s.ambient_dim != 3)
    throw UsageError("config: koranyi instances are 3-dimensional");
  if (s.metric_kind != MetricKind::koranyi && (s.ambient_dim < 1 || s.ambient_dim > 2))
    throw UsageError("config: euclidean instances support dim 1 or 2");

  const auto bounds = get_list("space.bounds");
  if (static_cast<int>(bounds.size()) != 2 * s.ambient_dim)
    throw UsageError("config: space.bounds needs lo,hi per axis");
  s.bounds.lo = Vec(s.ambient_dim);
  s.bounds.hi = Vec(s.ambient_dim);
  for (int a = 0; a < s.ambient_dim; ++a) {
    s.bounds.lo[a] = bounds[2 * a];
    s.bounds.hi[a] = bounds[2 * a + 1];
    if (!(s.bounds.lo[a] < s.bounds.hi[a]))
      throw UsageError("config: space.bounds axis " + std::to_string(a) + " is empty");
  }

  if (s.metric_kind == MetricKind::weighted_euclidean) {
    const auto w = get_list("space.metric_weights");
    if (static_cast<int>(w.size()) != s.ambient_dim)
      throw UsageError("config: space.metric_weights needs one positive weight per axis");
    s.metric_weights = Vec(s.ambient_dim);
    for (int a = 0; a < s.ambient_dim; ++a) {
      if (!(w[a] > 0.0)) throw UsageError("config: metric weights must be positive");
      s.metric_weights[a] = w[a];
    }
  }

  const std::string measure = get_string("space.measure", "lebesgue");
  if (measure == "lebesgue") {
    s.measure_kind = MeasureKind::lebesgue;
  } else if (measure.rfind("density:", 0) == 0) {
    s.measure_kind = MeasureKind::density;
    s.density_name = measure.substr(8);
    s.density = make_density(s.density_name, s.ambient_dim);
  } else {
    throw UsageError("config: space.measure must be lebesgue or density:<name>");
  }
  s.mc_rel_tol = get_double("space.mc_rel_tol", 1e-3);
  s.measure_seed = get_uint("space.measure_seed", 1);

  const std::string dkind = get_string("domain.kind", "interval");
  const auto params = get_list("domain.params");
  if (dkind == "interval") {
    s.domain_kind = DomainKind::interval;
    if (params.size() != 2 || s.ambient_dim != 1)
      throw UsageError("config: interval domain needs 1D space and params a,b");
  } else if (dkind == "rectangle") {
    s.domain_kind = DomainKind::rectangle;
    if (static_cast<int>(params.size()) != 2 * s.ambient_dim)
      throw UsageError("config: rectangle domain needs lo,hi per axis");
  } else if (dkind == "disk") {
    s.domain_kind = DomainKind::disk;
    if (static_cast<int>(params.size()) != s.ambient_dim + 1)
      throw UsageError("config: disk domain needs center coords plus radius");
  } else {
    throw UsageError("config: domain.kind must be interval|rectangle|disk");
  }
  s.domain_params = Eigen::Map<const Vec>(params.data(), params.size());

  const std::string ref = get_string("reference.kind", "none");
  if (ref != "none") {
    NamedFunction nf = make_function(ref, s.ambient_dim);
    s.reference = nf.f;
    s.reference_name = ref;
  }

  // sanity: the domain must leave complement mass inside X
  Point probe = s.bounds.lo;
  bool complement_found = !s.in_domain(probe);
  if (!complement_found) {
    probe = s.bounds.hi;
    complement_found = !s.in_domain(probe);
  }
  if (!complement_found)
    throw UsageError("config: domain covers the bounding box corners; X \\ Omega looks empty");
  return s;
}

NamedFunction RunConfig::boundary_function() const {
  const Space s = make_space();
  return make_function(get_string("boundary.f", "zero"), s.ambient_dim);
}

std::optional<NamedFunction> RunConfig::reference() const {
  const std::string ref = get_string("reference.kind", "none");
  if (ref == "none") return std::nullopt;
  const Space s = make_space();
  return make_function(ref, s.ambient_dim);
}

double RunConfig::net_r() const {
  if (!has("net.r")) throw UsageError("config: missing required key 'net.r'");
  const double r = get_double("net.r", 0.0);
  if (!(r > 0.0)) throw UsageError("config: net.r must be positive");
  return r;
}

std::vector<double> RunConfig::net_r_ladder() const {
  auto ladder = get_list("net.r_ladder");
  if (!ladder.empty()) {
    for (std::size_t i = 1; i < ladder.size(); ++i)
      if (!(ladder[i] < ladder[i - 1]))
        throw UsageError("config: net.r_ladder must be strictly decreasing");
    return ladder;
  }
  // default: geometric ladder from the largest r with a nonempty interior
  const Space s = make_space();
  const double ratio = harness_ladder_ratio();
  const int rungs = harness_rungs();
  // probe the domain margin on a coarse grid to locate its maximum
  double max_margin = 0.0;
  const int nprobe = 64;
  Point p(s.ambient_dim);
  std::vector<int> cursor(s.ambient_dim, 0);
  for (;;) {
    for (int a = 0; a < s.ambient_dim; ++a)
      p[a] = s.bounds.lo[a] +
             (s.bounds.hi[a] - s.bounds.lo[a]) * (cursor[a] + 0.5) / nprobe;
    max_margin = std::max(max_margin, domain_margin(s, p));
    int a = 0;
    for (; a < s.ambient_dim; ++a) {
      if (++cursor[a] < nprobe) break;
      cursor[a] = 0;
    }
    if (a == s.ambient_dim) break;
  }
  if (!(max_margin > 0.0)) throw UsageError("config: domain has no interior margin");
  const double r0 = 0.95 * max_margin / margin_factor();
  std::vector<double> out;
  for (int k = 0; k < rungs; ++k) out.push_back(r0 * std::pow(ratio, k));
  return out;
}

void RunConfig::validate_keys() const {
  for (const auto& [k, v] : kv_)
    if (!known_key(k)) throw UsageError("unknown config key '" + k + "'");
}

}  // namespace harmonet
