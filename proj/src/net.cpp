#include "harmonet/net.hpp"

#include <algorithm>
#include <cmath>

namespace harmonet {

namespace {

// Relative slack applied to the separation threshold so that candidate grids
// whose true spacing equals r exactly are not dropped by the last rounding bit.
constexpr double kSepSlack = 1e-12;

// Per-axis tick lists at pitch, covering [lo, hi] and always including hi.
std::vector<double> axis_ticks(double lo, double hi, double pitch) {
  std::vector<double> t;
  const auto count = static_cast<std::int64_t>(std::floor((hi - lo) / pitch));
  for (std::int64_t k = 0; k <= count; ++k) t.push_back(lo + static_cast<double>(k) * pitch);
  if (t.empty() || t.back() < hi) t.push_back(hi);
  return t;
}

// Candidate pitch per axis: r/2 in metric-consistent coordinates. For the
// gauge metric the t-axis has quadratic scaling, so its pitch shrinks to keep
// the per-step gauge length at r/2; for weighted axes the pitch stretches.
Vec candidate_pitch(const Space& s, double r) {
  Vec pitch(s.ambient_dim);
  switch (s.metric_kind) {
    case MetricKind::euclidean:
      pitch.setConstant(r / 2.0);
      break;
    case MetricKind::weighted_euclidean:
      for (int a = 0; a < s.ambient_dim; ++a) pitch[a] = r / 2.0 / std::sqrt(s.metric_weights[a]);
      break;
    case MetricKind::koranyi:
      pitch[0] = r / 2.0;
      pitch[1] = r / 2.0;
      pitch[2] = r * r / 16.0;  // gauge length of a pure t-step h is 2*sqrt(h)
      break;
  }
  return pitch;
}

}  // namespace

Net build_net(const Space& s, double r, std::uint64_t seed, int extra_candidates) {
  if (!(r > 0.0)) throw UsageError("build_net: r must be positive");
  if (r >= s.diameter_estimate())
    throw UsageError("build_net: r exceeds the diameter of X, no candidates");

  Net net;
  net.r = r;
  net.space_hash = s.hash();
  net.seed = seed;

  // bucket cells sized so that a separation query touches few cells; the
  // halfwidths at the box midpoint bound the coordinate extent of r-balls
  Vec cell(s.ambient_dim);
  {
    Point mid = 0.5 * (s.bounds.lo + s.bounds.hi);
    Vec hw = ball_coord_halfwidths(s, mid, r);
    for (int a = 0; a < s.ambient_dim; ++a) cell[a] = std::max(hw[a], 1e-12);
  }
  net.index = GridIndex(s.bounds.lo, cell);

  std::vector<int> cand;
  const double accept_threshold = r * (1.0 - kSepSlack);
  auto try_insert = [&](const Point& p) {
    if (!s.in_X(p)) return;
    const Vec hw = ball_coord_halfwidths(s, p, r);
    net.index.query_box(p, hw, cand);
    for (int id : cand)
      if (distance(s, p, net.vertices[id]) < accept_threshold) return;
    net.index.insert(p, static_cast<int>(net.vertices.size()));
    net.vertices.push_back(p);
  };

  // lexicographic traversal of the tick grid
  const Vec pitch = candidate_pitch(s, r);
  std::vector<std::vector<double>> ticks(s.ambient_dim);
  std::size_t total = 1;
  for (int a = 0; a < s.ambient_dim; ++a) {
    ticks[a] = axis_ticks(s.bounds.lo[a], s.bounds.hi[a], pitch[a]);
    total *= ticks[a].size();
  }
  std::vector<std::size_t> cursor(s.ambient_dim, 0);
  Point p(s.ambient_dim);
  for (std::size_t step = 0; step < total; ++step) {
    for (int a = 0; a < s.ambient_dim; ++a) p[a] = ticks[a][cursor[a]];
    try_insert(p);
    for (int a = s.ambient_dim - 1; a >= 0; --a) {
      if (++cursor[a] < ticks[a].size()) break;
      cursor[a] = 0;
    }
  }

  Rng rng(seed);
  for (int k = 0; k < extra_candidates; ++k) {
    for (int a = 0; a < s.ambient_dim; ++a)
      p[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
    try_insert(p);
  }

  if (net.vertices.empty()) throw UsageError("build_net: candidate stream produced no vertices");

  std::uint64_t h = hash_mix(net.space_hash, r);
  h = hash_mix(h, seed);
  h = hash_mix(h, static_cast<std::uint64_t>(net.vertices.size()));
  for (const auto& v : net.vertices) h = hash_mix(h, v);
  net.uid = h;
  return net;
}

Net& assign_weights(const Space& s, Net& net) {
  net.weights.resize(net.size());
  for (int i = 0; i < net.size(); ++i) {
    net.weights[i] = ball_measure(s, net.vertices[i], net.r / 4.0);
    if (!(net.weights[i] > 0.0))
      throw NumericalError("assign_weights: nonpositive vertex mass at vertex " +
                           std::to_string(i));
  }
  return net;
}

int discretize_domain(const Space& s, Net& net, double margin_factor) {
  if (!(margin_factor > 0.0)) throw UsageError("discretize_domain: margin_factor must be > 0");
  net.margin_factor = margin_factor;
  net.interior.assign(net.size(), 0);
  int count = 0;
  for (int i = 0; i < net.size(); ++i) {
    if (domain_margin(s, net.vertices[i]) >= margin_factor * net.r) {
      net.interior[i] = 1;
      ++count;
    }
  }
  return count;
}

Net make_net(const Space& s, double r, std::uint64_t seed, double margin_factor,
             int extra_candidates) {
  Net net = build_net(s, r, seed, extra_candidates);
  assign_weights(s, net);
  discretize_domain(s, net, margin_factor);
  return net;
}

int nearest_vertex(const Space& s, const Net& net, const Point& p, double* dist_out) {
  if (net.vertices.empty()) return -1;
  thread_local std::vector<int> cand;
  double radius = net.r;
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 64; ++round) {
    net.index.query_box(p, ball_coord_halfwidths(s, p, radius), cand);
    for (int id : cand) {
      const double d = distance(s, p, net.vertices[id]);
      if (d < best_d || (d == best_d && id < best)) {
        best_d = d;
        best = id;
      }
    }
    if (best >= 0 && best_d <= radius) break;
    radius *= 2.0;
  }
  if (best < 0) {
    // degenerate fallback: linear scan
    for (int id = 0; id < net.size(); ++id) {
      const double d = distance(s, p, net.vertices[id]);
      if (d < best_d) {
        best_d = d;
        best = id;
      }
    }
  }
  if (dist_out) *dist_out = best_d;
  return best;
}

NetCertificate certify_net(const Space& s, const Net& net, int probes, std::uint64_t seed) {
  NetCertificate cert;
  cert.probes = probes;

  // separation over index neighborhoods
  cert.min_pair_distance = std::numeric_limits<double>::infinity();
  std::vector<int> cand;
  const double sep_threshold = net.r * (1.0 - kSepSlack);
  bool sep_ok = true;
  for (int i = 0; i < net.size(); ++i) {
    net.index.query_box(net.vertices[i], ball_coord_halfwidths(s, net.vertices[i], net.r), cand);
    for (int j : cand) {
      if (j <= i) continue;
      const double d = distance(s, net.vertices[i], net.vertices[j]);
      cert.min_pair_distance = std::min(cert.min_pair_distance, d);
      if (d < sep_threshold) sep_ok = false;
    }
  }
  if (net.size() < 2) cert.min_pair_distance = std::numeric_limits<double>::infinity();
  cert.separation_ok = sep_ok;

  // covering on random probes of X
  Rng rng(seed);
  cert.max_probe_distance = 0.0;
  bool cover_ok = true;
  Point p(s.ambient_dim);
  for (int k = 0; k < probes; ++k) {
    for (int a = 0; a < s.ambient_dim; ++a) p[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
    double d = 0.0;
    nearest_vertex(s, net, p, &d);
    cert.max_probe_distance = std::max(cert.max_probe_distance, d);
    if (!(d < net.r)) cover_ok = false;
  }
  cert.covering_ok = cover_ok;
  return cert;
}

}  // namespace harmonet
