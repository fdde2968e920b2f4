#include "harmonet/project.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace harmonet {

const char* to_string(ProjectionKind k) {
  return k == ProjectionKind::whitney ? "whitney" : "path_integral";
}

namespace {

double gbar_from_grad(const Space& s, const Net& net, const Vec& grad, const Point& p) {
  thread_local std::vector<int> scratch;
  const double reach = 3.0 * net.r;
  net.index.query_box(p, ball_coord_halfwidths(s, p, reach), scratch);
  double acc = 0.0;
  for (int id : scratch)
    if (distance(s, p, net.vertices[id]) < reach) acc += grad[id];  // strict per definition
  return 2.0 * acc;
}

}  // namespace

double gbar(const Space& s, const Graph& g, const Net& net, const DiscreteField& u,
            const Point& p) {
  require_same_net(g, u, "gbar");
  const DiscreteField grad = graph_gradient(g, u);
  return gbar_from_grad(s, net, grad.values, p);
}

// --- path-integral construction ----------------------------------------------

PathIntegralProjector::PathIntegralProjector(const Space& s, const Graph& g, const Net& net,
                                             const DiscreteField& u, double lattice_pitch)
    : space_(&s), net_(&net), u_(u.values), pitch_(lattice_pitch) {
  require_same_net(g, u, "PathIntegralProjector");
  require_same_net(net, u, "PathIntegralProjector");
  if (!(lattice_pitch > 0.0))
    throw UsageError("PathIntegralProjector: lattice pitch must be positive");
  if (lattice_pitch > net.r / 8.0 * (1.0 + 1e-12))
    throw AccuracyError("PathIntegralProjector: lattice pitch exceeds r/8", lattice_pitch,
                        lattice_pitch - net.r / 8.0);
  grad_ = graph_gradient(g, u).values;

  const int d = s.ambient_dim;
  axis_pitch_ = Vec::Constant(d, pitch_);
  if (s.metric_kind == MetricKind::koranyi)
    axis_pitch_[2] = pitch_ * pitch_ / 4.0;  // gauge length of a t-step h is 2 sqrt(h)
  if (s.metric_kind == MetricKind::weighted_euclidean)
    for (int a = 0; a < d; ++a) axis_pitch_[a] = pitch_ / std::sqrt(s.metric_weights[a]);

  lo_ = s.bounds.lo;
  counts_.resize(d);
  total_ = 1;
  for (int a = 0; a < d; ++a) {
    counts_[a] = static_cast<int>(std::floor((s.bounds.hi[a] - lo_[a]) / axis_pitch_[a])) + 1;
    total_ *= counts_[a];
  }

  shift_ = 0.0;
  for (Eigen::Index i = 0; i < u_.size(); ++i) shift_ = std::max(shift_, -u_[i]);
}

void PathIntegralProjector::ensure_swept() const {
  std::call_once(sweep_flag_, [this] { run_sweep(); });
}

Point PathIntegralProjector::node_point(const std::vector<int>& idx) const {
  Point p(space_->ambient_dim);
  for (int a = 0; a < space_->ambient_dim; ++a)
    p[a] = lo_[a] + static_cast<double>(idx[a]) * axis_pitch_[a];
  return p;
}

double PathIntegralProjector::gbar_at(const Point& p) const {
  return gbar_from_grad(*space_, *net_, grad_, p);
}

// Accumulates 2 * |grad_r u|(w) over sample points node + shift * pitch for
// every vertex w within strict 3r, into an array indexed by the full node id.
// `shift` is 0 for the node lattice or +-1/2 per axis for edge midpoints,
// anchored at the lower endpoint of the edge. Iterating vertices in id order
// reproduces the sorted-gather summation order bit for bit.
std::vector<float> PathIntegralProjector::scatter_gbar(const Vec& shift) const {
  const int d = space_->ambient_dim;
  std::vector<std::int64_t> stride(d, 1);
  for (int a = 1; a < d; ++a) stride[a] = stride[a - 1] * counts_[a - 1];
  std::int64_t total = 1;
  for (int a = 0; a < d; ++a) total *= counts_[a];

  std::vector<int> lo_valid(d), hi_valid(d);
  for (int a = 0; a < d; ++a) {
    lo_valid[a] = shift[a] < 0.0 ? 1 : 0;
    hi_valid[a] = counts_[a] - 1 - (shift[a] > 0.0 ? 1 : 0);
  }

  std::vector<double> acc(static_cast<std::size_t>(total), 0.0);
  const double reach = 3.0 * net_->r;
  std::vector<int> lo_i(d), hi_i(d), cur(d);
  Point p(d);
  for (int w = 0; w < net_->size(); ++w) {
    if (grad_[w] == 0.0) continue;
    const Point& c = net_->vertices[w];
    const Vec hw = ball_coord_halfwidths(*space_, c, reach);
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      const double origin = lo_[a] + shift[a] * axis_pitch_[a];
      lo_i[a] = std::max<int>(lo_valid[a], static_cast<int>(std::ceil(
                                               (c[a] - hw[a] - origin) / axis_pitch_[a])));
      hi_i[a] = std::min<int>(hi_valid[a], static_cast<int>(std::floor(
                                               (c[a] + hw[a] - origin) / axis_pitch_[a])));
      if (lo_i[a] > hi_i[a]) empty = true;
      cur[a] = lo_i[a];
    }
    if (empty) continue;
    for (;;) {
      std::int64_t id = 0;
      for (int a = 0; a < d; ++a) {
        p[a] = lo_[a] + (static_cast<double>(cur[a]) + shift[a]) * axis_pitch_[a];
        id += stride[a] * cur[a];
      }
      if (distance(*space_, c, p) < reach) acc[static_cast<std::size_t>(id)] += grad_[w];
      int a = 0;
      for (; a < d; ++a) {
        if (++cur[a] <= hi_i[a]) break;
        cur[a] = lo_i[a];
      }
      if (a == d) break;
    }
  }
  std::vector<float> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<float>(2.0 * acc[i]);
  return out;
}

void PathIntegralProjector::run_sweep() const {
  const int d = space_->ambient_dim;
  const std::int64_t total = total_;
  value_.assign(static_cast<std::size_t>(total), std::numeric_limits<double>::infinity());

  std::vector<std::int64_t> stride(d, 1);
  for (int a = 1; a < d; ++a) stride[a] = stride[a - 1] * counts_[a - 1];
  auto unflatten = [&](std::int64_t id, std::vector<int>& idx) {
    for (int a = 0; a < d; ++a) idx[a] = static_cast<int>(id / stride[a] % counts_[a]);
  };

  // gbar sampled at every lattice node, used by the query-time relax step
  node_gbar_ = scatter_gbar(Vec::Zero(d));

  // seed lattice nodes inside net balls; balls are disjoint for r-separated nets
  using Item = std::pair<double, std::int64_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  {
    std::vector<int> idx(d);
    const double ball_r = net_->r / 4.0;
    for (int v = 0; v < net_->size(); ++v) {
      const Point& c = net_->vertices[v];
      const Vec hw = ball_coord_halfwidths(*space_, c, ball_r);
      std::vector<int> lo_i(d), hi_i(d);
      bool empty = false;
      for (int a = 0; a < d; ++a) {
        lo_i[a] = std::max<int>(0, static_cast<int>(std::ceil((c[a] - hw[a] - lo_[a]) / axis_pitch_[a])));
        hi_i[a] = std::min<int>(counts_[a] - 1,
                                static_cast<int>(std::floor((c[a] + hw[a] - lo_[a]) / axis_pitch_[a])));
        if (lo_i[a] > hi_i[a]) empty = true;
      }
      if (empty) continue;
      std::vector<int> cur = lo_i;
      for (;;) {
        Point p = node_point(cur);
        if (distance(*space_, c, p) <= ball_r) {
          std::int64_t id = 0;
          for (int a = 0; a < d; ++a) id += stride[a] * cur[a];
          const double val = u_[v] + shift_;
          if (val < value_[static_cast<std::size_t>(id)]) {
            value_[static_cast<std::size_t>(id)] = val;
            heap.emplace(val, id);
          }
        }
        int a = 0;
        for (; a < d; ++a) {
          if (++cur[a] <= hi_i[a]) break;
          cur[a] = lo_i[a];
        }
        if (a == d) break;
      }
    }
  }

  // neighbor offsets: the full +/-1 box without the origin. The first half
  // lists one canonical orientation per edge class; midpoint gbar values are
  // precomputed per class, keyed on the canonical lower endpoint.
  std::vector<std::vector<int>> offsets;
  {
    std::vector<int> off(d, -1);
    std::vector<std::vector<int>> all;
    for (;;) {
      bool nonzero = false;
      for (int a = 0; a < d; ++a)
        if (off[a] != 0) nonzero = true;
      if (nonzero) all.push_back(off);
      int a = 0;
      for (; a < d; ++a) {
        if (++off[a] <= 1) break;
        off[a] = -1;
      }
      if (a == d) break;
    }
    for (const auto& o : all) {  // canonical: last nonzero component positive
      for (int a = d - 1; a >= 0; --a) {
        if (o[a] > 0) {
          offsets.push_back(o);
          break;
        }
        if (o[a] < 0) break;
      }
    }
    const std::size_t h = offsets.size();
    for (std::size_t k = 0; k < h; ++k) {
      std::vector<int> neg(d);
      for (int a = 0; a < d; ++a) neg[a] = -offsets[k][a];
      offsets.push_back(std::move(neg));
    }
  }
  const std::size_t half = offsets.size() / 2;
  std::vector<std::vector<float>> edge_gbar(half);
  std::vector<double> edge_len(half);
  {
    Vec shift(d);
    std::vector<int> zero_idx(d, 0), one_idx(d);
    for (std::size_t k = 0; k < half; ++k) {
      for (int a = 0; a < d; ++a) {
        shift[a] = 0.5 * offsets[k][a];
        one_idx[a] = std::abs(offsets[k][a]);
      }
      edge_gbar[k] = scatter_gbar(shift);
      edge_len[k] = distance(*space_, node_point(zero_idx), node_point(one_idx));
    }
  }

  // coordinate steps have position-independent length except under the gauge
  const bool uniform_len = space_->metric_kind != MetricKind::koranyi;

  std::vector<int> idx(d), nidx(d);
  while (!heap.empty()) {
    const auto [dist_u, id] = heap.top();
    heap.pop();
    if (dist_u > value_[static_cast<std::size_t>(id)]) continue;
    unflatten(id, idx);
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      const auto& off = offsets[k];
      bool valid = true;
      std::int64_t nid = 0;
      for (int a = 0; a < d; ++a) {
        nidx[a] = idx[a] + off[a];
        if (nidx[a] < 0 || nidx[a] >= counts_[a]) {
          valid = false;
          break;
        }
        nid += stride[a] * nidx[a];
      }
      if (!valid) continue;
      if (value_[static_cast<std::size_t>(nid)] <= dist_u) continue;
      const std::size_t kc = k < half ? k : k - half;
      const std::size_t anchor = static_cast<std::size_t>(k < half ? id : nid);
      const double len =
          uniform_len ? edge_len[kc] : distance(*space_, node_point(idx), node_point(nidx));
      const double w = len * static_cast<double>(edge_gbar[kc][anchor]);
      const double cand = dist_u + w;
      if (cand < value_[static_cast<std::size_t>(nid)]) {
        value_[static_cast<std::size_t>(nid)] = cand;
        heap.emplace(cand, nid);
      }
    }
  }
}

double PathIntegralProjector::operator()(const Point& p) const {
  if (!space_->in_X(p)) throw UsageError("PathIntegralProjector: point lies outside X");
  double dist = 0.0;
  const int v = nearest_vertex(*space_, *net_, p, &dist);
  if (v >= 0 && dist <= net_->r / 4.0) return u_[v];

  const int d = space_->ambient_dim;
  std::vector<std::int64_t> stride(d, 1);
  for (int a = 1; a < d; ++a) stride[a] = stride[a - 1] * counts_[a - 1];
  std::vector<int> base(d);
  for (int a = 0; a < d; ++a) {
    base[a] = static_cast<int>(std::floor((p[a] - lo_[a]) / axis_pitch_[a]));
    base[a] = std::clamp(base[a], 0, counts_[a] - 1);
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> corner(d);
  for (int mask = 0; mask < (1 << d); ++mask) {
    bool valid = true;
    std::int64_t id = 0;
    for (int a = 0; a < d; ++a) {
      corner[a] = base[a] + ((mask >> a) & 1);
      if (corner[a] >= counts_[a]) {
        valid = false;
        break;
      }
      id += stride[a] * corner[a];
    }
    if (!valid) continue;
    const double node_val = value_[static_cast<std::size_t>(id)];
    if (!std::isfinite(node_val)) continue;
    Point q(d);
    for (int a = 0; a < d; ++a) q[a] = lo_[a] + static_cast<double>(corner[a]) * axis_pitch_[a];
    const double hop =
        distance(*space_, p, q) * static_cast<double>(node_gbar_[static_cast<std::size_t>(id)]);
    best = std::min(best, node_val + hop);
  }
  if (!std::isfinite(best))
    throw NumericalError("PathIntegralProjector: query fell outside the swept lattice");
  return best - shift_;
}

// --- Whitney construction ------------------------------------------------------

WhitneyProjector::WhitneyProjector(const Space& s, const Graph& g, const Net& net,
                                   const DiscreteField& u, int depth_cap)
    : space_(&s), net_(&net), u_(u.values), depth_cap_(depth_cap) {
  require_same_net(g, u, "WhitneyProjector");
  require_same_net(net, u, "WhitneyProjector");
  if (s.metric_kind == MetricKind::koranyi)
    throw UsageError("WhitneyProjector: unavailable on the koranyi instance");
  double wsum = 0.0;
  for (int a = 0; a < s.ambient_dim; ++a)
    wsum += s.metric_kind == MetricKind::weighted_euclidean ? s.metric_weights[a] : 1.0;
  diam_scale_ = std::sqrt(wsum);
  max_level_ = static_cast<int>(std::floor(-std::log2(net.r))) + depth_cap_;
}

double WhitneyProjector::dist_to_balls(const Point& p) const {
  double d = 0.0;
  nearest_vertex(*space_, *net_, p, &d);
  return d - net_->r / 4.0;
}

namespace {

std::int64_t floor_div2(std::int64_t m) { return m >= 0 ? m / 2 : -((-m + 1) / 2); }

double bump_eta(double t) {
  if (t >= 1.0) return 0.0;
  const double s = 1.0 - t * t;
  return s * s;
}

}  // namespace

bool WhitneyProjector::maximal_admissible(const std::int64_t* cube, int level,
                                          double* dist_c) const {
  const int d = space_->ambient_dim;
  const double side = std::exp2(static_cast<double>(-level));
  thread_local Point c;
  c.resize(d);
  for (int a = 0; a < d; ++a) c[a] = (static_cast<double>(cube[a]) + 0.5) * side;
  const double dc = dist_to_balls(c);
  if (dist_c) *dist_c = dc;
  if (dc < 2.0 * side * diam_scale_) return false;
  // parent must be inadmissible for the cube to be maximal
  for (int a = 0; a < d; ++a)
    c[a] = (static_cast<double>(floor_div2(cube[a])) + 0.5) * (2.0 * side);
  return dist_to_balls(c) < 4.0 * side * diam_scale_;
}

void WhitneyProjector::stencil(const Point& p, std::vector<std::pair<int, double>>& out) const {
  out.clear();
  if (!space_->in_X(p)) throw UsageError("WhitneyProjector: point lies outside X");
  const int d = space_->ambient_dim;
  double dist = 0.0;
  const int vnear = nearest_vertex(*space_, *net_, p, &dist);
  if (vnear >= 0 && dist <= net_->r / 4.0) {
    out.emplace_back(vnear, 1.0);
    return;
  }

  const double dp = dist - net_->r / 4.0;  // distance to the ball union, > 0 here
  // start one level above the coarsest possibly-admissible level, so the walk
  // always enters at an inadmissible cube and the first hit is maximal
  int level = static_cast<int>(std::floor(std::log2(1.5 * diam_scale_ / dp))) - 1;
  thread_local Point c;
  c.resize(d);
  std::int64_t cube[4];
  int found_level = -1;
  for (; level <= max_level_; ++level) {
    const double side = std::exp2(static_cast<double>(-level));
    for (int a = 0; a < d; ++a) {
      cube[a] = static_cast<std::int64_t>(std::floor(p[a] / side));
      c[a] = (static_cast<double>(cube[a]) + 0.5) * side;
    }
    if (dist_to_balls(c) >= 2.0 * side * diam_scale_) {
      found_level = level;
      break;
    }
  }
  if (found_level < 0) {
    // query point pathologically close to a ball boundary; use its value
    fallbacks_.fetch_add(1);
    out.emplace_back(vnear, 1.0);
    return;
  }

  double den = 0.0;
  std::int64_t probe[4], base[4];
  int off[4];
  for (int k = std::max(1, found_level - 2); k <= std::min(max_level_, found_level + 2); ++k) {
    const double side = std::exp2(static_cast<double>(-k));
    for (int a = 0; a < d; ++a) {
      base[a] = static_cast<std::int64_t>(std::floor(p[a] / side));
      off[a] = -1;
    }
    for (;;) {
      bool inside_support = true;
      for (int a = 0; a < d; ++a) {
        probe[a] = base[a] + off[a];
        c[a] = (static_cast<double>(probe[a]) + 0.5) * side;
        if (std::abs(p[a] - c[a]) >= (9.0 / 16.0) * side) {
          inside_support = false;
          break;
        }
      }
      if (inside_support && maximal_admissible(probe, k, nullptr)) {
        double psi = 1.0;
        for (int a = 0; a < d; ++a)
          psi *= bump_eta(std::abs(p[a] - c[a]) / ((9.0 / 16.0) * side));
        if (psi > 0.0) {
          const int vid = nearest_vertex(*space_, *net_, c, nullptr);
          out.emplace_back(vid, psi);
          den += psi;
        }
      }
      int a = 0;
      for (; a < d; ++a) {
        if (++off[a] <= 1) break;
        off[a] = -1;
      }
      if (a == d) break;
    }
  }
  if (den <= 0.0) {
    fallbacks_.fetch_add(1);
    out.clear();
    out.emplace_back(vnear, 1.0);
    return;
  }
  for (auto& term : out) term.second /= den;
}

double WhitneyProjector::operator()(const Point& p) const {
  thread_local std::vector<std::pair<int, double>> st;
  stencil(p, st);
  double acc = 0.0;
  for (const auto& [v, w] : st) acc += w * u_[v];
  return acc;
}

// --- finite-difference gradient energy ------------------------------------------

double fd_gradient_energy(const Space& s, const std::function<double(const Point&)>& eval,
                          double h) {
  if (s.metric_kind == MetricKind::koranyi)
    throw UsageError("fd_gradient_energy: euclidean-chart instances only");
  const int d = s.ambient_dim;
  auto density_at = [&](const Point& p) {
    return s.measure_kind == MeasureKind::density ? s.density(p) : 1.0;
  };
  Vec step = Vec::Constant(d, h);
  if (s.metric_kind == MetricKind::weighted_euclidean)
    for (int a = 0; a < d; ++a) step[a] = h / std::sqrt(s.metric_weights[a]);

  if (d == 1) {
    const int nx = static_cast<int>(std::floor((s.bounds.hi[0] - s.bounds.lo[0]) / step[0])) + 1;
    std::vector<double> cell(std::max(0, nx - 1), 0.0);
    Point p(1);
    p[0] = s.bounds.lo[0];
    double prev = eval(p);
    for (int i = 1; i < nx; ++i) {
      Point q(1);
      q[0] = s.bounds.lo[0] + i * step[0];
      const double cur = eval(q);
      const double g = (cur - prev) / h;
      Point mid(1);
      mid[0] = q[0] - 0.5 * step[0];
      cell[i - 1] = g * g * density_at(mid) * step[0];
      prev = cur;
    }
    return pairwise_sum(cell);
  }

  if (d != 2) throw UsageError("fd_gradient_energy: unsupported dimension");
  const int nx = static_cast<int>(std::floor((s.bounds.hi[0] - s.bounds.lo[0]) / step[0])) + 1;
  const int ny = static_cast<int>(std::floor((s.bounds.hi[1] - s.bounds.lo[1]) / step[1])) + 1;
  std::vector<double> row(nx), next(nx);
  std::vector<double> row_sums;
  row_sums.reserve(std::max(0, ny - 1));
  Point p(2);
  for (int i = 0; i < nx; ++i) {
    p[0] = s.bounds.lo[0] + i * step[0];
    p[1] = s.bounds.lo[1];
    row[i] = eval(p);
  }
  const double cell_area = step[0] * step[1];
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      p[0] = s.bounds.lo[0] + i * step[0];
      p[1] = s.bounds.lo[1] + j * step[1];
      next[i] = eval(p);
    }
    std::vector<double> acc(std::max(0, nx - 1), 0.0);
    for (int i = 0; i + 1 < nx; ++i) {
      const double gx = (row[i + 1] - row[i]) / h;
      const double gy = (next[i] - row[i]) / h;
      p[0] = s.bounds.lo[0] + i * step[0];
      p[1] = s.bounds.lo[1] + (j - 1) * step[1];
      acc[i] = (gx * gx + gy * gy) * density_at(p) * cell_area;
    }
    row_sums.push_back(pairwise_sum(acc));
    row.swap(next);
  }
  return pairwise_sum(row_sums);
}

std::vector<double> fd_gradient_energy_fields(const Space& s, const WhitneyProjector& proj,
                                              const std::vector<const Vec*>& fields, double h) {
  if (s.metric_kind == MetricKind::koranyi)
    throw UsageError("fd_gradient_energy_fields: euclidean-chart instances only");
  const int d = s.ambient_dim;
  const int nf = static_cast<int>(fields.size());
  auto density_at = [&](const Point& p) {
    return s.measure_kind == MeasureKind::density ? s.density(p) : 1.0;
  };
  Vec step = Vec::Constant(d, h);
  if (s.metric_kind == MetricKind::weighted_euclidean)
    for (int a = 0; a < d; ++a) step[a] = h / std::sqrt(s.metric_weights[a]);

  std::vector<std::pair<int, double>> st;
  auto eval_all = [&](const Point& p, double* dst) {
    proj.stencil(p, st);
    for (int f = 0; f < nf; ++f) {
      double acc = 0.0;
      for (const auto& [v, w] : st) acc += w * (*fields[f])[v];
      dst[f] = acc;
    }
  };

  if (d == 1) {
    const int nx = static_cast<int>(std::floor((s.bounds.hi[0] - s.bounds.lo[0]) / step[0])) + 1;
    std::vector<double> prev(nf), cur(nf), acc(nf, 0.0);
    Point p(1);
    p[0] = s.bounds.lo[0];
    eval_all(p, prev.data());
    for (int i = 1; i < nx; ++i) {
      p[0] = s.bounds.lo[0] + i * step[0];
      eval_all(p, cur.data());
      Point mid(1);
      mid[0] = p[0] - 0.5 * step[0];
      const double wcell = density_at(mid) * step[0];
      for (int f = 0; f < nf; ++f) {
        const double g = (cur[f] - prev[f]) / h;
        acc[f] += g * g * wcell;
      }
      prev.swap(cur);
    }
    return acc;
  }

  if (d != 2) throw UsageError("fd_gradient_energy_fields: unsupported dimension");
  const int nx = static_cast<int>(std::floor((s.bounds.hi[0] - s.bounds.lo[0]) / step[0])) + 1;
  const int ny = static_cast<int>(std::floor((s.bounds.hi[1] - s.bounds.lo[1]) / step[1])) + 1;
  std::vector<double> row(static_cast<std::size_t>(nx) * nf);
  std::vector<double> next(static_cast<std::size_t>(nx) * nf);
  std::vector<double> acc(nf, 0.0);
  Point p(2);
  for (int i = 0; i < nx; ++i) {
    p[0] = s.bounds.lo[0] + i * step[0];
    p[1] = s.bounds.lo[1];
    eval_all(p, row.data() + static_cast<std::size_t>(i) * nf);
  }
  const double cell_area = step[0] * step[1];
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      p[0] = s.bounds.lo[0] + i * step[0];
      p[1] = s.bounds.lo[1] + j * step[1];
      eval_all(p, next.data() + static_cast<std::size_t>(i) * nf);
    }
    for (int i = 0; i + 1 < nx; ++i) {
      p[0] = s.bounds.lo[0] + i * step[0];
      p[1] = s.bounds.lo[1] + (j - 1) * step[1];
      const double wcell = density_at(p) * cell_area;
      const double* v0 = row.data() + static_cast<std::size_t>(i) * nf;
      const double* vx = row.data() + static_cast<std::size_t>(i + 1) * nf;
      const double* vy = next.data() + static_cast<std::size_t>(i) * nf;
      for (int f = 0; f < nf; ++f) {
        const double gx = (vx[f] - v0[f]) / h;
        const double gy = (vy[f] - v0[f]) / h;
        acc[f] += (gx * gx + gy * gy) * wcell;
      }
    }
    row.swap(next);
  }
  return acc;
}

// --- verification ---------------------------------------------------------------

ProjectionVerifyReport verify_projection(const Space& s, const Graph& g, const Net& net,
                                         const DiscreteField& u, ProjectionKind kind,
                                         const ProjectionVerifyOptions& opt) {
  ProjectionVerifyReport rep;
  rep.kind = kind;
  if (kind == ProjectionKind::whitney && s.metric_kind == MetricKind::koranyi) {
    rep.applicable = false;
    return rep;
  }

  std::function<double(const Point&)> eval;
  std::unique_ptr<WhitneyProjector> wp;
  std::unique_ptr<PathIntegralProjector> pp;
  if (kind == ProjectionKind::whitney) {
    wp = std::make_unique<WhitneyProjector>(s, g, net, u, opt.depth_cap);
    eval = [&w = *wp](const Point& p) { return w(p); };
  } else {
    pp = std::make_unique<PathIntegralProjector>(s, g, net, u,
                                                 net.r * opt.lattice_pitch_factor);
    eval = [&pj = *pp](const Point& p) { return pj(p); };
  }

  // (a): ball averages reproduce vertex values
  rep.consistency_max_err = 0.0;
  for (int i = 0; i < net.size(); ++i) {
    const auto nodes = sample_ball(s, net.vertices[i], net.r / 4.0, opt.quad_n, opt.seed);
    double acc = 0.0, mass = 0.0;
    for (const auto& q : nodes) {
      acc += q.w * eval(q.p);
      mass += q.w;
    }
    rep.consistency_max_err =
        std::max(rep.consistency_max_err, std::abs(acc / mass - u.values[i]));
  }
  rep.consistency_ok = rep.consistency_max_err <= 1e-8;

  // (b): FD gradient energy vs graph energy (euclidean charts)
  if (s.metric_kind != MetricKind::koranyi) {
    rep.domination_applicable = true;
    rep.fd_grad_energy = fd_gradient_energy(s, eval, net.r * opt.fd_pitch_factor);
    rep.graph_energy_u = graph_energy(g, net, u);
    rep.domination_ratio =
        rep.graph_energy_u > 0.0 ? rep.fd_grad_energy / rep.graph_energy_u : 0.0;
  }

  // (c): exterior probes vanish exactly for compactly supported fields
  bool compact = net.interior.size() == static_cast<std::size_t>(net.size());
  if (compact)
    for (int i = 0; i < net.size(); ++i)
      if (!net.interior[i] && u.values[i] != 0.0) compact = false;
  if (compact) {
    rep.boundary_applicable = true;
    Rng rng(opt.seed ^ 0xB0);
    Point p(s.ambient_dim);
    int found = 0, guard = 0;
    while (found < opt.probes && guard < 100 * opt.probes + 1000) {
      ++guard;
      for (int a = 0; a < s.ambient_dim; ++a)
        p[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
      if (s.in_domain(p)) continue;
      ++found;
      if (eval(p) != 0.0) ++rep.boundary_violations;
    }
    rep.boundary_probes = found;
    rep.boundary_ok = rep.boundary_violations == 0;
  }

  // extended: integral of gbar along sampled segments dominates increments
  if (opt.extended) {
    const DiscreteField grad = graph_gradient(g, u);
    Rng rng(opt.seed ^ 0xC1);
    Point a(s.ambient_dim), b(s.ambient_dim);
    for (int t = 0; t < opt.curve_pairs; ++t) {
      for (int ax = 0; ax < s.ambient_dim; ++ax) {
        a[ax] = rng.uniform(s.bounds.lo[ax], s.bounds.hi[ax]);
        b[ax] = rng.uniform(s.bounds.lo[ax], s.bounds.hi[ax]);
      }
      const int pieces =
          std::max(8, static_cast<int>(std::ceil(distance(s, a, b) / (net.r / 16.0))));
      double integral = 0.0;
      Point prev = a;
      for (int k = 1; k <= pieces; ++k) {
        Point cur = a + (b - a) * (static_cast<double>(k) / pieces);
        integral += distance(s, prev, cur) *
                    gbar_from_grad(s, net, grad.values, 0.5 * (prev + cur));
        prev = cur;
      }
      const double inc = std::abs(eval(b) - eval(a));
      const double slack = inc - integral;
      rep.curve_worst_slack = std::max(rep.curve_worst_slack, slack);
      if (slack > 0.05 * (integral + std::abs(inc)) + 1e-12) ++rep.curve_violations;
      ++rep.curve_pairs;
    }
  }
  return rep;
}

LipschitzReport lipschitz_probe(const Space& s, const Graph& g, const Net& net,
                                const DiscreteField& u, int pairs, std::uint64_t seed,
                                double cap) {
  LipschitzReport rep;
  rep.pairs = pairs;
  rep.cap = cap;
  WhitneyProjector proj(s, g, net, u);
  const DiscreteField grad = graph_gradient(g, u);
  std::vector<int> scratch;
  Rng rng(seed);
  Point x(s.ambient_dim), y(s.ambient_dim);
  int made = 0, guard = 0;
  while (made < pairs && guard < 100 * pairs + 1000) {
    ++guard;
    for (int a = 0; a < s.ambient_dim; ++a) x[a] = rng.uniform(s.bounds.lo[a], s.bounds.hi[a]);
    const double step = net.r * std::pow(10.0, -2.0 * rng.uniform());  // d(x, y) < r
    bool ok = true;
    for (int a = 0; a < s.ambient_dim; ++a) {
      y[a] = x[a] + step * (2.0 * rng.uniform() - 1.0) / std::sqrt(double(s.ambient_dim));
      if (y[a] < s.bounds.lo[a] || y[a] > s.bounds.hi[a]) ok = false;
    }
    if (!ok || !(distance(s, x, y) < net.r) || distance(s, x, y) == 0.0) continue;
    ++made;
    // sup of |grad_r u| over vertices within 3r of x
    net.index.query_box(x, ball_coord_halfwidths(s, x, 3.0 * net.r), scratch);
    double sup = 0.0;
    for (int id : scratch)
      if (distance(s, x, net.vertices[id]) <= 3.0 * net.r)
        sup = std::max(sup, grad.values[id]);
    const double num = std::abs(proj(x) - proj(y));
    const double den = sup * distance(s, x, y);
    if (den == 0.0) {
      if (num != 0.0) ++rep.flagged;
      continue;
    }
    ++rep.used;
    rep.max_ratio = std::max(rep.max_ratio, num / den);
  }
  rep.ok = rep.flagged == 0 && rep.max_ratio < cap;
  return rep;
}

}  // namespace harmonet
