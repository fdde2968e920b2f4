#include "harmonet/space.hpp"

#include "harmonet/functions.hpp"

#include <algorithm>
#include <cmath>

namespace harmonet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sq(double x) { return x * x; }

void check_dim(const Space& s, const Point& p, const char* what) {
  if (p.size() != s.ambient_dim)
    throw UsageError(std::string(what) + ": point dimension " + std::to_string(p.size()) +
                     " does not match ambient dimension " + std::to_string(s.ambient_dim));
}

}  // namespace

// --- metric -----------------------------------------------------------------

double koranyi_gauge(const Point& v) {
  const double xy2 = sq(v[0]) + sq(v[1]);
  return std::pow(sq(xy2) + 16.0 * sq(v[2]), 0.25);
}

Point heisenberg_inverse(const Point& p) { return -p; }

Point heisenberg_multiply(const Point& p, const Point& q) {
  Point out(3);
  out[0] = p[0] + q[0];
  out[1] = p[1] + q[1];
  out[2] = p[2] + q[2] + 0.5 * (p[0] * q[1] - p[1] * q[0]);
  return out;
}

double distance(const Space& s, const Point& p, const Point& q) {
  check_dim(s, p, "distance");
  check_dim(s, q, "distance");
  switch (s.metric_kind) {
    case MetricKind::euclidean:
      return (p - q).norm();
    case MetricKind::weighted_euclidean: {
      double acc = 0.0;
      for (int a = 0; a < s.ambient_dim; ++a) acc += s.metric_weights[a] * sq(p[a] - q[a]);
      return std::sqrt(acc);
    }
    case MetricKind::koranyi:
      return koranyi_gauge(heisenberg_multiply(heisenberg_inverse(p), q));
  }
  return 0.0;
}

Vec ball_coord_halfwidths(const Space& s, const Point& center, double radius) {
  Vec hw(s.ambient_dim);
  switch (s.metric_kind) {
    case MetricKind::euclidean:
      hw.setConstant(radius);
      break;
    case MetricKind::weighted_euclidean:
      for (int a = 0; a < s.ambient_dim; ++a) hw[a] = radius / std::sqrt(s.metric_weights[a]);
      break;
    case MetricKind::koranyi:
      hw[0] = radius;
      hw[1] = radius;
      // group translation shears t by half the moment arm of the center
      hw[2] = 0.25 * sq(radius) + 0.5 * radius * (std::abs(center[0]) + std::abs(center[1]));
      break;
  }
  return hw;
}

double Space::diameter_estimate() const {
  const int d = ambient_dim;
  std::vector<Point> corners;
  for (int mask = 0; mask < (1 << d); ++mask) {
    Point c(d);
    for (int a = 0; a < d; ++a) c[a] = (mask >> a) & 1 ? bounds.hi[a] : bounds.lo[a];
    corners.push_back(std::move(c));
  }
  double best = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i)
    for (std::size_t j = i + 1; j < corners.size(); ++j)
      best = std::max(best, distance(*this, corners[i], corners[j]));
  return best;
}

// --- domain -----------------------------------------------------------------

double domain_margin(const Space& s, const Point& p) {
  check_dim(s, p, "domain_margin");
  switch (s.domain_kind) {
    case DomainKind::interval: {
      const double a = s.domain_params[0], b = s.domain_params[1];
      return std::min(p[0] - a, b - p[0]);
    }
    case DomainKind::rectangle: {
      if (s.metric_kind == MetricKind::koranyi)
        throw UsageError("domain_margin: rectangle domain unsupported on the koranyi instance");
      bool inside = true;
      double inner = std::numeric_limits<double>::infinity();
      double outer2 = 0.0;
      for (int a = 0; a < s.ambient_dim; ++a) {
        const double lo = s.domain_params[2 * a], hi = s.domain_params[2 * a + 1];
        const double w = s.metric_kind == MetricKind::weighted_euclidean
                             ? std::sqrt(s.metric_weights[a])
                             : 1.0;
        const double d_lo = (p[a] - lo) * w, d_hi = (hi - p[a]) * w;
        if (d_lo < 0.0 || d_hi < 0.0) {
          inside = false;
          outer2 += sq(std::min(d_lo, d_hi));
        } else {
          inner = std::min(inner, std::min(d_lo, d_hi));
        }
      }
      return inside ? inner : -std::sqrt(outer2);
    }
    case DomainKind::disk: {
      Point c = s.domain_params.head(s.ambient_dim);
      const double radius = s.domain_params[s.ambient_dim];
      // For the gauge metric this is a conservative surrogate: exact on radial
      // alignments, never larger than the true complement distance.
      return radius - distance(s, c, p);
    }
  }
  return 0.0;
}

bool Space::in_domain(const Point& p) const { return domain_margin(*this, p) > 0.0; }

// --- clipped-ball geometry ---------------------------------------------------

namespace {

// Antiderivative of sqrt(rho^2 - y^2).
double circ_F(double y, double rho) {
  const double c = std::clamp(y / rho, -1.0, 1.0);
  const double h = std::sqrt(std::max(0.0, sq(rho) - sq(y)));
  return 0.5 * (y * h + sq(rho) * std::asin(c));
}

double circ_H(double y0, double y1, double rho) {
  if (y1 <= y0) return 0.0;
  return circ_F(y1, rho) - circ_F(y0, rho);
}

// Integral over [y0, y1] of clamp(a, -h(y), h(y)), h(y) = sqrt(rho^2 - y^2).
double circ_T(double a, double y0, double y1, double rho) {
  if (y1 <= y0) return 0.0;
  if (a >= rho) return circ_H(y0, y1, rho);
  if (a <= -rho) return -circ_H(y0, y1, rho);
  const double ya = std::sqrt(std::max(0.0, sq(rho) - sq(a)));
  const double i0 = std::max(y0, -ya), i1 = std::min(y1, ya);
  double acc = a * std::max(0.0, i1 - i0);
  const double sgn = a >= 0.0 ? 1.0 : -1.0;
  acc += sgn * circ_H(y0, std::min(y1, -ya), rho);
  acc += sgn * circ_H(std::max(y0, ya), y1, rho);
  return acc;
}

// Area of disk((0,0), rho) ∩ {x <= a} ∩ {y <= b}.
double circ_quadrant_area(double a, double b, double rho) {
  if (a <= -rho || b <= -rho) return 0.0;
  const double b1 = std::min(b, rho);
  return circ_H(-rho, b1, rho) + circ_T(std::min(a, rho), -rho, b1, rho);
}

}  // namespace

double disk_box_area(double cx, double cy, double radius, const Box& box) {
  const double x0 = box.lo[0] - cx, x1 = box.hi[0] - cx;
  const double y0 = box.lo[1] - cy, y1 = box.hi[1] - cy;
  const double area = circ_quadrant_area(x1, y1, radius) - circ_quadrant_area(x0, y1, radius) -
                      circ_quadrant_area(x1, y0, radius) + circ_quadrant_area(x0, y0, radius);
  return std::max(0.0, area);
}

double koranyi_unit_ball_volume() { return sq(kPi) / 8.0; }

// --- measure ----------------------------------------------------------------

namespace {

std::uint64_t call_seed(const Space& s, const Point& center, double radius, std::uint64_t salt) {
  std::uint64_t h = s.measure_seed;
  h = hash_mix(h, center);
  h = hash_mix(h, radius);
  h = hash_mix(h, salt);
  return h;
}

// Lebesgue measure of B(center, radius) ∩ bounds for the euclidean and
// weighted-euclidean metrics; exact in closed form.
double euclid_clipped_volume(const Space& s, const Point& center, double radius) {
  const int d = s.ambient_dim;
  Vec wscale = Vec::Ones(d);
  double jac = 1.0;
  if (s.metric_kind == MetricKind::weighted_euclidean) {
    for (int a = 0; a < d; ++a) {
      wscale[a] = std::sqrt(s.metric_weights[a]);
      jac *= wscale[a];
    }
  }
  if (d == 1) {
    const double lo = std::max(s.bounds.lo[0] * wscale[0], center[0] * wscale[0] - radius);
    const double hi = std::min(s.bounds.hi[0] * wscale[0], center[0] * wscale[0] + radius);
    return std::max(0.0, hi - lo) / jac;
  }
  if (d == 2) {
    Box sb{Vec(2), Vec(2)};
    for (int a = 0; a < 2; ++a) {
      sb.lo[a] = s.bounds.lo[a] * wscale[a];
      sb.hi[a] = s.bounds.hi[a] * wscale[a];
    }
    return disk_box_area(center[0] * wscale[0], center[1] * wscale[1], radius, sb) / jac;
  }
  throw UsageError("euclidean instances support ambient dimension 1 or 2");
}

// Draws a point uniformly (w.r.t. Lebesgue) in the gauge ball B(center, radius).
Point koranyi_ball_sample(const Point& center, double radius, Rng& rng) {
  for (;;) {
    // radial density prop. to s*sqrt(radius^4 - s^4)
    double sr;
    for (;;) {
      sr = radius * std::sqrt(rng.uniform());
      const double accept = std::sqrt(std::max(0.0, 1.0 - sq(sq(sr / radius))));
      if (rng.uniform() <= accept) break;
    }
    const double theta = 2.0 * kPi * rng.uniform();
    const double tmax = 0.25 * std::sqrt(std::max(0.0, sq(sq(radius)) - sq(sq(sr))));
    Point xi(3);
    xi[0] = sr * std::cos(theta);
    xi[1] = sr * std::sin(theta);
    xi[2] = rng.uniform(-tmax, tmax);
    Point p = heisenberg_multiply(center, xi);
    // guard against roundoff pushing the composed point past the radius
    if (koranyi_gauge(heisenberg_multiply(heisenberg_inverse(center), p)) <= radius) return p;
  }
}

// Draws a point uniformly in the euclidean/weighted ball (not clipped to X).
Point euclid_ball_sample(const Space& s, const Point& center, double radius, Rng& rng) {
  const int d = s.ambient_dim;
  Point p(d);
  if (d == 1) {
    p[0] = center[0] + radius * (2.0 * rng.uniform() - 1.0);
  } else {
    const double rr = radius * std::sqrt(rng.uniform());
    const double th = 2.0 * kPi * rng.uniform();
    p[0] = rr * std::cos(th);
    p[1] = rr * std::sin(th);
    if (s.metric_kind == MetricKind::weighted_euclidean)
      for (int a = 0; a < 2; ++a) p[a] /= std::sqrt(s.metric_weights[a]);
    p += center;
  }
  return p;
}

struct MeanEstimate {
  double mean = 0.0;
  double rel_se = 0.0;
  std::int64_t n = 0;
};

// Mean of `f` over uniform draws from `draw`, grown until the relative
// standard error of the mean drops below tol.
template <typename Draw, typename F>
MeanEstimate adaptive_mean(Draw&& draw, F&& f, double tol, std::uint64_t seed) {
  std::int64_t n = 256;
  const std::int64_t cap = 1 << 22;
  MeanEstimate est;
  for (;;) {
    Rng rng(seed + static_cast<std::uint64_t>(n));
    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double v = f(draw(rng));
      sum += v;
      sum2 += v * v;
    }
    est.mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - sq(est.mean));
    const double se = std::sqrt(var / static_cast<double>(n));
    est.rel_se = std::abs(est.mean) > 0.0 ? se / std::abs(est.mean) : se;
    est.n = n;
    if (est.rel_se <= tol || (var == 0.0 && n >= 1024)) return est;
    if (n >= cap) return est;  // caller decides whether to fail
    n *= 4;
  }
}

}  // namespace

BallMeasure ball_measure_detail(const Space& s, const Point& center, double radius) {
  check_dim(s, center, "ball_measure");
  if (!(radius > 0.0)) throw UsageError("ball_measure: radius must be positive");
  BallMeasure out;

  if (s.metric_kind != MetricKind::koranyi) {
    const double vol = euclid_clipped_volume(s, center, radius);
    if (s.measure_kind == MeasureKind::lebesgue) {
      out.value = vol;
      return out;
    }
    // exact clipped geometry times MC mean of the density over B ∩ X
    auto draw = [&](Rng& rng) {
      for (;;) {
        Point p = euclid_ball_sample(s, center, radius, rng);
        if (s.in_X(p)) return p;
      }
    };
    auto est = adaptive_mean(draw, [&](const Point& p) { return s.density(p); }, s.mc_rel_tol,
                             call_seed(s, center, radius, 0xD1));
    out.value = vol * est.mean;
    out.std_error = vol * est.rel_se * std::abs(est.mean);
    out.analytic = false;
    out.samples = est.n;
    if (est.rel_se > s.mc_rel_tol)
      throw AccuracyError("ball_measure: Monte Carlo standard error above tolerance", out.value,
                          out.std_error);
    return out;
  }

  // koranyi: unclipped gauge balls have exact volume kappa * radius^4
  const double full = koranyi_unit_ball_volume() * sq(sq(radius));
  const Vec hw = ball_coord_halfwidths(s, center, radius);
  bool inside = true;
  for (int a = 0; a < 3; ++a)
    if (center[a] - hw[a] < s.bounds.lo[a] || center[a] + hw[a] > s.bounds.hi[a]) inside = false;

  if (inside && s.measure_kind == MeasureKind::lebesgue) {
    out.value = full;
    return out;
  }
  auto draw = [&](Rng& rng) { return koranyi_ball_sample(center, radius, rng); };
  auto f = [&](const Point& p) {
    if (!s.in_X(p)) return 0.0;
    return s.measure_kind == MeasureKind::lebesgue ? 1.0 : s.density(p);
  };
  auto est = adaptive_mean(draw, f, s.mc_rel_tol, call_seed(s, center, radius, 0xD2));
  out.value = full * est.mean;
  out.std_error = full * est.rel_se * std::abs(est.mean);
  out.analytic = false;
  out.samples = est.n;
  if (est.rel_se > s.mc_rel_tol)
    throw AccuracyError("ball_measure: Monte Carlo standard error above tolerance", out.value,
                        out.std_error);
  return out;
}

double ball_measure(const Space& s, const Point& center, double radius) {
  return ball_measure_detail(s, center, radius).value;
}

// --- ball quadrature ----------------------------------------------------------

std::vector<WeightedPoint> sample_ball(const Space& s, const Point& center, double radius, int n,
                                       std::uint64_t seed) {
  check_dim(s, center, "sample_ball");
  if (n < 1) throw UsageError("sample_ball: n must be >= 1");
  if (!s.in_X(center)) throw UsageError("sample_ball: center lies outside X");
  const double mass = ball_measure(s, center, radius);

  std::vector<WeightedPoint> pts;
  if (n == 1) {
    pts.push_back({center, mass});
    return pts;
  }

  auto density_at = [&](const Point& p) {
    return s.measure_kind == MeasureKind::density ? s.density(p) : 1.0;
  };

  if (s.metric_kind != MetricKind::koranyi && s.ambient_dim == 1) {
    // composite midpoint rule on the clipped interval
    const double wsc = s.metric_kind == MetricKind::weighted_euclidean
                           ? std::sqrt(s.metric_weights[0])
                           : 1.0;
    const double lo = std::max(s.bounds.lo[0], center[0] - radius / wsc);
    const double hi = std::min(s.bounds.hi[0], center[0] + radius / wsc);
    const double h = (hi - lo) / n;
    for (int k = 0; k < n; ++k) {
      Point p(1);
      p[0] = lo + (k + 0.5) * h;
      pts.push_back({p, h * density_at(p)});
    }
  } else if (s.metric_kind != MetricKind::koranyi) {
    // polar rule: Gauss-Legendre in the area variable, midpoint in angle
    const int n_rad = std::max(1, static_cast<int>(std::floor(std::sqrt(n / 4.0))));
    const int n_ang = std::max(4, n / n_rad);
    std::vector<double> gx, gw;
    gauss_legendre_01(n_rad, gx, gw);
    Vec inv_w = Vec::Ones(2);
    if (s.metric_kind == MetricKind::weighted_euclidean)
      for (int a = 0; a < 2; ++a) inv_w[a] = 1.0 / std::sqrt(s.metric_weights[a]);
    for (int i = 0; i < n_rad; ++i) {
      const double rr = radius * std::sqrt(gx[i]);
      for (int j = 0; j < n_ang; ++j) {
        const double th = 2.0 * kPi * (j + 0.5) / n_ang;
        Point p(2);
        p[0] = center[0] + rr * std::cos(th) * inv_w[0];
        p[1] = center[1] + rr * std::sin(th) * inv_w[1];
        if (!s.in_X(p)) continue;
        pts.push_back({p, gw[i] / n_ang * density_at(p)});
      }
    }
  } else {
    Rng rng(call_seed(s, center, radius, seed ^ 0x5B));
    int draws = 0;
    const int cap = 64 * n + 1024;
    while (static_cast<int>(pts.size()) < n && draws < cap) {
      ++draws;
      Point p = koranyi_ball_sample(center, radius, rng);
      if (!s.in_X(p)) continue;
      pts.push_back({p, density_at(p)});
    }
    if (pts.empty()) throw UsageError("sample_ball: ball does not intersect X");
  }

  if (pts.empty()) throw UsageError("sample_ball: ball does not intersect X");
  double raw = 0.0;
  for (const auto& q : pts) raw += q.w;
  const double scale = mass / raw;
  for (auto& q : pts) q.w *= scale;
  return pts;
}

// --- hashing ------------------------------------------------------------------

std::uint64_t Space::hash() const {
  std::uint64_t h = 0xCBF29CE484222325ull;
  h = hash_mix(h, static_cast<std::uint64_t>(ambient_dim));
  h = hash_mix(h, static_cast<std::uint64_t>(metric_kind));
  h = hash_mix(h, static_cast<std::uint64_t>(measure_kind));
  h = hash_mix(h, static_cast<std::uint64_t>(domain_kind));
  if (metric_weights.size()) h = hash_mix(h, metric_weights);
  h = hash_mix(h, density_name);
  h = hash_mix(h, bounds.lo);
  h = hash_mix(h, bounds.hi);
  h = hash_mix(h, domain_params);
  h = hash_mix(h, reference_name);
  h = hash_mix(h, mc_rel_tol);
  h = hash_mix(h, measure_seed);
  return h;
}

}  // namespace harmonet
