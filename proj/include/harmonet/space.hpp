#pragma once

#include "harmonet/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace harmonet {

enum class MetricKind { euclidean, weighted_euclidean, koranyi };
enum class MeasureKind { lebesgue, density };
enum class DomainKind { interval, rectangle, disk };

struct Box {
  Vec lo, hi;
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Point& p) const {
    for (int a = 0; a < dim(); ++a)
      if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
  }
  Vec span() const { return hi - lo; }
};

using ScalarField = std::function<double(const Point&)>;

// A metric measure space (X, d, mu) with a bounded open domain Omega inside.
// X itself is the coordinate box `bounds`; the metric and measure kinds pick
// the distance and ball-measure rules. All fields are immutable after setup.
struct Space {
  int ambient_dim = 1;
  MetricKind metric_kind = MetricKind::euclidean;
  MeasureKind measure_kind = MeasureKind::lebesgue;
  Vec metric_weights;  // weighted_euclidean only; positive per axis
  ScalarField density;              // measure_kind == density
  std::string density_name;         // participates in the space hash
  Box bounds;
  DomainKind domain_kind = DomainKind::interval;
  Vec domain_params;  // interval [a,b]; rectangle [a1,b1,a2,b2]; disk [c..,R]
  ScalarField reference;            // optional classical comparison solution
  std::string reference_name = "none";
  double mc_rel_tol = 1e-3;         // relative std-error target for MC measures
  std::uint64_t measure_seed = 1;   // base seed for MC ball measures

  bool in_X(const Point& p) const { return bounds.contains(p); }
  bool in_domain(const Point& p) const;  // open Omega membership
  std::uint64_t hash() const;
  double diameter_estimate() const;  // max metric distance over box corners
};

// --- metric -----------------------------------------------------------------

double distance(const Space& s, const Point& p, const Point& q);

// Korányi gauge on the first Heisenberg group, coordinates (x, y, t).
double koranyi_gauge(const Point& v);
Point heisenberg_inverse(const Point& p);
Point heisenberg_multiply(const Point& p, const Point& q);

// Per-axis halfwidths of a coordinate box guaranteed to contain B(center, radius).
Vec ball_coord_halfwidths(const Space& s, const Point& center, double radius);

// --- measure ----------------------------------------------------------------

struct BallMeasure {
  double value = 0.0;
  double std_error = 0.0;  // zero for closed-form evaluations
  bool analytic = true;
  std::int64_t samples = 0;
};

BallMeasure ball_measure_detail(const Space& s, const Point& center, double radius);
double ball_measure(const Space& s, const Point& center, double radius);

// Signed distance to the domain complement: positive depth inside Omega,
// negative distance to Omega outside. B(p, rho) subset Omega iff margin >= rho.
double domain_margin(const Space& s, const Point& p);

struct WeightedPoint {
  Point p;
  double w = 0.0;
};

// Quadrature nodes/weights for averages over B(center, radius) ∩ X. Nodes lie
// strictly inside the closed ball; weights sum to ball_measure.
std::vector<WeightedPoint> sample_ball(const Space& s, const Point& center, double radius,
                                       int n, std::uint64_t seed);

// Exact area of a disk clipped to an axis-aligned box (2D Lebesgue helper).
double disk_box_area(double cx, double cy, double radius, const Box& box);

// Volume of the unit Korányi gauge ball (pi^2/8); balls scale as radius^4.
double koranyi_unit_ball_volume();

}  // namespace harmonet
