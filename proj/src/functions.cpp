#include "harmonet/functions.hpp"

#include <cmath>
#include <sstream>

namespace harmonet {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? t : p1;
      const double pn_prev = n == 1 ? 1.0 : p0;
      dp = n * (t * pn - pn_prev) / (t * t - 1.0);
      const double step = pn / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 + t);
    weights[i] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
}

NamedFunction make_function(const std::string& spec, int dim) {
  NamedFunction nf;
  nf.name = spec;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (head == "zero") {
    nf.f = [](const Point&) { return 0.0; };
    nf.grad_sq = [](const Point&) { return 0.0; };
    nf.has_grad = true;
  } else if (head == "one") {
    nf.f = [](const Point&) { return 1.0; };
    nf.grad_sq = [](const Point&) { return 0.0; };
    nf.has_grad = true;
  } else if (head == "coordinate") {
    const int k = args.empty() ? 0 : std::stoi(args);
    if (k < 0 || k >= dim) throw UsageError("make_function: coordinate index out of range");
    nf.f = [k](const Point& p) { return p[k]; };
    nf.grad_sq = [](const Point&) { return 1.0; };
    nf.has_grad = true;
  } else if (head == "affine") {
    auto c = parse_list(args);
    if (static_cast<int>(c.size()) != dim + 1)
      throw UsageError("make_function: affine needs dim+1 coefficients");
    const double c_const = c.back();
    c.pop_back();
    double g2 = 0.0;
    for (double ci : c) g2 += ci * ci;
    nf.f = [c, c_const](const Point& p) {
      double acc = c_const;
      for (std::size_t a = 0; a < c.size(); ++a) acc += c[a] * p[a];
      return acc;
    };
    nf.grad_sq = [g2](const Point&) { return g2; };
    nf.has_grad = true;
  } else if (head == "saddle") {
    if (dim < 2) throw UsageError("make_function: saddle needs dimension >= 2");
    nf.f = [](const Point& p) { return p[0] * p[0] - p[1] * p[1]; };
    nf.grad_sq = [](const Point& p) { return 4.0 * (p[0] * p[0] + p[1] * p[1]); };
    nf.has_grad = true;
  } else if (head == "sinpix") {
    nf.f = [](const Point& p) { return std::sin(kPi * p[0]); };
    nf.grad_sq = [](const Point& p) {
      const double c = std::cos(kPi * p[0]);
      return kPi * kPi * c * c;
    };
    nf.has_grad = true;
  } else if (head == "sinxcosy") {
    if (dim < 2) throw UsageError("make_function: sinxcosy needs dimension >= 2");
    nf.f = [](const Point& p) { return std::sin(kPi * p[0]) * std::cos(kPi * p[1]); };
    nf.grad_sq = [](const Point& p) {
      const double sx = std::sin(kPi * p[0]), cx = std::cos(kPi * p[0]);
      const double sy = std::sin(kPi * p[1]), cy = std::cos(kPi * p[1]);
      return kPi * kPi * (cx * cx * cy * cy + sx * sx * sy * sy);
    };
    nf.has_grad = true;
  } else {
    throw UsageError("make_function: unknown function spec '" + spec + "'");
  }
  return nf;
}

ScalarField make_density(const std::string& name, int dim) {
  if (name == "cosine") {
    return [dim](const Point& p) {
      double prod = 1.0;
      for (int a = 0; a < dim; ++a) prod *= std::cos(kPi * p[a]);
      return 1.0 + 0.5 * prod;
    };
  }
  if (name == "tilt") {
    return [dim](const Point& p) {
      double acc = 0.0;
      for (int a = 0; a < dim; ++a) acc += p[a];
      return 1.0 + 0.25 * acc;
    };
  }
  throw UsageError("make_density: unknown density '" + name + "'");
}

double integrate_box(const Space& s, const ScalarField& f, int n_per_axis) {
  if (s.ambient_dim > 2)
    throw UsageError("integrate_box: euclidean-chart instances only");
  std::vector<double> x, w;
  gauss_legendre_01(n_per_axis, x, w);
  auto weight_at = [&](const Point& p) {
    return s.measure_kind == MeasureKind::density ? s.density(p) : 1.0;
  };
  if (s.ambient_dim == 1) {
    const double span = s.bounds.hi[0] - s.bounds.lo[0];
    std::vector<double> acc(n_per_axis);
    Point p(1);
    for (int i = 0; i < n_per_axis; ++i) {
      p[0] = s.bounds.lo[0] + span * x[i];
      acc[i] = w[i] * span * f(p) * weight_at(p);
    }
    return pairwise_sum(acc);
  }
  const double sx = s.bounds.hi[0] - s.bounds.lo[0];
  const double sy = s.bounds.hi[1] - s.bounds.lo[1];
  std::vector<double> rows(n_per_axis);
  Point p(2);
  for (int i = 0; i < n_per_axis; ++i) {
    p[0] = s.bounds.lo[0] + sx * x[i];
    std::vector<double> acc(n_per_axis);
    for (int j = 0; j < n_per_axis; ++j) {
      p[1] = s.bounds.lo[1] + sy * x[j];
      acc[j] = w[j] * f(p) * weight_at(p);
    }
    rows[i] = w[i] * pairwise_sum(acc);
  }
  return sx * sy * pairwise_sum(rows);
}

double gradient_energy(const Space& s, const NamedFunction& u, int n_per_axis) {
  if (!u.has_grad)
    throw UsageError("gradient_energy: function '" + u.name + "' has no closed-form gradient");
  return integrate_box(s, u.grad_sq, n_per_axis);
}

}  // namespace harmonet
