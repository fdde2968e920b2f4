#include "harmonet/solver.hpp"

#include <cmath>
#include <deque>

namespace harmonet {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::indefinite_detected: return "indefinite_detected";
  }
  return "unknown";
}

ConnectivityReport connectivity_check(const Graph& g, const Net& net) {
  if (net.interior.size() != static_cast<std::size_t>(net.size()))
    throw UsageError("connectivity_check: interior mask not set");
  ConnectivityReport rep;
  std::vector<int> interior_ids;
  std::vector<int> v2i(net.size(), -1);
  for (int i = 0; i < net.size(); ++i)
    if (net.interior[i]) {
      v2i[i] = static_cast<int>(interior_ids.size());
      interior_ids.push_back(i);
    }
  rep.component_of.assign(interior_ids.size(), -1);

  for (std::size_t k = 0; k < interior_ids.size(); ++k) {
    if (rep.component_of[k] >= 0) continue;
    const int comp = rep.component_count++;
    int count = 0;
    bool anchored = false;
    std::deque<int> queue{static_cast<int>(k)};
    rep.component_of[k] = comp;
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      ++count;
      for (int nb : g.adjacency[interior_ids[cur]]) {
        const int nbi = v2i[nb];
        if (nbi < 0) {
          anchored = true;
        } else if (rep.component_of[nbi] < 0) {
          rep.component_of[nbi] = comp;
          queue.push_back(nbi);
        }
      }
    }
    rep.component_size.push_back(count);
    rep.component_anchored.push_back(anchored ? 1 : 0);
    rep.all_anchored = rep.all_anchored && anchored;
  }
  return rep;
}

SolveResult solve(const QuadraticForm& form, const Net& net, double tol, int max_iter) {
  if (!(tol > 0.0) || !(tol < 1.0)) throw UsageError("solve: tol must lie in (0, 1)");
  const int n = form.unknowns();
  if (max_iter <= 0) max_iter = 20 * static_cast<int>(std::sqrt(static_cast<double>(n))) + 200;

  SolveResult res;
  res.interior = Vec::Zero(n);
  if (n == 0) {
    res.minimizer = extend_interior(form, net, res.interior);
    res.energy_value = form.c0;
    return res;
  }

  // system: M u = rhs with M = 2A, rhs = -b
  const Vec rhs = -form.b;
  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) {
    res.minimizer = extend_interior(form, net, res.interior);
    res.energy_value = form.c0;
    return res;
  }

  Vec diag(n);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * form.A.coeff(k, k);
  bool bad_diag = false;
  for (int k = 0; k < n; ++k)
    if (!(diag[k] > 0.0)) bad_diag = true;
  if (bad_diag) {
    res.status = SolveStatus::indefinite_detected;
    res.minimizer = extend_interior(form, net, res.interior);
    res.energy_value = evaluate_form(form, res.interior);
    res.relative_residual = 1.0;
    return res;
  }

  Vec x = Vec::Zero(n);
  Vec r = rhs;  // residual of M x = rhs at x = 0
  Vec z = r.cwiseQuotient(diag);
  Vec p = z;
  double rz = r.dot(z);
  res.status = SolveStatus::max_iterations;
  res.energy_trace.push_back(evaluate_form(form, x));
  for (int it = 0; it < max_iter; ++it) {
    const Vec q = 2.0 * (form.A * p);
    const double pq = p.dot(q);
    if (!(pq > 0.0)) {
      res.status = SolveStatus::indefinite_detected;
      res.iterations = it;
      break;
    }
    const double alpha = rz / pq;
    x += alpha * p;
    r -= alpha * q;
    res.iterations = it + 1;
    res.energy_trace.push_back(evaluate_form(form, x));
    if (r.norm() <= tol * rhs_norm) {
      res.status = SolveStatus::converged;
      break;
    }
    z = r.cwiseQuotient(diag);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }

  res.interior = x;
  res.minimizer = extend_interior(form, net, x);
  res.energy_value = evaluate_form(form, x);
  res.relative_residual = (2.0 * (form.A * x) + form.b).norm() / rhs_norm;
  if (res.status == SolveStatus::max_iterations && res.relative_residual <= tol)
    res.status = SolveStatus::converged;
  return res;
}

OptimalityReport optimality_check(const QuadraticForm& form, const SolveResult& result, int trials,
                                  std::uint64_t seed) {
  OptimalityReport rep;
  rep.trials = trials;
  const int n = form.unknowns();
  const double e_min = result.energy_value;
  if (n > 0)
    rep.stationarity_residual = (2.0 * (form.A * result.interior) + form.b).norm();
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const double scale = std::pow(10.0, -3.0 + 3.0 * static_cast<double>(t) /
                                             std::max(1, trials - 1));
    Vec v = result.interior;
    for (int k = 0; k < n; ++k) v[k] += scale * (2.0 * rng.uniform() - 1.0);
    const double e = evaluate_form(form, v);
    const double violation = e_min - e;
    rep.max_violation = std::max(rep.max_violation, violation);
    if (e < e_min - 1e-9 * (1.0 + std::abs(e_min))) ++rep.failures;
  }
  rep.ok = rep.failures == 0;
  return rep;
}

}  // namespace harmonet
