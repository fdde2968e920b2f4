#include "harmonet/energy.hpp"

#include <cmath>

namespace harmonet {

QuadraticForm assemble_form(const Graph& g, const Net& net, const DiscreteField& f_r) {
  require_same_net(g, f_r, "assemble_form");
  require_same_net(net, f_r, "assemble_form");
  if (net.interior.size() != static_cast<std::size_t>(net.size()))
    throw UsageError("assemble_form: interior mask not set");
  if (net.weights.size() != net.size()) throw UsageError("assemble_form: weights not assigned");

  QuadraticForm form;
  form.r = net.r;
  form.net_uid = net.uid;
  form.vertex_to_interior.assign(net.size(), -1);
  for (int i = 0; i < net.size(); ++i) {
    if (net.interior[i]) {
      form.vertex_to_interior[i] = static_cast<int>(form.interior_ids.size());
      form.interior_ids.push_back(i);
    }
  }
  const int m = form.unknowns();
  const double inv_r2 = 1.0 / (net.r * net.r);
  const Vec& f = f_r.values;

  form.b = Vec::Zero(m);
  std::vector<Eigen::Triplet<double>> trip;
  Vec diag = Vec::Zero(m);

  // One pass over unordered edges {i, j}: the two ordered pairs contribute
  // s = (mu_i + mu_j) / r^2 to each diagonal and -s to both off-diagonals,
  // which keeps A = A^T exact by construction.
  for (int i = 0; i < net.size(); ++i) {
    for (int j : g.adjacency[i]) {
      if (j < i) continue;
      const double sgm = (net.weights[i] + net.weights[j]) * inv_r2;
      const int ii = form.vertex_to_interior[i];
      const int jj = form.vertex_to_interior[j];
      if (ii >= 0) {
        diag[ii] += sgm;
        form.b[ii] += 2.0 * sgm * (f[i] - f[j]);
      }
      if (jj >= 0) {
        diag[jj] += sgm;
        form.b[jj] += 2.0 * sgm * (f[j] - f[i]);
      }
      if (ii >= 0 && jj >= 0) {
        trip.emplace_back(ii, jj, -sgm);
        trip.emplace_back(jj, ii, -sgm);
      }
    }
  }
  for (int k = 0; k < m; ++k) trip.emplace_back(k, k, diag[k]);

  form.A.resize(m, m);
  form.A.setFromTriplets(trip.begin(), trip.end());
  form.A.makeCompressed();
  form.c0 = graph_energy(g, net, f_r);
  return form;
}

double evaluate_form(const QuadraticForm& form, const Vec& v) {
  if (v.size() != form.unknowns())
    throw UsageError("evaluate_form: vector dimension does not match interior count");
  if (form.unknowns() == 0) return form.c0;
  return v.dot(form.A * v) + form.b.dot(v) + form.c0;
}

DiscreteField extend_interior(const QuadraticForm& form, const Net& net, const Vec& v) {
  if (net.uid != form.net_uid) throw UsageError("extend_interior: net mismatch");
  if (v.size() != form.unknowns()) throw UsageError("extend_interior: dimension mismatch");
  Vec out = Vec::Zero(net.size());
  for (int k = 0; k < form.unknowns(); ++k) out[form.interior_ids[k]] = v[k];
  return DiscreteField{net.uid, std::move(out)};
}

CoercivityReport coercivity_report(const QuadraticForm& form, const Graph& g, const Net& net,
                                   const DiscreteField& f_r, int trials, std::uint64_t seed) {
  CoercivityReport rep;
  Rng rng(seed);
  const double e_f = graph_energy(g, net, f_r);
  const int m = form.unknowns();
  for (int t = 0; t < trials; ++t) {
    const double scale = std::pow(10.0, -1.0 + 3.0 * static_cast<double>(t) /
                                             std::max(1, trials - 1));
    Vec v(m);
    for (int k = 0; k < m; ++k) v[k] = scale * (2.0 * rng.uniform() - 1.0);
    CoercivityRow row;
    row.scale = scale;
    row.energy_f = e_f;
    row.energy_v = graph_energy(g, net, extend_interior(form, net, v));
    row.energy_total = evaluate_form(form, v);
    row.chain_lhs = std::sqrt(std::max(0.0, row.energy_total));
    row.chain_rhs = std::max(0.0, std::sqrt(row.energy_v) - std::sqrt(row.energy_f));
    row.ok = row.chain_lhs >= row.chain_rhs - 1e-10 * (1.0 + row.chain_rhs);
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

ComparabilityReport comparability_report(const Space& s, const ScalarField& u, double grad_energy,
                                         const std::vector<double>& r_ladder, std::uint64_t seed,
                                         int quad_n) {
  ComparabilityReport rep;
  rep.grad_energy = grad_energy;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;
  for (double r : r_ladder) {
    Net net = build_net(s, r, seed);
    assign_weights(s, net);
    Graph g = build_graph(s, net);
    DiscreteField u_r = discretize_function(s, net, u, quad_n, seed);
    ComparabilityRow row;
    row.r = r;
    row.vertex_count = net.size();
    row.raw_energy = graph_energy(g, net, u_r);
    row.ratio = grad_energy > 0.0 ? row.raw_energy / grad_energy : 0.0;
    rep.rows.push_back(row);
    if (grad_energy > 0.0) {
      rep.min_ratio = std::min(rep.min_ratio, row.ratio);
      rep.max_ratio = std::max(rep.max_ratio, row.ratio);
      if (row.ratio < 1e-3 || row.ratio > 1e3) rep.within_bounds = false;
    }
  }
  if (!std::isfinite(rep.min_ratio)) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace harmonet
