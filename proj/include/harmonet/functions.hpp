#pragma once

#include "harmonet/space.hpp"

#include <string>

namespace harmonet {

// A named scalar test/boundary function, optionally with the closed form of
// its squared gradient for energy comparisons.
struct NamedFunction {
  std::string name;
  ScalarField f;
  ScalarField grad_sq;  // |grad f|^2 in the euclidean chart; may be empty
  bool has_grad = false;
};

// Specs: "zero", "one", "coordinate:K", "affine:c0,c1,...,const",
// "saddle" (x^2 - y^2), "sinpix" (sin(pi x)), "sinxcosy" (sin(pi x) cos(pi y)).
NamedFunction make_function(const std::string& spec, int dim);

// Densities: "cosine" -> 1 + 0.5 * prod cos(pi x_a); "tilt" -> 1 + 0.25 * sum x_a.
ScalarField make_density(const std::string& name, int dim);

// Tensor Gauss-Legendre integral of f against mu over the bounding box.
double integrate_box(const Space& s, const ScalarField& f, int n_per_axis = 96);

// Integral of |grad u|^2 dmu over X for a registry function with closed-form
// gradient; throws if the function does not carry one.
double gradient_energy(const Space& s, const NamedFunction& u, int n_per_axis = 96);

// Gauss-Legendre nodes/weights on (0, 1).
void gauss_legendre_01(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace harmonet
