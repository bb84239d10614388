#pragma once

#include <random>
#include <vector>

#include "dualcurve/geometry.hpp"

namespace dualcurve {

// m directions uniform on S^{n-1} with radii log-uniform in [0.5, 2], symmetrized.
std::vector<Vector> random_symmetric_points(std::mt19937_64& rng, int n, int m);

// Hull of random_symmetric_points; redraws until the hull is full-dimensional.
FacetListedPolytope random_symmetric_polytope(std::mt19937_64& rng, int n, int m);

// Haar-distributed orthogonal matrix.
Matrix random_rotation(std::mt19937_64& rng, int n);

// Gaussian matrix with condition number at most max_condition.
Matrix random_invertible_matrix(std::mt19937_64& rng, int n, double max_condition = 50.0);

// Orthonormalized Gaussian frame of dimension k.
Subspace random_subspace(std::mt19937_64& rng, int n, int k);

// Span of k randomly chosen facet normals, falling back to a Gaussian frame
// when the chosen normals are dependent.
Subspace random_facet_subspace(std::mt19937_64& rng, const FacetListedPolytope& p, int k);

double uniform(std::mt19937_64& rng, double a, double b);
int uniform_int(std::mt19937_64& rng, int a, int b);

}  // namespace dualcurve
