#pragma once

// Brute-force convex hull machinery for desk-scale dimensions (d <= 4).
// Everything here works in plain coordinates of R^d; charts and body types
// live in geometry.hpp.

#include <cstddef>
#include <span>
#include <vector>

#include "dualcurve/types.hpp"

namespace dualcurve::hull {

struct HullFacet {
  Vector normal;                    // outward unit normal
  double offset = 0.0;              // <normal, x> = offset on the facet
  std::vector<std::size_t> points;  // indices of the input points lying on it
};

using Simplex = std::vector<Vector>;

std::vector<Vector> deduplicate(std::span<const Vector> points, double rel_tol = 1e-9);

// Orthonormal columns spanning the directions of aff(points).
Matrix affine_directions(std::span<const Vector> points, double rel_tol = 1e-10);

// Facets of conv(points); the points must span R^d.
std::vector<HullFacet> facets(std::span<const Vector> points, std::size_t max_points);

// Extreme points of conv(points); the points must span R^d.
std::vector<Vector> vertices(std::span<const Vector> points, std::size_t max_points);

// Pulling triangulation of conv(points) from its vertex centroid, recursing
// through the facets. Returns d-simplices in R^d.
std::vector<Simplex> triangulate(std::span<const Vector> points, std::size_t max_points);

// Columns form an orthonormal basis of u^perp.
Matrix orthogonal_complement(const Vector& u);

// k-dimensional volume of a k-simplex embedded in R^m.
double simplex_volume(const Simplex& simplex);

}  // namespace dualcurve::hull
