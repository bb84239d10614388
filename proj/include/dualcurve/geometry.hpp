#pragma once

// Origin-symmetric convex bodies in R^n and the elementary maps on them.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dualcurve/types.hpp"

namespace dualcurve {

// Vertex-enumeration and facet-detection budgets.
inline constexpr int kMaxBruteForceDim = 4;
inline constexpr std::size_t kMaxHalfspacePairs = 40;
inline constexpr std::size_t kMaxFacetVertices = 80;

// conv of halfwidth box [-h_1,h_1] x ... x [-h_n,h_n]
struct Box {
  Vector halfwidths;
};

struct Ball {
  int n = 0;
  double r = 1.0;
};

// (l B_k) x B_{n-k}; the first k coordinates form the axis block.
struct Cylinder {
  int n = 0;
  int k = 0;
  double l = 1.0;
};

// {x : |<u_i, x>| <= b_i for all i}
struct SymHPolytope {
  std::vector<Vector> normals;
  std::vector<double> offsets;
};

// conv(v_j, -v_j); may be lower dimensional.
struct SymVPolytope {
  std::vector<Vector> vertices;
  int intrinsic_dim = 0;
};

// A [-1,1]^n
struct Parallelotope {
  Matrix matrix;
};

// conv(Q - v, Q + v) with Q = conv(base) a symmetric (n-1)-body through the origin.
struct Prism {
  std::vector<Vector> base;
  Vector apex;
};

struct Facet {
  Vector normal;
  double offset = 0.0;
  std::vector<Vector> vertices;
};

enum class PolytopeKind { generic, box, cross_polytope, parallelotope, prism };

struct FacetListedPolytope {
  std::vector<Facet> facets;
  std::vector<Vector> vertices;
  bool symmetric = true;
  PolytopeKind kind = PolytopeKind::generic;

  int dim() const { return static_cast<int>(facets.front().normal.size()); }
};

using ConvexBody = std::variant<Box, Ball, Cylinder, SymHPolytope, SymVPolytope, Parallelotope,
                                Prism, FacetListedPolytope>;

// Arbitrary (not necessarily symmetric, possibly lower dimensional) point hull.
// Used for translated sections and Minkowski combinations.
struct VPolytope {
  std::vector<Vector> points;
};

// Orthonormal chart of an affine subspace: x = origin + basis * y.
// origin is the point of the subspace closest to 0, so |x|^2 = |origin|^2 + |y|^2.
struct AffineChart {
  Vector origin;
  Matrix basis;

  int dim() const { return static_cast<int>(basis.cols()); }
  Vector to_chart(const Vector& x) const { return basis.transpose() * (x - origin); }
  Vector from_chart(const Vector& y) const { return origin + basis * y; }
};

class Subspace {
 public:
  static Subspace from_orthonormal(const Matrix& basis, double tol = 1e-10);
  static Subspace span_of(std::span<const Vector> generators);
  // 0-based coordinate indices.
  static Subspace coordinate_axes(int n, std::span<const int> axes);

  int dim() const { return static_cast<int>(basis_.cols()); }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  const Matrix& basis() const { return basis_; }

  Vector project(const Vector& x) const { return basis_ * (basis_.transpose() * x); }
  bool contains(const Vector& u, double tol = 1e-9) const;
  Subspace complement() const;
  Subspace transformed(const Matrix& rotation) const;

 private:
  explicit Subspace(Matrix basis) : basis_(std::move(basis)) {}
  Matrix basis_;
};

struct FacetSubset {
  std::vector<std::size_t> indices;
};
struct SubspaceCap {
  Subspace subspace;
};
struct FullSphere {};

using NormalSelection = std::variant<FacetSubset, SubspaceCap, FullSphere>;

std::string describe(const NormalSelection& eta);

// Constructors. They validate their invariants and throw Error on violation.
Box make_box(const Vector& halfwidths);
Ball make_ball(int n, double r);
Cylinder make_cylinder(int n, int k, double l);
SymHPolytope make_sym_hpolytope(std::vector<Vector> normals, std::vector<double> offsets);
SymVPolytope make_sym_vpolytope(std::vector<Vector> vertices);
Parallelotope make_parallelotope(const Matrix& a);
Prism make_prism(std::vector<Vector> base, const Vector& apex);

FacetListedPolytope cube(int n, double halfwidth = 1.0);
FacetListedPolytope cross_polytope(int n, double radius = 1.0);
FacetListedPolytope box_polytope(const Vector& halfwidths);
FacetListedPolytope parallelotope_polytope(const Matrix& a);
FacetListedPolytope prism_polytope(std::span<const Vector> base, const Vector& apex);

int ambient_dim(const ConvexBody& body);
std::string type_name(const ConvexBody& body);
bool is_polytope(const ConvexBody& body);

double support(const ConvexBody& body, const Vector& x);
double radial(const ConvexBody& body, const Vector& x);
bool contains(const ConvexBody& body, const Vector& x, double tol = 1e-12);
double radial(const FacetListedPolytope& p, const Vector& x);

ConvexBody reflect(const ConvexBody& body);
VPolytope reflect(const VPolytope& body);
ConvexBody scale(const ConvexBody& body, double lambda);
FacetListedPolytope linear_image(const FacetListedPolytope& p, const Matrix& a);

// Projection onto L, expressed in the coordinates of L's basis.
ConvexBody project(const ConvexBody& body, const Subspace& subspace);

VPolytope minkowski_combination(const VPolytope& a, const VPolytope& b, double lambda);
SymVPolytope minkowski_combination(const SymVPolytope& a, const SymVPolytope& b, double lambda);

SymVPolytope enumerate_vertices(const SymHPolytope& p);
FacetListedPolytope build_facets(const SymVPolytope& p);
FacetListedPolytope build_facets(const VPolytope& p);

// Canonical facet form of any polytope-valued body.
FacetListedPolytope to_facet_listed(const ConvexBody& body);
std::vector<Vector> polytope_vertices(const ConvexBody& body);

// Facet indices selected by eta; SubspaceCap picks the facets with u_i in L.
std::vector<std::size_t> resolve_facets(const FacetListedPolytope& p, const NormalSelection& eta);

bool reverse_radial_gauss_contains(const FacetListedPolytope& p, const NormalSelection& eta,
                                   const Vector& u, double tol = 1e-9);

// Axis-aligned box [lo, hi] containing the body.
std::pair<Vector, Vector> bounding_box(const ConvexBody& body);
double bounding_radius(const ConvexBody& body);

AffineChart chart_of(std::span<const Vector> points);
int intrinsic_dim(std::span<const Vector> points);
// Extreme points of conv(points), computed in the chart of the affine hull.
std::vector<Vector> extreme_points(std::span<const Vector> points);

}  // namespace dualcurve
