#include "dualcurve/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "dualcurve/error.hpp"
#include "dualcurve/hull.hpp"

namespace dualcurve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t internal_budget(int d) {
  if (d <= 2) return 1000000;
  if (d == 3) return 256;
  return 96;
}

void require_dim(const Vector& x, int n, const char* what) {
  if (x.size() != n) {
    fail(ErrorCode::dimension_mismatch, std::string(what) + ": expected dimension " +
                                            std::to_string(n) + ", got " + std::to_string(x.size()));
  }
}

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) fail(ErrorCode::invalid_argument, std::string(what) + ": non-finite coordinate");
}

std::vector<Vector> symmetrize(std::span<const Vector> vertices) {
  std::vector<Vector> pts;
  pts.reserve(2 * vertices.size());
  for (const auto& v : vertices) {
    pts.push_back(v);
    pts.push_back(-v);
  }
  return hull::deduplicate(pts);
}

bool closed_under_negation(std::span<const Vector> pts) {
  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = 1e-9 * std::max(scale, 1e-300);
  for (const auto& p : pts) {
    const bool found = std::any_of(pts.begin(), pts.end(),
                                   [&](const Vector& q) { return (p + q).cwiseAbs().maxCoeff() <= tol; });
    if (!found) return false;
  }
  return true;
}

// Facets of a full-dimensional point hull, vertices attached.
FacetListedPolytope facets_from_points(std::span<const Vector> points, PolytopeKind kind) {
  const int n = static_cast<int>(points.front().size());
  if (n > kMaxBruteForceDim) {
    fail(ErrorCode::budget_exceeded, "facet detection supports n <= 4, got n = " + std::to_string(n));
  }
  const auto unique = hull::deduplicate(points);
  if (intrinsic_dim(unique) != n) {
    fail(ErrorCode::degenerate, "polytope is not full-dimensional");
  }
  const auto verts = hull::vertices(unique, internal_budget(n));
  const auto hf = hull::facets(verts, internal_budget(n));
  FacetListedPolytope out;
  out.vertices = verts;
  out.kind = kind;
  out.symmetric = closed_under_negation(verts);
  double scale = 0.0;
  for (const auto& v : verts) scale = std::max(scale, v.norm());
  for (const auto& f : hf) {
    if (f.offset <= 1e-12 * scale) {
      fail(ErrorCode::precondition_violated, "origin is not interior to the polytope");
    }
    Facet facet{f.normal, f.offset, {}};
    for (std::size_t i : f.points) facet.vertices.push_back(verts[i]);
    out.facets.push_back(std::move(facet));
  }
  return out;
}

Vector sign_vector(unsigned mask, int n) {
  Vector s(n);
  for (int i = 0; i < n; ++i) s[i] = (mask >> i) & 1u ? -1.0 : 1.0;
  return s;
}

const Matrix& checked_inverse_source(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    fail(ErrorCode::dimension_mismatch, "parallelotope matrix must be square");
  }
  return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// Subspace

Subspace Subspace::from_orthonormal(const Matrix& basis, double tol) {
  const auto n = basis.rows();
  const auto k = basis.cols();
  if (k < 1 || k > n - 1) {
    fail(ErrorCode::invalid_argument,
         "subspace dimension must lie in [1, n-1], got " + std::to_string(k) + " in R^" + std::to_string(n));
  }
  if (!basis.allFinite() || ((basis.transpose() * basis) - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > tol) {
    fail(ErrorCode::invalid_argument, "subspace basis is not orthonormal");
  }
  return Subspace(basis);
}

Subspace Subspace::span_of(std::span<const Vector> generators) {
  if (generators.empty()) fail(ErrorCode::invalid_argument, "subspace needs at least one generator");
  const auto n = generators.front().size();
  Matrix g(n, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t i = 0; i < generators.size(); ++i) {
    require_dim(generators[i], static_cast<int>(n), "subspace generator");
    g.col(static_cast<Eigen::Index>(i)) = generators[i];
  }
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > 1e-10 * sv[0]) ++rank;
  }
  Matrix basis = svd.matrixU().leftCols(rank);
  return from_orthonormal(basis);
}

Subspace Subspace::coordinate_axes(int n, std::span<const int> axes) {
  std::vector<Vector> gens;
  for (int a : axes) {
    if (a < 0 || a >= n) {
      fail(ErrorCode::invalid_argument, "axis index " + std::to_string(a) + " out of range for R^" + std::to_string(n));
    }
    gens.push_back(Vector::Unit(n, a));
  }
  std::vector<int> sorted(axes.begin(), axes.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::invalid_argument, "repeated axis index");
  }
  Matrix basis(n, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t i = 0; i < gens.size(); ++i) basis.col(static_cast<Eigen::Index>(i)) = gens[i];
  return from_orthonormal(basis);
}

bool Subspace::contains(const Vector& u, double tol) const {
  require_dim(u, ambient_dim(), "subspace membership");
  return (u - project(u)).norm() <= tol * std::max(1.0, u.norm());
}

Subspace Subspace::complement() const {
  const auto n = basis_.rows();
  Eigen::HouseholderQR<Matrix> qr(basis_);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return Subspace(q.rightCols(n - basis_.cols()));
}

Subspace Subspace::transformed(const Matrix& rotation) const {
  return from_orthonormal(rotation * basis_, 1e-9);
}

std::string describe(const NormalSelection& eta) {
  return std::visit(overloaded{
                        [](const FullSphere&) { return std::string("all"); },
                        [](const FacetSubset& s) {
                          std::ostringstream os;
                          os << "facets:";
                          for (std::size_t i = 0; i < s.indices.size(); ++i) os << (i ? "," : "") << s.indices[i];
                          return os.str();
                        },
                        [](const SubspaceCap& c) {
                          return "subspace:dim=" + std::to_string(c.subspace.dim());
                        },
                    },
                    eta);
}

// ---------------------------------------------------------------------------
// Constructors

Box make_box(const Vector& halfwidths) {
  if (halfwidths.size() < 1) fail(ErrorCode::invalid_argument, "box needs at least one halfwidth");
  require_finite(halfwidths, "box");
  if ((halfwidths.array() <= 0.0).any()) fail(ErrorCode::invalid_argument, "box halfwidths must be positive");
  return Box{halfwidths};
}

Ball make_ball(int n, double r) {
  if (n < 1) fail(ErrorCode::invalid_argument, "ball dimension must be >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorCode::invalid_argument, "ball radius must be positive");
  return Ball{n, r};
}

Cylinder make_cylinder(int n, int k, double l) {
  if (n < 2 || k < 1 || k > n - 1) {
    fail(ErrorCode::invalid_argument, "cylinder needs 1 <= k <= n-1");
  }
  if (!(l > 0.0) || !std::isfinite(l)) fail(ErrorCode::invalid_argument, "cylinder scale must be positive");
  return Cylinder{n, k, l};
}

SymHPolytope make_sym_hpolytope(std::vector<Vector> normals, std::vector<double> offsets) {
  if (normals.empty()) fail(ErrorCode::invalid_argument, "H-polytope needs at least one normal");
  if (normals.size() != offsets.size()) {
    fail(ErrorCode::dimension_mismatch, "normals and offsets differ in length");
  }
  const auto n = normals.front().size();
  for (std::size_t i = 0; i < normals.size(); ++i) {
    require_dim(normals[i], static_cast<int>(n), "H-polytope normal");
    require_finite(normals[i], "H-polytope normal");
    if (std::abs(normals[i].norm() - 1.0) > 1e-12) {
      fail(ErrorCode::invalid_argument, "normal " + std::to_string(i) + " is not a unit vector");
    }
    if (!(offsets[i] > 0.0) || !std::isfinite(offsets[i])) {
      fail(ErrorCode::invalid_argument, "offset " + std::to_string(i) + " must be positive");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if ((normals[i] - normals[j]).norm() <= 1e-9 || (normals[i] + normals[j]).norm() <= 1e-9) {
        fail(ErrorCode::invalid_argument, "normals " + std::to_string(j) + " and " + std::to_string(i) +
                                              " are duplicates up to sign");
      }
    }
  }
  Matrix m(n, static_cast<Eigen::Index>(normals.size()));
  for (std::size_t i = 0; i < normals.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = normals[i];
  Eigen::FullPivLU<Matrix> lu(m);
  if (lu.rank() < static_cast<Eigen::Index>(n)) {
    fail(ErrorCode::unbounded, "normals do not span R^" + std::to_string(n));
  }
  return SymHPolytope{std::move(normals), std::move(offsets)};
}

SymVPolytope make_sym_vpolytope(std::vector<Vector> vertices) {
  if (vertices.empty()) fail(ErrorCode::invalid_argument, "V-polytope needs at least one vertex");
  const auto n = vertices.front().size();
  for (const auto& v : vertices) {
    require_dim(v, static_cast<int>(n), "V-polytope vertex");
    require_finite(v, "V-polytope vertex");
  }
  const auto pts = symmetrize(vertices);
  const int k = pts.size() < 2 ? 0 : intrinsic_dim(pts);
  return SymVPolytope{std::move(vertices), k};
}

Parallelotope make_parallelotope(const Matrix& a) {
  checked_inverse_source(a);
  if (!a.allFinite()) fail(ErrorCode::invalid_argument, "parallelotope matrix has non-finite entries");
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) fail(ErrorCode::degenerate, "parallelotope matrix is singular");
  return Parallelotope{a};
}

Prism make_prism(std::vector<Vector> base, const Vector& apex) {
  if (base.empty()) fail(ErrorCode::invalid_argument, "prism base needs vertices");
  const int n = static_cast<int>(apex.size());
  for (const auto& b : base) require_dim(b, n, "prism base vertex");
  const auto q = symmetrize(base);
  const int k = q.size() < 2 ? 0 : intrinsic_dim(q);
  if (k != n - 1) {
    fail(ErrorCode::degenerate, "prism base must span a hyperplane, got dimension " + std::to_string(k));
  }
  const Matrix dirs = hull::affine_directions(q);
  if ((apex - dirs * (dirs.transpose() * apex)).norm() <= 1e-9 * std::max(1.0, apex.norm())) {
    fail(ErrorCode::degenerate, "prism apex lies in the affine hull of the base");
  }
  return Prism{std::move(base), apex};
}

FacetListedPolytope box_polytope(const Vector& halfwidths) {
  make_box(halfwidths);
  const int n = static_cast<int>(halfwidths.size());
  FacetListedPolytope out;
  out.kind = PolytopeKind::box;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    out.vertices.push_back(sign_vector(mask, n).cwiseProduct(halfwidths));
  }
  for (int j = 0; j < n; ++j) {
    for (double s : {1.0, -1.0}) {
      Facet f{s * Vector::Unit(n, j), halfwidths[j], {}};
      for (const auto& v : out.vertices) {
        if (v[j] * s > 0.0) f.vertices.push_back(v);
      }
      out.facets.push_back(std::move(f));
    }
  }
  return out;
}

FacetListedPolytope cube(int n, double halfwidth) {
  if (n < 1) fail(ErrorCode::invalid_argument, "cube dimension must be >= 1");
  return box_polytope(Vector::Constant(n, halfwidth));
}

FacetListedPolytope cross_polytope(int n, double radius) {
  if (n < 1) fail(ErrorCode::invalid_argument, "cross-polytope dimension must be >= 1");
  if (!(radius > 0.0)) fail(ErrorCode::invalid_argument, "cross-polytope radius must be positive");
  FacetListedPolytope out;
  out.kind = PolytopeKind::cross_polytope;
  for (int i = 0; i < n; ++i) {
    out.vertices.push_back(radius * Vector::Unit(n, i));
    out.vertices.push_back(-radius * Vector::Unit(n, i));
  }
  const double root = std::sqrt(static_cast<double>(n));
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const Vector s = sign_vector(mask, n);
    Facet f{s / root, radius / root, {}};
    for (int i = 0; i < n; ++i) f.vertices.push_back(radius * s[i] * Vector::Unit(n, i));
    out.facets.push_back(std::move(f));
  }
  return out;
}

FacetListedPolytope parallelotope_polytope(const Matrix& a) {
  make_parallelotope(a);
  auto out = linear_image(cube(static_cast<int>(a.rows())), a);
  out.kind = PolytopeKind::parallelotope;
  return out;
}

FacetListedPolytope prism_polytope(std::span<const Vector> base, const Vector& apex) {
  make_prism(std::vector<Vector>(base.begin(), base.end()), apex);
  std::vector<Vector> pts;
  for (const auto& q : symmetrize(base)) {
    pts.push_back(q + apex);
    pts.push_back(q - apex);
  }
  return facets_from_points(pts, PolytopeKind::prism);
}

// ---------------------------------------------------------------------------
// Elementary maps

int ambient_dim(const ConvexBody& body) {
  return std::visit(overloaded{
                        [](const Box& b) { return static_cast<int>(b.halfwidths.size()); },
                        [](const Ball& b) { return b.n; },
                        [](const Cylinder& c) { return c.n; },
                        [](const SymHPolytope& p) { return static_cast<int>(p.normals.front().size()); },
                        [](const SymVPolytope& p) { return static_cast<int>(p.vertices.front().size()); },
                        [](const Parallelotope& p) { return static_cast<int>(p.matrix.rows()); },
                        [](const Prism& p) { return static_cast<int>(p.apex.size()); },
                        [](const FacetListedPolytope& p) { return p.dim(); },
                    },
                    body);
}

std::string type_name(const ConvexBody& body) {
  static const char* names[] = {"box",       "ball",          "cylinder", "hpolytope_sym",
                                "vpolytope_sym", "parallelotope", "prism",    "facet_listed"};
  return names[body.index()];
}

bool is_polytope(const ConvexBody& body) {
  return !std::holds_alternative<Ball>(body) && !std::holds_alternative<Cylinder>(body);
}

std::vector<Vector> polytope_vertices(const ConvexBody& body) {
  return std::visit(
      overloaded{
          [](const Box& b) { return box_polytope(b.halfwidths).vertices; },
          [](const Ball&) -> std::vector<Vector> {
            fail(ErrorCode::unsupported_representation, "a ball has no vertex list");
          },
          [](const Cylinder&) -> std::vector<Vector> {
            fail(ErrorCode::unsupported_representation, "a cylinder has no vertex list");
          },
          [](const SymHPolytope& p) { return enumerate_vertices(p).vertices; },
          [](const SymVPolytope& p) { return extreme_points(symmetrize(p.vertices)); },
          [](const Parallelotope& p) { return parallelotope_polytope(p.matrix).vertices; },
          [](const Prism& p) {
            std::vector<Vector> pts;
            for (const auto& q : symmetrize(p.base)) {
              pts.push_back(q + p.apex);
              pts.push_back(q - p.apex);
            }
            return extreme_points(pts);
          },
          [](const FacetListedPolytope& p) { return p.vertices; },
      },
      body);
}

double support(const ConvexBody& body, const Vector& x) {
  require_dim(x, ambient_dim(body), "support");
  return std::visit(overloaded{
                        [&](const Box& b) { return b.halfwidths.cwiseProduct(x.cwiseAbs()).sum(); },
                        [&](const Ball& b) { return b.r * x.norm(); },
                        [&](const Cylinder& c) {
                          return c.l * x.head(c.k).norm() + x.tail(c.n - c.k).norm();
                        },
                        [&](const SymVPolytope& p) {
                          double s = 0.0;
                          for (const auto& v : p.vertices) s = std::max(s, std::abs(v.dot(x)));
                          return s;
                        },
                        [&](const Parallelotope& p) { return (p.matrix.transpose() * x).lpNorm<1>(); },
                        [&](const Prism& p) {
                          double s = 0.0;
                          for (const auto& q : p.base) s = std::max(s, std::abs(q.dot(x)));
                          return s + std::abs(p.apex.dot(x));
                        },
                        [&](const auto& other) {
                          double s = -std::numeric_limits<double>::infinity();
                          for (const auto& v : polytope_vertices(other)) s = std::max(s, v.dot(x));
                          return s;
                        },
                    },
                    body);
}

double radial(const FacetListedPolytope& p, const Vector& x) {
  double rho = std::numeric_limits<double>::infinity();
  for (const auto& f : p.facets) {
    const double d = f.normal.dot(x);
    if (d > 0.0) rho = std::min(rho, f.offset / d);
  }
  if (!std::isfinite(rho)) fail(ErrorCode::unbounded, "radial function is unbounded in this direction");
  return rho;
}

double radial(const ConvexBody& body, const Vector& x) {
  require_dim(x, ambient_dim(body), "radial");
  if (x.norm() == 0.0) fail(ErrorCode::invalid_argument, "radial function is undefined at the origin");
  return std::visit(overloaded{
                        [&](const Box& b) {
                          double rho = std::numeric_limits<double>::infinity();
                          for (Eigen::Index i = 0; i < x.size(); ++i) {
                            if (x[i] != 0.0) rho = std::min(rho, b.halfwidths[i] / std::abs(x[i]));
                          }
                          return rho;
                        },
                        [&](const Ball& b) { return b.r / x.norm(); },
                        [&](const Cylinder& c) {
                          const double a = x.head(c.k).norm();
                          const double t = x.tail(c.n - c.k).norm();
                          double rho = std::numeric_limits<double>::infinity();
                          if (a > 0.0) rho = std::min(rho, c.l / a);
                          if (t > 0.0) rho = std::min(rho, 1.0 / t);
                          return rho;
                        },
                        [&](const SymHPolytope& p) {
                          double rho = std::numeric_limits<double>::infinity();
                          for (std::size_t i = 0; i < p.normals.size(); ++i) {
                            const double d = std::abs(p.normals[i].dot(x));
                            if (d > 0.0) rho = std::min(rho, p.offsets[i] / d);
                          }
                          return rho;
                        },
                        [&](const Parallelotope& p) {
                          return 1.0 / p.matrix.fullPivLu().solve(x).lpNorm<Eigen::Infinity>();
                        },
                        [&](const SymVPolytope& p) {
                          if (p.intrinsic_dim < static_cast<int>(x.size())) {
                            fail(ErrorCode::degenerate, "origin is not interior to a lower-dimensional body");
                          }
                          return radial(build_facets(p), x);
                        },
                        [&](const Prism& p) { return radial(prism_polytope(p.base, p.apex), x); },
                        [&](const FacetListedPolytope& p) { return radial(p, x); },
                    },
                    body);
}

bool contains(const ConvexBody& body, const Vector& x, double tol) {
  require_dim(x, ambient_dim(body), "contains");
  const double slack = 1.0 + tol;
  auto facet_test = [&](const FacetListedPolytope& p) {
    return std::all_of(p.facets.begin(), p.facets.end(),
                       [&](const Facet& f) { return f.normal.dot(x) <= f.offset * slack; });
  };
  return std::visit(overloaded{
                        [&](const Box& b) { return (x.cwiseAbs().array() <= b.halfwidths.array() * slack).all(); },
                        [&](const Ball& b) { return x.norm() <= b.r * slack; },
                        [&](const Cylinder& c) {
                          return x.head(c.k).norm() <= c.l * slack && x.tail(c.n - c.k).norm() <= slack;
                        },
                        [&](const SymHPolytope& p) {
                          for (std::size_t i = 0; i < p.normals.size(); ++i) {
                            if (std::abs(p.normals[i].dot(x)) > p.offsets[i] * slack) return false;
                          }
                          return true;
                        },
                        [&](const Parallelotope& p) {
                          return p.matrix.fullPivLu().solve(x).lpNorm<Eigen::Infinity>() <= slack;
                        },
                        [&](const SymVPolytope& p) {
                          if (p.intrinsic_dim == static_cast<int>(x.size())) return facet_test(build_facets(p));
                          const auto pts = symmetrize(p.vertices);
                          if (p.intrinsic_dim == 0) return x.norm() <= tol;
                          const AffineChart chart = chart_of(pts);
                          double scale = 0.0;
                          for (const auto& v : pts) scale = std::max(scale, v.norm());
                          const Vector y = chart.to_chart(x);
                          if ((chart.from_chart(y) - x).norm() > std::max(tol, 1e-12) * scale) return false;
                          std::vector<Vector> local;
                          for (const auto& v : pts) local.push_back(chart.to_chart(v));
                          const SymVPolytope flat{local, p.intrinsic_dim};
                          return contains(ConvexBody(flat), y, tol);
                        },
                        [&](const Prism& p) { return facet_test(prism_polytope(p.base, p.apex)); },
                        [&](const FacetListedPolytope& p) { return facet_test(p); },
                    },
                    body);
}

ConvexBody reflect(const ConvexBody& body) {
  if (const auto* p = std::get_if<FacetListedPolytope>(&body); p && !p->symmetric) {
    FacetListedPolytope out = *p;
    for (auto& f : out.facets) {
      f.normal = -f.normal;
      for (auto& v : f.vertices) v = -v;
    }
    for (auto& v : out.vertices) v = -v;
    return out;
  }
  return body;
}

VPolytope reflect(const VPolytope& body) {
  VPolytope out = body;
  for (auto& p : out.points) p = -p;
  return out;
}

ConvexBody scale(const ConvexBody& body, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::invalid_argument, "scale factor must be positive");
  return std::visit(overloaded{
                        [&](const Box& b) -> ConvexBody { return Box{lambda * b.halfwidths}; },
                        [&](const Ball& b) -> ConvexBody { return Ball{b.n, lambda * b.r}; },
                        [&](const Cylinder&) -> ConvexBody {
                          fail(ErrorCode::unsupported_representation,
                               "scaled cylinders are not in the cylinder family");
                        },
                        [&](const SymHPolytope& p) -> ConvexBody {
                          SymHPolytope out = p;
                          for (auto& b : out.offsets) b *= lambda;
                          return out;
                        },
                        [&](const SymVPolytope& p) -> ConvexBody {
                          SymVPolytope out = p;
                          for (auto& v : out.vertices) v *= lambda;
                          return out;
                        },
                        [&](const Parallelotope& p) -> ConvexBody { return Parallelotope{lambda * p.matrix}; },
                        [&](const Prism& p) -> ConvexBody {
                          Prism out = p;
                          for (auto& v : out.base) v *= lambda;
                          out.apex *= lambda;
                          return out;
                        },
                        [&](const FacetListedPolytope& p) -> ConvexBody {
                          FacetListedPolytope out = p;
                          for (auto& f : out.facets) {
                            f.offset *= lambda;
                            for (auto& v : f.vertices) v *= lambda;
                          }
                          for (auto& v : out.vertices) v *= lambda;
                          return out;
                        },
                    },
                    body);
}

FacetListedPolytope linear_image(const FacetListedPolytope& p, const Matrix& a) {
  const int n = p.dim();
  if (a.rows() != n || a.cols() != n) fail(ErrorCode::dimension_mismatch, "linear map must be n x n");
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) fail(ErrorCode::degenerate, "linear map is singular");
  const Matrix inv_t = lu.inverse().transpose();
  FacetListedPolytope out;
  out.symmetric = p.symmetric;
  switch (p.kind) {
    case PolytopeKind::box:
    case PolytopeKind::parallelotope:
      out.kind = PolytopeKind::parallelotope;
      break;
    case PolytopeKind::prism:
      out.kind = PolytopeKind::prism;
      break;
    default:
      out.kind = PolytopeKind::generic;
  }
  for (const auto& v : p.vertices) out.vertices.push_back(a * v);
  for (const auto& f : p.facets) {
    Facet g;
    g.normal = (inv_t * f.normal).normalized();
    for (const auto& v : f.vertices) g.vertices.push_back(a * v);
    double h = 0.0;
    for (const auto& v : g.vertices) h += g.normal.dot(v);
    g.offset = h / static_cast<double>(g.vertices.size());
    out.facets.push_back(std::move(g));
  }
  return out;
}

ConvexBody project(const ConvexBody& body, const Subspace& subspace) {
  const int n = ambient_dim(body);
  if (subspace.ambient_dim() != n) fail(ErrorCode::dimension_mismatch, "subspace lives in another dimension");
  const Matrix& basis = subspace.basis();
  const int k = subspace.dim();
  if (const auto* b = std::get_if<Ball>(&body)) return Ball{k, b->r};
  if (const auto* c = std::get_if<Cylinder>(&body)) {
    auto block_of = [&](int first, int count) {
      Matrix m = Matrix::Zero(n, count);
      for (int i = 0; i < count; ++i) m(first + i, i) = 1.0;
      return m;
    };
    auto same_span = [&](const Matrix& block) {
      if (block.cols() != k) return false;
      return (block - basis * (basis.transpose() * block)).cwiseAbs().maxCoeff() <= 1e-9;
    };
    if (same_span(block_of(0, c->k))) return Ball{k, c->l};
    if (same_span(block_of(c->k, c->n - c->k))) return Ball{k, 1.0};
    fail(ErrorCode::unsupported_representation,
         "cylinder projections are only supported onto the axis block or its complement");
  }
  std::vector<Vector> pts;
  for (const auto& v : polytope_vertices(body)) pts.push_back(basis.transpose() * v);
  const auto ext = extreme_points(symmetrize(pts));
  return SymVPolytope{ext, ext.size() < 2 ? 0 : intrinsic_dim(ext)};
}

VPolytope minkowski_combination(const VPolytope& a, const VPolytope& b, double lambda) {
  if (a.points.empty() || b.points.empty()) fail(ErrorCode::invalid_argument, "empty point hull");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_argument, "lambda must lie in [0,1]");
  const auto n = a.points.front().size();
  if (b.points.front().size() != n) fail(ErrorCode::dimension_mismatch, "summands live in different dimensions");
  const Matrix da = hull::affine_directions(a.points);
  const Matrix db = hull::affine_directions(b.points);
  const bool full = da.cols() == n && db.cols() == n;
  if (!full) {
    if (da.cols() != db.cols()) {
      fail(ErrorCode::dimension_mismatch, "summands have different intrinsic dimensions");
    }
    if (da.cols() > 0 && (db - da * (da.transpose() * db)).cwiseAbs().maxCoeff() > 1e-9) {
      fail(ErrorCode::dimension_mismatch, "summands do not lie in parallel affine subspaces");
    }
  }
  if (lambda == 0.0) return VPolytope{extreme_points(a.points)};
  if (lambda == 1.0) return VPolytope{extreme_points(b.points)};
  const auto va = extreme_points(a.points);
  const auto vb = extreme_points(b.points);
  std::vector<Vector> sums;
  sums.reserve(va.size() * vb.size());
  for (const auto& x : va) {
    for (const auto& y : vb) sums.push_back((1.0 - lambda) * x + lambda * y);
  }
  return VPolytope{extreme_points(sums)};
}

SymVPolytope minkowski_combination(const SymVPolytope& a, const SymVPolytope& b, double lambda) {
  const auto va = symmetrize(a.vertices);
  const auto vb = symmetrize(b.vertices);
  const auto sum = minkowski_combination(VPolytope{va}, VPolytope{vb}, lambda);
  return SymVPolytope{sum.points, sum.points.size() < 2 ? 0 : intrinsic_dim(sum.points)};
}

SymVPolytope enumerate_vertices(const SymHPolytope& p) {
  const int n = static_cast<int>(p.normals.front().size());
  const std::size_t m = p.normals.size();
  if (n > kMaxBruteForceDim) {
    fail(ErrorCode::budget_exceeded, "vertex enumeration supports n <= 4, got n = " + std::to_string(n));
  }
  if (m > kMaxHalfspacePairs) {
    fail(ErrorCode::budget_exceeded, "vertex enumeration supports at most 40 normal pairs, got " + std::to_string(m));
  }
  {
    Matrix all(n, static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) all.col(static_cast<Eigen::Index>(i)) = p.normals[i];
    if (Eigen::FullPivLU<Matrix>(all).rank() < n) fail(ErrorCode::unbounded, "normals do not span R^n");
  }
  if (m < static_cast<std::size_t>(n)) fail(ErrorCode::unbounded, "too few normals to bound the body");

  std::vector<Vector> found;
  std::vector<std::size_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Matrix a(n, n);
  Vector rhs(n);
  while (true) {
    for (int r = 0; r < n; ++r) a.row(r) = p.normals[idx[static_cast<std::size_t>(r)]].transpose();
    Eigen::FullPivLU<Matrix> lu(a);
    if (std::abs(lu.determinant()) > 1e-12) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        for (int r = 0; r < n; ++r) {
          rhs[r] = ((mask >> r) & 1u ? -1.0 : 1.0) * p.offsets[idx[static_cast<std::size_t>(r)]];
        }
        const Vector x = lu.solve(rhs);
        bool feasible = true;
        for (std::size_t i = 0; i < m && feasible; ++i) {
          feasible = std::abs(p.normals[i].dot(x)) <= p.offsets[i] * (1.0 + 1e-9);
        }
        if (feasible) found.push_back(x);
      }
    }
    std::size_t pos = static_cast<std::size_t>(n);
    while (pos > 0 && idx[pos - 1] == m - static_cast<std::size_t>(n) + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < static_cast<std::size_t>(n); ++j) idx[j] = idx[j - 1] + 1;
  }
  auto verts = hull::deduplicate(found, 1e-9);
  return SymVPolytope{std::move(verts), n};
}

FacetListedPolytope build_facets(const SymVPolytope& p) {
  const int n = static_cast<int>(p.vertices.front().size());
  if (p.intrinsic_dim != n) fail(ErrorCode::degenerate, "facet construction needs a full-dimensional body");
  const auto pts = symmetrize(p.vertices);
  if (pts.size() > kMaxFacetVertices) {
    fail(ErrorCode::budget_exceeded, "facet construction supports at most 80 vertices, got " + std::to_string(pts.size()));
  }
  return facets_from_points(pts, PolytopeKind::generic);
}

FacetListedPolytope build_facets(const VPolytope& p) {
  if (p.points.empty()) fail(ErrorCode::invalid_argument, "empty point hull");
  return facets_from_points(p.points, PolytopeKind::generic);
}

FacetListedPolytope to_facet_listed(const ConvexBody& body) {
  return std::visit(overloaded{
                        [](const Box& b) { return box_polytope(b.halfwidths); },
                        [](const Ball&) -> FacetListedPolytope {
                          fail(ErrorCode::unsupported_representation, "a ball is not a polytope");
                        },
                        [](const Cylinder&) -> FacetListedPolytope {
                          fail(ErrorCode::unsupported_representation, "a cylinder is not a polytope");
                        },
                        [](const SymHPolytope& p) { return build_facets(enumerate_vertices(p)); },
                        [](const SymVPolytope& p) { return build_facets(p); },
                        [](const Parallelotope& p) { return parallelotope_polytope(p.matrix); },
                        [](const Prism& p) { return prism_polytope(p.base, p.apex); },
                        [](const FacetListedPolytope& p) { return p; },
                    },
                    body);
}

std::vector<std::size_t> resolve_facets(const FacetListedPolytope& p, const NormalSelection& eta) {
  std::vector<std::size_t> out;
  std::visit(overloaded{
                 [&](const FullSphere&) {
                   out.resize(p.facets.size());
                   std::iota(out.begin(), out.end(), std::size_t{0});
                 },
                 [&](const FacetSubset& s) {
                   for (std::size_t i : s.indices) {
                     if (i >= p.facets.size()) {
                       fail(ErrorCode::invalid_argument, "facet index " + std::to_string(i) + " out of range (" +
                                                             std::to_string(p.facets.size()) + " facets)");
                     }
                   }
                   out = s.indices;
                   std::sort(out.begin(), out.end());
                   out.erase(std::unique(out.begin(), out.end()), out.end());
                 },
                 [&](const SubspaceCap& c) {
                   if (c.subspace.ambient_dim() != p.dim()) {
                     fail(ErrorCode::dimension_mismatch, "subspace lives in another dimension");
                   }
                   for (std::size_t i = 0; i < p.facets.size(); ++i) {
                     if (c.subspace.contains(p.facets[i].normal, 1e-9)) out.push_back(i);
                   }
                 },
             },
             eta);
  return out;
}

bool reverse_radial_gauss_contains(const FacetListedPolytope& p, const NormalSelection& eta, const Vector& u,
                                   double tol) {
  require_dim(u, p.dim(), "reverse radial Gauss image");
  const Vector x = radial(p, u) * u;
  auto selected = [&](std::size_t i) {
    return std::visit(overloaded{
                          [](const FullSphere&) { return true; },
                          [&](const FacetSubset& s) {
                            return std::find(s.indices.begin(), s.indices.end(), i) != s.indices.end();
                          },
                          [&](const SubspaceCap& c) { return c.subspace.contains(p.facets[i].normal, 1e-9); },
                      },
                      eta);
  };
  for (std::size_t i = 0; i < p.facets.size(); ++i) {
    const auto& f = p.facets[i];
    if (f.normal.dot(x) >= f.offset - tol * f.offset && selected(i)) return true;
  }
  return false;
}

std::pair<Vector, Vector> bounding_box(const ConvexBody& body) {
  const int n = ambient_dim(body);
  if (const auto* b = std::get_if<Box>(&body)) return {-b->halfwidths, b->halfwidths};
  if (const auto* b = std::get_if<Ball>(&body)) return {Vector::Constant(n, -b->r), Vector::Constant(n, b->r)};
  if (const auto* c = std::get_if<Cylinder>(&body)) {
    Vector hi = Vector::Ones(n);
    hi.head(c->k).setConstant(c->l);
    return {-hi, hi};
  }
  const auto verts = polytope_vertices(body);
  Vector lo = verts.front(), hi = verts.front();
  for (const auto& v : verts) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return {lo, hi};
}

double bounding_radius(const ConvexBody& body) {
  if (const auto* b = std::get_if<Box>(&body)) return b->halfwidths.norm();
  if (const auto* b = std::get_if<Ball>(&body)) return b->r;
  if (const auto* c = std::get_if<Cylinder>(&body)) return std::hypot(c->l, 1.0);
  double r = 0.0;
  for (const auto& v : polytope_vertices(body)) r = std::max(r, v.norm());
  return r;
}

AffineChart chart_of(std::span<const Vector> points) {
  if (points.empty()) fail(ErrorCode::invalid_argument, "empty point set");
  Matrix basis = hull::affine_directions(points);
  const Vector& p0 = points.front();
  Vector origin = p0 - basis * (basis.transpose() * p0);
  return AffineChart{std::move(origin), std::move(basis)};
}

int intrinsic_dim(std::span<const Vector> points) {
  return static_cast<int>(hull::affine_directions(points).cols());
}

std::vector<Vector> extreme_points(std::span<const Vector> points) {
  const auto unique = hull::deduplicate(points);
  if (unique.size() <= 1) return unique;
  const AffineChart chart = chart_of(unique);
  const int k = chart.dim();
  if (k == 0) return {unique.front()};
  std::vector<Vector> local;
  local.reserve(unique.size());
  for (const auto& p : unique) local.push_back(chart.to_chart(p));
  if (k == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < local.size(); ++i) {
      if (local[i][0] < local[lo][0]) lo = i;
      if (local[i][0] > local[hi][0]) hi = i;
    }
    return {unique[lo], unique[hi]};
  }
  if (k > kMaxBruteForceDim) fail(ErrorCode::budget_exceeded, "hulls are supported up to dimension 4");
  const auto budget = internal_budget(k);
  if (local.size() > budget) {
    fail(ErrorCode::budget_exceeded, "hull of " + std::to_string(local.size()) + " points in dimension " +
                                         std::to_string(k) + " exceeds the internal budget");
  }
  const auto ext = hull::vertices(local, budget);
  std::vector<Vector> out;
  out.reserve(ext.size());
  for (const auto& e : ext) {
    for (std::size_t i = 0; i < local.size(); ++i) {
      if (local[i] == e) {
        out.push_back(unique[i]);
        break;
      }
    }
  }
  return out;
}

}  // namespace dualcurve
