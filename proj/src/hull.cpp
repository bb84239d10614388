#include "dualcurve/hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dualcurve/error.hpp"

namespace dualcurve::hull {

namespace {

double spread(std::span<const Vector> points, const Vector& center) {
  double s = 0.0;
  for (const auto& p : points) s = std::max(s, (p - center).norm());
  return s;
}

Vector centroid(std::span<const Vector> points) {
  Vector c = Vector::Zero(points.front().size());
  for (const auto& p : points) c += p;
  return c / static_cast<double>(points.size());
}

double cross2(const Vector& o, const Vector& a, const Vector& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Counter-clockwise hull indices (Andrew's monotone chain), collinear points dropped.
std::vector<std::size_t> monotone_chain(std::span<const Vector> points, double eps) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a][0] != points[b][0]) return points[a][0] < points[b][0];
    return points[a][1] < points[b][1];
  });
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  auto turn_ok = [&](std::size_t o, std::size_t a, std::size_t b) {
    const double len = std::max((points[a] - points[o]).norm(), (points[b] - points[o]).norm());
    return cross2(points[o], points[a], points[b]) > eps * len;
  };
  for (std::size_t i : order) {
    while (k >= 2 && !turn_ok(hull[k - 2], hull[k - 1], i)) --k;
    hull[k++] = i;
  }
  for (std::size_t t = order.size() - 1, lower = k + 1; t-- > 0;) {
    const std::size_t i = order[t];
    while (k >= lower && !turn_ok(hull[k - 2], hull[k - 1], i)) --k;
    hull[k++] = i;
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

// Generalized cross product: unit normal of the hyperplane through d points in R^d.
// Returns a zero vector when the points are affinely dependent.
Vector hyperplane_normal(std::span<const Vector> points, std::span<const std::size_t> idx,
                         double scale) {
  const auto d = static_cast<Eigen::Index>(idx.size());
  const Vector& p0 = points[idx[0]];
  Vector normal(d);
  if (d == 3) {
    const Eigen::Vector3d a = points[idx[1]] - p0;
    const Eigen::Vector3d b = points[idx[2]] - p0;
    normal = a.cross(b);
  } else {
    Matrix rows(d - 1, d);
    for (Eigen::Index r = 1; r < d; ++r) rows.row(r - 1) = (points[idx[r]] - p0).transpose();
    Matrix minor(d - 1, d - 1);
    for (Eigen::Index col = 0; col < d; ++col) {
      for (Eigen::Index c = 0, m = 0; c < d; ++c) {
        if (c == col) continue;
        minor.col(m++) = rows.col(c);
      }
      const double det = d == 1 ? 1.0 : minor.determinant();
      normal[col] = (col % 2 == 0) ? det : -det;
    }
  }
  const double norm = normal.norm();
  if (norm <= 1e-12 * std::pow(scale, static_cast<double>(d - 1))) return Vector::Zero(d);
  return normal / norm;
}

void require_full_dimensional(std::span<const Vector> points) {
  const auto d = points.front().size();
  if (affine_directions(points).cols() != d) {
    fail(ErrorCode::degenerate,
         "point set is not full-dimensional in R^" + std::to_string(d));
  }
}

}  // namespace

std::vector<Vector> deduplicate(std::span<const Vector> points, double rel_tol) {
  double scale = 0.0;
  for (const auto& p : points) scale = std::max(scale, p.cwiseAbs().maxCoeff());
  const double tol = rel_tol * std::max(scale, 1e-300);
  std::vector<Vector> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](const Vector& q) { return (p - q).cwiseAbs().maxCoeff() <= tol; });
    if (!seen) out.push_back(p);
  }
  return out;
}

Matrix affine_directions(std::span<const Vector> points, double rel_tol) {
  if (points.empty()) fail(ErrorCode::invalid_argument, "empty point set");
  const auto d = points.front().size();
  if (points.size() == 1) return Matrix(d, 0);
  Matrix diffs(d, static_cast<Eigen::Index>(points.size() - 1));
  for (std::size_t i = 1; i < points.size(); ++i) diffs.col(static_cast<Eigen::Index>(i - 1)) = points[i] - points[0];
  Eigen::JacobiSVD<Matrix> svd(diffs, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double scale = diffs.cwiseAbs().maxCoeff();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * scale * std::sqrt(static_cast<double>(points.size()))) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

std::vector<HullFacet> facets(std::span<const Vector> points, std::size_t max_points) {
  if (points.empty()) fail(ErrorCode::invalid_argument, "empty point set");
  if (points.size() > max_points) {
    fail(ErrorCode::budget_exceeded, "hull of " + std::to_string(points.size()) +
                                         " points exceeds budget " + std::to_string(max_points));
  }
  const auto d = points.front().size();
  require_full_dimensional(points);

  const Vector center = centroid(points);
  std::vector<Vector> local;
  local.reserve(points.size());
  for (const auto& p : points) local.push_back(p - center);
  const double scale = spread(local, Vector::Zero(d));
  const double eps = 1e-9 * scale;

  std::vector<HullFacet> out;
  auto finish = [&](HullFacet f) {
    f.offset += f.normal.dot(center);
    out.push_back(std::move(f));
  };

  if (d == 1) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < local.size(); ++i) {
      if (local[i][0] < local[lo][0]) lo = i;
      if (local[i][0] > local[hi][0]) hi = i;
    }
    finish({Vector::Constant(1, 1.0), local[hi][0], {hi}});
    finish({Vector::Constant(1, -1.0), -local[lo][0], {lo}});
    return out;
  }

  if (d == 2) {
    const auto ring = monotone_chain(local, 1e-12);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      const Vector& a = local[ring[i]];
      const Vector& b = local[ring[(i + 1) % ring.size()]];
      Vector normal(2);
      normal << b[1] - a[1], a[0] - b[0];
      normal.normalize();
      finish({normal, normal.dot(a), {ring[i], ring[(i + 1) % ring.size()]}});
    }
    return out;
  }

  const std::size_t m = local.size();
  const auto du = static_cast<std::size_t>(d);
  std::vector<std::size_t> idx(du);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::vector<HullFacet> found;
  while (true) {
    bool known = false;
    for (const auto& f : found) {
      bool all_on = true;
      for (std::size_t i : idx) {
        if (std::abs(f.normal.dot(local[i]) - f.offset) > eps) {
          all_on = false;
          break;
        }
      }
      if (all_on) {
        known = true;
        break;
      }
    }
    if (!known) {
      Vector normal = hyperplane_normal(local, idx, scale);
      if (normal.size() > 0 && normal.squaredNorm() > 0.0) {
        double offset = normal.dot(local[idx[0]]);
        bool above = false, below = false;
        for (std::size_t i = 0; i < m && !(above && below); ++i) {
          const double s = normal.dot(local[i]) - offset;
          if (s > eps) above = true;
          if (s < -eps) below = true;
        }
        if (!(above && below)) {
          if (above) {
            normal = -normal;
            offset = -offset;
          }
          HullFacet f{normal, offset, {}};
          for (std::size_t i = 0; i < m; ++i) {
            if (std::abs(normal.dot(local[i]) - offset) <= eps) f.points.push_back(i);
          }
          found.push_back(std::move(f));
        }
      }
    }
    // next combination
    std::size_t pos = du;
    while (pos > 0 && idx[pos - 1] == m - du + pos - 1) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t j = pos; j < du; ++j) idx[j] = idx[j - 1] + 1;
  }
  for (auto& f : found) finish(std::move(f));
  return out;
}

std::vector<Vector> vertices(std::span<const Vector> points, std::size_t max_points) {
  const auto d = points.front().size();
  const auto hull_facets = facets(points, max_points);
  std::vector<std::vector<std::size_t>> incident(points.size());
  for (std::size_t f = 0; f < hull_facets.size(); ++f) {
    for (std::size_t i : hull_facets[f].points) incident[i].push_back(f);
  }
  std::vector<Vector> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (incident[i].size() < static_cast<std::size_t>(d)) continue;
    Matrix normals(d, static_cast<Eigen::Index>(incident[i].size()));
    for (std::size_t j = 0; j < incident[i].size(); ++j) {
      normals.col(static_cast<Eigen::Index>(j)) = hull_facets[incident[i][j]].normal;
    }
    Eigen::FullPivLU<Matrix> lu(normals);
    lu.setThreshold(1e-9);
    if (lu.rank() == d) out.push_back(points[i]);
  }
  return out;
}

std::vector<Simplex> triangulate(std::span<const Vector> points, std::size_t max_points) {
  const auto d = points.front().size();
  const auto unique = deduplicate(points);
  if (d == 1) {
    auto [lo, hi] = std::minmax_element(unique.begin(), unique.end(),
                                        [](const Vector& a, const Vector& b) { return a[0] < b[0]; });
    return {Simplex{*lo, *hi}};
  }
  if (unique.size() == static_cast<std::size_t>(d) + 1) {
    require_full_dimensional(unique);
    return {Simplex(unique.begin(), unique.end())};
  }
  const auto verts = vertices(unique, max_points);
  const Vector apex = centroid(verts);
  const auto hull_facets = facets(verts, max_points);

  std::vector<Simplex> out;
  for (const auto& f : hull_facets) {
    const Matrix basis = orthogonal_complement(f.normal);
    const Vector foot = f.offset * f.normal;
    std::vector<Vector> face;
    face.reserve(f.points.size());
    for (std::size_t i : f.points) face.push_back(basis.transpose() * (verts[i] - foot));
    for (const auto& sub : triangulate(face, max_points)) {
      Simplex s;
      s.reserve(sub.size() + 1);
      s.push_back(apex);
      for (const auto& y : sub) s.push_back(foot + basis * y);
      out.push_back(std::move(s));
    }
  }
  return out;
}

Matrix orthogonal_complement(const Vector& u) {
  const auto d = u.size();
  Eigen::HouseholderQR<Matrix> qr(Matrix(u.normalized()));
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  return q.rightCols(d - 1);
}

double simplex_volume(const Simplex& simplex) {
  const auto k = static_cast<Eigen::Index>(simplex.size()) - 1;
  if (k <= 0) return 1.0;
  Matrix edges(simplex.front().size(), k);
  for (Eigen::Index i = 0; i < k; ++i) edges.col(i) = simplex[static_cast<std::size_t>(i) + 1] - simplex[0];
  const double gram = (edges.transpose() * edges).determinant();
  return std::sqrt(std::max(gram, 0.0)) / std::tgamma(static_cast<double>(k) + 1.0);
}

}  // namespace dualcurve::hull
