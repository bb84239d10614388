#include "dualcurve/random_bodies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dualcurve/error.hpp"
#include "dualcurve/quadrature.hpp"

namespace dualcurve {

namespace {

int rank_of(const std::vector<Vector>& vs) {
  Matrix m(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (std::size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-6);
  return static_cast<int>(lu.rank());
}

}  // namespace

double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

int uniform_int(std::mt19937_64& rng, int a, int b) {
  return a + static_cast<int>(std::floor(uniform01(rng) * (b - a + 1)));
}

std::vector<Vector> random_symmetric_points(std::mt19937_64& rng, int n, int m) {
  std::vector<Vector> pts;
  pts.reserve(2 * static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Vector u = random_unit_vector(rng, n);
    const double r = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
    pts.push_back(r * u);
    pts.push_back(-r * u);
  }
  return pts;
}

FacetListedPolytope random_symmetric_polytope(std::mt19937_64& rng, int n, int m) {
  if (m < n) fail(ErrorCode::invalid_argument, "need at least n directions for a full-dimensional polytope");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto pts = random_symmetric_points(rng, n, m);
    if (intrinsic_dim(pts) < n) continue;
    try {
      return build_facets(make_sym_vpolytope(pts));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::degenerate) throw;
    }
  }
  fail(ErrorCode::degenerate, "could not draw a full-dimensional polytope");
}

Matrix random_rotation(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix random_invertible_matrix(std::mt19937_64& rng, int n, double max_condition) {
  std::normal_distribution<double> normal;
  while (true) {
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& s = svd.singularValues();
    if (s[n - 1] > 0.0 && s[0] / s[n - 1] <= max_condition) return a;
  }
}

Subspace random_subspace(std::mt19937_64& rng, int n, int k) {
  const Matrix r = random_rotation(rng, n);
  return Subspace::from_orthonormal(r.leftCols(k), 1e-9);
}

Subspace random_facet_subspace(std::mt19937_64& rng, const FacetListedPolytope& p, int k) {
  const int n = p.dim();
  std::vector<std::size_t> order(p.facets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Vector> gens;
  for (std::size_t i : order) {
    if (static_cast<int>(gens.size()) == k) break;
    gens.push_back(p.facets[i].normal);
    if (rank_of(gens) < static_cast<int>(gens.size())) gens.pop_back();
  }
  if (static_cast<int>(gens.size()) < k) return random_subspace(rng, n, k);
  return Subspace::span_of(gens);
}

}  // namespace dualcurve
