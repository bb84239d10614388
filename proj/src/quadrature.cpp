#include "dualcurve/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "dualcurve/error.hpp"

namespace dualcurve {

namespace {

struct Welford {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double std_error() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
};

Rule1D compute_gauss_legendre(int m) {
  Rule1D rule;
  rule.nodes.resize(static_cast<std::size_t>(m));
  rule.weights.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) {
        p0 = 1.0;
        p1 = x;
      }
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // one more derivative evaluation at the converged node
        p0 = 1.0;
        p1 = x;
        for (int j = 2; j <= m; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        dp = m * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (x + 1.0);
    rule.weights[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

// Conical-product rule on the reference k-simplex {x >= 0, sum x <= 1}.
struct SimplexRule {
  std::vector<Vector> points;
  std::vector<double> weights;
};

SimplexRule compute_simplex_rule(int k, int m) {
  std::vector<Rule1D> axes;
  for (int i = 1; i <= k; ++i) axes.push_back(gauss_jacobi_rule(m, static_cast<double>(k - i)));
  SimplexRule rule;
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Vector x(k);
    double remaining = 1.0;
    double w = 1.0;
    for (int i = 0; i < k; ++i) {
      const double xi = axes[static_cast<std::size_t>(i)].nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      w *= axes[static_cast<std::size_t>(i)].weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      x[i] = remaining * xi;
      remaining *= 1.0 - xi;
    }
    rule.points.push_back(std::move(x));
    rule.weights.push_back(w);
    int pos = k - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == m) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return rule;
}

const SimplexRule& simplex_rule(int k, int m) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, SimplexRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({k, m});
  if (it == cache.end()) it = cache.emplace(std::make_pair(k, m), compute_simplex_rule(k, m)).first;
  return it->second;
}

double apply_rule(const ScalarField& f, const SimplexRule& rule, const Vector& v0, const Matrix& edges) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) sum += rule.weights[i] * f(v0 + edges * rule.points[i]);
  return sum;
}

double gl_panel(const Function1D& f, double a, double b, const Rule1D& rule) {
  double sum = 0.0;
  const double h = b - a;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(a + h * rule.nodes[i]);
  return sum * h;
}

double box_volume(const Vector& lo, const Vector& hi) { return (hi - lo).prod(); }

Vector uniform_in_ball(std::mt19937_64& rng, int n, double r) {
  const Vector u = random_unit_vector(rng, n);
  return u * (r * std::pow(uniform01(rng), 1.0 / n));
}

}  // namespace

const char* to_string(Engine engine) {
  switch (engine) {
    case Engine::facet_exact: return "facet-exact";
    case Engine::body_mc: return "body-mc";
    case Engine::sphere_mc: return "sphere-mc";
    case Engine::closed_form: return "closed-form";
    case Engine::gauss_legendre: return "gauss-legendre";
    case Engine::simplex_rule: return "simplex-rule";
  }
  return "unknown";
}

std::mt19937_64 make_rng(RngSeed seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed.seed), static_cast<std::uint32_t>(seed.seed >> 32),
                    static_cast<std::uint32_t>(seed.stream), static_cast<std::uint32_t>(seed.stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Vector random_unit_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> normal;
  while (true) {
    Vector g(n);
    for (int i = 0; i < n; ++i) g[i] = normal(rng);
    const double norm = g.norm();
    if (norm > 1e-300) return g / norm;
  }
}

double omega(int n) {
  if (n < 1) fail(ErrorCode::invalid_argument, "omega needs n >= 1");
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double sphere_area(int n) { return n * omega(n); }

const Rule1D& gauss_legendre_rule(int m) {
  if (m < 1 || m > 1000) fail(ErrorCode::invalid_argument, "Gauss-Legendre order must lie in [1, 1000]");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, compute_gauss_legendre(m)).first;
  return it->second;
}

Rule1D gauss_jacobi_rule(int m, double alpha) {
  if (m < 1) fail(ErrorCode::invalid_argument, "Gauss-Jacobi order must be >= 1");
  if (!(alpha > -1.0)) fail(ErrorCode::invalid_argument, "Gauss-Jacobi exponent must exceed -1");
  if (alpha == 0.0) return gauss_legendre_rule(m);
  // Golub-Welsch for the weight (1-t)^alpha on [-1,1] (beta = 0), then mapped to [0,1].
  const double a = alpha;
  const double b = 0.0;
  Matrix jacobi = Matrix::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    const double s = 2.0 * k + a + b;
    jacobi(k, k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < m) {
      const double n1 = k + 1.0;
      const double t = 2.0 * n1 + a + b;
      const double beta =
          4.0 * n1 * (n1 + a) * (n1 + b) * (n1 + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      jacobi(k, k + 1) = jacobi(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  Rule1D rule;
  for (int k = 0; k < m; ++k) {
    const double v0 = eig.eigenvectors()(0, k);
    rule.nodes.push_back(0.5 * (eig.eigenvalues()[k] + 1.0));
    rule.weights.push_back(mu0 * v0 * v0 / std::pow(2.0, a + 1.0));
  }
  return rule;
}

QuadratureResult gauss_legendre_1d(const Function1D& f, double a, double b, int nodes) {
  if (nodes < 2 || nodes > 500) fail(ErrorCode::invalid_argument, "Gauss-Legendre nodes must lie in [2, 500]");
  const double hi = gl_panel(f, a, b, gauss_legendre_rule(2 * nodes));
  const double lo = gl_panel(f, a, b, gauss_legendre_rule(nodes));
  return {hi, std::abs(hi - lo), 3 * nodes, Engine::gauss_legendre};
}

QuadratureResult graded_gauss_legendre(const Function1D& f, double a, double b, double layer, int nodes) {
  if (!(b > a)) return {0.0, 0.0, 0, Engine::gauss_legendre};
  const double width = b - a;
  std::vector<double> breaks{a};
  if (layer > 0.0 && layer < width / 8.0) {
    for (double x = layer / 16.0; x < width; x *= 2.0) breaks.push_back(a + x);
  } else {
    for (int i = 1; i < 8; ++i) breaks.push_back(a + width * i / 8.0);
  }
  breaks.push_back(b);
  const int lo_nodes = std::max(2, nodes / 2);
  const auto& hi_rule = gauss_legendre_rule(nodes);
  const auto& lo_rule = gauss_legendre_rule(lo_nodes);
  double hi = 0.0, lo = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    hi += gl_panel(f, breaks[i], breaks[i + 1], hi_rule);
    lo += gl_panel(f, breaks[i], breaks[i + 1], lo_rule);
  }
  const auto panels = static_cast<std::int64_t>(breaks.size() - 1);
  return {hi, std::abs(hi - lo), panels * (nodes + lo_nodes), Engine::gauss_legendre};
}

QuadratureResult gauss_legendre_2d(const Function2D& f, int nodes_per_axis) {
  if (nodes_per_axis < 2 || nodes_per_axis > 200) {
    fail(ErrorCode::invalid_argument, "nodes_per_axis must lie in [2, 200]");
  }
  auto tensor = [&](const Rule1D& rule) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        sum += rule.weights[i] * rule.weights[j] * f(rule.nodes[i], rule.nodes[j]);
      }
    }
    return sum;
  };
  const double lo = tensor(gauss_legendre_rule(nodes_per_axis));
  const double hi = tensor(gauss_legendre_rule(2 * nodes_per_axis));
  const std::int64_t count = 5LL * nodes_per_axis * nodes_per_axis;
  return {hi, std::abs(hi - lo), count, Engine::gauss_legendre};
}

QuadratureResult simplex_integrate(const ScalarField& f, const hull::Simplex& simplex, int degree) {
  if (degree < 1 || degree > 25) fail(ErrorCode::invalid_argument, "simplex rule degree must lie in [1, 25]");
  if (simplex.empty()) fail(ErrorCode::invalid_argument, "empty simplex");
  const int k = static_cast<int>(simplex.size()) - 1;
  const auto ambient = simplex.front().size();
  if (k > ambient) fail(ErrorCode::dimension_mismatch, "simplex has more vertices than its ambient space allows");
  if (k == 0) return {f(simplex.front()), 0.0, 1, Engine::simplex_rule};

  Matrix edges(ambient, k);
  double scale = 0.0;
  for (int i = 0; i < k; ++i) {
    edges.col(i) = simplex[static_cast<std::size_t>(i) + 1] - simplex.front();
    scale = std::max(scale, edges.col(i).norm());
  }
  const double jac = std::sqrt(std::max((edges.transpose() * edges).determinant(), 0.0));
  if (!(jac > 1e-13 * std::pow(scale, k))) fail(ErrorCode::degenerate, "degenerate simplex");

  const int m_hi = (degree + 2) / 2;
  const int m_lo = degree / 2;
  const auto& hi_rule = simplex_rule(k, m_hi);
  const double hi = jac * apply_rule(f, hi_rule, simplex.front(), edges);
  double lo = 0.0;
  std::int64_t count = static_cast<std::int64_t>(hi_rule.points.size());
  if (m_lo >= 1 && m_lo < m_hi) {
    const auto& lo_rule = simplex_rule(k, m_lo);
    lo = jac * apply_rule(f, lo_rule, simplex.front(), edges);
    count += static_cast<std::int64_t>(lo_rule.points.size());
  } else {
    double sum = 0.0;
    for (const auto& v : simplex) sum += f(v);
    lo = jac / std::tgamma(k + 1.0) * sum / (k + 1.0);
    count += k + 1;
  }
  return {hi, std::abs(hi - lo), count, Engine::simplex_rule};
}

std::vector<hull::Simplex> triangulate_facet(const Facet& facet) {
  const auto n = facet.normal.size();
  if (facet.vertices.empty()) fail(ErrorCode::invalid_argument, "facet without vertices");
  if (n == 1) return {hull::Simplex{facet.vertices.front()}};
  const Matrix basis = hull::orthogonal_complement(facet.normal);
  const Vector foot = facet.offset * facet.normal;
  std::vector<Vector> local;
  local.reserve(facet.vertices.size());
  for (const auto& v : facet.vertices) local.push_back(basis.transpose() * (v - foot));
  std::vector<hull::Simplex> out;
  for (const auto& s : hull::triangulate(local, 4096)) {
    hull::Simplex mapped;
    for (const auto& y : s) mapped.push_back(foot + basis * y);
    out.push_back(std::move(mapped));
  }
  return out;
}

QuadratureResult mc_body_integrate(const ScalarField& f, const ConvexBody& body, std::int64_t samples, RngSeed seed) {
  if (samples < 1000) fail(ErrorCode::invalid_argument, "body Monte Carlo needs at least 1000 samples");
  const int n = ambient_dim(body);
  auto rng = make_rng(seed);
  Welford acc;

  if (const auto* b = std::get_if<Box>(&body)) {
    const double vol = box_volume(-b->halfwidths, b->halfwidths);
    for (std::int64_t s = 0; s < samples; ++s) {
      Vector x(n);
      for (int i = 0; i < n; ++i) x[i] = b->halfwidths[i] * (2.0 * uniform01(rng) - 1.0);
      acc.add(vol * f(x));
    }
    return {acc.mean, acc.std_error(), samples, Engine::body_mc};
  }
  if (const auto* b = std::get_if<Ball>(&body)) {
    const double vol = omega(n) * std::pow(b->r, n);
    for (std::int64_t s = 0; s < samples; ++s) acc.add(vol * f(uniform_in_ball(rng, n, b->r)));
    return {acc.mean, acc.std_error(), samples, Engine::body_mc};
  }
  if (const auto* c = std::get_if<Cylinder>(&body)) {
    const double vol = omega(c->k) * std::pow(c->l, c->k) * omega(n - c->k);
    for (std::int64_t s = 0; s < samples; ++s) {
      Vector x(n);
      x.head(c->k) = uniform_in_ball(rng, c->k, c->l);
      x.tail(n - c->k) = uniform_in_ball(rng, n - c->k, 1.0);
      acc.add(vol * f(x));
    }
    return {acc.mean, acc.std_error(), samples, Engine::body_mc};
  }

  const ConvexBody member = std::holds_alternative<SymHPolytope>(body) || std::holds_alternative<Parallelotope>(body)
                                ? body
                                : ConvexBody(to_facet_listed(body));
  const auto [lo, hi] = bounding_box(body);
  const double vol = box_volume(lo, hi);
  std::int64_t accepted = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * uniform01(rng);
    if (contains(member, x, 0.0)) {
      ++accepted;
      acc.add(vol * f(x));
    } else {
      acc.add(0.0);
    }
  }
  if (static_cast<double>(accepted) < 1e-4 * static_cast<double>(samples)) {
    fail(ErrorCode::degenerate, "rejection acceptance rate below 1e-4");
  }
  return {acc.mean, acc.std_error(), samples, Engine::body_mc};
}

QuadratureResult mc_body_power_integral(const ConvexBody& body, double exponent, std::int64_t samples,
                                        RngSeed seed, const Region& region) {
  const int n = ambient_dim(body);
  if (!(exponent + n > 0.0)) fail(ErrorCode::invalid_argument, "|x|^e is not integrable near 0 for e <= -n");
  if (exponent > -1.0) {
    return mc_body_integrate(
        [&](const Vector& x) { return region && !region(x) ? 0.0 : std::pow(x.norm(), exponent); }, body, samples,
        seed);
  }
  if (samples < 1000) fail(ErrorCode::invalid_argument, "body Monte Carlo needs at least 1000 samples");
  const ConvexBody member = is_polytope(body) && !std::holds_alternative<Box>(body) &&
                                    !std::holds_alternative<SymHPolytope>(body) &&
                                    !std::holds_alternative<Parallelotope>(body)
                                ? ConvexBody(to_facet_listed(body))
                                : body;
  const double radius = bounding_radius(body);
  const double power = exponent + n;
  const double total = sphere_area(n) * std::pow(radius, power) / power;
  auto rng = make_rng(seed);
  Welford acc;
  for (std::int64_t s = 0; s < samples; ++s) {
    const Vector u = random_unit_vector(rng, n);
    const double r = radius * std::pow(uniform01(rng), 1.0 / power);
    const Vector x = r * u;
    acc.add(contains(member, x, 0.0) && (!region || region(x)) ? total : 0.0);
  }
  return {acc.mean, acc.std_error(), samples, Engine::body_mc};
}

QuadratureResult mc_sphere_integrate(const ScalarField& f, int n, std::int64_t samples, RngSeed seed) {
  if (samples < 1000) fail(ErrorCode::invalid_argument, "sphere Monte Carlo needs at least 1000 samples");
  const double area = sphere_area(n);
  auto rng = make_rng(seed);
  Welford acc;
  for (std::int64_t s = 0; s < samples; ++s) acc.add(area * f(random_unit_vector(rng, n)));
  return {acc.mean, acc.std_error(), samples, Engine::sphere_mc};
}

}  // namespace dualcurve
