#include <algorithm>
#include <cmath>

#include "dualcurve/error.hpp"
#include "dualcurve/hull.hpp"
#include "dualcurve/measures.hpp"

namespace dualcurve {

namespace {

// int_0^x (d^2 + t^2)^(p/2) dt for x >= 0, d > 0
QuadratureResult half_line_moment(double x, double d, double p, int nodes) {
  return graded_gauss_legendre([=](double t) { return std::pow(d * d + t * t, 0.5 * p); }, 0.0, x, d, nodes);
}

// Radial factor of the cone decomposition: int_0^1 (d^2 + r^2 a^2)^(p/2) r^(k-1) dr.
double radial_factor(double a, double d, double p, int k) {
  if (d == 0.0) return std::pow(a, p) / (p + k);
  if (a == 0.0) return std::pow(d, p) / k;
  if (k == 2) {
    const double ratio = (a * a) / (d * d);
    return std::pow(d, p + 2.0) * std::expm1((0.5 * p + 1.0) * std::log1p(ratio)) / ((p + 2.0) * a * a);
  }
  const auto r = graded_gauss_legendre(
      [=](double s) { return std::pow(d * d + s * s * a * a, 0.5 * p) * std::pow(s, k - 1); }, 0.0, 1.0,
      std::min(1.0, d / a), 16);
  return r.value;
}

}  // namespace

MeasureEstimate moment_integral(const VPolytope& body, double p, const MeasureOptions& options) {
  if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "moment order must be >= 0");
  if (body.points.empty()) fail(ErrorCode::invalid_argument, "empty point hull");
  const auto pts = hull::deduplicate(body.points);
  const AffineChart chart = chart_of(pts);
  const int k = chart.dim();
  double scale = 0.0;
  for (const auto& x : pts) scale = std::max(scale, x.norm());
  double d = chart.origin.norm();
  if (d <= 1e-13 * scale) d = 0.0;

  MeasureEstimate est;
  est.q = p;
  est.body = "vpolytope";
  est.selection = "moment";

  if (k == 0) {
    est.value = std::pow(pts.front().norm(), p);
    est.engine = Engine::closed_form;
    return est;
  }

  std::vector<Vector> local;
  local.reserve(pts.size());
  for (const auto& x : pts) local.push_back(chart.to_chart(x));

  if (k == 1) {
    double a = local.front()[0], b = a;
    for (const auto& y : local) {
      a = std::min(a, y[0]);
      b = std::max(b, y[0]);
    }
    if (d == 0.0) {
      auto antiderivative = [p](double t) { return std::copysign(std::pow(std::abs(t), p + 1.0) / (p + 1.0), t); };
      est.value = antiderivative(b) - antiderivative(a);
      est.abs_error = 4e-16 * std::abs(est.value);
      est.engine = Engine::closed_form;
      return est;
    }
    // signed pieces measured from the foot point t = 0
    auto piece = [&](double x) {
      const auto r = half_line_moment(std::abs(x), d, p, options.gl_nodes);
      est.nodes_or_samples += r.nodes_or_samples;
      est.abs_error += r.abs_error;
      return std::copysign(r.value, x);
    };
    est.value = piece(b) - piece(a);
    est.engine = Engine::gauss_legendre;
    return est;
  }

  if (k > kMaxBruteForceDim) fail(ErrorCode::budget_exceeded, "moment integrals support intrinsic dimension <= 4");
  // Signed cone decomposition from the chart origin (the foot of 0 on the affine hull).
  const std::size_t budget = k == 2 ? 1000000 : 256;
  const auto ext = hull::vertices(local, budget);
  const auto facets = hull::facets(ext, budget);
  const ScalarField g = [=](const Vector& z) { return radial_factor(z.norm(), d, p, k); };
  for (const auto& f : facets) {
    if (std::abs(f.offset) <= 1e-13 * scale) continue;
    Facet facet{f.normal, f.offset, {}};
    for (std::size_t i : f.points) facet.vertices.push_back(ext[i]);
    for (const auto& s : triangulate_facet(facet)) {
      const auto r = simplex_integrate(g, s, options.degree);
      est.value += f.offset * r.value;
      est.abs_error += std::abs(f.offset) * r.abs_error;
      est.nodes_or_samples += r.nodes_or_samples;
    }
  }
  est.engine = Engine::simplex_rule;
  return est;
}

MeasureEstimate moment_integral(const ConvexBody& body, double p, const MeasureOptions& options) {
  if (!(p >= 0.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "moment order must be >= 0");
  const int n = ambient_dim(body);
  if (const auto* b = std::get_if<Ball>(&body)) {
    MeasureEstimate est;
    est.value = n * omega(n) * std::pow(b->r, n + p) / (n + p);
    est.engine = Engine::closed_form;
    est.q = p;
    est.body = "ball";
    est.selection = "moment";
    return est;
  }
  if (std::holds_alternative<Cylinder>(body)) {
    const auto r = mc_body_integrate([p](const Vector& x) { return std::pow(x.norm(), p); }, body, options.samples,
                                     options.seed);
    MeasureEstimate est;
    est.value = r.value;
    est.abs_error = r.abs_error;
    est.engine = Engine::body_mc;
    est.q = p;
    est.body = "cylinder";
    est.selection = "moment";
    est.nodes_or_samples = r.nodes_or_samples;
    return est;
  }
  std::vector<Vector> pts;
  if (const auto* v = std::get_if<SymVPolytope>(&body)) {
    for (const auto& x : v->vertices) {
      pts.push_back(x);
      pts.push_back(-x);
    }
  } else {
    pts = polytope_vertices(body);
  }
  auto est = moment_integral(VPolytope{pts}, p, options);
  est.body = type_name(body);
  return est;
}

}  // namespace dualcurve
