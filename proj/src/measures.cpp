#include "dualcurve/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dualcurve/error.hpp"

namespace dualcurve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kActiveTol = 1e-9;
constexpr double kFacetRelTol = 1e-7;
constexpr int kMaxBisections = 10;
constexpr int kDegreeStep = 8;

struct FacetValue {
  double value = 0.0;
  double error = 0.0;
  std::int64_t nodes = 0;
};

// (h/n) * integral of |z|^(q-n) over the facet.
FacetValue facet_value(const Facet& f, int n, double q, int degree) {
  const double e = q - n;
  if (n == 1) return {std::pow(f.offset, q), 0.0, 1};
  if (e == 0.0) return {f.offset * facet_volume(f) / n, 0.0, 0};
  FacetValue out;
  const ScalarField integrand = [e](const Vector& z) { return std::pow(z.norm(), e); };
  // Raise the rule degree, then bisect the longest edge, until the rule pair
  // agrees; the integrand is analytic on the facet but varies on the scale h.
  const int high = std::max(degree, std::min(25, degree + kDegreeStep));
  std::vector<std::pair<hull::Simplex, int>> stack;
  for (auto& s : triangulate_facet(f)) stack.emplace_back(std::move(s), 0);
  while (!stack.empty()) {
    auto [s, depth] = std::move(stack.back());
    stack.pop_back();
    auto r = simplex_integrate(integrand, s, degree);
    out.nodes += r.nodes_or_samples;
    if (r.abs_error > kFacetRelTol * std::abs(r.value) && high > degree) {
      r = simplex_integrate(integrand, s, high);
      out.nodes += r.nodes_or_samples;
    }
    if (r.abs_error <= kFacetRelTol * std::abs(r.value) || depth >= kMaxBisections) {
      out.value += r.value;
      out.error += r.abs_error;
      continue;
    }
    std::size_t a = 0, b = 1;
    double longest = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t j = i + 1; j < s.size(); ++j) {
        const double d = (s[i] - s[j]).squaredNorm();
        if (d > longest) longest = d, a = i, b = j;
      }
    }
    const Vector mid = 0.5 * (s[a] + s[b]);
    hull::Simplex left = s, right = s;
    left[a] = mid;
    right[b] = mid;
    stack.emplace_back(std::move(left), depth + 1);
    stack.emplace_back(std::move(right), depth + 1);
  }
  out.value *= f.offset / n;
  out.error *= f.offset / n;
  return out;
}

std::vector<FacetValue> all_facet_values(const FacetListedPolytope& p, double q, int degree) {
  std::vector<FacetValue> out;
  out.reserve(p.facets.size());
  for (const auto& f : p.facets) out.push_back(facet_value(f, p.dim(), q, degree));
  return out;
}

bool block_in(const Subspace& L, int first, int count) {
  for (int i = 0; i < count; ++i) {
    if (!L.contains(Vector::Unit(L.ambient_dim(), first + i), kActiveTol)) return false;
  }
  return true;
}

// Whether the outer normals at the boundary point x of the cylinder meet eta.
bool cylinder_normal_selected(const Cylinder& c, const Vector& x, const NormalSelection& eta) {
  if (std::holds_alternative<FullSphere>(eta)) return true;
  const auto& L = std::get<SubspaceCap>(eta).subspace;
  const double a = x.head(c.k).norm() / c.l;
  const double t = x.tail(c.n - c.k).norm();
  const double top = std::max(a, t);
  if (a >= top * (1.0 - kActiveTol) && a > 0.0) {
    Vector u = Vector::Zero(c.n);
    u.head(c.k) = x.head(c.k).normalized();
    if (L.contains(u, kActiveTol)) return true;
  }
  if (t >= top * (1.0 - kActiveTol) && t > 0.0) {
    Vector u = Vector::Zero(c.n);
    u.tail(c.n - c.k) = x.tail(c.n - c.k).normalized();
    if (L.contains(u, kActiveTol)) return true;
  }
  return false;
}

std::vector<char> selection_flags(const FacetListedPolytope& p, const NormalSelection& eta) {
  std::vector<char> flags(p.facets.size(), 0);
  for (std::size_t i : resolve_facets(p, eta)) flags[i] = 1;
  return flags;
}

// Largest <u_i, x> / b_i and whether a facet attaining it (within tolerance) is selected.
std::pair<double, bool> polytope_gauge(const FacetListedPolytope& p, const std::vector<char>& flags,
                                       const Vector& x) {
  double top = -std::numeric_limits<double>::infinity();
  std::vector<double> t(p.facets.size());
  for (std::size_t i = 0; i < p.facets.size(); ++i) {
    t[i] = p.facets[i].normal.dot(x) / p.facets[i].offset;
    top = std::max(top, t[i]);
  }
  bool selected = false;
  for (std::size_t i = 0; i < t.size() && !selected; ++i) {
    selected = flags[i] && t[i] >= top - kActiveTol * std::abs(top);
  }
  return {top, selected};
}

MeasureEstimate closed_form_measure(const ConvexBody& body, const NormalSelection& eta, double q,
                                    const MeasureOptions& options) {
  const int n = ambient_dim(body);
  if (const auto* b = std::get_if<Ball>(&body)) {
    if (std::holds_alternative<FacetSubset>(eta)) {
      fail(ErrorCode::engine_mismatch, "a ball has no facets");
    }
    MeasureEstimate est;
    est.engine = Engine::closed_form;
    est.value = std::holds_alternative<FullSphere>(eta) ? omega(n) * std::pow(b->r, q) : 0.0;
    return est;
  }
  if (const auto* c = std::get_if<Cylinder>(&body)) {
    if (!(q > 0.0)) fail(ErrorCode::engine_mismatch, "cylinder closed forms need q > 0");
    if (std::holds_alternative<FacetSubset>(eta)) fail(ErrorCode::engine_mismatch, "a cylinder has no facets");
    if (std::holds_alternative<FullSphere>(eta)) return cylinder_dcm_total(q, c->n, c->k, c->l, options);
    const auto& L = std::get<SubspaceCap>(eta).subspace;
    MeasureEstimate est;
    est.engine = Engine::closed_form;
    if (block_in(L, 0, c->k)) {
      const auto s = cylinder_dcm_subspace(q, c->n, c->k, c->l, options);
      est.value += s.value;
      est.abs_error += s.abs_error;
      est.nodes_or_samples += s.nodes_or_samples;
    }
    if (block_in(L, c->k, c->n - c->k)) {
      const auto s = cylinder_dcm_complement(q, c->n, c->k, c->l, options);
      est.value += s.value;
      est.abs_error += s.abs_error;
      est.nodes_or_samples += s.nodes_or_samples;
    }
    return est;
  }
  fail(ErrorCode::engine_mismatch, "closed forms exist only for balls and cylinders");
}

MeasureEstimate facet_measure(const ConvexBody& body, const NormalSelection& eta, double q,
                              const MeasureOptions& options) {
  if (!is_polytope(body)) fail(ErrorCode::engine_mismatch, "the facet engine needs a polytope");
  if (!(q > 0.0)) fail(ErrorCode::engine_mismatch, "the facet engine needs q > 0; use sphere-mc");
  const auto p = to_facet_listed(body);
  MeasureEstimate est;
  est.engine = Engine::facet_exact;
  for (std::size_t i : resolve_facets(p, eta)) {
    const auto v = facet_value(p.facets[i], p.dim(), q, options.degree);
    est.value += v.value;
    est.abs_error += v.error;
    est.nodes_or_samples += v.nodes;
  }
  return est;
}

MeasureEstimate body_mc_measure(const ConvexBody& body, const NormalSelection& eta, double q,
                                const MeasureOptions& options) {
  if (!(q > 0.0)) fail(ErrorCode::engine_mismatch, "the body engine needs q > 0; use sphere-mc");
  const int n = ambient_dim(body);
  const double e = q - n;
  QuadratureResult r;
  if (std::holds_alternative<FullSphere>(eta)) {
    const ConvexBody sampled = is_polytope(body) && !std::holds_alternative<Box>(body)
                                   ? ConvexBody(to_facet_listed(body))
                                   : body;
    r = mc_body_power_integral(sampled, e, options.samples, options.seed);
  } else if (const auto* b = std::get_if<Ball>(&body)) {
    if (std::holds_alternative<FacetSubset>(eta)) fail(ErrorCode::engine_mismatch, "a ball has no facets");
    const auto& L = std::get<SubspaceCap>(eta).subspace;
    r = mc_body_power_integral(*b, e, options.samples, options.seed,
                               [&L](const Vector& x) { return L.contains(x.normalized(), kActiveTol); });
  } else if (const auto* c = std::get_if<Cylinder>(&body)) {
    if (std::holds_alternative<FacetSubset>(eta)) fail(ErrorCode::engine_mismatch, "a cylinder has no facets");
    r = mc_body_power_integral(*c, e, options.samples, options.seed,
                               [&](const Vector& x) { return cylinder_normal_selected(*c, x, eta); });
  } else {
    const auto p = to_facet_listed(body);
    const auto flags = selection_flags(p, eta);
    r = mc_body_power_integral(p, e, options.samples, options.seed,
                               [&](const Vector& x) { return polytope_gauge(p, flags, x).second; });
  }
  MeasureEstimate est;
  est.engine = Engine::body_mc;
  est.value = q / n * r.value;
  est.abs_error = q / n * r.abs_error;
  est.nodes_or_samples = r.nodes_or_samples;
  return est;
}

MeasureEstimate sphere_mc_measure(const ConvexBody& body, const NormalSelection& eta, double q,
                                  const MeasureOptions& options) {
  const int n = ambient_dim(body);
  QuadratureResult r;
  if (const auto* b = std::get_if<Ball>(&body)) {
    if (std::holds_alternative<FacetSubset>(eta)) fail(ErrorCode::engine_mismatch, "a ball has no facets");
    const double rq = std::pow(b->r, q);
    r = mc_sphere_integrate(
        [&](const Vector& u) {
          if (const auto* cap = std::get_if<SubspaceCap>(&eta); cap && !cap->subspace.contains(u, kActiveTol)) {
            return 0.0;
          }
          return rq;
        },
        n, options.samples, options.seed);
  } else if (const auto* c = std::get_if<Cylinder>(&body)) {
    if (std::holds_alternative<FacetSubset>(eta)) fail(ErrorCode::engine_mismatch, "a cylinder has no facets");
    r = mc_sphere_integrate(
        [&](const Vector& u) {
          const double rho = radial(body, u);
          return cylinder_normal_selected(*c, rho * u, eta) ? std::pow(rho, q) : 0.0;
        },
        n, options.samples, options.seed);
  } else {
    const auto p = to_facet_listed(body);
    const auto flags = selection_flags(p, eta);
    r = mc_sphere_integrate(
        [&](const Vector& u) {
          const auto [top, selected] = polytope_gauge(p, flags, u);
          return selected ? std::pow(top, -q) : 0.0;
        },
        n, options.samples, options.seed);
  }
  MeasureEstimate est;
  est.engine = Engine::sphere_mc;
  est.value = r.value / n;
  est.abs_error = r.abs_error / n;
  est.nodes_or_samples = r.nodes_or_samples;
  return est;
}

}  // namespace

const char* to_string(MeasureEngine engine) {
  switch (engine) {
    case MeasureEngine::automatic: return "auto";
    case MeasureEngine::facet_exact: return "facet-exact";
    case MeasureEngine::body_mc: return "body-mc";
    case MeasureEngine::sphere_mc: return "sphere-mc";
    case MeasureEngine::closed_form: return "closed-form";
  }
  return "unknown";
}

MeasureEngine parse_engine(const std::string& name) {
  if (name == "auto") return MeasureEngine::automatic;
  if (name == "facet" || name == "facet-exact") return MeasureEngine::facet_exact;
  if (name == "body-mc") return MeasureEngine::body_mc;
  if (name == "sphere-mc") return MeasureEngine::sphere_mc;
  if (name == "closed" || name == "closed-form") return MeasureEngine::closed_form;
  fail(ErrorCode::invalid_argument, "unknown engine '" + name + "'");
}

MeasureOptions MeasureOptions::refined() const {
  MeasureOptions out = *this;
  out.degree = std::min(25, degree + 6);
  out.samples = samples * 10;
  out.gl_nodes = std::min(400, gl_nodes * 2);
  out.seed.stream = seed.stream ^ 0x9e3779b97f4a7c15ULL;
  return out;
}

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::q_ge_n_plus_1: return "q>=n+1";
    case BoundKind::q_eq_n: return "q=n";
    case BoundKind::q_lt_n: return "0<q<n";
    case BoundKind::planar: return "planar q>2";
    case BoundKind::parallelotope: return "parallelotope";
    case BoundKind::none: return "none";
  }
  return "unknown";
}

Bound subspace_bound(int n, int k, double q, bool parallelotope) {
  if (!(q > 0.0)) fail(ErrorCode::invalid_argument, "subspace bounds need q > 0");
  if (k < 1 || k > n - 1) fail(ErrorCode::invalid_argument, "subspace dimension must lie in [1, n-1]");
  if (n == 2 && q > 2.0) return {BoundKind::planar, (q - 1.0) / q};
  if (q >= n + 1.0) return {BoundKind::q_ge_n_plus_1, (q - n + k) / q};
  if (std::abs(q - n) <= 1e-12) return {BoundKind::q_eq_n, static_cast<double>(k) / n};
  if (q < n) return {BoundKind::q_lt_n, std::min(k / q, 1.0)};
  if (parallelotope) return {BoundKind::parallelotope, (q - n + k) / q};
  return {BoundKind::none, 1.0};
}

bool is_parallelotope(const ConvexBody& body) {
  if (std::holds_alternative<Box>(body) || std::holds_alternative<Parallelotope>(body)) return true;
  if (const auto* p = std::get_if<FacetListedPolytope>(&body)) {
    return p->kind == PolytopeKind::box || p->kind == PolytopeKind::parallelotope;
  }
  return false;
}

double facet_volume(const Facet& facet) {
  if (facet.normal.size() == 1) return 1.0;
  double vol = 0.0;
  for (const auto& s : triangulate_facet(facet)) vol += hull::simplex_volume(s);
  return vol;
}

double polytope_volume(const FacetListedPolytope& p) {
  double vol = 0.0;
  for (const auto& f : p.facets) vol += f.offset * facet_volume(f);
  return vol / p.dim();
}

MeasureEstimate facet_dual_curvature(const FacetListedPolytope& p, std::size_t facet, double q,
                                     const MeasureOptions& options) {
  if (!(q > 0.0)) fail(ErrorCode::invalid_argument, "facet dual curvature needs q > 0; use the sphere-mc engine");
  if (facet >= p.facets.size()) {
    fail(ErrorCode::invalid_argument, "facet index " + std::to_string(facet) + " out of range");
  }
  const auto v = facet_value(p.facets[facet], p.dim(), q, options.degree);
  MeasureEstimate est;
  est.value = v.value;
  est.abs_error = v.error;
  est.engine = Engine::facet_exact;
  est.q = q;
  est.body = "facet_listed";
  est.selection = "facets:" + std::to_string(facet);
  est.nodes_or_samples = v.nodes;
  return est;
}

MeasureEngine resolve_engine(const ConvexBody& body, const NormalSelection& eta, double q) {
  if (std::holds_alternative<Ball>(body)) return MeasureEngine::closed_form;
  if (std::holds_alternative<Cylinder>(body)) {
    return q > 0.0 && !std::holds_alternative<FacetSubset>(eta) ? MeasureEngine::closed_form
                                                                 : MeasureEngine::sphere_mc;
  }
  return q > 0.0 ? MeasureEngine::facet_exact : MeasureEngine::sphere_mc;
}

MeasureEstimate dual_curvature(const ConvexBody& body, const NormalSelection& eta, double q, MeasureEngine engine,
                               const MeasureOptions& options) {
  if (!std::isfinite(q)) fail(ErrorCode::invalid_argument, "q must be finite");
  const int n = ambient_dim(body);
  if (const auto* cap = std::get_if<SubspaceCap>(&eta); cap && cap->subspace.ambient_dim() != n) {
    fail(ErrorCode::dimension_mismatch, "subspace lives in another dimension");
  }
  if (engine == MeasureEngine::automatic) engine = resolve_engine(body, eta, q);
  MeasureEstimate est;
  switch (engine) {
    case MeasureEngine::closed_form:
      est = closed_form_measure(body, eta, q, options);
      break;
    case MeasureEngine::facet_exact:
      est = facet_measure(body, eta, q, options);
      break;
    case MeasureEngine::body_mc:
      est = body_mc_measure(body, eta, q, options);
      break;
    case MeasureEngine::sphere_mc:
      est = sphere_mc_measure(body, eta, q, options);
      break;
    case MeasureEngine::automatic:
      break;
  }
  est.q = q;
  est.body = type_name(body);
  est.selection = describe(eta);
  return est;
}

MeasureEstimate cone_volume_measure(const FacetListedPolytope& p, const NormalSelection& eta) {
  MeasureEstimate est;
  est.engine = Engine::facet_exact;
  est.q = p.dim();
  est.body = "facet_listed";
  est.selection = describe(eta);
  for (std::size_t i : resolve_facets(p, eta)) {
    est.value += p.facets[i].offset * facet_volume(p.facets[i]) / p.dim();
  }
  est.abs_error = 1e-15 * est.value * static_cast<double>(p.facets.size());
  return est;
}

MeasureEstimate dual_quermassintegral(const ConvexBody& body, int i, MeasureEngine engine,
                                      const MeasureOptions& options) {
  const int n = ambient_dim(body);
  if (i < 0 || i > n) fail(ErrorCode::invalid_argument, "dual quermassintegral index must lie in [0, n]");
  return dual_curvature(body, FullSphere{}, static_cast<double>(i), engine, options);
}

RatioReport subspace_concentration_ratio(const ConvexBody& body, const Subspace& subspace, double q,
                                         MeasureEngine engine, const MeasureOptions& options) {
  const int n = ambient_dim(body);
  if (!(q > 0.0)) fail(ErrorCode::invalid_argument, "concentration ratios need q > 0");
  if (subspace.ambient_dim() != n) fail(ErrorCode::dimension_mismatch, "subspace lives in another dimension");
  const NormalSelection cap = SubspaceCap{subspace};
  if (engine == MeasureEngine::automatic) engine = resolve_engine(body, cap, q);

  RatioReport report;
  if (engine == MeasureEngine::facet_exact) {
    if (!is_polytope(body)) fail(ErrorCode::engine_mismatch, "the facet engine needs a polytope");
    const auto p = to_facet_listed(body);
    const auto values = all_facet_values(p, q, options.degree);
    const auto selected = resolve_facets(p, cap);
    MeasureEstimate sub, total;
    for (const auto& v : values) {
      total.value += v.value;
      total.abs_error += v.error;
      total.nodes_or_samples += v.nodes;
    }
    for (std::size_t i : selected) {
      sub.value += values[i].value;
      sub.abs_error += values[i].error;
      sub.nodes_or_samples += values[i].nodes;
    }
    for (auto* e : {&sub, &total}) {
      e->engine = Engine::facet_exact;
      e->q = q;
      e->body = type_name(body);
    }
    sub.selection = describe(cap);
    total.selection = "all";
    report.subspace = sub;
    report.total = total;
  } else {
    report.subspace = dual_curvature(body, cap, q, engine, options);
    report.total = dual_curvature(body, FullSphere{}, q, engine, options);
  }
  const double s = report.subspace.value;
  const double t = report.total.value;
  if (!(t > 0.0)) fail(ErrorCode::degenerate, "total dual curvature measure vanishes");
  report.ratio = s / t;
  report.ratio_error = std::hypot(report.subspace.abs_error / t, s * report.total.abs_error / (t * t));
  const Bound bound = subspace_bound(n, subspace.dim(), q, is_parallelotope(body));
  report.bound = bound.value;
  report.bound_kind = bound.kind;
  report.margin = bound.value - report.ratio;
  report.satisfied = report.margin >= -(1e-9 + 3.0 * report.ratio_error);
  return report;
}

MeasureEstimate cylinder_dcm_subspace(double q, int n, int k, double l, const MeasureOptions& options) {
  make_cylinder(n, k, l);
  if (!(q > 0.0)) fail(ErrorCode::invalid_argument, "cylinder measures need q > 0");
  const double alpha = 0.5 * (q - n);
  const double inv_l2 = 1.0 / (l * l);
  const int tail = n - k;
  // T = int_0^1 t^(n-k-1) (1 + t^2/l^2)^((q-n)/2) dt
  const auto t_int = graded_gauss_legendre(
      [=](double t) { return std::pow(t, tail - 1) * std::pow(1.0 + t * t * inv_l2, alpha); }, 0.0, 1.0,
      std::min(1.0, l), options.gl_nodes);
  // (c/q) with c = (q/n) k omega_k (n-k) omega_{n-k}
  const double pref = k * omega(k) * tail * omega(tail) / n * std::pow(l, q - n + k);
  MeasureEstimate est;
  est.value = pref * t_int.value;
  est.abs_error = pref * t_int.abs_error + 4e-16 * est.value;
  est.engine = Engine::closed_form;
  est.q = q;
  est.body = "cylinder";
  est.selection = "subspace:axis-block";
  est.nodes_or_samples = t_int.nodes_or_samples;
  return est;
}

MeasureEstimate cylinder_dcm_complement(double q, int n, int k, double l, const MeasureOptions& options) {
  make_cylinder(n, k, l);
  // K_l is l times the cylinder with the blocks swapped and scale 1/l; C_q is q-homogeneous.
  auto est = cylinder_dcm_subspace(q, n, n - k, 1.0 / l, options);
  const double s = std::pow(l, q);
  est.value *= s;
  est.abs_error *= s;
  est.selection = "subspace:complement-block";
  return est;
}

MeasureEstimate cylinder_dcm_total(double q, int n, int k, double l, const MeasureOptions& options) {
  const auto a = cylinder_dcm_subspace(q, n, k, l, options);
  const auto b = cylinder_dcm_complement(q, n, k, l, options);
  MeasureEstimate est = a;
  est.value = a.value + b.value;
  est.abs_error = a.abs_error + b.abs_error;
  est.nodes_or_samples = a.nodes_or_samples + b.nodes_or_samples;
  est.selection = "all";
  return est;
}

double cylinder_ratio_limit(double q, int n, int k) {
  if (!(q > n)) fail(ErrorCode::invalid_argument, "the cylinder limit needs q > n");
  if (k < 1 || k > n - 1) fail(ErrorCode::invalid_argument, "cylinder needs 1 <= k <= n-1");
  return (q - n + k) / q;
}

}  // namespace dualcurve
