#include "dualcurve/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/rational.hpp>

#include "dualcurve/error.hpp"
#include "dualcurve/hull.hpp"
#include "dualcurve/random_bodies.hpp"

namespace dualcurve {

namespace {

constexpr double kEqualityTol = 1e-12;
constexpr double kClassifiedTol = 1e-10;

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

std::string describe_params(std::initializer_list<std::pair<const char*, double>> items) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, value] : items) {
    if (!first) os << ' ';
    first = false;
    os << name << '=' << fmt("%.6g", value);
  }
  return os.str();
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorCode::invalid_argument, "lambda must lie in [0,1]");
}

bool is_endpoint(double lambda) { return lambda == 0.0 || lambda == 1.0; }

VPolytope translate(const VPolytope& k, const Vector& v) {
  VPolytope out;
  out.points.reserve(k.points.size());
  for (const auto& x : k.points) out.points.push_back(x + v);
  return out;
}

// Unit direction u with every point in lin(u), or an empty vector when the points are not collinear with 0.
Vector common_line(const std::vector<Vector>& pts) {
  double best = 0.0;
  Vector u;
  for (const auto& x : pts) {
    if (x.norm() > best) {
      best = x.norm();
      u = x / best;
    }
  }
  if (best == 0.0) return {};
  for (const auto& x : pts) {
    if ((x - u * u.dot(x)).norm() > 1e-10 * best) return {};
  }
  return u;
}

std::pair<double, double> line_interval(const std::vector<Vector>& pts, const Vector& u) {
  double a = std::numeric_limits<double>::infinity();
  double b = -a;
  for (const auto& x : pts) {
    a = std::min(a, u.dot(x));
    b = std::max(b, u.dot(x));
  }
  return {a, b};
}

bool symmetric_point_set(const std::vector<Vector>& pts) {
  double scale = 0.0;
  for (const auto& x : pts) scale = std::max(scale, x.norm());
  for (const auto& x : pts) {
    const bool found = std::any_of(pts.begin(), pts.end(), [&](const Vector& y) {
      return (x + y).norm() <= 1e-9 * std::max(scale, 1.0);
    });
    if (!found) return false;
  }
  return true;
}

}  // namespace

const char* to_string(EqualityCase c) {
  switch (c) {
    case EqualityCase::none: return "none";
    case EqualityCase::lambda_endpoint: return "lambda-endpoint";
    case EqualityCase::antipodal: return "antipodal";
    case EqualityCase::p1_separated: return "p1-separated";
    case EqualityCase::threshold: return "threshold";
    case EqualityCase::numeric_equal: return "numeric-equal";
  }
  return "none";
}

InequalityReport make_report(double lhs, double rhs, double tol_abs, double tol_rel) {
  InequalityReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.tol_abs = tol_abs;
  r.tol_rel = tol_rel;
  r.scale = std::max(std::abs(lhs), std::abs(rhs));
  r.holds = r.margin >= -tol_abs - tol_rel * r.scale;
  return r;
}

// ---------------------------------------------------------------------------
// Karamata

double ConvexFunction::operator()(double t) const {
  switch (kind) {
    case Kind::power: return std::pow(t, p);
    case Kind::exp: return std::exp(t);
    case Kind::table: {
      const std::size_t m = knots.size();
      std::size_t i = 0;
      if (t >= knots[m - 1]) {
        i = m - 2;
      } else if (t > knots[0]) {
        i = static_cast<std::size_t>(std::upper_bound(knots.begin(), knots.end(), t) - knots.begin()) - 1;
      }
      const double slope = (values[i + 1] - values[i]) / (knots[i + 1] - knots[i]);
      return values[i] + slope * (t - knots[i]);
    }
  }
  return 0.0;
}

namespace {

void validate_function(const ConvexFunction& f, const std::vector<double>& xs, const std::vector<double>& ys) {
  using Kind = ConvexFunction::Kind;
  if (f.kind == Kind::power) {
    if (!(f.p >= 1.0)) fail(ErrorCode::invalid_argument, "power functions need p >= 1");
    for (const auto* v : {&xs, &ys}) {
      for (double t : *v) {
        if (t < 0.0) fail(ErrorCode::invalid_argument, "t^p is used on t >= 0 only");
      }
    }
  } else if (f.kind == Kind::table) {
    if (f.knots.size() < 2 || f.knots.size() != f.values.size()) {
      fail(ErrorCode::invalid_argument, "table needs at least two knots and one value per knot");
    }
    double prev_slope = 0.0;
    for (std::size_t i = 0; i + 1 < f.knots.size(); ++i) {
      const double h = f.knots[i + 1] - f.knots[i];
      if (!(h > 0.0)) fail(ErrorCode::invalid_argument, "table knots must increase");
      const double slope = (f.values[i + 1] - f.values[i]) / h;
      if (slope < prev_slope - 1e-12 * std::max(1.0, std::abs(slope))) {
        fail(ErrorCode::invalid_argument, "table is not convex nondecreasing");
      }
      prev_slope = slope;
    }
  }
}

}  // namespace

InequalityReport karamata_check(const std::vector<double>& xs, const std::vector<double>& ys, const ConvexFunction& f) {
  if (xs.size() != ys.size() || xs.empty()) fail(ErrorCode::invalid_argument, "xs and ys need the same nonzero length");
  validate_function(f, xs, ys);
  double scale = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) scale = std::max({scale, std::abs(xs[i]), std::abs(ys[i])});
  const double tol = 1e-12 * std::max(scale, 1.0) * static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0 && (xs[i] > xs[i - 1] || ys[i] > ys[i - 1])) {
      fail(ErrorCode::precondition_violated, "xs and ys must be nonincreasing");
    }
    sx += xs[i];
    sy += ys[i];
    if (sx < sy - tol) {
      fail(ErrorCode::precondition_violated,
           "prefix sums of xs do not dominate those of ys at index " + std::to_string(i));
    }
  }
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lhs += f(xs[i]);
    rhs += f(ys[i]);
  }
  auto r = make_report(lhs, rhs, 0.0, 1e-12 * static_cast<double>(xs.size()));
  if (std::abs(r.margin) <= kEqualityTol * r.scale) r.equality_case = EqualityCase::numeric_equal;
  return r;
}

// ---------------------------------------------------------------------------
// Scalar lemma

InequalityReport scalar_combination_check(double z, double zbar, double lambda, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "the scalar lemma needs p >= 1");
  check_lambda(lambda);
  const double a = lambda * z + (1.0 - lambda) * zbar;
  const double b = lambda * zbar + (1.0 - lambda) * z;
  const double lhs = std::pow(std::abs(a), p) + std::pow(std::abs(b), p);
  const double rhs = std::pow(std::abs(2.0 * lambda - 1.0), p) * (std::pow(std::abs(z), p) + std::pow(std::abs(zbar), p));
  auto r = make_report(lhs, rhs, 0.0, 1e-12);

  const double big = std::max(std::abs(z), std::abs(zbar));
  if (is_endpoint(lambda)) {
    r.equality_case = EqualityCase::lambda_endpoint;
  } else if (std::abs(z + zbar) <= kEqualityTol * big) {
    r.equality_case = EqualityCase::antipodal;
  } else if (p == 1.0 && z * zbar < 0.0 &&
             std::max(lambda, 1.0 - lambda) >= big / (std::abs(z) + std::abs(zbar)) - kEqualityTol) {
    r.equality_case = EqualityCase::threshold;
  } else if (std::abs(r.margin) <= kEqualityTol * r.scale) {
    r.equality_case = EqualityCase::numeric_equal;
  }
  return r;
}

int scalar_combination_exact_sign(long long z, long long zbar, long long lambda_num, long long den) {
  using Q = boost::rational<long long>;
  if (den <= 0 || lambda_num < 0 || lambda_num > den) fail(ErrorCode::invalid_argument, "lambda must lie in [0,1]");
  const Q lam(lambda_num, den);
  const Q zq(z), zb(zbar);
  const Q lhs = boost::abs(lam * zq + (Q(1) - lam) * zb) + boost::abs(lam * zb + (Q(1) - lam) * zq);
  const Q rhs = boost::abs(Q(2) * lam - Q(1)) * (boost::abs(zq) + boost::abs(zb));
  if (lhs > rhs) return 1;
  if (lhs < rhs) return -1;
  return 0;
}

// ---------------------------------------------------------------------------
// Sphere constant

double alesker_constant(int n, double p) {
  return 2.0 * std::pow(M_PI, 0.5 * (n - 1)) * std::exp(std::lgamma(0.5 * (p + 1.0)) - std::lgamma(0.5 * (n + p)));
}

AleskerReport alesker_constancy_check(int n, double p, const std::vector<Vector>& xs, std::int64_t samples,
                                      RngSeed seed, bool frames) {
  if (n < 1) fail(ErrorCode::invalid_argument, "dimension must be positive");
  if (!(p >= 1.0)) fail(ErrorCode::invalid_argument, "the constancy check needs p >= 1");
  if (xs.empty()) fail(ErrorCode::invalid_argument, "no test vectors");
  if (samples < 1) fail(ErrorCode::invalid_argument, "need at least one sample");
  for (const auto& x : xs) {
    if (x.size() != n) fail(ErrorCode::dimension_mismatch, "test vector has the wrong dimension");
    if (!(x.norm() > 0.0)) fail(ErrorCode::invalid_argument, "test vectors must be nonzero");
  }
  auto rng = make_rng(seed);
  std::vector<Vector> unit;
  for (const auto& x : xs) unit.push_back(x / x.norm());
  std::vector<double> sums(xs.size(), 0.0);
  std::int64_t used = 0;
  if (frames) {
    const std::int64_t count = std::max<std::int64_t>(1, samples / n);
    for (std::int64_t s = 0; s < count; ++s) {
      const Matrix r = random_rotation(rng, n);
      const Matrix proj = r.transpose();
      for (std::size_t j = 0; j < unit.size(); ++j) {
        const Vector c = proj * unit[j];
        for (int i = 0; i < n; ++i) sums[j] += std::pow(std::abs(c[i]), p);
      }
    }
    used = count * n;
  } else {
    for (std::int64_t s = 0; s < samples; ++s) {
      const Vector theta = random_unit_vector(rng, n);
      for (std::size_t j = 0; j < unit.size(); ++j) sums[j] += std::pow(std::abs(unit[j].dot(theta)), p);
    }
    used = samples;
  }
  AleskerReport rep;
  rep.samples = used;
  rep.inv_c_exact = alesker_constant(n, p);
  const double area = sphere_area(n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, mean = 0.0, inv = 0.0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    // |x|^p cancels: integral of |<x,theta>|^p = |x|^p * integral of |<x/|x|,theta>|^p
    const double integral = area * sums[j] / static_cast<double>(used);
    const double r = 1.0 / integral;
    rep.ratios.push_back(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    mean += r;
    inv += integral;
  }
  mean /= static_cast<double>(xs.size());
  rep.spread = (hi - lo) / mean;
  rep.inv_c_estimate = inv / static_cast<double>(xs.size());
  return rep;
}

// ---------------------------------------------------------------------------
// Moment inequalities

InequalityReport moment_bm_check(const VPolytope& k0, const VPolytope& k1, double lambda, double p,
                                 const MeasureOptions& options) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "moment inequality needs p >= 1");
  check_lambda(lambda);
  const int d0 = intrinsic_dim(k0.points);
  const int d1 = intrinsic_dim(k1.points);
  if (d0 != d1) fail(ErrorCode::dimension_mismatch, "bodies have different intrinsic dimensions");
  const double v0 = moment_integral(k0, 0.0, options).value;
  const double v1 = moment_integral(k1, 0.0, options).value;
  if (std::abs(v0 - v1) > 1e-9 * std::max(v0, v1)) {
    fail(ErrorCode::precondition_violated, "bodies must have equal volume (got " + fmt("%.17g", v0) + " and " +
                                               fmt("%.17g", v1) + ")");
  }
  const auto kl = minkowski_combination(k0, k1, lambda);
  const auto km = minkowski_combination(k0, k1, 1.0 - lambda);
  const auto ml = moment_integral(kl, p, options);
  const auto mm = moment_integral(km, p, options);
  const auto m0 = moment_integral(k0, p, options);
  const auto m1 = moment_integral(k1, p, options);
  const double f = std::pow(std::abs(2.0 * lambda - 1.0), p);
  const double err = ml.abs_error + mm.abs_error + f * (m0.abs_error + m1.abs_error);
  auto r = make_report(ml.value + mm.value, f * (m0.value + m1.value), 3.0 * err, 1e-9);

  if (is_endpoint(lambda)) {
    r.equality_case = EqualityCase::lambda_endpoint;
  } else if (p == 1.0 && d0 == 1) {
    std::vector<Vector> all = k0.points;
    all.insert(all.end(), k1.points.begin(), k1.points.end());
    const Vector u = common_line(all);
    if (u.size() > 0) {
      const auto [a0, b0] = line_interval(k0.points, u);
      const double len = b0 - a0;
      auto [al, bl] = line_interval(kl.points, u);
      auto [am, bm] = line_interval(km.points, u);
      al /= len, bl /= len, am /= len, bm /= len;
      const double tol = 1e-10;
      if ((bl <= tol && am >= -tol) || (bm <= tol && al >= -tol)) r.equality_case = EqualityCase::p1_separated;
    }
  }
  if (r.equality_case == EqualityCase::none && std::abs(r.margin) <= kEqualityTol * r.scale) {
    r.equality_case = EqualityCase::numeric_equal;
  }
  return r;
}

InequalityReport reflection_corollary_check(const VPolytope& k, double lambda, double p,
                                            const MeasureOptions& options) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorCode::invalid_argument, "moment inequality needs p >= 1");
  check_lambda(lambda);
  const auto neg = reflect(k);
  const auto kl = minkowski_combination(k, neg, lambda);
  const auto ml = moment_integral(kl, p, options);
  const auto mk = moment_integral(k, p, options);
  const double f = std::pow(std::abs(2.0 * lambda - 1.0), p);
  auto r = make_report(ml.value, f * mk.value, 3.0 * (ml.abs_error + f * mk.abs_error), 1e-9);
  if (is_endpoint(lambda)) {
    r.equality_case = EqualityCase::lambda_endpoint;
  } else if (p == 1.0 && intrinsic_dim(k.points) == 1) {
    const Vector u = common_line(k.points);
    if (u.size() > 0) {
      const auto [a0, b0] = line_interval(k.points, u);
      const double len = b0 - a0;
      const auto [a, b] = line_interval(kl.points, u);
      if (!(a / len < -1e-10 && b / len > 1e-10)) r.equality_case = EqualityCase::p1_separated;
    }
  }
  if (r.equality_case == EqualityCase::none && std::abs(r.margin) <= kEqualityTol * r.scale) {
    r.equality_case = EqualityCase::numeric_equal;
  }
  return r;
}

double tightness_factor_probe(const VPolytope& c, const Vector& u, double rho, double lambda, double p,
                              const MeasureOptions& options) {
  if (!(rho > 0.0)) fail(ErrorCode::invalid_argument, "rho must be positive");
  if (!(p >= 0.0)) fail(ErrorCode::invalid_argument, "moment order must be >= 0");
  check_lambda(lambda);
  if (!symmetric_point_set(extreme_points(c.points))) fail(ErrorCode::precondition_violated, "C must be symmetric");
  const auto k0 = translate(c, rho * u.normalized());
  const auto kl = minkowski_combination(k0, reflect(k0), lambda);
  return moment_integral(kl, p, options).value / moment_integral(k0, p, options).value;
}

InequalityReport small_p_counterexample(double eps, double p) {
  if (!(eps > 0.0)) fail(ErrorCode::invalid_argument, "eps must be positive");
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorCode::invalid_argument, "p must lie in (0,1]");
  const double lhs = 1.0 / (p + 1.0);
  const double rhs = (std::pow(eps + 1.0, p + 1.0) - std::pow(eps, p + 1.0)) / ((p + 1.0) * std::pow(2.0 * eps + 1.0, p));
  auto r = make_report(lhs, rhs, 0.0, kEqualityTol);
  r.note = r.margin < 0.0 ? "reversed: rhs/lhs = " + fmt("%.17g", rhs / lhs) : "rhs/lhs = " + fmt("%.17g", rhs / lhs);
  if (std::abs(r.margin) <= kEqualityTol * r.scale) r.equality_case = EqualityCase::numeric_equal;
  return r;
}

SmallPScan small_p_scan(double p, const std::vector<double>& eps_grid) {
  SmallPScan scan;
  scan.p = p;
  for (double eps : eps_grid) {
    const auto r = small_p_counterexample(eps, p);
    const double ratio = r.rhs / r.lhs;
    if (ratio > 1.0 && (!scan.reversed_found || ratio > scan.ratio_at_witness)) {
      scan.reversed_found = true;
      scan.eps_witness = eps;
      scan.ratio_at_witness = ratio;
    }
    if (ratio < 1.0 && !scan.crossover_found) {
      scan.crossover_found = true;
      scan.eps_crossover = eps;
    }
  }
  return scan;
}

InequalityReport anderson_translate_check(const VPolytope& q_body, const Vector& v, double lambda, double p,
                                          const MeasureOptions& options) {
  if (!(p >= 0.0) || !std::isfinite(p)) {
    fail(ErrorCode::invalid_argument, "only |x|^p with p >= 0 is supported");
  }
  check_lambda(lambda);
  const auto ext = extreme_points(q_body.points);
  if (!symmetric_point_set(ext)) fail(ErrorCode::precondition_violated, "Q must be origin symmetric");
  const VPolytope q{ext};
  const auto a = moment_integral(translate(q, v), p, options);
  const auto b = moment_integral(translate(q, lambda * v), p, options);
  auto r = make_report(a.value, b.value, 3.0 * (a.abs_error + b.abs_error), 1e-9);
  if (lambda == 1.0) {
    r.equality_case = EqualityCase::lambda_endpoint;
  } else if (std::abs(r.margin) <= kEqualityTol * r.scale) {
    r.equality_case = EqualityCase::numeric_equal;
  }
  if (lambda < 1.0 && p > 0.0) {
    // Sublevel sets of |x|^p are balls; compare (Q+v) cap rB with (Q cap rB) + v on sample points of Q.
    std::vector<Vector> probe = ext;
    for (std::size_t i = 0; i < ext.size(); ++i) {
      for (std::size_t j = i + 1; j < ext.size(); ++j) probe.push_back(0.5 * (ext[i] + ext[j]));
    }
    probe.push_back(Vector::Zero(v.size()));
    double rmax = 0.0;
    for (const auto& y : probe) rmax = std::max({rmax, y.norm(), (y + v).norm()});
    int mismatched = 0;
    const int radii = 32;
    for (int i = 1; i <= radii; ++i) {
      const double rad = rmax * i / radii;
      for (const auto& y : probe) {
        if (((y + v).norm() <= rad) != (y.norm() <= rad)) {
          ++mismatched;
          break;
        }
      }
    }
    r.note = "sublevel probe: " + std::to_string(radii - mismatched) + "/" + std::to_string(radii) +
             " radii consistent with equality";
  }
  return r;
}

// ---------------------------------------------------------------------------
// Measure inequalities

InequalityReport prism_bound_check(const std::vector<Vector>& base, const Vector& apex, double q,
                                   const MeasureOptions& options) {
  const int n = static_cast<int>(apex.size());
  if (!(q > n)) fail(ErrorCode::invalid_argument, "the prism bound needs q > n");
  const auto p = prism_polytope(base, apex);
  Matrix b(n, static_cast<Eigen::Index>(base.size()));
  for (std::size_t i = 0; i < base.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = base[i];
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
  Vector u = svd.matrixU().col(n - 1);
  if (u.dot(apex) < 0.0) u = -u;

  double lhs = 0.0, lhs_err = 0.0, total = 0.0, total_err = 0.0;
  int tops = 0;
  for (std::size_t i = 0; i < p.facets.size(); ++i) {
    const auto e = facet_dual_curvature(p, i, q, options);
    total += e.value;
    total_err += e.abs_error;
    if (std::abs(p.facets[i].normal.dot(u)) >= 1.0 - 1e-9) {
      lhs += e.value;
      lhs_err += e.abs_error;
      ++tops;
    }
  }
  if (tops != 2) fail(ErrorCode::degenerate, "prism does not have two facets with normals +-u");
  auto r = make_report(lhs, total / q, 3.0 * (lhs_err + total_err / q), 1e-9);
  r.note = "lhs/total = " + fmt("%.17g", lhs / total);
  return r;
}

RatioReport parallelotope_bound_check(const Matrix& a, const Subspace& subspace, double q,
                                      const MeasureOptions& options) {
  const ConvexBody body = make_parallelotope(a);
  if (!(q > static_cast<double>(a.rows()))) fail(ErrorCode::invalid_argument, "the parallelotope bound needs q > n");
  return subspace_concentration_ratio(body, subspace, q, MeasureEngine::facet_exact, options);
}

InequalityReport brunn_minkowski_spot_check(const ConvexBody& k0, const ConvexBody& k1, double lambda,
                                            const MeasureOptions& options) {
  check_lambda(lambda);
  const int n = ambient_dim(k0);
  if (ambient_dim(k1) != n) fail(ErrorCode::dimension_mismatch, "bodies live in different dimensions");
  const auto v0 = polytope_vertices(k0);
  const auto v1 = polytope_vertices(k1);
  const auto sum = minkowski_combination(VPolytope{v0}, VPolytope{v1}, lambda);
  const ConvexBody ks = to_facet_listed(make_sym_vpolytope(sum.points));
  const ConvexBody p0 = to_facet_listed(k0);
  const ConvexBody p1 = to_facet_listed(k1);

  auto one = [](const Vector&) { return 1.0; };
  RngSeed s = options.seed;
  const auto vs = mc_body_integrate(one, ks, options.samples, s);
  s.stream += 1;
  const auto w0 = mc_body_integrate(one, p0, options.samples, s);
  s.stream += 1;
  const auto w1 = mc_body_integrate(one, p1, options.samples, s);
  const double inv = 1.0 / n;
  auto root = [inv](const QuadratureResult& r) { return std::pow(r.value, inv); };
  auto root_err = [inv](const QuadratureResult& r) { return inv * std::pow(r.value, inv - 1.0) * r.abs_error; };
  const double lhs = root(vs);
  const double rhs = (1.0 - lambda) * root(w0) + lambda * root(w1);
  const double sigma = std::sqrt(std::pow(root_err(vs), 2) + std::pow((1.0 - lambda) * root_err(w0), 2) +
                                 std::pow(lambda * root_err(w1), 2));
  auto r = make_report(lhs, rhs, 3.0 * sigma, 0.0);
  const double exact_l = std::pow(polytope_volume(std::get<FacetListedPolytope>(ks)), inv);
  const double exact_r = (1.0 - lambda) * std::pow(polytope_volume(std::get<FacetListedPolytope>(p0)), inv) +
                         lambda * std::pow(polytope_volume(std::get<FacetListedPolytope>(p1)), inv);
  r.note = "facet volumes: lhs " + fmt("%.17g", exact_l) + ", rhs " + fmt("%.17g", exact_r);
  if (std::abs(r.margin) <= 3.0 * sigma) r.equality_case = EqualityCase::numeric_equal;
  return r;
}

CylinderSweep cylinder_asymptotics_check(double q, int n, int k, const std::vector<double>& l_grid,
                                         double final_tolerance, const MeasureOptions& options) {
  if (l_grid.empty()) fail(ErrorCode::invalid_argument, "empty l grid");
  CylinderSweep sweep;
  sweep.q = q;
  sweep.n = n;
  sweep.k = k;
  sweep.limit = cylinder_ratio_limit(q, n, k);
  for (double l : l_grid) {
    const auto sub = cylinder_dcm_subspace(q, n, k, l, options);
    const auto tot = cylinder_dcm_total(q, n, k, l, options);
    CylinderRow row;
    row.l = l;
    row.subspace = sub.value;
    row.total = tot.value;
    row.ratio = sub.value / tot.value;
    row.ratio_error = std::hypot(sub.abs_error / tot.value, sub.value * tot.abs_error / (tot.value * tot.value));
    row.bound = sweep.limit;
    row.margin = sweep.limit - row.ratio;
    if (!(row.ratio < sweep.limit)) sweep.all_below = false;
    if (!sweep.rows.empty()) {
      const double step = row.ratio - sweep.rows.back().ratio;
      if (step < 0.0) {
        if (step >= -1e-12) {
          ++sweep.blips;
        } else {
          sweep.monotone = false;
        }
      }
    }
    sweep.rows.push_back(row);
  }
  sweep.final_gap = sweep.limit - sweep.rows.back().ratio;
  sweep.final_within_tolerance = std::abs(sweep.final_gap) <= final_tolerance;
  return sweep;
}

std::vector<double> geomspace(double a, double b, int m) {
  if (!(a > 0.0 && b > 0.0)) fail(ErrorCode::invalid_argument, "geomspace needs positive endpoints");
  if (m < 1) fail(ErrorCode::invalid_argument, "grid needs at least one point");
  if (m == 1) return {a};
  std::vector<double> out;
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < m; ++i) out.push_back(std::exp(la + (lb - la) * i / (m - 1)));
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> linspace(double a, double b, int m) {
  if (m < 1) fail(ErrorCode::invalid_argument, "grid needs at least one point");
  if (m == 1) return {a};
  std::vector<double> out;
  for (int i = 0; i < m; ++i) out.push_back(a + (b - a) * i / (m - 1));
  out.back() = b;
  return out;
}

// ---------------------------------------------------------------------------
// Fuzzing

namespace {

struct Check {
  double lhs = 0.0;
  double rhs = 0.0;
  double tolerance = 0.0;
  std::string equality = "none";
  bool consistent = true;  // false flags a failed side condition (e.g. classifier disagreement)
};

Check from_report(const InequalityReport& r) {
  return {r.lhs, r.rhs, r.tol_abs + r.tol_rel * r.scale, to_string(r.equality_case), true};
}

// bound - ratio >= -(1e-9 + 3 error)
Check from_ratio(const RatioReport& r) {
  return {r.bound, r.ratio, 1e-9 + 3.0 * r.ratio_error, "none", true};
}

using Evaluator = std::function<Check(const MeasureOptions&)>;

const double kBinEdges[] = {1e-12, 1e-9, 1e-6, 1e-3, 1.0};

class Tally {
 public:
  Tally(std::string suite, const FuzzConfig& cfg) : cfg_(cfg) {
    s_.suite = std::move(suite);
    s_.seed = cfg.seed;
    s_.histogram.assign(margin_bin_labels().size(), 0);
  }

  void trial() { ++s_.trials; }

  void add(std::int64_t trial, const std::string& desc, const Evaluator& eval) {
    Check c = eval(cfg_.measure);
    bool bad = !c.consistent || c.lhs - c.rhs < -c.tolerance || !std::isfinite(c.lhs - c.rhs);
    if (bad) {
      ++s_.rechecked;
      c = eval(cfg_.measure.refined());
      bad = !c.consistent || c.lhs - c.rhs < -c.tolerance || !std::isfinite(c.lhs - c.rhs);
    }
    ++s_.checks;
    const double margin = c.lhs - c.rhs;
    const double scale = std::max(std::abs(c.lhs), std::abs(c.rhs));
    const double normalized = scale > 0.0 ? margin / scale : 0.0;
    worst_ = std::min(worst_, normalized);
    if (margin > c.tolerance) ++s_.strict_positive;
    std::size_t bin = 0;
    if (normalized >= 0.0) {
      bin = 1;
      for (double edge : kBinEdges) {
        if (normalized < edge) break;
        ++bin;
      }
    }
    ++s_.histogram[bin];
    if (bad) ++s_.violations;
    if (bad || cfg_.keep_all_records) {
      s_.records.push_back({trial, desc, c.lhs, c.rhs, margin, c.tolerance, !bad, c.equality});
    }
  }

  // Adds a pass/fail fact that has no numeric margin.
  void add_flag(std::int64_t trial, const std::string& desc, bool ok) {
    add(trial, desc, [ok](const MeasureOptions&) { return Check{1.0, 1.0, 0.0, "none", ok}; });
  }

  void note(std::string text) { s_.notes.push_back(std::move(text)); }

  FuzzSummary finish() {
    s_.worst_margin = s_.checks > 0 ? worst_ : 0.0;
    return std::move(s_);
  }

 private:
  FuzzConfig cfg_;
  FuzzSummary s_;
  double worst_ = std::numeric_limits<double>::infinity();
};

struct Ranges {
  std::int64_t trials;
  int dmin, dmax, mmin, mmax;
  double pmin, pmax;
};

Ranges resolve(const FuzzConfig& cfg, Ranges r) {
  if (cfg.trials < 0) fail(ErrorCode::invalid_argument, "trials must be >= 1");
  if (cfg.trials > 0) r.trials = cfg.trials;
  if (cfg.dim_min > 0) r.dmin = cfg.dim_min;
  if (cfg.dim_max > 0) r.dmax = cfg.dim_max;
  if (cfg.directions_min > 0) r.mmin = cfg.directions_min;
  if (cfg.directions_max > 0) r.mmax = cfg.directions_max;
  if (cfg.param_min != 0.0 || cfg.param_max != 0.0) {
    r.pmin = cfg.param_min;
    r.pmax = cfg.param_max;
  }
  if (r.dmin > r.dmax || r.mmin > r.mmax || !(r.pmin <= r.pmax)) {
    fail(ErrorCode::invalid_argument, "fuzz ranges must be nonempty");
  }
  if (cfg.lambda_grid.empty()) fail(ErrorCode::invalid_argument, "lambda grid must be nonempty");
  for (double l : cfg.lambda_grid) check_lambda(l);
  return r;
}

// Uniform on (a, b]; degenerates to b when a == b.
double open_left(std::mt19937_64& rng, double a, double b) { return b - (b - a) * uniform01(rng); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class Fn>
auto with_retries(std::mt19937_64& rng, Fn&& draw) {
  for (int attempt = 0;; ++attempt) {
    try {
      return draw(rng);
    } catch (const Error&) {
      if (attempt >= 20) throw;
    }
  }
}

// Random symmetric body of intrinsic dimension k inside R^n (k <= n), given as extreme points.
std::vector<Vector> random_sym_section(std::mt19937_64& rng, int n, int k, int m) {
  std::vector<Vector> local;
  if (k == 1) {
    const double r = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
    local = {Vector::Constant(1, r), Vector::Constant(1, -r)};
  } else {
    do {
      local = random_symmetric_points(rng, k, std::max(m, k));
    } while (intrinsic_dim(local) < k);
  }
  const Matrix rot = random_rotation(rng, n);
  std::vector<Vector> out;
  for (const auto& y : local) out.push_back(rot.leftCols(k) * y);
  return extreme_points(out);
}

double area_of(const std::vector<Vector>& pts) { return moment_integral(VPolytope{pts}, 0.0).value; }

}  // namespace

std::vector<std::string> margin_bin_labels() {
  return {"<0", "[0,1e-12)", "[1e-12,1e-9)", "[1e-9,1e-6)", "[1e-6,1e-3)", "[1e-3,1)", ">=1"};
}

RngSeed trial_seed(RngSeed master, std::int64_t trial) {
  return {master.seed, splitmix(master.stream ^ splitmix(static_cast<std::uint64_t>(trial)))};
}

FuzzSummary fuzz_karamata(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {1000, 1, 1, 2, 8, 1.0, 4.0});
  Tally t("karamata", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int m = uniform_int(rng, r.mmin, r.mmax);
    std::vector<double> ys(static_cast<std::size_t>(m));
    for (auto& y : ys) y = uniform(rng, 0.0, 3.0);
    std::sort(ys.rbegin(), ys.rend());
    std::vector<double> xs = ys;
    // Transfers from a smaller to a larger entry, then a top-up of the largest entry.
    const int moves = uniform_int(rng, 0, 2 * m);
    for (int s = 0; s < moves; ++s) {
      const int a = uniform_int(rng, 0, m - 1), b = uniform_int(rng, 0, m - 1);
      const auto hi = static_cast<std::size_t>(xs[a] >= xs[b] ? a : b);
      const auto lo = static_cast<std::size_t>(xs[a] >= xs[b] ? b : a);
      if (hi == lo) continue;
      const double delta = uniform01(rng) * xs[lo];
      xs[hi] += delta;
      xs[lo] -= delta;
    }
    if (uniform01(rng) < 0.3) *std::max_element(xs.begin(), xs.end()) += uniform(rng, 0.0, 1.0);
    std::sort(xs.rbegin(), xs.rend());
    if (uniform01(rng) < 0.05) xs = ys;

    ConvexFunction f;
    const int kind = uniform_int(rng, 0, 2);
    if (kind == 0) {
      f.kind = ConvexFunction::Kind::power;
      f.p = uniform(rng, r.pmin, r.pmax);
    } else if (kind == 1) {
      f.kind = ConvexFunction::Kind::exp;
    } else {
      f.kind = ConvexFunction::Kind::table;
      double value = uniform(rng, -1.0, 1.0), slope = 0.0;
      for (int j = 0; j <= 6; ++j) {
        f.knots.push_back(2.0 * j);
        f.values.push_back(value);
        slope += uniform(rng, 0.0, 2.0);
        value += 2.0 * slope;
      }
    }
    const std::string desc = describe_params({{"m", m}, {"kind", kind}, {"p", f.p}});
    t.add(i, desc, [&](const MeasureOptions&) { return from_report(karamata_check(xs, ys, f)); });
  }
  return t.finish();
}

FuzzSummary fuzz_scalar_lemma(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {100000, 1, 1, 1, 1, 1.0, 5.0});
  if (r.pmin < 1.0) fail(ErrorCode::invalid_argument, "the scalar lemma needs p >= 1");
  Tally t("scalar-lemma", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const double z = uniform(rng, -10.0, 10.0);
    const double zbar = uniform(rng, -10.0, 10.0);
    const double lambda = uniform01(rng);
    const double p = uniform01(rng) < 0.2 ? 1.0 : uniform(rng, r.pmin, r.pmax);
    t.add(i, describe_params({{"z", z}, {"zbar", zbar}, {"lambda", lambda}, {"p", p}}), [&](const MeasureOptions&) {
      const auto rep = scalar_combination_check(z, zbar, lambda, p);
      Check c = from_report(rep);
      // Classified equality must be numerically visible.
      if (rep.equality_case != EqualityCase::none && std::abs(rep.margin) > kClassifiedTol * rep.scale) {
        c.consistent = false;
      }
      return c;
    });
  }
  return t.finish();
}

FuzzSummary scalar_lemma_equality_cases(const FuzzConfig& cfg) {
  const std::int64_t trials = cfg.trials > 0 ? cfg.trials : 1000;
  Tally t("scalar-lemma-equality", cfg);
  for (std::int64_t i = 0; i < trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    double z = uniform(rng, -10.0, 10.0), zbar = uniform(rng, -10.0, 10.0), lambda = 0.0, p = uniform(rng, 1.0, 5.0);
    EqualityCase expected = EqualityCase::none;
    switch (i % 3) {
      case 0:
        lambda = uniform01(rng) < 0.5 ? 0.0 : 1.0;
        expected = EqualityCase::lambda_endpoint;
        break;
      case 1:
        zbar = -z;
        lambda = uniform(rng, 0.0, 1.0);
        if (is_endpoint(lambda)) lambda = 0.5;
        expected = EqualityCase::antipodal;
        break;
      default: {
        p = 1.0;
        if (z == 0.0) z = 1.0;
        if (z * zbar >= 0.0) zbar = -zbar;
        if (zbar == 0.0) zbar = -1.0;
        if (std::abs(z + zbar) <= kEqualityTol * std::max(std::abs(z), std::abs(zbar))) zbar *= 1.5;
        const double thr = std::max(std::abs(z), std::abs(zbar)) / (std::abs(z) + std::abs(zbar));
        const double mu = uniform(rng, thr, 1.0);
        lambda = uniform01(rng) < 0.5 ? mu : 1.0 - mu;
        if (is_endpoint(lambda)) lambda = thr;
        expected = EqualityCase::threshold;
      }
    }
    t.add(i, describe_params({{"z", z}, {"zbar", zbar}, {"lambda", lambda}, {"p", p}}), [&](const MeasureOptions&) {
      const auto rep = scalar_combination_check(z, zbar, lambda, p);
      Check c = from_report(rep);
      c.consistent = rep.equality_case == expected && std::abs(rep.margin) <= kClassifiedTol * rep.scale;
      return c;
    });
  }
  return t.finish();
}

FuzzSummary scalar_lemma_rational_grid(int den) {
  if (den < 1) fail(ErrorCode::invalid_argument, "grid denominator must be positive");
  FuzzConfig cfg;
  Tally t("scalar-lemma-rational", cfg);
  std::int64_t index = 0;
  for (long long z = -4; z <= 4; ++z) {
    for (long long zb = -4; zb <= 4; ++zb) {
      for (long long j = 0; j <= den; ++j) {
        t.trial();
        const double lambda = static_cast<double>(j) / den;
        t.add(index++, describe_params({{"z", double(z)}, {"zbar", double(zb)}, {"lambda", lambda}}),
              [&](const MeasureOptions&) {
                const int sign = scalar_combination_exact_sign(z, zb, j, den);
                const auto rep = scalar_combination_check(double(z), double(zb), lambda, 1.0);
                // zero tolerance against the exact sign; the classifier must flag exactly the exact zeros
                Check c{static_cast<double>(sign), 0.0, 0.0, to_string(rep.equality_case), true};
                const bool classified = rep.equality_case != EqualityCase::none &&
                                        rep.equality_case != EqualityCase::numeric_equal;
                c.consistent = (sign == 0) == classified && (sign == 0) == (rep.margin == 0.0 || classified);
                return c;
              });
      }
    }
  }
  return t.finish();
}

FuzzSummary fuzz_moment_bm(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {10000, 3, 3, 2, 5, 1.0, 4.0});
  Tally t("moment-bm", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    const double p = uniform01(rng) < 0.2 ? 1.0 : uniform(rng, r.pmin, r.pmax);
    std::vector<Vector> k0, k1;
    std::string shape;
    if (i % 2 == 1 || n < 3) {
      // segments of equal length on one line, through 0 half of the time
      const Vector u = random_unit_vector(rng, n);
      Vector off = Vector::Zero(n);
      if (uniform01(rng) < 0.5) {
        off = random_unit_vector(rng, n) * uniform(rng, 0.0, 2.0);
        off -= u * u.dot(off);
      }
      const double len = uniform(rng, 0.2, 3.0);
      const double c0 = uniform(rng, -3.0, 3.0), c1 = uniform(rng, -3.0, 3.0);
      k0 = {off + (c0 - 0.5 * len) * u, off + (c0 + 0.5 * len) * u};
      k1 = {off + (c1 - 0.5 * len) * u, off + (c1 + 0.5 * len) * u};
      shape = "segments";
    } else {
      // equal-area symmetric polygons in parallel planes
      const Matrix rot = random_rotation(rng, n);
      auto polygon = [&](double height) {
        const int m = uniform_int(rng, r.mmin, r.mmax);
        std::vector<Vector> local;
        do {
          local = random_symmetric_points(rng, 2, m);
        } while (intrinsic_dim(local) < 2);
        std::vector<Vector> pts;
        for (const auto& y : local) pts.push_back(rot.leftCols(2) * y + height * rot.col(2));
        return extreme_points(pts);
      };
      k0 = polygon(uniform(rng, -2.0, 2.0));
      k1 = polygon(uniform(rng, -2.0, 2.0));
      const double s = std::sqrt(area_of(k0) / area_of(k1));
      const Vector c1 = rot.col(2) * rot.col(2).dot(k1.front());
      for (auto& x : k1) x = c1 + s * (x - c1);
      shape = "polygons";
    }
    for (double lambda : cfg.lambda_grid) {
      t.add(i, shape + " " + describe_params({{"n", n}, {"p", p}, {"lambda", lambda}}),
            [&](const MeasureOptions& o) { return from_report(moment_bm_check({k0}, {k1}, lambda, p, o)); });
    }
  }
  return t.finish();
}

FuzzSummary fuzz_corollary(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {2000, 3, 3, 3, 6, 1.0, 4.0});
  Tally t("corollary", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    const double p = uniform01(rng) < 0.2 ? 1.0 : uniform(rng, r.pmin, r.pmax);
    const int k = uniform_int(rng, 1, std::min(n, 2));
    std::vector<Vector> pts;
    if (k == 1) {
      const Vector u = random_unit_vector(rng, n);
      Vector off = Vector::Zero(n);
      if (uniform01(rng) < 0.5) {
        off = random_unit_vector(rng, n) * uniform(rng, 0.0, 2.0);
        off -= u * u.dot(off);
      }
      const double a = uniform(rng, -3.0, 3.0), b = a + uniform(rng, 0.1, 3.0);
      pts = {off + a * u, off + b * u};
    } else {
      const Matrix rot = random_rotation(rng, n);
      const int m = uniform_int(rng, r.mmin, r.mmax);
      std::vector<Vector> local;
      do {
        local.clear();
        for (int j = 0; j < m; ++j) local.push_back(Vector::NullaryExpr(2, [&](Eigen::Index) { return uniform(rng, -2.0, 2.0); }));
      } while (intrinsic_dim(local) < 2);
      const Vector shift = rot.leftCols(2) * Vector::NullaryExpr(2, [&](Eigen::Index) { return uniform(rng, -2.0, 2.0); });
      const double h = uniform(rng, -2.0, 2.0);
      for (const auto& y : local) pts.push_back(rot.leftCols(2) * y + shift + h * rot.col(2));
      pts = extreme_points(pts);
    }
    for (double lambda : cfg.lambda_grid) {
      t.add(i, describe_params({{"k", k}, {"p", p}, {"lambda", lambda}}),
            [&](const MeasureOptions& o) { return from_report(reflection_corollary_check({pts}, lambda, p, o)); });
    }
  }
  return t.finish();
}

FuzzSummary fuzz_anderson(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {2000, 3, 3, 2, 4, 0.0, 4.0});
  Tally t("anderson", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    const int k = uniform_int(rng, 1, n);
    const double p = uniform(rng, r.pmin, r.pmax);
    const auto q = with_retries(rng, [&](std::mt19937_64& g) {
      return random_sym_section(g, n, k, uniform_int(g, std::max(r.mmin, k), std::max(r.mmax, k)));
    });
    const Vector v = random_unit_vector(rng, n) * uniform(rng, 0.0, 3.0);
    for (double lambda : cfg.lambda_grid) {
      t.add(i, describe_params({{"k", k}, {"p", p}, {"lambda", lambda}}),
            [&](const MeasureOptions& o) { return from_report(anderson_translate_check({q}, v, lambda, p, o)); });
    }
  }
  return t.finish();
}

FuzzSummary fuzz_prism(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {1000, 3, 3, 2, 4, 0.0, 3.0});
  Tally t("prism", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    const double q = n + open_left(rng, std::max(r.pmin, 0.0), r.pmax);
    if (!(q > n)) fail(ErrorCode::invalid_argument, "prism suite needs q > n");
    const auto base = with_retries(rng, [&](std::mt19937_64& g) {
      return random_sym_section(g, n, n - 1, uniform_int(g, std::max(r.mmin, n - 1), std::max(r.mmax, n - 1)));
    });
    Matrix b(n, static_cast<Eigen::Index>(base.size()));
    for (std::size_t j = 0; j < base.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = base[j];
    Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeFullU);
    const Vector u = svd.matrixU().col(n - 1);
    Vector apex = u * uniform(rng, 0.3, 2.0);
    if (uniform01(rng) < 0.7) {
      Vector w = random_unit_vector(rng, n) * uniform(rng, 0.0, 1.5);
      apex += w - u * u.dot(w);
    }
    t.add(i, describe_params({{"n", n}, {"q", q}, {"m", double(base.size())}}),
          [&](const MeasureOptions& o) { return from_report(prism_bound_check(base, apex, q, o)); });
  }
  return t.finish();
}

FuzzSummary fuzz_parallelotope(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {10000, 3, 3, 1, 1, 0.0, 4.0});
  Tally t("parallelotope", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    // every other trial inside the band n < q < n + 1
    const double hi = i % 2 == 0 ? std::min(r.pmax, 1.0) : r.pmax;
    const double q = n + open_left(rng, std::max(r.pmin, 0.0), std::max(hi, std::max(r.pmin, 0.0)));
    const Matrix a = random_invertible_matrix(rng, n);
    const int k = uniform_int(rng, 1, n - 1);
    const auto poly = parallelotope_polytope(a);
    const Subspace l = uniform01(rng) < 0.8 ? random_facet_subspace(rng, poly, k) : random_subspace(rng, n, k);
    t.add(i, describe_params({{"n", n}, {"k", k}, {"q", q}}),
          [&](const MeasureOptions& o) { return from_ratio(parallelotope_bound_check(a, l, q, o)); });
  }
  return t.finish();
}

FuzzSummary planar_bound_fuzz(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {10000, 2, 2, 2, 8, 0.0, 4.0});
  if (r.dmin != 2 || r.dmax != 2) fail(ErrorCode::invalid_argument, "the planar suite runs in dimension 2");
  Tally t("planar", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const double q = 2.0 + open_left(rng, std::max(r.pmin, 0.0), r.pmax);
    const int m = uniform_int(rng, r.mmin, r.mmax);
    const auto poly = with_retries(rng, [&](std::mt19937_64& g) { return random_symmetric_polytope(g, 2, m); });
    const Subspace l = uniform01(rng) < 0.85 ? random_facet_subspace(rng, poly, 1) : random_subspace(rng, 2, 1);
    const ConvexBody body = poly;
    t.add(i, describe_params({{"m", m}, {"q", q}}), [&](const MeasureOptions& o) {
      return from_ratio(subspace_concentration_ratio(body, l, q, MeasureEngine::facet_exact, o));
    });
  }
  return t.finish();
}

FuzzSummary subspace_bound_fuzz(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {10000, 3, 4, 0, 8, 1.0, 4.0});
  Tally t("subspace", cfg);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, i));
    t.trial();
    const int n = uniform_int(rng, r.dmin, r.dmax);
    const int m = uniform_int(rng, std::max(r.mmin, n), std::max(r.mmax, n));
    // every tenth trial exercises the 0 < q < n branch
    const double q = i % 10 == 9 ? open_left(rng, 0.0, static_cast<double>(n)) * (1.0 - 1e-9)
                                 : n + uniform(rng, r.pmin, r.pmax);
    const auto poly = with_retries(rng, [&](std::mt19937_64& g) { return random_symmetric_polytope(g, n, m); });
    const int k = uniform_int(rng, 1, n - 1);
    const Subspace l = uniform01(rng) < 0.8 ? random_facet_subspace(rng, poly, k) : random_subspace(rng, n, k);
    const ConvexBody body = poly;
    t.add(i, describe_params({{"n", n}, {"m", m}, {"k", k}, {"q", q}}), [&](const MeasureOptions& o) {
      return from_ratio(subspace_concentration_ratio(body, l, q, MeasureEngine::facet_exact, o));
    });
  }
  return t.finish();
}

FuzzSummary verify_small_p(const FuzzConfig& cfg) {
  Tally t("small-p", cfg);
  t.trial();
  {
    const auto rep = small_p_counterexample(0.01, 0.5);
    const double ratio = rep.rhs / rep.lhs;
    t.add(0, "eps=0.01 p=0.5 rhs/lhs within 1e-5 of 1.00405", [ratio](const MeasureOptions&) {
      return Check{1e-5, std::abs(ratio - 1.00405), 0.0, "none", true};
    });
    t.note("eps=0.01 p=0.5: rhs/lhs = " + fmt("%.17g", ratio));
  }
  const auto grid = geomspace(1e-4, 0.1, 200);
  for (int j = 1; j <= 9; ++j) {
    const double p = 0.1 * j;
    const auto scan = small_p_scan(p, grid);
    t.add_flag(j, "reversed region found for p=" + fmt("%.1f", p), scan.reversed_found);
    t.note("p=" + fmt("%.1f", p) + ": max rhs/lhs " + fmt("%.17g", scan.ratio_at_witness) + " at eps " +
           fmt("%.6g", scan.eps_witness));
  }
  {
    const auto big = small_p_scan(0.5, geomspace(1.0, 1e3, 61));
    t.note(big.crossover_found ? "p=0.5: rhs < lhs from eps " + fmt("%.6g", big.eps_crossover)
                               : "p=0.5: no crossover for eps in [1,1000]; rhs/lhs stays above 1");
  }
  for (double eps : geomspace(1e-4, 1e2, 61)) {
    const auto rep = small_p_counterexample(eps, 1.0);
    t.add(10, "p=1 eps=" + fmt("%.6g", eps), [rep](const MeasureOptions&) { return from_report(rep); });
  }
  return t.finish();
}

FuzzSummary verify_alesker(const FuzzConfig& cfg) {
  Tally t("alesker", cfg);
  const std::int64_t samples = 1000000;
  struct Case {
    int n;
    double p;
  };
  int index = 0;
  for (const Case c : {Case{2, 2.0}, Case{3, 1.5}, Case{4, 2.5}}) {
    t.trial();
    auto rng = make_rng(trial_seed(cfg.seed, index));
    std::vector<Vector> xs;
    for (int j = 0; j < 20; ++j) xs.push_back(random_unit_vector(rng, c.n) * uniform(rng, 0.1, 10.0));
    const auto rep = alesker_constancy_check(c.n, c.p, xs, samples, trial_seed(cfg.seed, 1000 + index), true);
    const std::string tag = "n=" + std::to_string(c.n) + " p=" + fmt("%g", c.p);
    if (c.n == 2) {
      const double rel = std::abs(rep.inv_c_estimate - M_PI) / M_PI;
      t.add(index, tag + " 1/c within 0.5% of pi",
            [rel](const MeasureOptions&) { return Check{0.005, rel, 0.0, "none", true}; });
    }
    t.add(index, tag + " spread below 0.5%",
          [&rep](const MeasureOptions&) { return Check{0.005, rep.spread, 0.0, "none", true}; });
    t.note(tag + ": spread " + fmt("%.3e", rep.spread) + ", 1/c " + fmt("%.9g", rep.inv_c_estimate) + " (exact " +
           fmt("%.9g", rep.inv_c_exact) + ")");
    ++index;
  }
  return t.finish();
}

FuzzSummary verify_cylinder(const FuzzConfig& cfg) {
  Tally t("cylinder", cfg);
  struct Case {
    double q;
    int n, k;
  };
  int index = 0;
  for (const Case c : {Case{4.0, 3, 1}, Case{4.0, 3, 2}, Case{5.5, 4, 2}}) {
    t.trial();
    const auto sweep = cylinder_asymptotics_check(c.q, c.n, c.k, geomspace(1.0, 1e3, 13), 0.01, cfg.measure);
    const std::string tag = describe_params({{"q", c.q}, {"n", c.n}, {"k", c.k}});
    for (const auto& row : sweep.rows) {
      t.add(index, tag + " l=" + fmt("%.6g", row.l), [row](const MeasureOptions&) {
        return Check{row.bound, row.ratio, 0.0, "none", row.ratio < row.bound};
      });
    }
    t.add_flag(index, tag + " monotone", sweep.monotone);
    t.add(index, tag + " final gap", [&sweep](const MeasureOptions&) {
      return Check{0.01, std::abs(sweep.final_gap), 0.0, "none", true};
    });
    t.note(tag + ": ratio(1000) = " + fmt("%.17g", sweep.rows.back().ratio) + ", limit " + fmt("%.17g", sweep.limit) +
           (sweep.blips > 0 ? ", blips " + std::to_string(sweep.blips) : ""));
    ++index;
  }
  return t.finish();
}

FuzzSummary verify_brunn_minkowski(const FuzzConfig& cfg) {
  const auto r = resolve(cfg, {10, 3, 3, 3, 6, 0.0, 0.0});
  Tally t("bm", cfg);
  const int n = r.dmin;
  const ConvexBody cube_body = cube(n);
  const ConvexBody big_cube = cube(n, 2.0);
  const ConvexBody cross = cross_polytope(n);
  auto run = [&](std::int64_t trial, const std::string& desc, const ConvexBody& a, const ConvexBody& b, double lambda) {
    t.add(trial, desc, [&](const MeasureOptions& opt) {
      MeasureOptions local = opt;
      local.seed = trial_seed(cfg.seed, trial);
      return from_report(brunn_minkowski_spot_check(a, b, lambda, local));
    });
  };
  t.trial();
  run(0, "cube, cube", cube_body, cube_body, 0.5);
  run(1, "cube, 2 cube", cube_body, big_cube, 0.5);
  run(2, "cube, cross-polytope", cube_body, cross, 0.5);
  for (std::int64_t i = 0; i < r.trials; ++i) {
    auto rng = make_rng(trial_seed(cfg.seed, 100 + i));
    t.trial();
    const int m = uniform_int(rng, r.mmin, r.mmax);
    const ConvexBody a = with_retries(rng, [&](std::mt19937_64& g) { return random_symmetric_polytope(g, n, m); });
    const ConvexBody b = with_retries(rng, [&](std::mt19937_64& g) { return random_symmetric_polytope(g, n, m); });
    const double lambda = cfg.lambda_grid[static_cast<std::size_t>(i) % cfg.lambda_grid.size()];
    run(100 + i, describe_params({{"m", m}, {"lambda", lambda}}), a, b, lambda);
  }
  return t.finish();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"karamata", "scalar-lemma", "alesker", "moment-bm", "corollary",
                                              "small-p",  "anderson",     "prism",   "parallelotope", "planar",
                                              "subspace", "cylinder",     "bm",      "all"};
  return names;
}

std::vector<FuzzSummary> run_suite(const std::string& name, const FuzzConfig& cfg) {
  if (name == "all") {
    std::vector<FuzzSummary> out;
    for (const auto& s : suite_names()) {
      if (s == "all") continue;
      auto part = run_suite(s, cfg);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (name == "karamata") return {fuzz_karamata(cfg)};
  if (name == "scalar-lemma") {
    FuzzConfig eq = cfg;
    eq.trials = 1000;
    return {fuzz_scalar_lemma(cfg), scalar_lemma_equality_cases(eq), scalar_lemma_rational_grid(128)};
  }
  if (name == "alesker") return {verify_alesker(cfg)};
  if (name == "moment-bm") return {fuzz_moment_bm(cfg)};
  if (name == "corollary") return {fuzz_corollary(cfg)};
  if (name == "small-p") return {verify_small_p(cfg)};
  if (name == "anderson") return {fuzz_anderson(cfg)};
  if (name == "prism") return {fuzz_prism(cfg)};
  if (name == "parallelotope") return {fuzz_parallelotope(cfg)};
  if (name == "planar") return {planar_bound_fuzz(cfg)};
  if (name == "subspace") return {subspace_bound_fuzz(cfg)};
  if (name == "cylinder") return {verify_cylinder(cfg)};
  if (name == "bm") return {verify_brunn_minkowski(cfg)};
  fail(ErrorCode::invalid_argument, "unknown suite '" + name + "'");
}

}  // namespace dualcurve
