#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "dualcurve/error.hpp"
#include "dualcurve/inequality_lab.hpp"
#include "dualcurve/random_bodies.hpp"
#include "support.hpp"

using namespace dualcurve;
using testing::pi;
using testing::V;

namespace {

ConvexFunction power(double p) {
  ConvexFunction f;
  f.kind = ConvexFunction::Kind::power;
  f.p = p;
  return f;
}

VPolytope segment(double a, double b) { return VPolytope{{V({a}), V({b})}}; }

// Integral of |t|^p over [a, b].
double segment_moment(double a, double b, double p) {
  auto prim = [p](double t) { return std::copysign(std::pow(std::abs(t), p + 1.0) / (p + 1.0), t); };
  return prim(b) - prim(a);
}

VPolytope square_at(double h) {
  return VPolytope{{V({-1, -1, h}), V({1, -1, h}), V({1, 1, h}), V({-1, 1, h})}};
}

FuzzConfig small_config(std::int64_t trials, std::uint64_t seed) {
  FuzzConfig cfg;
  cfg.trials = trials;
  cfg.seed = {seed, 0};
  return cfg;
}

}  // namespace

TEST_CASE("report construction") {
  const auto r = make_report(2.0, 1.0, 0.0, 0.0);
  CHECK(r.margin == 1.0);
  CHECK(r.holds);
  CHECK(r.scale == 2.0);
  const auto s = make_report(1.0, 1.0 + 1e-10, 0.0, 1e-9);
  CHECK(s.holds);
  const auto t = make_report(1.0, 1.1, 1e-3, 1e-9);
  CHECK_FALSE(t.holds);
  CHECK(std::string(to_string(EqualityCase::lambda_endpoint)) == "lambda-endpoint");
  CHECK(std::string(to_string(EqualityCase::p1_separated)) == "p1-separated");
  CHECK(std::string(to_string(EqualityCase::numeric_equal)) == "numeric-equal");
}

TEST_CASE("karamata examples") {
  const auto a = karamata_check({2, 0}, {1, 1}, power(2));
  CHECK(a.lhs == doctest::Approx(4.0));
  CHECK(a.rhs == doctest::Approx(2.0));
  CHECK(a.holds);
  const auto b = karamata_check({3, 1, 0}, {2, 1, 1}, power(3));
  CHECK(b.lhs == doctest::Approx(28.0));
  CHECK(b.rhs == doctest::Approx(10.0));
  const auto c = karamata_check({1.5, 0.5}, {1.5, 0.5}, power(2.5));
  CHECK(c.equality_case == EqualityCase::numeric_equal);
  ConvexFunction e;
  e.kind = ConvexFunction::Kind::exp;
  CHECK(karamata_check({2, 0}, {1, 1}, e).lhs == doctest::Approx(std::exp(2.0) + 1.0));
  ConvexFunction tab;
  tab.kind = ConvexFunction::Kind::table;
  tab.knots = {0, 1, 3};
  tab.values = {0, 1, 5};
  const auto d = karamata_check({3, 0}, {2, 1}, tab);
  CHECK(d.lhs == doctest::Approx(5.0));
  CHECK(d.rhs == doctest::Approx(4.0));
}

TEST_CASE("karamata preconditions") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::parse_error;
  };
  CHECK(code([] { karamata_check({1, 1}, {2, 0}, power(2)); }) == ErrorCode::precondition_violated);
  CHECK(code([] { karamata_check({0, 2}, {1, 1}, power(2)); }) == ErrorCode::precondition_violated);
  CHECK(code([] { karamata_check({2, 0}, {1}, power(2)); }) == ErrorCode::invalid_argument);
  CHECK(code([] { karamata_check({2, 0}, {1, 1}, power(0.5)); }) == ErrorCode::invalid_argument);
  ConvexFunction bad;
  bad.kind = ConvexFunction::Kind::table;
  bad.knots = {0, 1, 2};
  bad.values = {0, 2, 3};
  CHECK(code([&] { karamata_check({2, 0}, {1, 1}, bad); }) == ErrorCode::invalid_argument);
}

TEST_CASE("scalar lemma examples") {
  const auto a = scalar_combination_check(1, -1, 0.3, 2);
  CHECK(a.lhs == doctest::Approx(0.32));
  CHECK(a.rhs == doctest::Approx(0.32));
  CHECK(a.equality_case == EqualityCase::antipodal);
  const auto b = scalar_combination_check(2, -1, 0.75, 1);
  CHECK(b.lhs == doctest::Approx(1.5));
  CHECK(b.rhs == doctest::Approx(1.5));
  CHECK(b.equality_case == EqualityCase::threshold);
  const auto c = scalar_combination_check(2, 1, 0.5, 2);
  CHECK(c.lhs == doctest::Approx(4.5));
  CHECK(c.rhs == 0.0);
  CHECK(c.equality_case == EqualityCase::none);
  CHECK(scalar_combination_check(3, 7, 1.0, 3).equality_case == EqualityCase::lambda_endpoint);
  // below the threshold the p = 1 inequality is strict
  const auto d = scalar_combination_check(2, -1, 0.6, 1);
  CHECK(d.margin > 1e-6);
  CHECK(d.equality_case == EqualityCase::none);
  CHECK_THROWS_AS(scalar_combination_check(1, 2, 0.5, 0.5), Error);
}

TEST_CASE("scalar lemma exact rational sign") {
  CHECK(scalar_combination_exact_sign(2, -1, 3, 4) == 0);
  CHECK(scalar_combination_exact_sign(2, -1, 3, 5) == 1);
  CHECK(scalar_combination_exact_sign(2, 1, 1, 2) == 1);
  CHECK(scalar_combination_exact_sign(0, 0, 1, 3) == 0);
  for (int z = -3; z <= 3; ++z) {
    for (int w = -3; w <= 3; ++w) {
      for (int j = 0; j <= 8; ++j) {
        const int sign = scalar_combination_exact_sign(z, w, j, 8);
        CHECK(sign >= 0);
        const auto r = scalar_combination_check(z, w, j / 8.0, 1.0);
        if (sign == 0) CHECK(r.equality_case != EqualityCase::none);
        if (sign > 0) CHECK(r.margin > 0.0);
      }
    }
  }
}

TEST_CASE("scalar lemma property: margin never negative") {
  auto rng = make_rng({31, 0});
  for (int i = 0; i < 2000; ++i) {
    const double z = uniform(rng, -5, 5), w = uniform(rng, -5, 5);
    const double lambda = uniform01(rng), p = uniform(rng, 1, 5);
    const auto r = scalar_combination_check(z, w, lambda, p);
    CHECK(r.holds);
    CHECK(r.margin >= -1e-12 * std::max(1.0, r.scale));
  }
}

TEST_CASE("alesker constant") {
  CHECK(alesker_constant(2, 2.0) == doctest::Approx(pi).epsilon(1e-14));
  CHECK(alesker_constant(3, 2.0) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-14));
  CHECK(alesker_constant(3, 1.0) == doctest::Approx(2.0 * pi).epsilon(1e-14));
  const Vector x = V({0.3, -1.2, 0.5});
  const auto ray = alesker_constancy_check(3, 1.5, {x, 2.0 * x, 7.5 * x}, 20000, {1, 0});
  CHECK(ray.spread < 1e-12);
  auto rng = make_rng({32, 0});
  std::vector<Vector> xs;
  for (int i = 0; i < 6; ++i) xs.push_back(random_unit_vector(rng, 3) * uniform(rng, 0.5, 4.0));
  const auto rep = alesker_constancy_check(3, 1.5, xs, 200000, {2, 0}, true);
  CHECK(rep.spread < 0.005);
  CHECK(rep.inv_c_estimate == doctest::Approx(rep.inv_c_exact).epsilon(0.005));
  const auto plane = alesker_constancy_check(2, 2.0, {V({1, 0}), V({0, 3})}, 1000, {3, 0}, true);
  CHECK(plane.inv_c_estimate == doctest::Approx(pi).epsilon(1e-12));
}

TEST_CASE("moment Brunn-Minkowski examples") {
  const auto a = moment_bm_check(segment(1, 2), segment(-2, -1), 2.0 / 3.0, 1.0);
  CHECK(a.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(a.margin) < 1e-12);
  CHECK(a.equality_case == EqualityCase::p1_separated);
  CHECK(moment_bm_check(segment(1, 2), segment(-2, -1), 1.0, 1.0).equality_case == EqualityCase::lambda_endpoint);
  const auto sq = VPolytope{{V({-1, -1}), V({1, -1}), V({1, 1}), V({-1, 1})}};
  const auto c = moment_bm_check(sq, sq, 0.5, 2.0);
  CHECK(c.rhs == 0.0);
  CHECK(c.lhs == doctest::Approx(2.0 * 8.0 / 3.0).epsilon(1e-12));
  // parallel squares at different heights
  const auto d = moment_bm_check(square_at(0.5), square_at(-2.0), 0.3, 2.5);
  CHECK(d.holds);
  CHECK(d.margin > 0.0);
  CHECK_THROWS_AS(moment_bm_check(segment(0, 1), segment(0, 2), 0.5, 1.0), Error);
}

TEST_CASE("moment Brunn-Minkowski on segments against closed forms") {
  auto rng = make_rng({33, 0});
  for (int i = 0; i < 200; ++i) {
    const double len = uniform(rng, 0.1, 3.0);
    const double a0 = uniform(rng, -4, 4), a1 = uniform(rng, -4, 4);
    const double lambda = uniform01(rng), p = uniform(rng, 1, 4);
    const auto r = moment_bm_check(segment(a0, a0 + len), segment(a1, a1 + len), lambda, p);
    const double al = (1 - lambda) * a0 + lambda * a1, am = lambda * a0 + (1 - lambda) * a1;
    const double lhs = segment_moment(al, al + len, p) + segment_moment(am, am + len, p);
    const double rhs =
        std::pow(std::abs(2 * lambda - 1), p) * (segment_moment(a0, a0 + len, p) + segment_moment(a1, a1 + len, p));
    CHECK(r.lhs == doctest::Approx(lhs).epsilon(1e-11));
    CHECK(r.rhs == doctest::Approx(rhs).epsilon(1e-11));
    CHECK(r.holds);
  }
}

TEST_CASE("reflection corollary examples") {
  const auto a = reflection_corollary_check(VPolytope{{V({-1, -1}), V({1, -1}), V({1, 1}), V({-1, 1})}}, 0.5, 1.5);
  CHECK(a.rhs == 0.0);
  CHECK(a.lhs > 0.0);
  const auto b = reflection_corollary_check(segment(1, 2), 0.0, 1.0);
  CHECK(b.lhs == doctest::Approx(1.5));
  CHECK(b.rhs == doctest::Approx(1.5));
  CHECK(b.equality_case == EqualityCase::lambda_endpoint);
  const auto c = reflection_corollary_check(segment(1, 2), 0.75, 1.0);
  CHECK(c.lhs == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(c.equality_case == EqualityCase::p1_separated);
  // the combination straddles the origin: strict
  const auto d = reflection_corollary_check(segment(0.1, 2), 0.4, 1.0);
  CHECK(d.margin > 1e-6);
  CHECK(d.equality_case == EqualityCase::none);
}

TEST_CASE("tightness probe") {
  const VPolytope c = segment(-1, 1);
  for (double rho : {0.5, 3.0, 40.0}) CHECK(tightness_factor_probe(c, V({1}), rho, 1.0, 1.0) == doctest::Approx(1.0));
  double prev = 1.0;
  for (double rho : {10.0, 100.0, 1000.0}) {
    const double r = tightness_factor_probe(c, V({1}), rho, 0.5, 1.5);
    CHECK(r < prev);
    prev = r;
  }
  CHECK(prev < 1e-3);
  for (double rho : {10.0, 100.0, 1000.0}) {
    CHECK(std::abs(tightness_factor_probe(c, V({1}), rho, 0.75, 1.0) - 0.5) <= 2e-3);
  }
  // p = 2: M_2([a-1, a+1]) = 2 a^2 + 2/3, with a = (1 - 2 lambda) rho
  const double rho = 5.0, lambda = 0.8;
  const double a = (1 - 2 * lambda) * rho;
  CHECK(tightness_factor_probe(c, V({1}), rho, lambda, 2.0) ==
        doctest::Approx((2 * a * a + 2.0 / 3.0) / (2 * rho * rho + 2.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("small p counterexample") {
  const auto r = small_p_counterexample(0.01, 0.5);
  const double expected = (std::pow(1.01, 1.5) - std::pow(0.01, 1.5)) / std::pow(1.02, 0.5);
  CHECK(r.rhs / r.lhs == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected == doctest::Approx(1.00405).epsilon(1e-5));
  CHECK_FALSE(r.holds);
  for (double eps : {1e-3, 0.1, 1.0, 10.0, 1e3}) CHECK(small_p_counterexample(eps, 1.0).holds);
  const auto scan = small_p_scan(0.5, geomspace(1e-4, 0.1, 50));
  CHECK(scan.reversed_found);
  CHECK_THROWS_AS(small_p_counterexample(0.1, 1.5), Error);
}

TEST_CASE("anderson translate examples") {
  const auto a = anderson_translate_check(segment(-1, 1), V({2}), 0.0, 1.0);
  CHECK(a.lhs == doctest::Approx(4.0));
  CHECK(a.rhs == doctest::Approx(1.0));
  CHECK(anderson_translate_check(segment(-1, 1), V({2}), 1.0, 1.0).equality_case == EqualityCase::lambda_endpoint);
  for (double lambda : {0.0, 0.4, 0.9}) {
    const auto z = anderson_translate_check(segment(-1, 1), V({0}), lambda, 2.0);
    CHECK(std::abs(z.margin) < 1e-12);
  }
  auto rng = make_rng({34, 0});
  for (int i = 0; i < 50; ++i) {
    const double v = uniform(rng, -3, 3), lambda = uniform01(rng), p = uniform(rng, 0, 4);
    const auto r = anderson_translate_check(segment(-1, 1), V({v}), lambda, p);
    CHECK(r.lhs == doctest::Approx(segment_moment(v - 1, v + 1, p)).epsilon(1e-11));
    CHECK(r.rhs == doctest::Approx(segment_moment(lambda * v - 1, lambda * v + 1, p)).epsilon(1e-11));
    CHECK(r.holds);
  }
  CHECK_THROWS_AS(anderson_translate_check(segment(0, 1), V({1}), 0.5, 1.0), Error);
}

TEST_CASE("prism bound examples") {
  const std::vector<Vector> sq{V({-1, -1, 0}), V({1, -1, 0}), V({1, 1, 0}), V({-1, 1, 0})};
  const auto cube = prism_bound_check(sq, V({0, 0, 1}), 4.0);
  CHECK(cube.lhs / (cube.rhs * 4.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(cube.margin > 0.0);
  const auto sheared = prism_bound_check(sq, V({0.5, 0, 1}), 4.0);
  CHECK(sheared.margin > 0.0);
  // closer to q = n the margin tends to the cone-volume statement
  double prev = 0.0;
  for (double q : {3.5, 3.1, 3.01}) {
    const auto r = prism_bound_check(sq, V({0.5, 0, 1}), q);
    CHECK(r.margin > 0.0);
    prev = r.margin;
  }
  const auto at_n = cone_volume_measure(prism_polytope(sq, V({0.5, 0, 1})), FullSphere{});
  CHECK(prev > 0.0);
  CHECK(at_n.value > 0.0);
  CHECK_THROWS_AS(prism_bound_check(sq, V({0, 0, 1}), 3.0), Error);
}

TEST_CASE("parallelotope bound examples") {
  for (int n : {2, 3, 4}) {
    const auto r = parallelotope_bound_check(Matrix::Identity(n, n), Subspace::span_of(std::vector<Vector>{Vector::Unit(n, 0)}),
                                             n + 0.5);
    CHECK(r.ratio == doctest::Approx(1.0 / n).epsilon(1e-9));
    CHECK(r.bound == doctest::Approx(1.5 / (n + 0.5)));
    CHECK(r.satisfied);
  }
  const auto two = parallelotope_bound_check(Matrix::Identity(3, 3),
                                             Subspace::span_of(std::vector<Vector>{V({1, 0, 0}), V({0, 1, 0})}), 5.0);
  CHECK(two.ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(two.bound == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("planar and subspace examples") {
  const ConvexBody square = make_box(V({1, 1}));
  for (double q : {2.5, 3.0, 6.0}) {
    const auto r = subspace_concentration_ratio(square, Subspace::span_of(std::vector<Vector>{V({1, 0})}), q);
    CHECK(r.ratio == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(r.bound == doctest::Approx((q - 1) / q));
  }
  const auto thin = subspace_concentration_ratio(make_box(V({1, 0.01})), Subspace::span_of(std::vector<Vector>{V({0, 1})}), 3.0);
  CHECK(thin.ratio < 2.0 / 3.0);
  CHECK(thin.satisfied);
  const auto none = subspace_concentration_ratio(square, Subspace::span_of(std::vector<Vector>{V({1, 1})}), 3.0);
  CHECK(none.ratio == 0.0);
  const auto cross = subspace_concentration_ratio(cross_polytope(3), Subspace::span_of(std::vector<Vector>{V({1, 0, 0})}), 4.0);
  CHECK(cross.ratio == 0.0);
  const auto cube2 = subspace_concentration_ratio(cube(3), Subspace::span_of(std::vector<Vector>{V({1, 0, 0}), V({0, 1, 0})}), 4.0);
  CHECK(cube2.ratio == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(cube2.bound == doctest::Approx(0.75));
}

TEST_CASE("cylinder asymptotics") {
  const auto a = cylinder_asymptotics_check(4.0, 3, 1, geomspace(1.0, 1e3, 13));
  CHECK(a.rows.back().ratio >= 0.49);
  CHECK(a.rows.back().ratio < 0.5);
  CHECK(a.passed());
  CHECK(a.rows.front().ratio < a.limit);
  const auto b = cylinder_asymptotics_check(4.0, 3, 2, geomspace(1.0, 1e3, 13));
  CHECK(b.rows.back().ratio >= 0.74);
  CHECK(b.rows.back().ratio < 0.75);
  CHECK(b.passed());
  const auto c = cylinder_asymptotics_check(5.5, 4, 2, geomspace(1.0, 1e3, 13));
  CHECK(c.limit == doctest::Approx(7.0 / 11.0));
  CHECK(c.passed());
  // an oracle for the first row: (n, k, q) = (3, 1, 4), l = 1
  const double sub = 4.0 * pi / 3.0 * (2.0 * std::sqrt(2.0) - 1.0) / 3.0;
  CHECK(a.rows.front().subspace == doctest::Approx(sub).epsilon(1e-10));
}

TEST_CASE("grids") {
  const auto g = geomspace(1.0, 1e3, 4);
  REQUIRE(g.size() == 4);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(g.back() == 1e3);
  const auto l = linspace(0.0, 1.0, 5);
  CHECK(l[2] == 0.5);
  CHECK_THROWS_AS(geomspace(0.0, 1.0, 3), Error);
}

TEST_CASE("brunn-minkowski spot checks") {
  MeasureOptions opt;
  opt.samples = 100000;
  const auto same = brunn_minkowski_spot_check(cube(3), cube(3), 0.5, opt);
  CHECK(same.holds);
  CHECK(same.equality_case == EqualityCase::numeric_equal);
  const auto homothets = brunn_minkowski_spot_check(cube(3), cube(3, 2.0), 0.5, opt);
  CHECK(homothets.holds);
  CHECK(homothets.equality_case == EqualityCase::numeric_equal);
  const auto strict = brunn_minkowski_spot_check(cube(3), cross_polytope(3), 0.5, opt);
  CHECK(strict.holds);
  CHECK(strict.margin > 3.0 * strict.tol_abs / 3.0);
}

TEST_CASE("fuzz plumbing") {
  CHECK(margin_bin_labels().size() == 7);
  const auto s1 = trial_seed({5, 0}, 3), s2 = trial_seed({5, 0}, 4);
  CHECK(s1.seed == 5);
  CHECK(s1.stream != s2.stream);
  CHECK(suite_names().back() == "all");
  CHECK_THROWS_AS(run_suite("nonsense", {}), Error);
}

TEST_CASE("small fuzz runs are clean and deterministic") {
  for (const std::string name : {"karamata", "moment-bm", "corollary", "anderson", "prism", "parallelotope", "planar",
                                 "subspace"}) {
    CAPTURE(name);
    const auto a = run_suite(name, small_config(30, 9));
    const auto b = run_suite(name, small_config(30, 9));
    REQUIRE(a.size() == 1);
    CHECK(a[0].ok());
    CHECK(a[0].checks > 0);
    CHECK(a[0].checks == b[0].checks);
    CHECK(a[0].worst_margin == b[0].worst_margin);
    std::int64_t binned = 0;
    for (auto c : a[0].histogram) binned += c;
    CHECK(binned == a[0].checks);
  }
  const auto scalar = run_suite("scalar-lemma", small_config(500, 9));
  REQUIRE(scalar.size() == 3);
  for (const auto& s : scalar) CHECK(s.ok());
  CHECK(scalar[2].checks == 9 * 9 * 129);
  CHECK(run_suite("small-p", small_config(0, 1))[0].ok());
  CHECK(run_suite("cylinder", small_config(0, 1))[0].ok());
}

TEST_CASE("fuzz configuration validation") {
  FuzzConfig cfg = small_config(5, 1);
  cfg.param_min = 0.5;
  cfg.param_max = 0.9;
  CHECK_THROWS_AS(fuzz_scalar_lemma(cfg), Error);
  FuzzConfig planar = small_config(5, 1);
  planar.dim_min = planar.dim_max = 3;
  CHECK_THROWS_AS(planar_bound_fuzz(planar), Error);
  FuzzConfig empty = small_config(5, 1);
  empty.lambda_grid.clear();
  CHECK_THROWS_AS(fuzz_moment_bm(empty), Error);
}
