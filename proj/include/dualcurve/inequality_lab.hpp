#pragma once

// Checkers and fuzzers for the inequalities around dual curvature measures
// and moments of the Euclidean norm.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dualcurve/geometry.hpp"
#include "dualcurve/measures.hpp"
#include "dualcurve/quadrature.hpp"

namespace dualcurve {

enum class EqualityCase { none, lambda_endpoint, antipodal, p1_separated, threshold, numeric_equal };

const char* to_string(EqualityCase c);

// margin = lhs - rhs; the claim is lhs >= rhs unless noted otherwise.
struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds = true;
  EqualityCase equality_case = EqualityCase::none;
  double tol_abs = 0.0;
  double tol_rel = 0.0;
  double scale = 0.0;
  std::string note;
};

InequalityReport make_report(double lhs, double rhs, double tol_abs, double tol_rel);

struct ConvexFunction {
  enum class Kind { power, exp, table } kind = Kind::power;
  double p = 2.0;                 // power: t^p on t >= 0
  std::vector<double> knots;      // table: piecewise linear through (knots, values)
  std::vector<double> values;

  double operator()(double t) const;
};

InequalityReport karamata_check(const std::vector<double>& xs, const std::vector<double>& ys, const ConvexFunction& f);

InequalityReport scalar_combination_check(double z, double zbar, double lambda, double p);

// Sign (-1, 0, 1) of lhs - rhs at p = 1 in exact rational arithmetic,
// for integers z, zbar and lambda = lambda_num / den.
int scalar_combination_exact_sign(long long z, long long zbar, long long lambda_num, long long den);

struct AleskerReport {
  std::vector<double> ratios;    // r(x) = |x|^p / int |<x,theta>|^p
  double spread = 0.0;           // (max r - min r) / mean r
  double inv_c_estimate = 0.0;   // mean of 1/r
  double inv_c_exact = 0.0;
  std::int64_t samples = 0;
};

// Sphere integral of |theta_1|^p.
double alesker_constant(int n, double p);

// When `frames` is set, directions come in random orthonormal frames
// (each frame contributes n uniformly distributed directions).
AleskerReport alesker_constancy_check(int n, double p, const std::vector<Vector>& xs, std::int64_t samples,
                                      RngSeed seed, bool frames = false);

InequalityReport moment_bm_check(const VPolytope& k0, const VPolytope& k1, double lambda, double p,
                                 const MeasureOptions& options = {});

InequalityReport reflection_corollary_check(const VPolytope& k, double lambda, double p,
                                            const MeasureOptions& options = {});

// M_p(K_lambda) / M_p(K_0) with K_0 = C + rho u and K_1 = -K_0.
double tightness_factor_probe(const VPolytope& c, const Vector& u, double rho, double lambda, double p,
                              const MeasureOptions& options = {});

// K = [eps, eps+1], lambda = (eps+1)/(2 eps+1); lhs = M_p(K_lambda), rhs = (2 lambda-1)^p M_p(K).
InequalityReport small_p_counterexample(double eps, double p);

struct SmallPScan {
  double p = 0.0;
  bool reversed_found = false;   // some eps in the grid with rhs > lhs
  double eps_witness = 0.0;
  double ratio_at_witness = 0.0;
  bool crossover_found = false;  // some eps in the grid with rhs < lhs
  double eps_crossover = 0.0;
};

SmallPScan small_p_scan(double p, const std::vector<double>& eps_grid);

// lhs = int_{Q+v} |x|^p, rhs = int_{Q + lambda v} |x|^p; Q = -Q.
InequalityReport anderson_translate_check(const VPolytope& q_body, const Vector& v, double lambda, double p,
                                          const MeasureOptions& options = {});

// lhs = C_q(P, {u, -u}), rhs = C_q(P, S)/q for P = conv(Q - v, Q + v).
InequalityReport prism_bound_check(const std::vector<Vector>& base, const Vector& apex, double q,
                                   const MeasureOptions& options = {});

RatioReport parallelotope_bound_check(const Matrix& a, const Subspace& subspace, double q,
                                      const MeasureOptions& options = {});

InequalityReport brunn_minkowski_spot_check(const ConvexBody& k0, const ConvexBody& k1, double lambda,
                                            const MeasureOptions& options = {});

struct CylinderRow {
  double l = 0.0;
  double subspace = 0.0;
  double total = 0.0;
  double ratio = 0.0;
  double ratio_error = 0.0;
  double bound = 0.0;
  double margin = 0.0;
};

struct CylinderSweep {
  double q = 0.0;
  int n = 0;
  int k = 0;
  double limit = 0.0;
  std::vector<CylinderRow> rows;
  bool all_below = true;
  bool monotone = true;
  int blips = 0;                // decreases no larger than 1e-12
  double final_gap = 0.0;       // limit - ratio at the largest l
  bool final_within_tolerance = true;
  bool passed() const { return all_below && monotone && final_within_tolerance; }
};

CylinderSweep cylinder_asymptotics_check(double q, int n, int k, const std::vector<double>& l_grid,
                                         double final_tolerance = 0.01, const MeasureOptions& options = {});

std::vector<double> geomspace(double a, double b, int m);
std::vector<double> linspace(double a, double b, int m);

// ---------------------------------------------------------------------------
// Fuzzing

struct FuzzConfig {
  // Zero in any of the integer ranges selects the suite default.
  std::int64_t trials = 0;
  RngSeed seed{};
  int dim_min = 0;
  int dim_max = 0;
  int directions_min = 0;
  int directions_max = 0;
  // p range, or q - n for the measure suites; both zero select the suite default.
  double param_min = 0.0;
  double param_max = 0.0;
  std::vector<double> lambda_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  MeasureOptions measure{};
  bool keep_all_records = false;
};

struct TrialRecord {
  std::int64_t trial = 0;
  std::string description;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  bool holds = true;
  std::string equality;
};

struct FuzzSummary {
  std::string suite;
  std::int64_t trials = 0;
  std::int64_t checks = 0;
  std::int64_t violations = 0;
  std::int64_t rechecked = 0;          // candidates re-evaluated at higher precision
  std::int64_t strict_positive = 0;    // checks with margin > tolerance
  double worst_margin = 0.0;           // smallest normalized margin seen
  std::vector<std::int64_t> histogram; // counts per margin bin, see margin_bin_labels()
  std::vector<TrialRecord> records;    // violations, or every check when keep_all_records
  std::vector<std::string> notes;
  RngSeed seed{};

  bool ok() const { return violations == 0; }
};

std::vector<std::string> margin_bin_labels();

// RNG stream of one fuzz trial.
RngSeed trial_seed(RngSeed master, std::int64_t trial);

FuzzSummary fuzz_karamata(const FuzzConfig& cfg);
FuzzSummary fuzz_scalar_lemma(const FuzzConfig& cfg);
FuzzSummary scalar_lemma_equality_cases(const FuzzConfig& cfg);
// z, zbar in {-4..4}, lambda = j / den for j = 0..den.
FuzzSummary scalar_lemma_rational_grid(int den);
FuzzSummary fuzz_moment_bm(const FuzzConfig& cfg);
FuzzSummary fuzz_corollary(const FuzzConfig& cfg);
FuzzSummary fuzz_anderson(const FuzzConfig& cfg);
FuzzSummary fuzz_prism(const FuzzConfig& cfg);
FuzzSummary fuzz_parallelotope(const FuzzConfig& cfg);
FuzzSummary planar_bound_fuzz(const FuzzConfig& cfg);
FuzzSummary subspace_bound_fuzz(const FuzzConfig& cfg);
FuzzSummary verify_small_p(const FuzzConfig& cfg);
FuzzSummary verify_alesker(const FuzzConfig& cfg);
FuzzSummary verify_cylinder(const FuzzConfig& cfg);
FuzzSummary verify_brunn_minkowski(const FuzzConfig& cfg);

const std::vector<std::string>& suite_names();
// Runs one named suite, or every suite for "all".
std::vector<FuzzSummary> run_suite(const std::string& name, const FuzzConfig& cfg);

}  // namespace dualcurve
