#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "dualcurve/geometry.hpp"
#include "dualcurve/hull.hpp"
#include "dualcurve/types.hpp"

namespace dualcurve {

enum class Engine { facet_exact, body_mc, sphere_mc, closed_form, gauss_legendre, simplex_rule };

const char* to_string(Engine engine);

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  std::int64_t nodes_or_samples = 0;
  Engine engine = Engine::closed_form;
};

struct RngSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Deterministic expansion of (seed, stream).
std::mt19937_64 make_rng(RngSeed seed);
// Uniform double in [0,1) from the top 53 bits.
double uniform01(std::mt19937_64& rng);
// Uniform point on S^{n-1}.
Vector random_unit_vector(std::mt19937_64& rng, int n);

using ScalarField = std::function<double(const Vector&)>;
using Function1D = std::function<double(double)>;
using Function2D = std::function<double(double, double)>;

// Volume of the unit ball B_n.
double omega(int n);
// H^{n-1}(S^{n-1}) = n omega_n.
double sphere_area(int n);

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// m-point Gauss-Legendre rule on [0,1].
const Rule1D& gauss_legendre_rule(int m);
// m-point Gauss rule on [0,1] for the weight (1-x)^alpha.
Rule1D gauss_jacobi_rule(int m, double alpha);

QuadratureResult gauss_legendre_1d(const Function1D& f, double a, double b, int nodes);

// Composite Gauss-Legendre on [a,b] with panels graded geometrically towards a,
// for integrands that vary on the length scale `layer` near a.
QuadratureResult graded_gauss_legendre(const Function1D& f, double a, double b, double layer, int nodes = 20);

// Tensor Gauss-Legendre over [0,1]^2; the error estimate compares m and 2m nodes per axis.
QuadratureResult gauss_legendre_2d(const Function2D& f, int nodes_per_axis);

// Polynomial-exact rule of the given degree over a k-simplex embedded in R^m.
QuadratureResult simplex_integrate(const ScalarField& f, const hull::Simplex& simplex, int degree);

// Triangulation of a facet into (n-1)-simplices in ambient coordinates.
std::vector<hull::Simplex> triangulate_facet(const Facet& facet);

// Integral of f over K by sampling.
QuadratureResult mc_body_integrate(const ScalarField& f, const ConvexBody& body, std::int64_t samples, RngSeed seed);

using Region = std::function<bool(const Vector&)>;

// Integral of |x|^exponent over K, or over the part of K where `region` holds.
// For exponent <= -1 the samples are drawn with density proportional to
// |x|^exponent on the bounding ball, which keeps the variance finite.
QuadratureResult mc_body_power_integral(const ConvexBody& body, double exponent, std::int64_t samples,
                                        RngSeed seed, const Region& region = {});

QuadratureResult mc_sphere_integrate(const ScalarField& f, int n, std::int64_t samples, RngSeed seed);

}  // namespace dualcurve
