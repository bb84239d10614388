#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dualcurve/geometry.hpp"
#include "dualcurve/quadrature.hpp"

namespace dualcurve {

enum class MeasureEngine { automatic, facet_exact, body_mc, sphere_mc, closed_form };

const char* to_string(MeasureEngine engine);
// Accepts auto, facet, facet-exact, body-mc, sphere-mc, closed, closed-form.
MeasureEngine parse_engine(const std::string& name);

struct MeasureOptions {
  int degree = 10;
  std::int64_t samples = 200000;
  int gl_nodes = 64;
  RngSeed seed{};

  // Ten times the budget of every engine, used to re-check suspicious results.
  MeasureOptions refined() const;
};

struct MeasureEstimate {
  double value = 0.0;
  double abs_error = 0.0;
  Engine engine = Engine::closed_form;
  double q = 0.0;
  std::string body;
  std::string selection;
  std::int64_t nodes_or_samples = 0;
};

enum class BoundKind { q_ge_n_plus_1, q_eq_n, q_lt_n, planar, parallelotope, none };

const char* to_string(BoundKind kind);

struct Bound {
  BoundKind kind = BoundKind::none;
  double value = 1.0;
};

struct RatioReport {
  double ratio = 0.0;
  double ratio_error = 0.0;
  double bound = 1.0;
  BoundKind bound_kind = BoundKind::none;
  bool satisfied = true;
  double margin = 0.0;  // bound - ratio
  MeasureEstimate subspace;
  MeasureEstimate total;
};

// Bound on C_q(K, S cap L) / C_q(K, S) for dim L = k in R^n.
Bound subspace_bound(int n, int k, double q, bool parallelotope);

double facet_volume(const Facet& facet);
double polytope_volume(const FacetListedPolytope& p);

MeasureEstimate facet_dual_curvature(const FacetListedPolytope& p, std::size_t facet, double q,
                                     const MeasureOptions& options = {});

MeasureEstimate dual_curvature(const ConvexBody& body, const NormalSelection& eta, double q,
                               MeasureEngine engine = MeasureEngine::automatic, const MeasureOptions& options = {});

// Engine that `automatic` resolves to for this input.
MeasureEngine resolve_engine(const ConvexBody& body, const NormalSelection& eta, double q);

MeasureEstimate cone_volume_measure(const FacetListedPolytope& p, const NormalSelection& eta);

// W~_{n-i}(K) = C~_i(K, S^{n-1}).
MeasureEstimate dual_quermassintegral(const ConvexBody& body, int i, MeasureEngine engine = MeasureEngine::automatic,
                                      const MeasureOptions& options = {});

// Integral of |x|^p over conv(points) against its intrinsic Hausdorff measure.
MeasureEstimate moment_integral(const VPolytope& body, double p, const MeasureOptions& options = {});
MeasureEstimate moment_integral(const ConvexBody& body, double p, const MeasureOptions& options = {});

RatioReport subspace_concentration_ratio(const ConvexBody& body, const Subspace& subspace, double q,
                                         MeasureEngine engine = MeasureEngine::automatic,
                                         const MeasureOptions& options = {});

// Closed-form family K_l = (l B_k) x B_{n-k}; L is the first-k coordinate block.
MeasureEstimate cylinder_dcm_subspace(double q, int n, int k, double l, const MeasureOptions& options = {});
MeasureEstimate cylinder_dcm_complement(double q, int n, int k, double l, const MeasureOptions& options = {});
MeasureEstimate cylinder_dcm_total(double q, int n, int k, double l, const MeasureOptions& options = {});
double cylinder_ratio_limit(double q, int n, int k);

bool is_parallelotope(const ConvexBody& body);

}  // namespace dualcurve
