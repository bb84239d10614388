#include "dualcurve/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"

#include "dualcurve/body_spec.hpp"
#include "dualcurve/error.hpp"
#include "dualcurve/inequality_lab.hpp"
#include "dualcurve/json_out.hpp"
#include "dualcurve/measures.hpp"

namespace dualcurve::cli {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, what + ": '" + s + "' is not a number");
  }
}

long long to_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::invalid_argument, what + ": '" + s + "' is not an integer");
  }
}

std::vector<std::size_t> parse_indices(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& t : split(s, ',')) {
    const long long v = to_integer(t, "facet index");
    if (v < 0) fail(ErrorCode::invalid_argument, "facet indices are 0-based and nonnegative");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) fail(ErrorCode::invalid_argument, "empty facet list");
  return out;
}

// 1-based axes
Subspace parse_axes(const std::string& s, int n) {
  std::vector<int> axes;
  for (const auto& t : split(s, ',')) {
    const long long v = to_integer(t, "axis");
    if (v < 1 || v > n) fail(ErrorCode::invalid_argument, "axis " + t + " outside 1.." + std::to_string(n));
    axes.push_back(static_cast<int>(v - 1));
  }
  if (axes.empty()) fail(ErrorCode::invalid_argument, "empty axis list");
  return Subspace::coordinate_axes(n, axes);
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("DUALCURVE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      fail(ErrorCode::invalid_argument, std::string("DUALCURVE_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

int exit_code(const Error& e) { return e.code() == ErrorCode::engine_mismatch ? kEngineMismatch : kConfigError; }

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t stream = 0;
  std::int64_t samples = 200000;
  int degree = 10;
  int gl_nodes = 64;
  std::string out_path;

  MeasureOptions options() const {
    MeasureOptions o;
    o.samples = samples;
    o.degree = degree;
    o.gl_nodes = gl_nodes;
    o.seed = {seed, stream};
    return o;
  }

  json to_json() const {
    return {{"seed", seed}, {"stream", stream}, {"samples", samples}, {"degree", degree}, {"gl_nodes", gl_nodes}};
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "RNG seed (default: $DUALCURVE_SEED or 0)");
  app->add_option("--stream", c.stream, "RNG stream");
  app->add_option("--samples", c.samples, "Monte Carlo samples")->check(CLI::PositiveNumber);
  app->add_option("--degree", c.degree, "simplex rule degree (1..25)")->check(CLI::Range(1, 25));
  app->add_option("--gl-nodes", c.gl_nodes, "Gauss-Legendre nodes per panel")->check(CLI::Range(2, 400));
  app->add_option("-o,--out", c.out_path, "write output to a file instead of stdout");
}

void emit(const std::string& text, const Common& c, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) fail(ErrorCode::invalid_argument, "cannot write " + c.out_path);
  f << text;
}

json report(const std::vector<std::string>& args, json config, json results, double seconds) {
  return {{"schema", kReportSchema},
          {"command", args},
          {"config", std::move(config)},
          {"results", std::move(results)},
          {"wall_time_s", seconds}};
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  static const std::regex fn(R"(\s*(geomspace|linspace)\s*\(\s*([^,]+),\s*([^,]+),\s*([^,\)]+)\)\s*)");
  std::smatch m;
  if (std::regex_match(text, m, fn)) {
    const double a = to_double(split(m[2].str(), ' ').at(0), "grid start");
    const double b = to_double(split(m[3].str(), ' ').at(0), "grid end");
    const long long count = to_integer(split(m[4].str(), ' ').at(0), "grid size");
    if (count < 1 || count > 1000000) fail(ErrorCode::invalid_argument, "grid size must lie in 1..1000000");
    return m[1].str() == "geomspace" ? geomspace(a, b, static_cast<int>(count)) : linspace(a, b, static_cast<int>(count));
  }
  std::vector<double> out;
  for (const auto& t : split(text, ',')) out.push_back(to_double(t, "grid value"));
  if (out.empty()) fail(ErrorCode::invalid_argument, "empty grid");
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual curvature measures and moment inequalities", "dualcurve"};
  app.require_subcommand(1);

  Common common;
  std::string body_path, eta, facets, subspace_path, axes, engine = "auto";
  double q = 0.0;

  auto* measure = app.add_subcommand("measure", "dual curvature measure of a body");
  measure->add_option("--body", body_path, "body JSON file")->required();
  measure->add_option("--q", q, "order q")->required();
  measure->add_option("--eta", eta, "all | facets[:i,j,...] | subspace[:file]");
  measure->add_option("--facets", facets, "0-based facet indices, comma separated");
  measure->add_option("--subspace", subspace_path, "subspace JSON file");
  measure->add_option("--axes", axes, "1-based coordinate axes spanning the subspace");
  measure->add_option("--engine", engine, "auto, facet, body-mc, sphere-mc, closed");
  add_common(measure, common);

  auto* ratio = app.add_subcommand("ratio", "subspace concentration ratio");
  ratio->add_option("--body", body_path, "body JSON file")->required();
  ratio->add_option("--q", q, "order q")->required();
  ratio->add_option("--subspace", subspace_path, "subspace JSON file");
  ratio->add_option("--axes", axes, "1-based coordinate axes spanning the subspace");
  ratio->add_option("--engine", engine, "auto, facet, body-mc, sphere-mc, closed");
  add_common(ratio, common);

  std::string suite;
  std::int64_t trials = 0;
  std::string report_path, lambda_grid;
  FuzzConfig fcfg;
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  verify->add_option("--suite", suite, "suite name")->required();
  verify->add_option("--trials", trials, "trials (default: per suite)")->check(CLI::PositiveNumber);
  verify->add_option("--report", report_path, "per-check JSONL report");
  verify->add_option("--dim-min", fcfg.dim_min);
  verify->add_option("--dim-max", fcfg.dim_max);
  verify->add_option("--vertices-min", fcfg.directions_min, "random directions per body (lower)");
  verify->add_option("--vertices-max", fcfg.directions_max, "random directions per body (upper)");
  verify->add_option("--param-min", fcfg.param_min, "p, or q - n for measure suites (lower)");
  verify->add_option("--param-max", fcfg.param_max, "p, or q - n for measure suites (upper)");
  verify->add_option("--lambda-grid", lambda_grid, "comma separated lambda values");
  add_common(verify, common);

  std::string family, l_grid, rho_grid;
  int n = 0, k = 0;
  double p = 1.0, lambda = 0.75;
  std::string direction;
  auto* sweep = app.add_subcommand("sweep", "parameter sweep as CSV");
  sweep->add_option("--family", family, "cylinder | tightness")->required();
  sweep->add_option("--q", q, "order q (cylinder)");
  sweep->add_option("--n", n, "ambient dimension (cylinder)");
  sweep->add_option("--k", k, "axis block dimension (cylinder)");
  sweep->add_option("--l-grid", l_grid, "geomspace(a,b,m), linspace(a,b,m) or a list");
  sweep->add_option("--p", p, "moment order (tightness)");
  sweep->add_option("--lambda", lambda, "combination parameter (tightness)");
  sweep->add_option("--rho-grid", rho_grid, "translation grid (tightness)");
  sweep->add_option("--body", body_path, "symmetric polytope C (tightness; default [-1,1])");
  sweep->add_option("--direction", direction, "translation direction (tightness; default e1)");
  add_common(sweep, common);

  bool as_facets = false;
  auto* body_cmd = app.add_subcommand("body", "parse a body and print its canonical spec");
  body_cmd->add_option("--body", body_path, "body JSON file")->required();
  body_cmd->add_flag("--facets", as_facets, "emit the facet-listed form");
  add_common(body_cmd, common);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  try {
    for (auto* sub : {measure, ratio, verify, sweep, body_cmd}) {
      if (sub->parsed() && sub->count("--seed") > 0) common.seed_given = true;
    }
    if (!common.seed_given) common.seed = default_seed();
    const MeasureOptions options = common.options();

    if (measure->parsed()) {
      const ConvexBody body = parse_body(read_json_file(body_path));
      const int dim = ambient_dim(body);
      NormalSelection selection = FullSphere{};
      std::string mode = eta, arg;
      if (mode.empty()) mode = !facets.empty() ? "facets" : !subspace_path.empty() || !axes.empty() ? "subspace" : "all";
      if (const auto colon = eta.find(':'); colon != std::string::npos) {
        mode = eta.substr(0, colon);
        arg = eta.substr(colon + 1);
      }
      if (mode == "all") {
        selection = FullSphere{};
      } else if (mode == "facets") {
        selection = FacetSubset{parse_indices(arg.empty() ? facets : arg)};
      } else if (mode == "subspace") {
        const std::string file = arg.empty() ? subspace_path : arg;
        if (!file.empty()) {
          selection = SubspaceCap{parse_subspace(read_json_file(file))};
        } else if (!axes.empty()) {
          selection = SubspaceCap{parse_axes(axes, dim)};
        } else {
          fail(ErrorCode::invalid_argument, "--eta subspace needs --subspace or --axes");
        }
      } else {
        fail(ErrorCode::invalid_argument, "--eta must be all, facets or subspace");
      }
      const auto est = dual_curvature(body, selection, q, parse_engine(engine), options);
      json config = common.to_json();
      config["q"] = q;
      config["eta"] = describe(selection);
      config["engine"] = engine;
      config["body"] = body_to_json(body);
      if (const auto* cap = std::get_if<SubspaceCap>(&selection)) config["subspace"] = subspace_to_json(cap->subspace);
      emit(dump(report(args, config, json::array({to_json(est)}), elapsed())), common, out);
      return kOk;
    }

    if (ratio->parsed()) {
      const ConvexBody body = parse_body(read_json_file(body_path));
      const int dim = ambient_dim(body);
      if (subspace_path.empty() == axes.empty()) fail(ErrorCode::invalid_argument, "give exactly one of --subspace, --axes");
      const Subspace l = subspace_path.empty() ? parse_axes(axes, dim) : parse_subspace(read_json_file(subspace_path));
      const auto rep = subspace_concentration_ratio(body, l, q, parse_engine(engine), options);
      json config = common.to_json();
      config["q"] = q;
      config["engine"] = engine;
      config["subspace"] = subspace_to_json(l);
      config["body"] = body_to_json(body);
      emit(dump(report(args, config, json::array({to_json(rep)}), elapsed())), common, out);
      return kOk;
    }

    if (verify->parsed()) {
      const auto& names = suite_names();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        fail(ErrorCode::invalid_argument, "unknown suite '" + suite + "'");
      }
      fcfg.trials = trials;
      fcfg.seed = {common.seed, common.stream};
      fcfg.measure = options;
      fcfg.keep_all_records = !report_path.empty();
      if (!lambda_grid.empty()) {
        fcfg.lambda_grid.clear();
        for (const auto& t : split(lambda_grid, ',')) fcfg.lambda_grid.push_back(to_double(t, "lambda"));
      }
      const auto summaries = run_suite(suite, fcfg);
      json results = json::array();
      std::int64_t violations = 0;
      for (const auto& s : summaries) {
        violations += s.violations;
        json j = to_json(s, false);
        json bad = json::array();
        for (const auto& r : s.records) {
          if (!r.holds) bad.push_back(to_json(r));
        }
        j["violation_records"] = bad;
        results.push_back(j);
        for (const auto& r : s.records) {
          if (r.holds) continue;
          const auto ts = trial_seed(fcfg.seed, r.trial);
          err << "violation: suite=" << s.suite << " trial=" << r.trial << " seed=" << fcfg.seed.seed
              << " stream=" << fcfg.seed.stream << " trial_stream=" << ts.stream << " " << r.description
              << " margin=" << format_double(r.margin) << "\n";
        }
      }
      if (!report_path.empty()) {
        std::ofstream f(report_path);
        if (!f) fail(ErrorCode::invalid_argument, "cannot write " + report_path);
        for (const auto& s : summaries) {
          for (const auto& r : s.records) {
            json line = to_json(r);
            line["suite"] = s.suite;
            f << line.dump() << "\n";
          }
        }
      }
      json config = common.to_json();
      config["suite"] = suite;
      config["trials"] = trials;
      config["lambda_grid"] = fcfg.lambda_grid;
      emit(dump(report(args, config, results, elapsed())), common, out);
      return violations == 0 ? kOk : kViolations;
    }

    if (sweep->parsed()) {
      std::ostringstream csv;
      csv << "parameter,subspace_measure,total_measure,ratio,bound,margin\n";
      auto row = [&](double x, double a, double b, double r, double bound, double margin) {
        csv << format_double(x) << ',' << format_double(a) << ',' << format_double(b) << ',' << format_double(r) << ','
            << format_double(bound) << ',' << format_double(margin) << '\n';
      };
      if (family == "cylinder") {
        if (l_grid.empty()) fail(ErrorCode::invalid_argument, "--l-grid is required for the cylinder family");
        const auto grid = parse_grid(l_grid);
        for (double l : grid) {
          if (!(l > 0.0)) fail(ErrorCode::invalid_argument, "l values must be positive");
        }
        const auto s = cylinder_asymptotics_check(q, n, k, grid, 0.01, options);
        for (const auto& r : s.rows) row(r.l, r.subspace, r.total, r.ratio, r.bound, r.margin);
      } else if (family == "tightness") {
        if (rho_grid.empty()) fail(ErrorCode::invalid_argument, "--rho-grid is required for the tightness family");
        const auto grid = parse_grid(rho_grid);
        VPolytope c;
        if (body_path.empty()) {
          c.points = {Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)};
        } else {
          const ConvexBody body = parse_body(read_json_file(body_path));
          c.points = polytope_vertices(body);
        }
        const int dim = static_cast<int>(c.points.front().size());
        Vector u = Vector::Unit(dim, 0);
        if (!direction.empty()) {
          const auto parts = split(direction, ',');
          if (static_cast<int>(parts.size()) != dim) fail(ErrorCode::dimension_mismatch, "--direction has the wrong length");
          for (int i = 0; i < dim; ++i) u[i] = to_double(parts[static_cast<std::size_t>(i)], "direction");
          if (!(u.norm() > 0.0)) fail(ErrorCode::invalid_argument, "--direction must be nonzero");
          u.normalize();
        }
        const double bound = std::pow(std::abs(2.0 * lambda - 1.0), p);
        for (double rho : grid) {
          VPolytope k0 = c;
          for (auto& x : k0.points) x += rho * u;
          const auto kl = minkowski_combination(k0, reflect(k0), lambda);
          const double a = moment_integral(kl, p, options).value;
          const double b = moment_integral(k0, p, options).value;
          row(rho, a, b, a / b, bound, a / b - bound);
        }
      } else {
        fail(ErrorCode::invalid_argument, "--family must be cylinder or tightness");
      }
      emit(csv.str(), common, out);
      return kOk;
    }

    if (body_cmd->parsed()) {
      const ConvexBody body = parse_body(read_json_file(body_path));
      const json j = as_facets ? body_to_json(to_facet_listed(body)) : body_to_json(body);
      emit(dump(j), common, out);
      return kOk;
    }
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace dualcurve::cli
