#include "dualcurve/body_spec.hpp"

#include <cmath>
#include <fstream>

#include "dualcurve/error.hpp"

namespace dualcurve {

namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& path, const std::string& msg) {
  fail(ErrorCode::parse_error, path + ": " + msg);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) parse_fail(path + "." + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) parse_fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(path, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) parse_fail(path, "expected an integer");
  return j.get<int>();
}

Vector vec(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a nonempty array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<Vector> vec_list(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a nonempty array of vectors");
  std::vector<Vector> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(vec(j[i], path + "[" + std::to_string(i) + "]"));
    if (out.back().size() != out.front().size()) parse_fail(path + "[" + std::to_string(i) + "]", "dimension differs");
  }
  return out;
}

json vec_list_json(const std::vector<Vector>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(vector_to_json(v));
  return a;
}

const char* kind_name(PolytopeKind k) {
  switch (k) {
    case PolytopeKind::generic: return "generic";
    case PolytopeKind::box: return "box";
    case PolytopeKind::cross_polytope: return "cross_polytope";
    case PolytopeKind::parallelotope: return "parallelotope";
    case PolytopeKind::prism: return "prism";
  }
  return "generic";
}

PolytopeKind parse_kind(const json& j, const std::string& path) {
  if (!j.is_string()) parse_fail(path, "expected a string");
  const auto s = j.get<std::string>();
  for (auto k : {PolytopeKind::generic, PolytopeKind::box, PolytopeKind::cross_polytope, PolytopeKind::parallelotope,
                 PolytopeKind::prism}) {
    if (s == kind_name(k)) return k;
  }
  parse_fail(path, "unknown polytope kind '" + s + "'");
}

// Re-raises construction errors with the field path prefixed; keeps the code.
template <class Fn>
auto built(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw;
    throw Error(ErrorCode::parse_error, path + ": " + e.what());
  }
}

}  // namespace

json vector_to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ConvexBody parse_body(const json& j, const std::string& path) {
  const json& t = field(j, "type", path);
  if (!t.is_string()) parse_fail(path + ".type", "expected a string");
  const auto type = t.get<std::string>();
  if (type == "box") {
    const Vector h = vec(field(j, "halfwidths", path), path + ".halfwidths");
    return built(path, [&] { return make_box(h); });
  }
  if (type == "ball") {
    const int n = integer(field(j, "n", path), path + ".n");
    const double r = number(field(j, "r", path), path + ".r");
    return built(path, [&] { return make_ball(n, r); });
  }
  if (type == "cylinder") {
    const int n = integer(field(j, "n", path), path + ".n");
    const int k = integer(field(j, "k", path), path + ".k");
    const double l = number(field(j, "l", path), path + ".l");
    return built(path, [&] { return make_cylinder(n, k, l); });
  }
  if (type == "hpolytope_sym") {
    const auto normals = vec_list(field(j, "normals", path), path + ".normals");
    const json& off = field(j, "offsets", path);
    if (!off.is_array()) parse_fail(path + ".offsets", "expected an array of numbers");
    std::vector<double> offsets;
    for (std::size_t i = 0; i < off.size(); ++i) offsets.push_back(number(off[i], path + ".offsets[" + std::to_string(i) + "]"));
    if (offsets.size() != normals.size()) parse_fail(path + ".offsets", "needs one offset per normal");
    return built(path, [&] { return make_sym_hpolytope(normals, offsets); });
  }
  if (type == "vpolytope_sym") {
    const auto vs = vec_list(field(j, "vertices", path), path + ".vertices");
    return built(path, [&] { return make_sym_vpolytope(vs); });
  }
  if (type == "parallelotope") {
    const auto rows = vec_list(field(j, "matrix", path), path + ".matrix");
    if (rows.front().size() != static_cast<Eigen::Index>(rows.size())) parse_fail(path + ".matrix", "expected a square matrix");
    Matrix a(static_cast<Eigen::Index>(rows.size()), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    return built(path, [&] { return make_parallelotope(a); });
  }
  if (type == "prism") {
    const auto base = vec_list(field(j, "base_vertices", path), path + ".base_vertices");
    const Vector apex = vec(field(j, "apex", path), path + ".apex");
    return built(path, [&] { return make_prism(base, apex); });
  }
  if (type == "facet_listed") {
    FacetListedPolytope p;
    const json& fs = field(j, "facets", path);
    if (!fs.is_array() || fs.empty()) parse_fail(path + ".facets", "expected a nonempty array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const std::string fp = path + ".facets[" + std::to_string(i) + "]";
      Facet f;
      f.normal = vec(field(fs[i], "normal", fp), fp + ".normal");
      f.offset = number(field(fs[i], "offset", fp), fp + ".offset");
      f.vertices = vec_list(field(fs[i], "vertices", fp), fp + ".vertices");
      p.facets.push_back(std::move(f));
    }
    p.vertices = vec_list(field(j, "vertices", path), path + ".vertices");
    if (j.contains("symmetric")) {
      if (!j["symmetric"].is_boolean()) parse_fail(path + ".symmetric", "expected a boolean");
      p.symmetric = j["symmetric"].get<bool>();
    }
    if (j.contains("kind")) p.kind = parse_kind(j["kind"], path + ".kind");
    return p;
  }
  parse_fail(path + ".type", "unknown body type '" + type + "'");
}

json body_to_json(const ConvexBody& body) {
  json j;
  j["type"] = type_name(body);
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, Box>) {
          j["halfwidths"] = vector_to_json(b.halfwidths);
        } else if constexpr (std::is_same_v<T, Ball>) {
          j["n"] = b.n;
          j["r"] = b.r;
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          j["n"] = b.n;
          j["k"] = b.k;
          j["l"] = b.l;
        } else if constexpr (std::is_same_v<T, SymHPolytope>) {
          j["normals"] = vec_list_json(b.normals);
          j["offsets"] = b.offsets;
        } else if constexpr (std::is_same_v<T, SymVPolytope>) {
          j["vertices"] = vec_list_json(b.vertices);
        } else if constexpr (std::is_same_v<T, Parallelotope>) {
          json rows = json::array();
          for (Eigen::Index i = 0; i < b.matrix.rows(); ++i) rows.push_back(vector_to_json(b.matrix.row(i).transpose()));
          j["matrix"] = rows;
        } else if constexpr (std::is_same_v<T, Prism>) {
          j["base_vertices"] = vec_list_json(b.base);
          j["apex"] = vector_to_json(b.apex);
        } else {
          json fs = json::array();
          for (const auto& f : b.facets) {
            fs.push_back({{"normal", vector_to_json(f.normal)}, {"offset", f.offset}, {"vertices", vec_list_json(f.vertices)}});
          }
          j["facets"] = fs;
          j["vertices"] = vec_list_json(b.vertices);
          j["symmetric"] = b.symmetric;
          j["kind"] = kind_name(b.kind);
        }
      },
      body);
  return j;
}

Subspace parse_subspace(const json& j, const std::string& path) {
  const json* gens = &j;
  std::string gp = path;
  if (j.is_object()) {
    gens = &field(j, "basis", path);
    gp = path + ".basis";
  }
  const auto vs = vec_list(*gens, gp);
  return built(path, [&] { return Subspace::span_of(vs); });
}

json subspace_to_json(const Subspace& s) {
  json basis = json::array();
  for (Eigen::Index c = 0; c < s.basis().cols(); ++c) basis.push_back(vector_to_json(s.basis().col(c)));
  return {{"dim", s.dim()}, {"basis", basis}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::parse_error, path + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse_error, path + ": " + e.what());
  }
}

bool same_body(const ConvexBody& a, const ConvexBody& b) { return body_to_json(a) == body_to_json(b); }

}  // namespace dualcurve
