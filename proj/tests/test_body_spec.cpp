#include <string>

#include "doctest.h"
#include "dualcurve/body_spec.hpp"
#include "dualcurve/error.hpp"
#include "dualcurve/measures.hpp"
#include "support.hpp"

using namespace dualcurve;
using nlohmann::json;
using testing::V;

namespace {

std::string parse_error_text(const json& j) {
  try {
    parse_body(j);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

bool mentions(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

}  // namespace

TEST_CASE("every body type round-trips") {
  const json specs[] = {
      json::parse(R"({"type": "box", "halfwidths": [1, 2, 0.5]})"),
      json::parse(R"({"type": "ball", "n": 3, "r": 1.5})"),
      json::parse(R"({"type": "cylinder", "n": 3, "k": 1, "l": 4})"),
      json::parse(R"({"type": "hpolytope_sym", "normals": [[1, 0], [0, 1]], "offsets": [1, 2]})"),
      json::parse(R"({"type": "vpolytope_sym", "vertices": [[1, 0], [0, 1], [-1, 0], [0, -1]]})"),
      json::parse(R"({"type": "parallelotope", "matrix": [[1, 0.5], [0, 2]]})"),
      json::parse(R"({"type": "prism", "base_vertices": [[-1, -1, 0], [1, -1, 0], [1, 1, 0], [-1, 1, 0]],
                      "apex": [0.5, 0, 1]})"),
  };
  for (const auto& s : specs) {
    CAPTURE(s.dump());
    const ConvexBody b = parse_body(s);
    const json out = body_to_json(b);
    CHECK(out["type"] == s["type"]);
    const ConvexBody again = parse_body(out);
    CHECK(same_body(b, again));
    const ConvexBody facets = to_facet_listed(b.index() == 1 || b.index() == 2 ? ConvexBody(make_box(V({1, 1}))) : b);
    CHECK(same_body(facets, parse_body(body_to_json(facets))));
  }
}

TEST_CASE("facet-listed round trip preserves measures") {
  const ConvexBody p = to_facet_listed(parse_body(json::parse(R"({"type": "parallelotope", "matrix": [[1, 0.5, 0], [0, 2, 0.3], [0, 0, 2.5]]})")));
  const ConvexBody q = parse_body(body_to_json(p));
  CHECK(dual_curvature(p, FullSphere{}, 4.0).value == dual_curvature(q, FullSphere{}, 4.0).value);
  CHECK(body_to_json(q)["kind"] == "parallelotope");
}

TEST_CASE("parse errors carry field paths") {
  CHECK(mentions(parse_error_text(json::parse(R"({"halfwidths": [1]})")), "body"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "blob"})")), "body.type"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "box", "halfwidths": [1, "a"]})")), "body.halfwidths[1]"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "vpolytope_sym", "vertices": [[1, 0], [0, 1], [1, "x"]]})")),
                 "body.vertices[2][1]"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "ball", "n": 2.5, "r": 1})")), "body.n"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "hpolytope_sym", "normals": [[1, 0]], "offsets": [1, 2]})")),
                 "body.offsets"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "parallelotope", "matrix": [[1, 0]]})")), "body.matrix"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "facet_listed", "facets": [{"normal": [1], "offset": 1}],
                                                 "vertices": [[1], [-1]]})")),
                 "body.facets[0]"));
}

TEST_CASE("construction errors become parse errors") {
  const auto text = parse_error_text(json::parse(R"({"type": "hpolytope_sym", "normals": [[1, 1]], "offsets": [1]})"));
  CHECK(mentions(text, "unit"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "box", "halfwidths": [1, -1]})")), "body"));
  CHECK(mentions(parse_error_text(json::parse(R"({"type": "cylinder", "n": 3, "k": 3, "l": 1})")), "body"));
}

TEST_CASE("subspaces") {
  const auto a = parse_subspace(json::parse(R"({"basis": [[1, 0, 0], [1, 1, 0]]})"));
  CHECK(a.dim() == 2);
  CHECK(a.contains(V({0, 1, 0})));
  const auto b = parse_subspace(json::parse(R"([[0, 0, 2]])"));
  CHECK(b.dim() == 1);
  const json out = subspace_to_json(a);
  CHECK(out["dim"] == 2);
  const auto c = parse_subspace(out);
  CHECK(c.contains(V({1, 0, 0})));
  CHECK(c.contains(V({0, 1, 0})));
  CHECK_THROWS_AS(parse_subspace(json::parse(R"({"basis": [[1, "a"]]})")), Error);
}

TEST_CASE("files") {
  const auto cube = parse_body(read_json_file(std::string(DUALCURVE_TEST_DATA) + "/cube3.json"));
  CHECK(type_name(cube) == "box");
  try {
    read_json_file(std::string(DUALCURVE_TEST_DATA) + "/missing.json");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::parse_error);
  }
  const auto h = parse_body(read_json_file(std::string(DUALCURVE_TEST_DATA) + "/octahedron.json"));
  CHECK(cone_volume_measure(to_facet_listed(h), FullSphere{}).value == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}
