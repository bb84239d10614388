#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "dualcurve/cli.hpp"
#include "dualcurve/measures.hpp"
#include "json.hpp"
#include "support.hpp"

using nlohmann::json;
using testing::pi;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

std::string data(const std::string& name) { return std::string(DUALCURVE_TEST_DATA) + "/" + name; }

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = dualcurve::cli::run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

json results(const Run& r) { return json::parse(r.out)["results"]; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("dualcurve_test_" + name);
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string without_wall_time(const std::string& text) {
  json j = json::parse(text);
  j.erase("wall_time_s");
  return j.dump();
}

std::vector<std::vector<double>> csv_rows(const std::string& text, std::string* header) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (header) *header = line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("measure command") {
  const auto a = run({"measure", "--body", data("cube3.json"), "--q", "3", "--eta", "all"});
  REQUIRE(a.code == 0);
  const json j = json::parse(a.out);
  CHECK(j["schema"] == "dualcurve.run/1");
  CHECK(j["config"]["seed"] == 0);
  CHECK(j.contains("wall_time_s"));
  CHECK(j["results"][0]["value"].get<double>() == doctest::Approx(8.0).epsilon(1e-14));

  const auto b = run({"measure", "--body", data("ball3.json"), "--q", "5"});
  REQUIRE(b.code == 0);
  CHECK(results(b)[0]["value"].get<double>() == doctest::Approx(4.0 * pi / 3.0 * 32.0).epsilon(1e-13));
  CHECK(results(b)[0]["engine"] == "closed-form");

  const auto cyl = temp_file("cyl.json");
  write(cyl, R"({"type": "cylinder", "n": 3, "k": 1, "l": 10})");
  const auto c = run({"measure", "--body", cyl.string(), "--q", "4", "--axes", "1"});
  REQUIRE(c.code == 0);
  CHECK(results(c)[0]["value"].get<double>() ==
        doctest::Approx(dualcurve::cylinder_dcm_subspace(4.0, 3, 1, 10.0).value).epsilon(1e-14));

  const auto d = run({"measure", "--body", data("cube3.json"), "--q", "3", "--eta", "subspace:" + data("span_e1.json")});
  REQUIRE(d.code == 0);
  CHECK(results(d)[0]["value"].get<double>() == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
  const auto e = run({"measure", "--body", data("cube3.json"), "--q", "3", "--eta", "facets:0"});
  CHECK(results(e)[0]["value"].get<double>() == doctest::Approx(8.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("measure exit codes") {
  CHECK(run({"measure", "--body", data("ball3.json"), "--q", "3", "--eta", "facets:0"}).code == 3);
  CHECK(run({"measure", "--body", data("cube3.json"), "--q", "3", "--engine", "closed"}).code == 3);
  CHECK(run({"measure", "--body", data("cube3.json"), "--q", "-1", "--engine", "facet"}).code == 3);
  const auto bad = run({"measure", "--body", data("bad_vertex.json"), "--q", "3"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("body.vertices[2][1]") != std::string::npos);
  CHECK(run({"measure", "--body", data("missing.json"), "--q", "3"}).code == 2);
  CHECK(run({"measure", "--body", data("cube3.json")}).code == 2);
  CHECK(run({"measure", "--body", data("cube3.json"), "--q", "3", "--eta", "sideways"}).code == 2);
  CHECK(run({"measure", "--body", data("cube3.json"), "--q", "3", "--engine", "simpson"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
}

TEST_CASE("sphere engine for negative q") {
  const auto r = run({"measure", "--body", data("cube3.json"), "--q", "-1", "--samples", "20000"});
  REQUIRE(r.code == 0);
  CHECK(results(r)[0]["engine"] == "sphere-mc");
}

TEST_CASE("ratio command") {
  const auto a = run({"ratio", "--body", data("cube3.json"), "--q", "3", "--axes", "1"});
  REQUIRE(a.code == 0);
  const json r = results(a)[0];
  CHECK(r["ratio"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(r["bound"].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(r["satisfied"] == true);

  const auto b = run({"ratio", "--body", data("cube3.json"), "--q", "4", "--axes", "1,2"});
  REQUIRE(b.code == 0);
  CHECK(results(b)[0]["ratio"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(results(b)[0]["bound"].get<double>() == doctest::Approx(0.75));

  const auto cyl = temp_file("cyl100.json");
  write(cyl, R"({"type": "cylinder", "n": 3, "k": 1, "l": 100})");
  const auto c = run({"ratio", "--body", cyl.string(), "--q", "4", "--axes", "1"});
  REQUIRE(c.code == 0);
  CHECK(results(c)[0]["ratio"].get<double>() < 0.5);
  CHECK(results(c)[0]["margin"].get<double>() > 0.0);

  const auto s = run({"ratio", "--body", data("cube3.json"), "--q", "3", "--subspace", data("span_e1.json")});
  CHECK(results(s)[0]["ratio"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));

  CHECK(run({"ratio", "--body", data("cube3.json"), "--q", "3"}).code == 2);
  CHECK(run({"ratio", "--body", data("cube3.json"), "--q", "3", "--axes", "4"}).code == 2);
  CHECK(run({"ratio", "--body", data("cube3.json"), "--q", "3", "--axes", "1,2,3"}).code == 2);
}

TEST_CASE("verify command") {
  const auto a = run({"verify", "--suite", "small-p", "--seed", "3"});
  CHECK(a.code == 0);
  const json r = results(a);
  CHECK(r[0]["suite"] == "small-p");
  CHECK(r[0]["violations"] == 0);

  const auto report = temp_file("report.jsonl");
  const auto b = run({"verify", "--suite", "planar", "--trials", "20", "--report", report.string()});
  CHECK(b.code == 0);
  std::ifstream in(report);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    CHECK(j.contains("margin"));
    CHECK(j["suite"] == "planar");
    ++lines;
  }
  CHECK(lines == results(b)[0]["checks"].get<int>());

  CHECK(run({"verify", "--suite", "nope"}).code == 2);
  CHECK(run({"verify", "--suite", "scalar-lemma", "--trials", "10", "--param-min", "0.2", "--param-max", "0.5"}).code == 2);
  CHECK(run({"verify", "--suite", "planar", "--trials", "0"}).code == 2);
}

TEST_CASE("determinism modulo wall time") {
  const std::vector<std::string> args{"verify", "--suite", "subspace", "--trials", "15", "--seed", "11"};
  const auto a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(without_wall_time(a.out) == without_wall_time(b.out));
  const std::vector<std::string> mc{"measure", "--body", data("cube3.json"), "--q", "4", "--engine", "body-mc",
                                    "--samples", "5000", "--seed", "5"};
  CHECK(without_wall_time(run(mc).out) == without_wall_time(run(mc).out));
  auto other = mc;
  other.back() = "6";
  CHECK(without_wall_time(run(mc).out) != without_wall_time(run(other).out));
}

TEST_CASE("seed from the environment") {
  const std::vector<std::string> mc{"measure", "--body", data("cube3.json"), "--q", "4", "--engine", "body-mc",
                                    "--samples", "5000"};
  ::setenv("DUALCURVE_SEED", "42", 1);
  const auto env = run(mc);
  ::unsetenv("DUALCURVE_SEED");
  auto flagged = mc;
  flagged.insert(flagged.end(), {"--seed", "42"});
  const auto flag = run(flagged);
  REQUIRE(env.code == 0);
  CHECK(json::parse(env.out)["config"]["seed"] == 42);
  CHECK(results(env) == results(flag));
  ::setenv("DUALCURVE_SEED", "banana", 1);
  CHECK(run(mc).code == 2);
  ::unsetenv("DUALCURVE_SEED");
}

TEST_CASE("sweep command") {
  std::string header;
  const auto a = run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "1", "--l-grid",
                      "geomspace(1,1000,13)"});
  REQUIRE(a.code == 0);
  const auto rows = csv_rows(a.out, &header);
  CHECK(header == "parameter,subspace_measure,total_measure,ratio,bound,margin");
  REQUIRE(rows.size() == 13);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i][3] >= rows[i - 1][3] - 1e-12);
  CHECK(rows.back()[3] < 0.5);
  CHECK(rows.back()[3] > 0.49);
  CHECK(rows.front()[0] == 1.0);

  const auto b = run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "2", "--l-grid", "10,100,1000"});
  const auto rows_b = csv_rows(b.out, nullptr);
  CHECK(rows_b.back()[3] == doctest::Approx(0.75).epsilon(0.01));

  const auto t = run({"sweep", "--family", "tightness", "--p", "1", "--lambda", "0.75", "--rho-grid", "10,100,1000"});
  REQUIRE(t.code == 0);
  for (const auto& row : csv_rows(t.out, nullptr)) CHECK(std::abs(row[3] - 0.5) <= 2e-3);

  CHECK(run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "1", "--l-grid", "geomspace(1,x,3)"}).code == 2);
  CHECK(run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "1", "--l-grid", "0,1"}).code == 2);
  CHECK(run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "1"}).code == 2);
  CHECK(run({"sweep", "--family", "spiral"}).code == 2);

  const auto out = temp_file("sweep.csv");
  CHECK(run({"sweep", "--family", "cylinder", "--q", "4", "--n", "3", "--k", "1", "--l-grid", "1,2", "-o", out.string()}).code == 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  CHECK(first == header);
}

TEST_CASE("grid parsing") {
  using dualcurve::cli::parse_grid;
  CHECK(parse_grid("1,2.5,4") == std::vector<double>{1, 2.5, 4});
  const auto g = parse_grid("geomspace(1, 100, 3)");
  REQUIRE(g.size() == 3);
  CHECK(g[1] == doctest::Approx(10.0));
  CHECK(parse_grid("linspace(0,1,3)")[1] == 0.5);
  CHECK_THROWS(parse_grid("logspace(0,1,3)"));
  CHECK_THROWS(parse_grid(""));
}

TEST_CASE("body command round trip") {
  const auto a = run({"body", "--body", data("octahedron.json")});
  REQUIRE(a.code == 0);
  const auto path = temp_file("octa_out.json");
  write(path, a.out);
  const auto b = run({"body", "--body", path.string()});
  CHECK(a.out == b.out);

  const auto f = run({"body", "--body", data("cube3.json"), "--facets"});
  REQUIRE(f.code == 0);
  const json j = json::parse(f.out);
  CHECK(j["type"] == "facet_listed");
  CHECK(j["facets"].size() == 6);
  write(path, f.out);
  const auto g = run({"measure", "--body", path.string(), "--q", "3"});
  CHECK(results(g)[0]["value"].get<double>() == doctest::Approx(8.0).epsilon(1e-13));
}

TEST_CASE("floats use 17 significant digits") {
  const auto a = run({"measure", "--body", data("ball3.json"), "--q", "1"});
  REQUIRE(a.code == 0);
  const auto at = a.out.find("\"value\": ");
  REQUIRE(at != std::string::npos);
  const std::string text = a.out.substr(at + 9, a.out.find_first_of(",\n", at) - at - 9);
  int digits = 0;
  for (char ch : text) digits += std::isdigit(static_cast<unsigned char>(ch)) ? 1 : 0;
  CHECK(digits == 17);
  CHECK(std::stod(text) == doctest::Approx(8.0 * pi / 3.0).epsilon(1e-15));
}
