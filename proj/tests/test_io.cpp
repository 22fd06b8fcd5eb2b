#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "lagskel/io.hpp"
#include "lagskel/oracle.hpp"
#include "json.hpp"
#include "reference.hpp"

using namespace lagskel;
using ref::q;
using ref::qv;
namespace fs = std::filesystem;

namespace {

const char* kToy = R"({
  "schema_version": 1,
  "nodes": [["0", "1"], ["0", "1"]],
  "edges": [[0, 1, ["0", "0", "0", "0"]]],
  "constraints": [
    {"name": "diff", "node_coeffs": ["1", "-1"], "target": "1"},
    {"name": "cut", "edge_coeff": "2", "target": "2"}
  ],
  "box": [["-2", "2"], ["-2", "2"]]
})";

fs::path data_dir() {
  const char* d = std::getenv("LAGSKEL_TEST_DATA");
  return d ? fs::path(d) : fs::path("tests/data");
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lagskel_test_io";
  fs::create_directories(dir);
  return dir / name;
}

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

ParseError parse_failure(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("expected a parse error");
  return ParseError("");
}

}  // namespace

TEST_CASE("toy problem parses to the expected rationals") {
  const auto file = parse_problem(kToy);
  const auto& p = file.problem;
  CHECK(p.num_variables() == 2);
  CHECK(p.target() == qv({1, 2}));
  CHECK(p.box().lower() == qv({-2, -2}));
  CHECK(p.constraints()[1].edge_coeff == 2);
  CHECK_FALSE(file.grid.has_value());
  for (std::uint64_t bits = 0; bits < 4; ++bits) {
    const auto x = ref::labeling_from_index(bits, 2);
    CHECK(evaluate_constraints(p, x) == ref::constraints_at(ref::toy_problem(), x));
  }
  const auto loaded = load_problem(data_dir() / "toy.json");
  CHECK(serialize_problem(loaded) == serialize_problem(file));
}

TEST_CASE("parse errors") {
  const auto syntax = parse_failure("{\n  \"schema_version\": 1,\n  \"nodes\": [,]\n}");
  CHECK(syntax.line() == 3);
  CHECK(syntax.column() > 0);
  CHECK_THROWS_AS(parse_problem(replace(kToy, "\"schema_version\": 1", "\"schema_version\": 2")), ParseError);
  CHECK_THROWS_AS(parse_problem(replace(kToy, "\"target\": \"1\"", "\"target\": 1.5")), ParseError);
  CHECK_NOTHROW(parse_problem(replace(kToy, "\"target\": \"1\"", "\"target\": 1")));
  CHECK_THROWS_AS(parse_problem(replace(kToy, "\"target\": \"1\"", "\"target\": \"x\"")), ParseError);
  nlohmann::json doc = nlohmann::json::parse(kToy);
  doc["constraints"] = nlohmann::json::array();
  CHECK_THROWS_AS(parse_problem(doc.dump()), ParseError);
  doc = nlohmann::json::parse(kToy);
  doc["box"] = {{"-2", "2"}};
  CHECK_THROWS_AS(parse_problem(doc.dump()), ParseError);
  doc = nlohmann::json::parse(kToy);
  doc["edges"][0][1] = 5;
  CHECK_THROWS_AS(parse_problem(doc.dump()), ParseError);
  doc = nlohmann::json::parse(kToy);
  doc["constraints"][0]["builder"] = "mean_v";
  CHECK_THROWS_AS(parse_problem(doc.dump()), ParseError);
  doc["constraints"][0]["builder"] = "area";
  CHECK_THROWS_AS(parse_problem(doc.dump()), ParseError);
  CHECK_THROWS_AS(load_problem(scratch("missing.json")), Error);
}

TEST_CASE("serialize and parse round trip") {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ProblemFile file{ref::random_problem(seed), std::nullopt};
    const std::string text = serialize_problem(file);
    const auto back = parse_problem(text);
    const auto& a = file.problem;
    const auto& b = back.problem;
    CHECK(serialize_problem(back) == text);
    CHECK(a.target() == b.target());
    CHECK(a.box().lower() == b.box().lower());
    CHECK(a.box().upper() == b.box().upper());
    for (const auto& row : ref::all_rows(a)) {
      CHECK(evaluate_energy(b.energy(), row.x) == row.f);
      CHECK(evaluate_constraints(b, row.x) == row.h);
    }
  }
}

TEST_CASE("constraint builders in problem files") {
  const char* text = R"({
    "schema_version": 1,
    "grid": {"width": 2, "height": 2},
    "nodes": [["0", "1"], ["0", "1"], ["1", "0"], ["1", "0"]],
    "edges": [[0, 1, ["0", "1", "1", "0"]], [2, 3, ["0", "1", "1", "0"]]],
    "constraints": [
      {"builder": "size", "target": "2"},
      {"builder": "boundary", "target": "1"},
      {"name": "m", "node_coeffs": "all_ones", "offset": "-1", "target": "0"},
      {"builder": "mean_h", "b_hat": "3/2", "target": "0"}
    ],
    "box": [["-3", "3"], ["0", "3"], ["-3", "3"], ["-3", "3"]]
  })";
  const auto file = parse_problem(text);
  REQUIRE(file.grid.has_value());
  CHECK(file.grid->width == 2);
  const auto& p = file.problem;
  CHECK(p.constraints()[0].name == "size");
  CHECK(p.constraints()[2].name == "m");
  CHECK(evaluate_constraints(p, {1, 1, 0, 0}) == RationalVector{q(2), q(0), q(1), q(0)});
  CHECK(evaluate_constraints(p, {1, 0, 1, 0}) == RationalVector{q(2), q(2), q(1), q(-1)});
  const auto back = parse_problem(serialize_problem(file));
  CHECK(evaluate_constraints(back.problem, {1, 0, 1, 0}) == evaluate_constraints(p, {1, 0, 1, 0}));
}

TEST_CASE("pgm and csv grids") {
  GrayImage img{3, 2, {0, 10, 20, 30, 40, 255}};
  write_pgm(scratch("img.pgm"), img);
  const auto back = read_pgm(scratch("img.pgm"));
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == img.pixels);
  const auto cost = read_cost_map(scratch("img.pgm"));
  CHECK(cost.values == qv({0, 10, 20, 30, 40, 255}));

  write_text_file(scratch("cost.csv"), "1,1/2,0.25\n-3,0,7\n");
  const auto csv = read_cost_map(scratch("cost.csv"));
  CHECK(csv.width == 3);
  CHECK(csv.height == 2);
  CHECK(csv.values == RationalVector{q(1), q(1, 2), q(1, 4), q(-3), q(0), q(7)});
  write_text_file(scratch("ragged.csv"), "1,2\n3\n");
  try {
    read_cost_map(scratch("ragged.csv"));
    FAIL("ragged csv accepted");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  write_text_file(scratch("bad.pgm"), "P2\n1 1\n255\n0\n");
  CHECK_THROWS_AS(read_pgm(scratch("bad.pgm")), ParseError);

  const Labeling x{1, 0, 0, 1, 1, 0};
  const auto mask = mask_image(x, 3, 2);
  for (auto v : mask.pixels) CHECK((v == 0 || v == 255));
  CHECK(mask_labeling(mask) == x);
  CHECK_THROWS(mask_image(x, 2, 2));
}

TEST_CASE("statistics json and set table") {
  const auto p = ref::toy_problem();
  const auto oracle = make_lagrangian_oracle(p, Backend::kBrute);
  const auto a = dual_search(*oracle, p.box());
  const auto b = dual_search(*oracle, p.box());
  const auto doc = nlohmann::json::parse(stats_json(a.report, a.set, true, true));
  CHECK(doc["complete"] == true);
  CHECK(doc["oracle_calls"] == a.report.oracle_calls);
  CHECK(doc["num_vertices"] == a.report.num_vertices);
  CHECK(doc["cut_planes"] == a.report.cut_planes);
  CHECK(doc.contains("wall_time_ms"));
  CHECK(doc["entries"].size() == a.set.size());
  CHECK(stats_json(a.report, a.set, true, false) == stats_json(b.report, b.set, true, false));
  CHECK_FALSE(nlohmann::json::parse(stats_json(a.report, a.set, false, false)).contains("wall_time_ms"));

  const std::string csv = set_table_csv(a.set, p.constraints());
  CHECK(csv.rfind("index,labeling,f,H_diff,H_cut,lambda_1,lambda_2\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(a.set.size() + 1));
}
