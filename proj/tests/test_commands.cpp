#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "lagskel/commands.hpp"
#include "lagskel/domains.hpp"
#include "lagskel/io.hpp"
#include "json.hpp"
#include "reference.hpp"

using namespace lagskel;
using ref::q;
using ref::qv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path toy_path() {
  const char* d = std::getenv("LAGSKEL_TEST_DATA");
  return (d ? fs::path(d) : fs::path("tests/data")) / "toy.json";
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "lagskel_test_commands";
  fs::create_directories(dir);
  return dir / name;
}

void write_costs(const fs::path& path, const RationalVector& values, std::size_t width) {
  std::ostringstream text;
  for (std::size_t i = 0; i < values.size(); ++i)
    text << to_string(values[i]) << ((i + 1) % width == 0 ? "\n" : ",");
  write_text_file(path, text.str());
}

struct Run {
  int code;
  std::string out, err;
};

template <class Cmd, class Fn>
Run run(Fn fn, const Cmd& cmd) {
  std::ostringstream out, err;
  const int code = fn(cmd, out, err);
  return {code, out.str(), err.str()};
}

struct BlobFiles {
  SyntheticImage image;
  SegmentCommand cmd;
};

BlobFiles blob_files(std::size_t size, std::uint64_t seed, const std::string& tag) {
  BlobFiles b{synthetic_blob(size, size, seed), {}};
  write_costs(scratch(tag + "_c0.csv"), b.image.cost0, size);
  write_costs(scratch(tag + "_c1.csv"), b.image.cost1, size);
  write_pgm(scratch(tag + "_gt.pgm"), mask_image(b.image.truth, size, size));
  b.cmd.cost0 = scratch(tag + "_c0.csv");
  b.cmd.cost1 = scratch(tag + "_c1.csv");
  b.cmd.ground_truth = scratch(tag + "_gt.pgm");
  b.cmd.beta = 20;
  return b;
}

}  // namespace

TEST_CASE("search on the toy problem") {
  SearchCommand cmd;
  cmd.problem = toy_path();
  cmd.backend = Backend::kBrute;
  cmd.out_stats = scratch("toy_stats.json");
  cmd.out_set = scratch("toy_set.csv");
  cmd.out_skeleton = scratch("toy_skeleton.txt");
  const auto r = run(cmd_search, cmd);
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("complete ", 0) == 0);
  const auto stats = json::parse(read_text_file(*cmd.out_stats));
  CHECK(stats["entries"].size() == 3);
  CHECK(stats["oracle_calls"] == stats["num_vertices"].get<std::size_t>() + stats["cut_planes"].get<std::size_t>());
  CHECK(read_text_file(*cmd.out_skeleton).find("e ") != std::string::npos);

  cmd.max_calls = 3;
  const auto partial = run(cmd_search, cmd);
  CHECK(partial.code == kExitBudget);
  CHECK(json::parse(read_text_file(*cmd.out_stats))["complete"] == false);

  cmd.max_calls.reset();
  cmd.backend = Backend::kMincut;
  CHECK(run(cmd_search, cmd).code == kExitOracleConfig);
}

TEST_CASE("input errors map to exit codes") {
  json doc = json::parse(read_text_file(toy_path()));
  doc["constraints"] = json::array();
  write_text_file(scratch("empty.json"), doc.dump());
  SearchCommand cmd;
  cmd.problem = scratch("empty.json");
  cmd.backend = Backend::kBrute;
  const auto r = run(cmd_search, cmd);
  CHECK(r.code == kExitInvalidInput);
  CHECK_FALSE(r.err.empty());

  cmd.problem = scratch("does_not_exist.json");
  CHECK(run(cmd_search, cmd).code == kExitInvalidInput);

  doc = json::parse(read_text_file(toy_path()));
  doc["edges"][0][2] = {"0", "5", "-5", "9"};
  doc["constraints"][1]["edge_coeff"] = "0";
  doc["constraints"][1]["node_coeffs"] = {"1", "1"};
  write_text_file(scratch("nonsub.json"), doc.dump());
  cmd.problem = scratch("nonsub.json");
  cmd.backend = Backend::kMincut;
  CHECK(run(cmd_search, cmd).code == kExitOracleConfig);
  BruteCheckCommand check;
  check.problem = scratch("nonsub.json");
  CHECK(run(cmd_brute_check, check).code == kExitOracleConfig);
}

TEST_CASE("max and adapt on the toy problem") {
  MaxCommand m;
  m.problem = toy_path();
  m.backend = Backend::kBrute;
  m.b = qv({1, 2});
  const auto r = run(cmd_max, m);
  REQUIRE(r.code == kExitOk);
  const auto doc = json::parse(r.out);
  CHECK(doc["dual_value"] == "1");
  CHECK(doc["labeling"] == "10");

  m.b.reset();
  m.b_range = parse_ranges("1..1,2..3");
  const auto ranged = json::parse(run(cmd_max, m).out);
  CHECK(ranged.contains("b_star"));
  CHECK(parse_rational(ranged["dual_value"].get<std::string>()) <= 1);
  m.b = qv({1, 2});
  CHECK(run(cmd_max, m).code == kExitInvalidInput);
  CHECK_THROWS(parse_ranges("1..x"));

  AdaptCommand a;
  a.problem = toy_path();
  a.backend = Backend::kBrute;
  a.b_hat = qv({1, 2});
  a.gap_minus = qv({0, 0});
  a.gap_plus = qv({0, 0});
  a.alpha = qv({1, 1});
  a.eta = qv({1, 1});
  const auto ad = run(cmd_adapt, a);
  REQUIRE(ad.code == kExitOk);
  CHECK(json::parse(ad.out)["objective"] == "1");
  a.eta = qv({1});
  CHECK(run(cmd_adapt, a).code == kExitInvalidInput);
}

TEST_CASE("brute-check reports every invariant") {
  BruteCheckCommand cmd;
  cmd.problem = toy_path();
  cmd.backend = Backend::kBrute;
  const auto r = run(cmd_brute_check, cmd);
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("PASS") != std::string::npos);
  BruteCheckCommand random;
  random.random_count = 15;
  random.seed = 4;
  const auto rr = run(cmd_brute_check, random);
  CHECK(rr.code == kExitOk);
  CHECK(rr.out.find("all 15 instances passed") != std::string::npos);
}

TEST_CASE("segment") {
  auto b = blob_files(8, 2, "seg");
  SUBCASE("unconstrained") {
    b.cmd.constraints = "none";
    const auto r = run(cmd_segment, b.cmd);
    REQUIRE(r.code == kExitOk);
    const auto doc = json::parse(r.out);
    CHECK(doc["width"] == 8);
    CHECK(doc.contains("pixel_error"));
  }
  SUBCASE("size equality from the ground truth") {
    b.cmd.constraints = "size";
    b.cmd.mode = SegmentMode::kSearch;
    b.cmd.out_mask = scratch("seg_mask.pgm");
    const auto r = run(cmd_segment, b.cmd);
    REQUIRE(r.code == kExitOk);
    const auto mask = read_pgm(*b.cmd.out_mask);
    CHECK(mask.width == 8);
    for (auto v : mask.pixels) CHECK((v == 0 || v == 255));
  }
  SUBCASE("size and boundary with explicit targets") {
    b.cmd.constraints = "size,boundary";
    b.cmd.ground_truth.reset();
    b.cmd.targets = qv({20, 16});
    b.cmd.mode = SegmentMode::kAdapt;
    b.cmd.gap = q(1, 10);
    const auto r = run(cmd_segment, b.cmd);
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["mode"] == "adapt");
  }
  SUBCASE("errors") {
    write_costs(scratch("seg_small.csv"), RationalVector(4, q(1)), 2);
    b.cmd.cost1 = scratch("seg_small.csv");
    CHECK(run(cmd_segment, b.cmd).code == kExitInvalidInput);
    b = blob_files(8, 2, "seg");
    b.cmd.constraints = "mean_v";
    b.cmd.ground_truth.reset();
    b.cmd.targets = qv({0});
    CHECK(run(cmd_segment, b.cmd).code == kExitInvalidInput);
    b.cmd.constraints = "area";
    CHECK(run(cmd_segment, b.cmd).code == kExitInvalidInput);
  }
}

TEST_CASE("size and boundary on a 10x10 grid give a rich characteristic set") {
  auto b = blob_files(10, 7, "rich");
  b.cmd.constraints = "size,boundary";
  b.cmd.mode = SegmentMode::kSearch;
  const auto r = run(cmd_segment, b.cmd);
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["num_minimizers"].get<std::size_t>() >= 10);
}
