#include <map>
#include <random>

#include "doctest.h"
#include "lagskel/errors.hpp"
#include "lagskel/hull.hpp"
#include "lagskel/skeleton.hpp"
#include "reference.hpp"

using namespace lagskel;
using ref::q;
using ref::qv;

namespace {

Hyperplane plane(Rational constant, RationalVector slope) { return {{std::move(constant), std::move(slope)}, {}}; }

DualPoint pt(RationalVector lambda, Rational z) { return {std::move(lambda), std::move(z)}; }

std::set<DualPoint> vertex_set(const Skeleton& s) { return ref::shape_from_skeleton(s).vertices; }

std::vector<AffineFunction> forms(const Skeleton& s) {
  std::vector<AffineFunction> out;
  for (const auto& h : s.hyperplanes()) out.push_back(h.form);
  return out;
}

}  // namespace

TEST_CASE("toy skeleton initialisation and first cut") {
  Skeleton s(Box::cube(2, q(2)), plane(q(1), qv({1, 2})));
  CHECK(vertex_set(s) == std::set<DualPoint>{pt(qv({-2, -2}), q(-5)), pt(qv({-2, 2}), q(3)), pt(qv({2, -2}), q(-1)),
                                             pt(qv({2, 2}), q(7))});
  CHECK(s.edges().size() == 8);
  CHECK(s.hyperplanes().size() == 1);

  std::map<std::size_t, DualPoint> before;
  for (auto id : s.vertex_ids()) before.emplace(id, s.vertex(id).point);
  const auto report = s.cut(plane(q(0), qv({0, 0})));
  CHECK(report.applied);
  std::set<DualPoint> removed;
  for (auto id : report.removed) {
    CHECK_FALSE(s.alive(id));
    removed.insert(before.at(id));
  }
  CHECK(removed == std::set<DualPoint>{pt(qv({-2, 2}), q(3)), pt(qv({2, 2}), q(7))});
  std::set<DualPoint> added;
  for (auto id : report.added) added.insert(s.vertex(id).point);
  CHECK(added == std::set<DualPoint>{pt(RationalVector{q(-2), q(1, 2)}, q(0)), pt(RationalVector{q(2), q(-3, 2)}, q(0)),
                                     pt(qv({-2, 2}), q(0)), pt(qv({2, 2}), q(0))});
  CHECK(ref::shape_from_skeleton(s) == ref::envelope(s.box(), forms(s)));
  CHECK(s.envelope_value(qv({-2, -2})) == -5);
  CHECK(s.envelope_value(qv({0, 0})) == 0);
  CHECK_THROWS_AS(s.envelope_value(qv({3, 0})), DomainError);
}

TEST_CASE("initial skeleton combinatorics") {
  Skeleton line(Box(qv({-1}), qv({1})), plane(q(0), qv({0})));
  CHECK(vertex_set(line) == std::set<DualPoint>{pt(qv({-1}), q(0)), pt(qv({1}), q(0))});
  const auto line_shape = ref::shape_from_skeleton(line);
  CHECK(line_shape.edges.size() == 1);
  CHECK(line_shape.rays.size() == 2);

  Skeleton cube(Box::cube(3, q(1)), plane(q(0), qv({1, 2, 3})));
  const auto cube_shape = ref::shape_from_skeleton(cube);
  CHECK(cube_shape.vertices.size() == 8);
  CHECK(cube_shape.edges.size() == 12);
  CHECK(cube_shape.rays.size() == 8);
  CHECK(cube_shape == ref::envelope(cube.box(), forms(cube)));
}

TEST_CASE("cut no-ops") {
  Skeleton s(Box::cube(2, q(2)), plane(q(1), qv({1, 2})));
  s.cut(plane(q(0), qv({0, 0})));
  const std::string before = s.dump();
  CHECK_FALSE(s.cut(plane(q(0), qv({0, 0}))).applied);
  CHECK_FALSE(s.cut(plane(q(100), qv({0, 0}))).applied);
  CHECK(s.dump() == before);
  CHECK(s.hyperplanes().size() == 2);
}

TEST_CASE("a plane below every vertex replaces the whole envelope") {
  Skeleton s(Box::cube(1, q(1)), plane(q(0), qv({1})));
  CHECK(s.cut(plane(q(-10), qv({0}))).applied);
  CHECK(vertex_set(s) == std::set<DualPoint>{pt(qv({-1}), q(-10)), pt(qv({1}), q(-10))});
}

TEST_CASE("degenerate cut through an existing vertex keeps it") {
  Skeleton s(Box::cube(1, q(2)), plane(q(0), qv({1})));
  const auto r = s.cut(plane(q(-2), qv({0})));
  CHECK(r.applied);
  REQUIRE(r.on_plane.size() == 1);
  CHECK(s.vertex(r.on_plane[0]).point == pt(qv({-2}), q(-2)));
  CHECK(r.added.size() == 1);
  CHECK(ref::shape_from_skeleton(s) == ref::envelope(s.box(), forms(s)));
}

TEST_CASE("dump format") {
  Skeleton s(Box::cube(1, q(1)), plane(q(1, 2), qv({1})));
  s.confirm(s.vertex_ids()[0]);
  const std::string dump = s.dump();
  CHECK(dump.find("v 0 -1/1 -1/2 1\n") != std::string::npos);
  CHECK(dump.find("v 1 1/1 3/2 0\n") != std::string::npos);
  CHECK(dump.find("e 0 1\n") != std::string::npos);
  CHECK(dump.find("e 0 RAY\n") != std::string::npos);
  CHECK(dump.find("e 1 RAY\n") != std::string::npos);
}

TEST_CASE("incremental skeleton matches the envelope after random cuts") {
  std::mt19937_64 rng(77);
  for (int run = 0; run < 30; ++run) {
    const std::size_t m = 1 + run % 3;
    std::uniform_int_distribution<long> coeff(-4, 4), den(1, 3);
    auto random_plane = [&] {
      RationalVector slope;
      for (std::size_t i = 0; i < m; ++i) slope.push_back(q(coeff(rng), den(rng)));
      return plane(q(coeff(rng), den(rng)), slope);
    };
    Skeleton s(Box::cube(m, q(3)), random_plane());
    const int cuts = m == 3 ? 8 : 12;
    for (int k = 0; k < cuts; ++k) {
      s.cut(random_plane());
      const auto shape = ref::shape_from_skeleton(s);
      REQUIRE(shape == ref::envelope(s.box(), forms(s)));
      for (auto id : s.vertex_ids())
        for (const auto& h : s.hyperplanes()) CHECK(s.vertex(id).point.z <= h.form.at(s.vertex(id).point.lambda));
    }
  }
}

TEST_CASE("skeleton vertices are not proper convex combinations and the envelope is concave") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long> coeff(-4, 4);
  Skeleton s(Box::cube(2, q(2)), plane(q(coeff(rng)), qv({coeff(rng), coeff(rng)})));
  for (int k = 0; k < 8; ++k) s.cut(plane(q(coeff(rng)), RationalVector{q(coeff(rng)), q(coeff(rng))}));
  const auto ids = s.vertex_ids();
  for (auto a : ids)
    for (auto b : ids) {
      if (a == b) continue;
      const auto& u = s.vertex(a).point;
      const auto& w = s.vertex(b).point;
      for (int t = 1; t < 4; ++t) {
        const Rational tt = q(t, 4);
        RationalVector mid(2);
        for (int i = 0; i < 2; ++i) mid[i] = tt * u.lambda[i] + (1 - tt) * w.lambda[i];
        const Rational zmid = tt * u.z + (1 - tt) * w.z;
        CHECK(s.envelope_value(mid) >= zmid);
        for (auto c : ids)
          if (c != a && c != b) CHECK_FALSE(s.vertex(c).point == pt(mid, zmid));
      }
    }
}

TEST_CASE("conv_edge") {
  const std::vector<DualPoint> two{pt(qv({0, 0}), q(0)), pt(qv({1, 1}), q(0))};
  CHECK(conv_edge(two).size() == 1);
  const std::vector<DualPoint> square{pt(qv({0, 0}), q(1)), pt(qv({2, 0}), q(1)), pt(qv({2, 2}), q(1)),
                                      pt(qv({0, 2}), q(1)), pt(qv({1, 1}), q(1))};
  const auto edges = conv_edge(square);
  CHECK(edges.size() == 4);
  for (const auto& e : edges) {
    CHECK(e.from != 4);
    CHECK(e.to != 4);
  }
  const std::vector<DualPoint> single{pt(qv({0, 0}), q(0)), pt(qv({0, 0}), q(0))};
  CHECK(conv_edge(single).empty());
  const std::vector<DualPoint> four_d{pt(qv({0, 0, 0, 0}), q(0)), pt(qv({1, 0, 0, 0}), q(0))};
  CHECK_THROWS_AS(conv_edge(four_d), UnsupportedDimensionError);
}

TEST_CASE("hull_edges matches facet enumeration") {
  std::mt19937_64 rng(19);
  std::uniform_int_distribution<long> c(-3, 3);
  for (int run = 0; run < 120; ++run) {
    const std::size_t d = 1 + run % 3;
    const std::size_t count = 2 + run % 9;
    std::vector<RationalVector> points;
    for (std::size_t i = 0; i < count; ++i) {
      RationalVector p;
      for (std::size_t k = 0; k < d; ++k) p.push_back(q(c(rng)));
      points.push_back(p);
    }
    std::set<std::pair<std::size_t, std::size_t>> got;
    for (const auto& [a, b] : hull_edges(points)) got.insert({a, b});
    CHECK(got == ref::hull_edges(points));
  }
  const std::vector<RationalVector> coplanar{qv({0, 0, 1}), qv({1, 0, 1}), qv({0, 1, 1}), qv({1, 1, 1})};
  CHECK(hull_edges(coplanar).size() == 4);
  CHECK(affine_dimension(coplanar) == 2);
  CHECK(matrix_rank({qv({1, 2}), qv({2, 4})}) == 1);
}
