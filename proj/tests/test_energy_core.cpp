#include <random>

#include "doctest.h"
#include "lagskel/energy.hpp"
#include "lagskel/errors.hpp"
#include "reference.hpp"

using namespace lagskel;
using ref::q;
using ref::qv;

TEST_CASE("rationals are exact and canonical") {
  CHECK(parse_rational("0.3") == q(3, 10));
  CHECK(parse_rational("-6/4") == q(-3, 2));
  CHECK(parse_rational("7") == q(7));
  CHECK(to_string(parse_rational("4/6")) == "2/3");
  CHECK(to_fraction_string(q(5)) == "5/1");
  CHECK(make_rational(2, -4) == q(-1, 2));
  CHECK(make_rational(2, -4).get_den() == 2);
  CHECK_THROWS_AS(make_rational(1, 0), std::exception);
  CHECK_THROWS(parse_rational("1.2.3"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(parse_rational_list("1, -1/2,0.25") == RationalVector{q(1), q(-1, 2), q(1, 4)});
}

TEST_CASE("evaluate_energy on the toy energy") {
  const auto p = ref::toy_problem();
  CHECK(evaluate_energy(p.energy(), {1, 0}) == 1);
  CHECK(evaluate_energy(p.energy(), {0, 0}) == 0);
  CHECK_THROWS_AS(evaluate_energy(p.energy(), {1}), DimensionError);
}

TEST_CASE("evaluate_energy matches hand evaluation on a 3-node energy") {
  PairwiseEnergy f({{q(1), q(-2)}, {q(0), q(3, 2)}, {q(-1, 3), q(0)}}, {{0, 2, q(1), q(4), q(5), q(-2)}}, q(7));
  for (std::uint64_t bits = 0; bits < 8; ++bits) {
    const Labeling x = ref::labeling_from_index(bits, 3);
    Rational expected = 7;
    expected += x[0] ? q(-2) : q(1);
    expected += x[1] ? q(3, 2) : q(0);
    expected += x[2] ? q(0) : q(-1, 3);
    const Rational table[4] = {q(1), q(4), q(5), q(-2)};
    expected += table[2 * x[0] + x[2]];
    CHECK(evaluate_energy(f, x) == expected);
  }
}

TEST_CASE("energy validation") {
  CHECK_THROWS_AS(PairwiseEnergy({{0, 0}, {0, 0}}, {{0, 0, 0, 0, 0, 0}}), ValidationError);
  CHECK_THROWS_AS(PairwiseEnergy({{0, 0}, {0, 0}}, {{0, 1, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0}}), ValidationError);
  CHECK_THROWS_AS(PairwiseEnergy({{0, 0}}, {{0, 3, 0, 0, 0, 0}}), ValidationError);
}

TEST_CASE("evaluate_constraints on the toy constraints") {
  const auto p = ref::toy_problem();
  CHECK(evaluate_constraints(p, {1, 0}) == qv({1, 2}));
  CHECK(evaluate_constraints(p, {0, 0}) == qv({0, 0}));
  CHECK(evaluate_constraints(p, {1, 1}) == qv({0, 0}));
  CHECK(evaluate_constraints(p, {0, 1}) == qv({-1, 2}));
}

TEST_CASE("assemble_lagrangian reproduces L exactly") {
  const auto p = ref::toy_problem();
  CHECK(evaluate_energy(assemble_lagrangian(p, qv({-2, -2})), {1, 0}) == -5);
  const auto at_22 = assemble_lagrangian(p, qv({2, 2}));
  CHECK(evaluate_energy(at_22, {1, 1}) == 2);
  CHECK(evaluate_energy(at_22, {1, 0}) == 7);
  const auto at_0 = assemble_lagrangian(p, qv({0, 0}));
  for (std::uint64_t bits = 0; bits < 4; ++bits) {
    const auto x = ref::labeling_from_index(bits, 2);
    CHECK(evaluate_energy(at_0, x) == evaluate_energy(p.energy(), x));
  }
  CHECK_THROWS_AS(assemble_lagrangian(p, qv({3, 0})), DomainError);
  CHECK_THROWS_AS(assemble_lagrangian(p, qv({0})), DimensionError);
}

TEST_CASE("assembled energy equals f + lambda.(H - b) and is affine in lambda") {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto p = ref::random_problem(seed);
    const auto& box = p.box();
    std::uniform_int_distribution<long> pick(0, 12);
    auto sample = [&] {
      RationalVector lambda;
      for (std::size_t i = 0; i < box.size(); ++i)
        lambda.push_back(box.lower()[i] + (box.upper()[i] - box.lower()[i]) * q(pick(rng), 12));
      return lambda;
    };
    const auto la = sample(), lb = sample();
    RationalVector mid(la.size());
    for (std::size_t i = 0; i < la.size(); ++i) mid[i] = (la[i] + lb[i]) / 2;
    const auto ea = assemble_lagrangian(p, la), eb = assemble_lagrangian(p, lb), em = assemble_lagrangian(p, mid);
    for (const auto& row : ref::all_rows(p)) {
      Rational expected = row.f;
      for (std::size_t i = 0; i < la.size(); ++i) expected += la[i] * (row.h[i] - p.target()[i]);
      CHECK(evaluate_energy(ea, row.x) == expected);
      CHECK(evaluate_lagrangian(p, row.x, la) == expected);
      CHECK(evaluate_energy(em, row.x) == (evaluate_energy(ea, row.x) + evaluate_energy(eb, row.x)) / 2);
    }
  }
}

TEST_CASE("is_submodular") {
  CHECK(is_submodular(PairwiseEnergy({{0, 0}, {0, 0}}, {{0, 1, 0, 0, 0, 0}})));
  CHECK_FALSE(is_submodular(PairwiseEnergy({{0, 0}, {0, 0}}, {{0, 1, 1, 0, 0, 1}})));
}

TEST_CASE("submodularity_lambda_bound") {
  ConstraintSpec boundary{"b", {}, q(1), 0};
  SUBCASE("strictly submodular edges give a negative bound") {
    PairwiseEnergy f({{0, 0}, {0, 0}}, {{0, 1, 0, 2, 2, 0}});
    LagrangianProblem p(f, {boundary}, {}, Box::cube(1, q(5)));
    const auto k = submodularity_lambda_bound(p);
    REQUIRE(k[0].has_value());
    CHECK(*k[0] == -2);
  }
  SUBCASE("modular edges give zero") {
    PairwiseEnergy f({{0, 0}, {0, 0}}, {{0, 1, 0, 0, 0, 0}});
    LagrangianProblem p(f, {boundary}, {}, Box::cube(1, q(5)));
    CHECK(*submodularity_lambda_bound(p)[0] == 0);
  }
  SUBCASE("node-only dimensions have no bound") {
    PairwiseEnergy f({{0, 0}, {0, 0}}, {{0, 1, 0, 1, 1, 0}});
    LagrangianProblem p(f, {ConstraintSpec{"s", qv({1, 1}), 0, 0}}, {}, Box::cube(1, q(5)));
    CHECK_FALSE(submodularity_lambda_bound(p)[0].has_value());
  }
  SUBCASE("negative edge coefficient is rejected") {
    PairwiseEnergy f({{0, 0}, {0, 0}}, {{0, 1, 0, 1, 1, 0}});
    LagrangianProblem p(f, {ConstraintSpec{"b", {}, q(-1), 0}}, {}, Box::cube(1, q(5)));
    CHECK_THROWS_AS(submodularity_lambda_bound(p), ConfigurationError);
  }
  SUBCASE("the bound is tight on a random grid energy") {
    std::mt19937_64 rng(3);
    std::vector<UnaryTerm> unary(9, UnaryTerm{0, 0});
    std::vector<PairwiseTerm> edges;
    std::uniform_int_distribution<long> w(0, 9);
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        if (c + 1 < 3) edges.push_back({r * 3 + c, r * 3 + c + 1, 0, q(w(rng), 2), q(w(rng), 3), 0});
        if (r + 1 < 3) edges.push_back({r * 3 + c, r * 3 + c + 3, 0, q(w(rng), 2), q(w(rng), 3), 0});
      }
    PairwiseEnergy f(unary, edges);
    const Rational weight = q(3, 2);
    LagrangianProblem p(f, {ConstraintSpec{"s", RationalVector(9, q(1)), 0, 0}, ConstraintSpec{"b", {}, weight, 0}}, {},
                        Box::cube(2, q(100)));
    const Rational k = *submodularity_lambda_bound(p)[1];
    Rational expected = -1000;
    for (const auto& e : edges) expected = std::max<Rational>(expected, (e.t00 + e.t11 - e.t01 - e.t10) / (2 * weight));
    CHECK(k == expected);
    CHECK(is_submodular(assemble_lagrangian(p, RationalVector{q(0), k})));
    CHECK_FALSE(is_submodular(assemble_lagrangian(p, RationalVector{q(0), k - 1})));
    CHECK_FALSE(is_submodular(assemble_lagrangian(p, RationalVector{q(0), k - q(1, 1000)})));
  }
}

TEST_CASE("box and problem validation") {
  CHECK_THROWS(Box(qv({1}), qv({0})));
  CHECK_FALSE(Box(qv({1}), qv({1})).full_dimensional());
  CHECK_THROWS(Box(qv({0, 0}), qv({1})));
  const auto corners = Box::cube(3, q(1)).corners();
  CHECK(corners.size() == 8);
  PairwiseEnergy f({{0, 0}}, {});
  CHECK_THROWS(LagrangianProblem(f, {}, {}, Box::cube(1, q(1))));
  CHECK_THROWS(LagrangianProblem(f, {ConstraintSpec{"z", {}, 0, 0}}, {}, Box::cube(1, q(1))));
  CHECK_THROWS(LagrangianProblem(f, {ConstraintSpec{"s", qv({1}), 0, 0}}, qv({1, 2}), Box::cube(1, q(1))));
  CHECK_THROWS(LagrangianProblem(f, {ConstraintSpec{"s", qv({1}), 0, 0}}, {}, Box(qv({1}), qv({1}))));
}
