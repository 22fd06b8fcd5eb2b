#pragma once

// Brute-force reference computations used as test oracles. Nothing here
// calls into the library's search, hull or verification code.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "lagskel/energy.hpp"
#include "lagskel/skeleton.hpp"

namespace ref {

using lagskel::Labeling;
using lagskel::Rational;
using lagskel::RationalVector;

Rational q(long num, long den = 1);
RationalVector qv(std::initializer_list<long> values);

Labeling labeling_from_index(std::uint64_t bits, std::size_t n);
Rational energy_at(const lagskel::PairwiseEnergy& f, const Labeling& x);
RationalVector constraints_at(const lagskel::LagrangianProblem& p, const Labeling& x);

struct Row {
  Labeling x;
  Rational f;
  RationalVector h;
};

std::vector<Row> all_rows(const lagskel::LagrangianProblem& p);

Rational min_energy(const lagskel::PairwiseEnergy& f);

/// min_x f(x) + lambda . (H(x) - b).
Rational dual_at(const std::vector<Row>& rows, const RationalVector& target, const RationalVector& lambda);

/// min f over rows with lo <= H <= hi componentwise.
std::optional<Rational> range_min(const std::vector<Row>& rows, const RationalVector& lo, const RationalVector& hi);

/// All attained H values with the smallest f for each.
std::vector<std::pair<RationalVector, Rational>> value_classes(const std::vector<Row>& rows);

/// (g_1 + 1)^m evenly spaced lambdas over the box.
std::vector<RationalVector> lambda_grid(const lagskel::Box& box, std::size_t steps);

struct Shape {
  std::set<lagskel::DualPoint> vertices;
  std::set<std::pair<lagskel::DualPoint, lagskel::DualPoint>> edges;
  std::set<lagskel::DualPoint> rays;
  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Skeleton of {(lambda, z) : lambda in box, z <= min_k plane_k(lambda)}
/// found by solving every square subsystem and testing adjacency through
/// tight-set containment on the polytope closed by a floor below all
/// vertices.
Shape envelope(const lagskel::Box& box, const std::vector<lagskel::AffineFunction>& planes);

Shape shape_from_skeleton(const lagskel::Skeleton& s);

/// Hull edges of a point set by facet enumeration, as sorted index pairs
/// over first occurrences of distinct points.
std::set<std::pair<std::size_t, std::size_t>> hull_edges(const std::vector<RationalVector>& points);

std::optional<RationalVector> solve(std::vector<RationalVector> a, RationalVector b);
std::size_t rank(std::vector<RationalVector> rows);

/// f = x1 + x2, h1 = x1 - x2, h2 = 2|x1 - x2| on the box [-2, 2]^2.
lagskel::LagrangianProblem toy_problem(RationalVector target = {});

/// Submodular pairwise energy with small fractional coefficients.
lagskel::PairwiseEnergy random_energy(std::mt19937_64& rng, std::size_t n, double edge_probability);

struct ProblemOptions {
  std::size_t min_nodes = 2, max_nodes = 10;
  std::size_t min_constraints = 1, max_constraints = 2;
  long box_half_width = 6;
};

/// Random problem with node-linear constraints and at most one disagreement
/// constraint, in a box that keeps every Lagrangian submodular.
lagskel::LagrangianProblem random_problem(std::uint64_t seed, const ProblemOptions& options = {});

}  // namespace ref
