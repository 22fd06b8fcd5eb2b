#pragma once

// Exhaustive cross-checks of the search algorithms on small instances:
// per-constraint-value minima, the envelope skeleton rebuilt from scratch,
// and a seeded generator of random submodular instances.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lagskel/energy.hpp"
#include "lagskel/oracle.hpp"
#include "lagskel/skeleton.hpp"
#include "lagskel/solvers.hpp"

namespace lagskel {

inline constexpr std::size_t kExhaustiveLimit = 20;

/// Visits every labeling in Gray-code order with incrementally updated f
/// and H. Throws CapacityError above kExhaustiveLimit variables.
void for_each_labeling(const LagrangianProblem& problem,
                       const std::function<void(const Labeling&, const Rational&, const RationalVector&)>& visit);

struct ClassMinimum {
  Rational f_value;
  Labeling labeling;  // lexicographically smallest minimizer
};

/// min f over {x : H(x) = h} for every attained h.
using ClassTable = std::map<RationalVector, ClassMinimum>;
ClassTable exhaustive_classes(const LagrangianProblem& problem);

/// g(lambda) = min over classes of f + lambda . (h - b).
Rational dual_from_classes(const ClassTable& table, const RationalVector& target, std::span<const Rational> lambda);

/// Skeleton geometry as exact point sets.
struct SkeletonShape {
  std::set<DualPoint> vertices;
  std::set<std::pair<DualPoint, DualPoint>> edges;  // (smaller, larger)
  std::set<DualPoint> rays;
  bool duplicate_vertices = false;
  friend bool operator==(const SkeletonShape& a, const SkeletonShape& b) {
    return a.vertices == b.vertices && a.edges == b.edges && a.rays == b.rays &&
           a.duplicate_vertices == b.duplicate_vertices;
  }
};

SkeletonShape shape_of(const Skeleton& skeleton);

/// Envelope skeleton of the planes over the box by exhaustive vertex
/// enumeration over all (m+1)-subsets of planes and box faces.
SkeletonShape envelope_from_scratch(const Box& box, const std::vector<AffineFunction>& planes);

/// Replays the skeleton's planes one cut at a time and compares each state
/// with envelope_from_scratch. Returns the first failing step, if any.
std::optional<std::size_t> first_skeleton_mismatch(const Skeleton& skeleton);

struct CheckOutcome {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct SuiteOptions {
  std::size_t grid_steps = 20;  // lambda grid has grid_steps + 1 points per axis
  std::size_t max_targets = 8;  // targets tried for weak duality
};

/// Characteristic-set optimality, completeness on a lambda grid, skeleton
/// equality after every cut, the oracle-call count, and weak duality.
std::vector<CheckOutcome> run_invariant_suite(const LagrangianProblem& problem, Backend backend,
                                              const SuiteOptions& options = {});

struct RandomInstanceOptions {
  std::size_t min_nodes = 2;
  std::size_t max_nodes = 10;
  std::size_t min_constraints = 1;
  std::size_t max_constraints = 2;
  double edge_probability = 0.4;
  // At most one constraint gets a disagreement coefficient.
  double edge_constraint_probability = 0.3;
};

/// Seeded random submodular instance with a box that keeps the Lagrangian
/// submodular.
LagrangianProblem random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

}  // namespace lagskel
