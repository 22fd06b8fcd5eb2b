#pragma once

// Binary pairwise energies, linear/edge-disagreement constraints and the
// Lagrangian L(x, lambda) = f(x) + lambda . (H(x) - b).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagskel/rational.hpp"

namespace lagskel {

/// One entry per variable, each 0 or 1.
using Labeling = std::vector<std::uint8_t>;

std::string to_bitstring(const Labeling& x);

struct UnaryTerm {
  Rational zero;  // cost of label 0
  Rational one;   // cost of label 1
};

struct PairwiseTerm {
  std::size_t u = 0;
  std::size_t v = 0;
  Rational t00, t01, t10, t11;

  const Rational& at(std::uint8_t xu, std::uint8_t xv) const;
};

/// f(x) = constant + sum_u unary_u(x_u) + sum_(u,v) pairwise_uv(x_u, x_v).
class PairwiseEnergy {
 public:
  PairwiseEnergy() = default;
  /// Throws ValidationError on self loops, duplicate undirected edges or
  /// out-of-range endpoints.
  PairwiseEnergy(std::vector<UnaryTerm> unary, std::vector<PairwiseTerm> edges, Rational constant = 0);

  std::size_t size() const { return unary_.size(); }
  const std::vector<UnaryTerm>& unary() const { return unary_; }
  const std::vector<PairwiseTerm>& edges() const { return edges_; }
  const Rational& constant() const { return constant_; }

 private:
  std::vector<UnaryTerm> unary_;
  std::vector<PairwiseTerm> edges_;
  Rational constant_ = 0;
};

Rational evaluate_energy(const PairwiseEnergy& f, const Labeling& x);

/// True iff every edge table satisfies t01 + t10 >= t00 + t11.
bool is_submodular(const PairwiseEnergy& f);

/// h(x) = sum_i node_coeffs[i] * x_i + edge_coeff * sum_(i,j) |x_i - x_j| + offset,
/// where the edge sum runs over the edges of the problem's energy.
/// An empty node_coeffs vector means all zero.
struct ConstraintSpec {
  std::string name;
  RationalVector node_coeffs;
  Rational edge_coeff = 0;
  Rational offset = 0;
};

/// Axis-aligned box prod_i [lower_i, upper_i].
class Box {
 public:
  Box() = default;
  /// Requires lower_i <= upper_i.
  Box(RationalVector lower, RationalVector upper);
  static Box cube(std::size_t dims, const Rational& half_width);

  std::size_t size() const { return lower_.size(); }
  const RationalVector& lower() const { return lower_; }
  const RationalVector& upper() const { return upper_; }
  bool contains(std::span<const Rational> lambda) const;
  bool contains(const Box& other) const;
  bool full_dimensional() const;

  /// Corners in lexicographic order: dimension 0 varies slowest, lower before upper.
  std::vector<RationalVector> corners() const;
  RationalVector corner(std::size_t index) const;

 private:
  RationalVector lower_, upper_;
};

/// An affine function of lambda: constant + slope . lambda.
struct AffineFunction {
  Rational constant;
  RationalVector slope;

  Rational at(std::span<const Rational> lambda) const;
  friend bool operator==(const AffineFunction&, const AffineFunction&) = default;
  friend bool operator<(const AffineFunction& a, const AffineFunction& b) {
    if (a.slope != b.slope) return a.slope < b.slope;
    return a.constant < b.constant;
  }
};

class LagrangianProblem {
 public:
  LagrangianProblem() = default;
  /// Empty target means b = 0. Throws ValidationError / DimensionError.
  LagrangianProblem(PairwiseEnergy f, std::vector<ConstraintSpec> constraints, RationalVector target, Box box);

  const PairwiseEnergy& energy() const { return f_; }
  const std::vector<ConstraintSpec>& constraints() const { return constraints_; }
  const RationalVector& target() const { return target_; }
  const Box& box() const { return box_; }
  std::size_t num_constraints() const { return constraints_.size(); }
  std::size_t num_variables() const { return f_.size(); }

  LagrangianProblem with_target(RationalVector target) const;
  LagrangianProblem with_box(Box box) const;

 private:
  PairwiseEnergy f_;
  std::vector<ConstraintSpec> constraints_;
  RationalVector target_;
  Box box_;
};

/// H(x) = (h_1(x), ..., h_m(x)).
RationalVector evaluate_constraints(const LagrangianProblem& problem, const Labeling& x);

/// L(x, lambda) evaluated directly from f and H.
Rational evaluate_lagrangian(const LagrangianProblem& problem, const Labeling& x, std::span<const Rational> lambda);

/// Folds lambda into a single pairwise energy whose value at every x is
/// L(x, lambda). Throws DomainError if lambda is outside the problem box.
PairwiseEnergy assemble_lagrangian(const LagrangianProblem& problem, std::span<const Rational> lambda);

/// Per constraint with edge_coeff w > 0: the smallest K such that any
/// lambda_i >= K keeps every edge table submodular when only that
/// dimension carries disagreement weight. nullopt for dimensions without
/// an edge coefficient (or without edges). Throws ConfigurationError for
/// a negative edge coefficient.
std::vector<std::optional<Rational>> submodularity_lambda_bound(const LagrangianProblem& problem);

}  // namespace lagskel
