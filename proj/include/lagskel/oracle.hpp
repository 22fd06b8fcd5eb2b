#pragma once

// Oracles O(lambda) = argmin_x L(x, lambda): st-mincut for submodular
// pairwise energies, exhaustive enumeration for verification, and a
// shortest-path oracle for delay-constrained routing.

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "lagskel/energy.hpp"

namespace lagskel {

struct MinimizeResult {
  Labeling minimizer;
  Rational value;
};

/// Exact minimizer of a submodular energy via st-mincut. Ties resolve to the
/// inclusion-minimal set of ones (source-reachable side of the residual
/// graph). Throws SubmodularityError on a non-submodular input.
MinimizeResult mincut_minimize(const PairwiseEnergy& f);

/// Exhaustive minimizer, n <= 24. Ties resolve to the lexicographically
/// smallest labeling (x_0 most significant). Throws CapacityError.
MinimizeResult brute_minimize(const PairwiseEnergy& f);

inline constexpr std::size_t kBruteForceLimit = 24;

/// One oracle answer. The hyperplane of the minimizer in (lambda, z) space
/// is z = f_value + plane_offset + slope . lambda, and value is that plane
/// evaluated at the queried lambda. slope is H(x) - b, plus y* for
/// slack-wrapped oracles; plane_offset is nonzero only for restricted ones.
struct OracleResult {
  Labeling minimizer;
  Rational value;
  Rational f_value;
  RationalVector h_value;
  RationalVector slack;  // y*(lambda); all zero unless slack-wrapped
  RationalVector slope;
  Rational plane_offset = 0;

  AffineFunction plane() const { return {f_value + plane_offset, slope}; }
  friend bool operator==(const OracleResult&, const OracleResult&) = default;
};

class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::size_t dimension() const = 0;
  /// Multipliers outside this box are rejected with DomainError.
  virtual const Box& domain() const = 0;
  virtual OracleResult call(std::span<const Rational> lambda) const = 0;
};

using OraclePtr = std::shared_ptr<const Oracle>;

enum class Backend { kMincut, kBrute };

/// Oracle for a LagrangianProblem. For the mincut backend the box must keep
/// L(., lambda) submodular everywhere; otherwise ConfigurationError names the
/// offending dimension and its bound.
OraclePtr make_lagrangian_oracle(const LagrangianProblem& problem, Backend backend);

/// Directed graph with a length and a delay vector per edge.
struct PathGraph {
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    Rational length;
    RationalVector delay;
  };
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
};

/// Oracle over s-t paths; x is the edge-indicator vector, f = total length,
/// H = total delay, slope = H - target. Throws InfeasibleError when t is not
/// reachable and ConfigurationError when some edge weight
/// length + lambda . delay can be negative inside the box.
OraclePtr make_shortest_path_oracle(PathGraph graph, std::size_t source, std::size_t target, RationalVector delay_target,
                                    Box box);

/// Maximum-profit closure as a submodular energy. prerequisites holds pairs
/// (i, j) meaning "selecting i requires selecting j".
PairwiseEnergy project_selection_energy(std::span<const Rational> profits,
                                        std::span<const std::pair<std::size_t, std::size_t>> prerequisites);

/// Node-linear constraint counting selected members of a group.
ConstraintSpec group_count_constraint(std::string name, std::span<const std::size_t> members, std::size_t num_projects);

/// Slack bounds for two-sided constraints b - k_minus <= H(x) <= b + k_plus.
struct SlackBounds {
  RationalVector k_minus;
  RationalVector k_plus;
};

/// Wraps an oracle whose target is b into one for the slack-transformed dual
/// g^(lambda) = min_x f(x) + lambda . (H(x) + y*(lambda) - (b + k_plus)),
/// with y*_i = k_minus_i + k_plus_i when lambda_i < 0 and 0 otherwise. The
/// result reports y* in OracleResult::slack.
OraclePtr slack_wrap(OraclePtr inner, SlackBounds bounds);

/// Restricts an oracle to the dimensions flagged free; the others stay fixed
/// at the given values. Slopes and results are reported in the free
/// dimensions only, with the fixed part reported as plane_offset.
OraclePtr restrict_oracle(OraclePtr inner, std::vector<bool> free_dims, RationalVector fixed_point, Box free_box);

}  // namespace lagskel
