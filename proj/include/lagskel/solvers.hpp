#pragma once

// DualSearch (all constrained minimizers reachable from a box of
// multipliers), DualMax (the dual maximum for one target), AdaptSearch (a
// soft-constraint solver built from both) and soft-objective selection.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "lagskel/energy.hpp"
#include "lagskel/errors.hpp"
#include "lagskel/oracle.hpp"
#include "lagskel/skeleton.hpp"

namespace lagskel {

struct CharacteristicEntry {
  Labeling labeling;
  Rational f_value;
  RationalVector h_value;
  RationalVector witness_lambda;
};

/// Minimizers deduplicated by their (f, H) signature, in discovery order.
class CharacteristicSet {
 public:
  /// Returns false (and keeps the earlier entry) if the signature is known.
  bool insert(CharacteristicEntry entry);
  bool contains(const Rational& f_value, const RationalVector& h_value) const;
  const std::vector<CharacteristicEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::vector<CharacteristicEntry> entries_;
};

struct SearchReport {
  std::size_t oracle_calls = 0;
  std::size_t num_vertices = 0;
  std::size_t num_minimizers = 0;
  // Planes cut into the skeleton; oracle_calls == num_vertices + cut_planes.
  std::size_t cut_planes = 0;
  // Final vertices with more than m+1 tight planes and box faces.
  std::size_t degenerate_vertices = 0;
  // Confirming oracle answers whose plane is not stored (ties at a vertex).
  std::size_t tie_minimizers = 0;
  // Cuts whose plane passed through a vertex that existed before the cut.
  std::size_t coincident_cuts = 0;
  double wall_time_ms = 0;

  bool general_position() const { return degenerate_vertices == 0 && tie_minimizers == 0 && coincident_cuts == 0; }
};

struct SearchOptions {
  std::optional<std::size_t> max_oracle_calls;
  // Processes vertices in a seeded random order instead of FIFO.
  std::optional<std::uint64_t> shuffle_seed;
  // Called after every applied cut with the updated skeleton.
  std::function<void(const Skeleton&, const CutReport&)> on_cut;
};

struct SearchResult {
  CharacteristicSet set;
  Skeleton skeleton;
  SearchReport report;
};

/// Thrown when max_oracle_calls runs out; carries what was found so far.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, std::shared_ptr<const SearchResult> partial)
      : Error(what), partial_(std::move(partial)) {}
  bool has_partial() const { return partial_ != nullptr; }
  const SearchResult& partial() const { return *partial_; }

 private:
  std::shared_ptr<const SearchResult> partial_;
};

/// Explores the box until every skeleton vertex is confirmed by the oracle.
/// The returned set holds the minimizers whose planes are facets of the final
/// envelope plus the oracle's answer at every final vertex; it does not depend
/// on the processing order. The box must lie inside the oracle's domain and
/// have 1 to 3 dimensions.
SearchResult dual_search(const Oracle& oracle, const Box& box, const SearchOptions& options = {});

struct DualMaxResult {
  RationalVector lambda;
  OracleResult minimizer;
  Rational value;
  std::vector<Rational> trace;  // z of each processed vertex
  SearchReport report;
};

/// Ascends the induced dual from its highest corner, following the highest
/// vertex of each new facet, until the oracle confirms the current vertex.
DualMaxResult dual_max(const Oracle& oracle, const Box& box, const SearchOptions& options = {});

enum class PenaltyKind { kSquared, kAbsolute };

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::kSquared;
  RationalVector weights;
  RationalVector target;
};

Rational soft_objective(const Rational& f_value, const RationalVector& h_value, const PenaltySpec& penalty);

/// Index of the entry minimizing f + penalty; ties go to the smaller f, then
/// to the lexicographically smaller labeling. Throws std::invalid_argument on
/// an empty set.
std::size_t select_soft(const CharacteristicSet& set, const PenaltySpec& penalty);

struct AdaptResult {
  CharacteristicEntry choice;
  Rational objective;
  // Slack-transformed dual maximum.
  OracleResult slack_minimizer;
  RationalVector b_star;
  // Equality dual maximum for b_star.
  RationalVector lambda_star;
  OracleResult equality_minimizer;
  Box local_box;
  CharacteristicSet local_set;
  SearchReport slack_report, equality_report, local_report;
};

/// Soft-constrained solver: slack dual maximum for the range
/// b_hat - k_minus <= H <= b_hat + k_plus, equality dual maximum at the
/// resulting b*, a local DualSearch on [lambda* - alpha, lambda* + alpha]
/// clipped to the problem box, and finally the best soft objective among the
/// local minimizers and both dual-maximum minimizers.
AdaptResult adapt_search(const LagrangianProblem& problem, const RationalVector& b_hat, const SlackBounds& bounds,
                         const RationalVector& alpha, const PenaltySpec& penalty, Backend backend,
                         const SearchOptions& options = {});

}  // namespace lagskel
