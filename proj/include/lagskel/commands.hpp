#pragma once

// The lagskel command-line operations as plain functions so they can be
// driven from tests. Each returns a process exit code.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lagskel/oracle.hpp"
#include "lagskel/solvers.hpp"

namespace lagskel {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitInvalidInput = 2,
  kExitBudget = 3,
  kExitOracleConfig = 4,
};

using Path = std::filesystem::path;

/// LAGSKEL_MAX_CALLS, if set to a positive integer.
std::optional<std::size_t> budget_from_environment();

struct SearchCommand {
  Path problem;
  Backend backend = Backend::kMincut;
  std::optional<std::size_t> max_calls;
  std::optional<std::uint64_t> shuffle_seed;
  std::optional<Path> out_stats, out_skeleton, out_set;
  bool omit_timing = false;
};

struct Range {
  Rational lo, hi;
};

struct MaxCommand {
  Path problem;
  std::optional<RationalVector> b;
  std::optional<std::vector<Range>> b_range;
  Backend backend = Backend::kMincut;
  std::optional<std::size_t> max_calls;
  std::optional<Path> out, out_mask;
};

struct AdaptCommand {
  Path problem;
  RationalVector b_hat, gap_minus, gap_plus, alpha, eta;
  PenaltyKind penalty = PenaltyKind::kSquared;
  Backend backend = Backend::kMincut;
  std::optional<std::size_t> max_calls;
  std::optional<Path> out, out_mask;
};

enum class SegmentMode { kSearch, kMax, kAdapt };

struct SegmentCommand {
  Path cost0, cost1;
  Rational beta = 0;
  // Comma separated names from size, boundary, mean_v, mean_h, cov, var_v,
  // var_h, or "none".
  std::string constraints = "none";
  SegmentMode mode = SegmentMode::kMax;
  std::optional<Path> ground_truth;
  std::optional<RationalVector> targets;  // required without ground truth
  // Relative inequality gaps (0.1 for +-10%); zero means equality.
  Rational gap = 0;
  std::optional<RationalVector> alpha;  // default all ones
  std::optional<RationalVector> eta;    // default all ones
  std::optional<Rational> box_half_width;
  std::optional<std::size_t> max_calls;
  std::optional<Path> out_mask, out_report;
};

struct BruteCheckCommand {
  std::optional<Path> problem;
  std::size_t random_count = 0;
  std::uint64_t seed = 1;
  Backend backend = Backend::kMincut;
  std::optional<Path> counterexample;
};

int cmd_search(const SearchCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_max(const MaxCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_adapt(const AdaptCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_segment(const SegmentCommand& cmd, std::ostream& out, std::ostream& err);
int cmd_brute_check(const BruteCheckCommand& cmd, std::ostream& out, std::ostream& err);

/// "lo..hi" per dimension, comma separated.
std::vector<Range> parse_ranges(std::string_view text);

}  // namespace lagskel
