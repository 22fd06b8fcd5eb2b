#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lagskel/commands.hpp"

using namespace lagskel;

namespace {

const std::map<std::string, Backend> kBackends{{"mincut", Backend::kMincut}, {"brute", Backend::kBrute}};

std::optional<RationalVector> vector_option(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return parse_rational_list(text);
}

RationalVector vector_or(const std::string& text, std::size_t m, const char* fill) {
  if (text.empty()) return RationalVector(m, parse_rational(fill));
  return parse_rational_list(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact constrained MAP inference for binary pairwise energies"};
  app.require_subcommand(1);

  SearchCommand search;
  std::size_t search_calls = 0;
  std::uint64_t search_seed = 0;
  auto* s = app.add_subcommand("search", "enumerate the characteristic set over the problem box");
  s->add_option("problem", search.problem, "problem file")->required()->check(CLI::ExistingFile);
  s->add_option("--backend", search.backend, "oracle backend")->transform(CLI::CheckedTransformer(kBackends));
  s->add_option("--max-calls", search_calls, "oracle call budget");
  s->add_option("--shuffle-seed", search_seed, "process vertices in a seeded random order");
  s->add_option("--out-stats", search.out_stats, "statistics JSON");
  s->add_option("--out-skeleton", search.out_skeleton, "skeleton dump");
  s->add_option("--out-set", search.out_set, "characteristic set CSV");
  s->add_flag("--omit-timing", search.omit_timing, "leave wall time out of the statistics");

  MaxCommand max;
  std::string max_b, max_range;
  std::size_t max_calls = 0;
  auto* mx = app.add_subcommand("max", "dual maximum for one target or target range");
  mx->add_option("problem", max.problem, "problem file")->required()->check(CLI::ExistingFile);
  auto* b_opt = mx->add_option("--b", max_b, "target vector, comma separated");
  auto* r_opt = mx->add_option("--b-range", max_range, "lo..hi per dimension, comma separated");
  b_opt->excludes(r_opt);
  mx->add_option("--backend", max.backend, "oracle backend")->transform(CLI::CheckedTransformer(kBackends));
  mx->add_option("--max-calls", max_calls, "oracle call budget");
  mx->add_option("--out", max.out, "result JSON");
  mx->add_option("--out-mask", max.out_mask, "PGM mask for grid problems");

  AdaptCommand adapt;
  std::string a_bhat, a_minus, a_plus, a_alpha, a_eta;
  std::size_t adapt_calls = 0;
  auto* ad = app.add_subcommand("adapt", "soft-constrained solve around a target");
  ad->add_option("problem", adapt.problem, "problem file")->required()->check(CLI::ExistingFile);
  ad->add_option("--bhat", a_bhat, "target vector")->required();
  ad->add_option("--gap-minus", a_minus, "allowed shortfall per dimension (default 0)");
  ad->add_option("--gap-plus", a_plus, "allowed excess per dimension (default 0)");
  ad->add_option("--alpha", a_alpha, "local box half widths (default 1)");
  ad->add_option("--eta", a_eta, "penalty weights (default 1)");
  ad->add_option("--penalty", adapt.penalty, "penalty shape")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, PenaltyKind>{{"squared", PenaltyKind::kSquared}, {"absolute", PenaltyKind::kAbsolute}}));
  ad->add_option("--backend", adapt.backend, "oracle backend")->transform(CLI::CheckedTransformer(kBackends));
  ad->add_option("--max-calls", adapt_calls, "oracle call budget per stage");
  ad->add_option("--out", adapt.out, "result JSON");
  ad->add_option("--out-mask", adapt.out_mask, "PGM mask for grid problems");

  SegmentCommand seg;
  std::string seg_beta = "0", seg_gap = "0", seg_targets, seg_alpha, seg_eta, seg_box;
  std::size_t seg_calls = 0;
  auto* sg = app.add_subcommand("segment", "binary segmentation of a cost-map pair");
  sg->add_option("cost0", seg.cost0, "cost of label 0 (PGM or CSV)")->required()->check(CLI::ExistingFile);
  sg->add_option("cost1", seg.cost1, "cost of label 1 (PGM or CSV)")->required()->check(CLI::ExistingFile);
  sg->add_option("--beta", seg_beta, "Potts smoothness weight");
  sg->add_option("--constraints", seg.constraints, "size,boundary,mean_v,mean_h,cov,var_v,var_h or none");
  sg->add_option("--mode", seg.mode, "solver")
      ->transform(CLI::CheckedTransformer(std::map<std::string, SegmentMode>{
          {"search", SegmentMode::kSearch}, {"max", SegmentMode::kMax}, {"adapt", SegmentMode::kAdapt}}));
  sg->add_option("--ground-truth", seg.ground_truth, "PGM mask; sets targets and pixel error")->check(CLI::ExistingFile);
  sg->add_option("--targets", seg_targets, "explicit constraint targets");
  sg->add_option("--gap", seg_gap, "relative inequality gap, e.g. 1/10");
  sg->add_option("--alpha", seg_alpha, "local box half widths for adapt");
  sg->add_option("--eta", seg_eta, "penalty weights");
  sg->add_option("--box", seg_box, "multiplier box half width");
  sg->add_option("--max-calls", seg_calls, "oracle call budget");
  sg->add_option("--out-mask", seg.out_mask, "PGM mask");
  sg->add_option("--out-report", seg.out_report, "report JSON");

  BruteCheckCommand brute;
  std::string brute_problem;
  auto* bc = app.add_subcommand("brute-check", "run the exhaustive invariant suite");
  bc->add_option("problem", brute_problem, "problem file");
  bc->add_option("--random", brute.random_count, "check N seeded random instances instead");
  bc->add_option("--seed", brute.seed, "first seed for --random");
  bc->add_option("--backend", brute.backend, "oracle backend")->transform(CLI::CheckedTransformer(kBackends));
  bc->add_option("--counterexample", brute.counterexample, "where to write a failing instance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (*s) {
      if (search_calls) search.max_calls = search_calls;
      if (s->count("--shuffle-seed")) search.shuffle_seed = search_seed;
      return cmd_search(search, std::cout, std::cerr);
    }
    if (*mx) {
      if (!max_b.empty()) max.b = parse_rational_list(max_b);
      if (!max_range.empty()) max.b_range = parse_ranges(max_range);
      if (max_calls) max.max_calls = max_calls;
      return cmd_max(max, std::cout, std::cerr);
    }
    if (*ad) {
      adapt.b_hat = parse_rational_list(a_bhat);
      const std::size_t m = adapt.b_hat.size();
      adapt.gap_minus = vector_or(a_minus, m, "0");
      adapt.gap_plus = vector_or(a_plus, m, "0");
      adapt.alpha = vector_or(a_alpha, m, "1");
      adapt.eta = vector_or(a_eta, m, "1");
      if (adapt_calls) adapt.max_calls = adapt_calls;
      return cmd_adapt(adapt, std::cout, std::cerr);
    }
    if (*sg) {
      seg.beta = parse_rational(seg_beta);
      seg.gap = parse_rational(seg_gap);
      seg.targets = vector_option(seg_targets);
      seg.alpha = vector_option(seg_alpha);
      seg.eta = vector_option(seg_eta);
      if (!seg_box.empty()) seg.box_half_width = parse_rational(seg_box);
      if (seg_calls) seg.max_calls = seg_calls;
      return cmd_segment(seg, std::cout, std::cerr);
    }
    if (!brute_problem.empty()) brute.problem = brute_problem;
    return cmd_brute_check(brute, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
}
