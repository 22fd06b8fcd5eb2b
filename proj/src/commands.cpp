#include "lagskel/commands.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lagskel/domains.hpp"
#include "lagskel/io.hpp"
#include "lagskel/verify.hpp"

namespace lagskel {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ConfigurationError& e) {
    err << "error: oracle configuration: " << e.what() << '\n';
    return kExitOracleConfig;
  } catch (const SubmodularityError& e) {
    err << "error: oracle configuration: " << e.what() << '\n';
    return kExitOracleConfig;
  } catch (const InfeasibleError& e) {
    err << "error: oracle configuration: " << e.what() << '\n';
    return kExitOracleConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
}

SearchOptions search_options(std::optional<std::size_t> max_calls) {
  SearchOptions options;
  options.max_oracle_calls = max_calls ? max_calls : budget_from_environment();
  return options;
}

ordered_json rationals(const RationalVector& v) {
  ordered_json out = ordered_json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

void emit(const ordered_json& doc, std::ostream& out, const std::optional<Path>& path) {
  const std::string text = doc.dump(2) + "\n";
  out << text;
  if (path) write_text_file(*path, text);
}

void write_mask(const ProblemFile& file, const Labeling& x, const std::optional<Path>& path) {
  if (!path) return;
  if (!file.grid) throw ValidationError("--out-mask needs a problem with a \"grid\" entry");
  write_pgm(*path, mask_image(x, file.grid->width, file.grid->height));
}

void check_length(const RationalVector& v, std::size_t m, const char* what) {
  if (v.size() != m)
    throw DimensionError(std::string(what) + " needs " + std::to_string(m) + " entries, got " + std::to_string(v.size()));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string piece;
  while (std::getline(in, piece, sep))
    if (!piece.empty()) out.push_back(piece);
  return out;
}

// Mean coordinates and second moments of a nonempty mask.
struct MaskMoments {
  Rational count, mean_v, mean_h, cov, var_v, var_h;
};

MaskMoments moments(const GridProblem& grid, const Labeling& mask) {
  MaskMoments m;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      m.count += 1;
      m.mean_v += grid.v(i);
      m.mean_h += grid.h(i);
    }
  if (m.count == 0) throw ValidationError("ground-truth mask is empty");
  m.mean_v /= m.count;
  m.mean_h /= m.count;
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) {
      const Rational dv = grid.v(i) - m.mean_v, dh = grid.h(i) - m.mean_h;
      m.cov += dv * dh;
      m.var_v += dv * dv;
      m.var_h += dh * dh;
    }
  m.cov /= m.count;
  m.var_v /= m.count;
  m.var_h /= m.count;
  return m;
}

}  // namespace

std::optional<std::size_t> budget_from_environment() {
  const char* value = std::getenv("LAGSKEL_MAX_CALLS");
  if (!value || !*value) return std::nullopt;
  char* end = nullptr;
  const unsigned long long parsed = std::strtoull(value, &end, 10);
  if (*end != '\0' || parsed == 0) return std::nullopt;
  return static_cast<std::size_t>(parsed);
}

std::vector<Range> parse_ranges(std::string_view text) {
  std::vector<Range> out;
  for (const auto& piece : split(std::string(text), ',')) {
    const auto dots = piece.find("..");
    if (dots == std::string::npos) throw std::invalid_argument("range '" + piece + "' is not of the form lo..hi");
    Range r{parse_rational(piece.substr(0, dots)), parse_rational(piece.substr(dots + 2))};
    if (r.hi < r.lo) throw std::invalid_argument("range '" + piece + "' has hi < lo");
    out.push_back(std::move(r));
  }
  return out;
}

int cmd_search(const SearchCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile file = load_problem(cmd.problem);
    const auto oracle = make_lagrangian_oracle(file.problem, cmd.backend);
    SearchOptions options = search_options(cmd.max_calls);
    options.shuffle_seed = cmd.shuffle_seed;

    auto write = [&](const SearchResult& r, bool complete) {
      if (cmd.out_stats) write_text_file(*cmd.out_stats, stats_json(r.report, r.set, complete, !cmd.omit_timing));
      if (cmd.out_skeleton) write_text_file(*cmd.out_skeleton, r.skeleton.dump());
      if (cmd.out_set) write_text_file(*cmd.out_set, set_table_csv(r.set, file.problem.constraints()));
      out << (complete ? "complete" : "partial") << " oracle_calls=" << r.report.oracle_calls
          << " num_vertices=" << r.report.num_vertices << " num_minimizers=" << r.report.num_minimizers
          << " cut_planes=" << r.report.cut_planes
          << (r.report.general_position() ? " general_position" : " degenerate") << '\n';
    };
    try {
      write(dual_search(*oracle, file.problem.box(), options), true);
    } catch (const BudgetExceeded& e) {
      if (e.has_partial()) write(e.partial(), false);
      throw;
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_max(const MaxCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile file = load_problem(cmd.problem);
    const auto& problem = file.problem;
    const std::size_t m = problem.num_constraints();
    if (cmd.b.has_value() == cmd.b_range.has_value()) throw ValidationError("give exactly one of --b and --b-range");
    const SearchOptions options = search_options(cmd.max_calls);

    ordered_json doc;
    DualMaxResult result;
    if (cmd.b) {
      check_length(*cmd.b, m, "--b");
      result = dual_max(*make_lagrangian_oracle(problem.with_target(*cmd.b), cmd.backend), problem.box(), options);
    } else {
      if (cmd.b_range->size() != m) throw DimensionError("--b-range needs one range per constraint");
      RationalVector lo, width, zero(m);
      for (const auto& r : *cmd.b_range) {
        lo.push_back(r.lo);
        width.push_back(r.hi - r.lo);
      }
      const auto oracle = slack_wrap(make_lagrangian_oracle(problem.with_target(lo), cmd.backend), {zero, width});
      result = dual_max(*oracle, problem.box(), options);
    }
    const auto& x = result.minimizer;
    doc["lambda"] = rationals(result.lambda);
    doc["dual_value"] = to_string(result.value);
    doc["labeling"] = to_bitstring(x.minimizer);
    doc["f"] = to_string(x.f_value);
    doc["H"] = rationals(x.h_value);
    if (cmd.b_range) {
      RationalVector b_star(m);
      for (std::size_t i = 0; i < m; ++i) b_star[i] = x.h_value[i] + x.slack[i];
      doc["slack"] = rationals(x.slack);
      doc["b_star"] = rationals(b_star);
    }
    doc["oracle_calls"] = result.report.oracle_calls;
    emit(doc, out, cmd.out);
    write_mask(file, x.minimizer, cmd.out_mask);
    return static_cast<int>(kExitOk);
  });
}

int cmd_adapt(const AdaptCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemFile file = load_problem(cmd.problem);
    const auto& problem = file.problem;
    const std::size_t m = problem.num_constraints();
    check_length(cmd.b_hat, m, "--bhat");
    check_length(cmd.gap_minus, m, "--gap-minus");
    check_length(cmd.gap_plus, m, "--gap-plus");
    check_length(cmd.alpha, m, "--alpha");
    check_length(cmd.eta, m, "--eta");
    const PenaltySpec penalty{cmd.penalty, cmd.eta, cmd.b_hat};
    const AdaptResult r = adapt_search(problem, cmd.b_hat, {cmd.gap_minus, cmd.gap_plus}, cmd.alpha, penalty,
                                       cmd.backend, search_options(cmd.max_calls));
    ordered_json doc;
    doc["labeling"] = to_bitstring(r.choice.labeling);
    doc["f"] = to_string(r.choice.f_value);
    doc["H"] = rationals(r.choice.h_value);
    doc["objective"] = to_string(r.objective);
    doc["b_star"] = rationals(r.b_star);
    doc["lambda_star"] = rationals(r.lambda_star);
    doc["local_box"] = {{"lower", rationals(r.local_box.lower())}, {"upper", rationals(r.local_box.upper())}};
    doc["local_set_size"] = r.local_set.size();
    doc["oracle_calls"] = r.slack_report.oracle_calls + r.equality_report.oracle_calls + r.local_report.oracle_calls;
    emit(doc, out, cmd.out);
    write_mask(file, r.choice.labeling, cmd.out_mask);
    return static_cast<int>(kExitOk);
  });
}

int cmd_segment(const SegmentCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CostMap c0 = read_cost_map(cmd.cost0), c1 = read_cost_map(cmd.cost1);
    if (c0.width != c1.width || c0.height != c1.height)
      throw DimensionError("cost maps differ in size (" + std::to_string(c0.width) + "x" + std::to_string(c0.height) +
                           " vs " + std::to_string(c1.width) + "x" + std::to_string(c1.height) + ")");
    GridProblem grid{c0.width, c0.height, c0.values, c1.values, cmd.beta, std::nullopt};
    const PairwiseEnergy f = build_grid_energy(grid);
    const std::size_t n = grid.size();

    std::optional<Labeling> truth;
    if (cmd.ground_truth) {
      const GrayImage img = read_pgm(*cmd.ground_truth);
      if (img.width != grid.width || img.height != grid.height)
        throw DimensionError("ground-truth mask does not match the cost maps");
      truth = mask_labeling(img);
    }

    ordered_json doc;
    std::vector<std::string> names;
    if (cmd.constraints != "none") names = split(cmd.constraints, ',');
    doc["constraints"] = names;
    Labeling x;
    std::optional<LagrangianProblem> problem;
    std::optional<PenaltySpec> penalty;

    if (names.empty()) {
      x = mincut_minimize(f).minimizer;
    } else {
      if (names.size() > kMaxSkeletonDimension) throw UnsupportedDimensionError("at most 3 constraints are supported");
      const Labeling* gt = truth ? &*truth : nullptr;
      std::optional<MaskMoments> mom;
      auto need_moments = [&]() -> const MaskMoments& {
        if (!gt) throw ValidationError("ratio constraints need --ground-truth");
        if (!mom) mom = moments(grid, *gt);
        return *mom;
      };
      Rational spread = 0;
      for (std::size_t i = 0; i < n; ++i) spread = std::max<Rational>(spread, abs(grid.cost1[i] - grid.cost0[i]));
      const Rational half = cmd.box_half_width ? *cmd.box_half_width : spread + 4 * cmd.beta + 1;
      std::vector<ConstraintSpec> specs;
      RationalVector lo, hi, targets;
      for (const auto& name : names) {
        Rational lower = -half;
        if (name == "size") {
          specs.push_back(size_constraint(n));
        } else if (name == "boundary") {
          auto b = boundary_constraint(grid);
          specs.push_back(b.spec);
          lower = std::max<Rational>(lower, b.lower_bound);
        } else if (name == "mean_v" || name == "mean_h") {
          const auto& mm = need_moments();
          auto [v, h] = mean_constraint(grid, {mm.mean_v, mm.mean_h});
          specs.push_back(name == "mean_v" ? v : h);
        } else if (name == "cov") {
          const auto& mm = need_moments();
          specs.push_back(covariance_constraint(grid, {mm.mean_v, mm.mean_h}, mm.cov));
        } else if (name == "var_v" || name == "var_h") {
          const auto& mm = need_moments();
          const bool vertical = name == "var_v";
          specs.push_back(variance_constraint(grid, vertical ? Axis::kVertical : Axis::kHorizontal,
                                              vertical ? mm.mean_v : mm.mean_h, vertical ? mm.var_v : mm.var_h));
        } else {
          throw ValidationError("unknown constraint '" + name + "'");
        }
        lo.push_back(lower);
        hi.push_back(half);
      }
      LagrangianProblem base(f, specs, {}, Box(lo, hi));
      if (cmd.targets) {
        check_length(*cmd.targets, names.size(), "--targets");
        targets = *cmd.targets;
      } else if (gt) {
        targets = evaluate_constraints(base, *gt);
      } else {
        throw ValidationError("give --targets or --ground-truth");
      }
      problem = base.with_target(targets);
      const std::size_t m = names.size();
      RationalVector eta = cmd.eta ? *cmd.eta : RationalVector(m, Rational(1));
      RationalVector alpha = cmd.alpha ? *cmd.alpha : RationalVector(m, Rational(1));
      check_length(eta, m, "--eta");
      check_length(alpha, m, "--alpha");
      penalty = PenaltySpec{PenaltyKind::kSquared, eta, targets};
      SlackBounds bounds{RationalVector(m), RationalVector(m)};
      for (std::size_t i = 0; i < m; ++i) bounds.k_minus[i] = bounds.k_plus[i] = cmd.gap * abs(targets[i]);
      const SearchOptions options = search_options(cmd.max_calls);
      doc["targets"] = rationals(targets);
      doc["box"] = {{"lower", rationals(lo)}, {"upper", rationals(hi)}};

      switch (cmd.mode) {
        case SegmentMode::kSearch: {
          const SearchResult r = dual_search(*make_lagrangian_oracle(*problem, Backend::kMincut), problem->box(), options);
          x = r.set.entries()[select_soft(r.set, *penalty)].labeling;
          doc["mode"] = "search";
          doc["num_minimizers"] = r.report.num_minimizers;
          doc["num_vertices"] = r.report.num_vertices;
          doc["oracle_calls"] = r.report.oracle_calls;
          break;
        }
        case SegmentMode::kMax: {
          DualMaxResult r;
          if (cmd.gap == 0) {
            r = dual_max(*make_lagrangian_oracle(*problem, Backend::kMincut), problem->box(), options);
          } else {
            const auto oracle = slack_wrap(make_lagrangian_oracle(*problem, Backend::kMincut), bounds);
            r = dual_max(*oracle, problem->box(), options);
          }
          x = r.minimizer.minimizer;
          doc["mode"] = "max";
          doc["lambda"] = rationals(r.lambda);
          doc["dual_value"] = to_string(r.value);
          doc["oracle_calls"] = r.report.oracle_calls;
          break;
        }
        case SegmentMode::kAdapt: {
          const AdaptResult r = adapt_search(*problem, targets, bounds, alpha, *penalty, Backend::kMincut, options);
          x = r.choice.labeling;
          doc["mode"] = "adapt";
          doc["b_star"] = rationals(r.b_star);
          doc["lambda_star"] = rationals(r.lambda_star);
          doc["local_set_size"] = r.local_set.size();
          break;
        }
      }
    }

    std::size_t foreground = 0;
    for (auto b : x) foreground += b;
    doc["width"] = grid.width;
    doc["height"] = grid.height;
    doc["foreground"] = foreground;
    doc["f"] = to_string(evaluate_energy(f, x));
    if (problem) {
      const RationalVector h = evaluate_constraints(*problem, x);
      doc["H"] = rationals(h);
      doc["soft_objective"] = to_string(soft_objective(evaluate_energy(f, x), h, *penalty));
      const bool ratio = std::any_of(names.begin(), names.end(), [](const std::string& s) {
        return s != "size" && s != "boundary";
      });
      if (ratio && foreground == 0) doc["warning"] = "empty foreground: ratio statistics are undefined";
    }
    if (truth) doc["pixel_error"] = pixel_error(x, *truth);
    emit(doc, out, cmd.out_report);
    if (cmd.out_mask) write_pgm(*cmd.out_mask, mask_image(x, grid.width, grid.height));
    return static_cast<int>(kExitOk);
  });
}

int cmd_brute_check(const BruteCheckCommand& cmd, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto check = [&](const ProblemFile& file, const std::string& label) {
      const auto outcomes = run_invariant_suite(file.problem, cmd.backend);
      bool ok = true;
      for (const auto& c : outcomes) {
        out << (c.passed ? "PASS " : "FAIL ") << label << c.name;
        if (!c.detail.empty()) out << ": " << c.detail;
        out << '\n';
        ok = ok && c.passed;
      }
      if (!ok) {
        const std::string text = serialize_problem(file);
        if (cmd.counterexample)
          write_text_file(*cmd.counterexample, text);
        else
          err << "counterexample:\n" << text;
      }
      return ok;
    };

    if (cmd.problem.has_value() == (cmd.random_count > 0))
      throw ValidationError("give either a problem file or --random N");
    if (cmd.problem) {
      const ProblemFile file = load_problem(*cmd.problem);
      make_lagrangian_oracle(file.problem, cmd.backend);
      return static_cast<int>(check(file, "") ? kExitOk : kExitCheckFailed);
    }
    out << "seed " << cmd.seed << '\n';
    for (std::size_t i = 0; i < cmd.random_count; ++i) {
      const std::uint64_t seed = cmd.seed + i;
      ProblemFile file{random_instance(seed), std::nullopt};
      if (!check(file, "[seed " + std::to_string(seed) + "] ")) return static_cast<int>(kExitCheckFailed);
    }
    out << "all " << cmd.random_count << " instances passed\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace lagskel
