#include "lagskel/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <map>
#include <random>
#include <stdexcept>

namespace lagskel {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void check_search_box(const Oracle& oracle, const Box& box) {
  if (box.size() != oracle.dimension()) throw DimensionError("search box dimension does not match the oracle");
  if (box.size() == 0 || box.size() > kMaxSkeletonDimension)
    throw UnsupportedDimensionError("searches support 1 to 3 multiplier dimensions, got " + std::to_string(box.size()));
  if (!box.full_dimensional()) throw ValidationError("search box must be full-dimensional");
  if (!oracle.domain().contains(box)) throw DomainError("search box is not inside the oracle domain");
}

CharacteristicEntry entry_of(const OracleResult& r, std::span<const Rational> lambda) {
  return {r.minimizer, r.f_value, r.h_value, RationalVector(lambda.begin(), lambda.end())};
}

Hyperplane plane_of(const OracleResult& r) { return {r.plane(), {r.minimizer}}; }

// Counts oracle calls against the optional budget.
class CallCounter {
 public:
  CallCounter(const Oracle& oracle, std::optional<std::size_t> budget) : oracle_(oracle), budget_(budget) {}

  bool exhausted() const { return budget_ && calls_ >= *budget_; }

  OracleResult operator()(std::span<const Rational> lambda) {
    ++calls_;
    return oracle_.call(lambda);
  }

  std::size_t calls() const { return calls_; }

 private:
  const Oracle& oracle_;
  std::optional<std::size_t> budget_;
  std::size_t calls_ = 0;
};

std::size_t count_degenerate(const Skeleton& skeleton) {
  std::size_t count = 0;
  for (auto id : skeleton.vertex_ids())
    if (skeleton.tight_count(id) > skeleton.dimension() + 1) ++count;
  return count;
}

Rational l1_norm(const RationalVector& v) {
  Rational total = 0;
  for (const auto& x : v) total += abs(x);
  return total;
}

std::size_t highest(const Skeleton& skeleton, const std::vector<std::size_t>& ids) {
  std::size_t best = ids.front();
  for (auto id : ids) {
    const auto& z = skeleton.vertex(id).point.z;
    const auto& zb = skeleton.vertex(best).point.z;
    if (z > zb || (z == zb && id < best)) best = id;
  }
  return best;
}

[[noreturn]] void budget_exhausted(CharacteristicSet set, Skeleton skeleton, SearchReport report) {
  const std::size_t calls = report.oracle_calls;
  auto partial = std::make_shared<const SearchResult>(SearchResult{std::move(set), std::move(skeleton), report});
  throw BudgetExceeded("oracle call budget of " + std::to_string(calls) + " exhausted", std::move(partial));
}

}  // namespace

bool CharacteristicSet::insert(CharacteristicEntry entry) {
  if (contains(entry.f_value, entry.h_value)) return false;
  entries_.push_back(std::move(entry));
  return true;
}

bool CharacteristicSet::contains(const Rational& f_value, const RationalVector& h_value) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const auto& e) { return e.f_value == f_value && e.h_value == h_value; });
}

SearchResult dual_search(const Oracle& oracle, const Box& box, const SearchOptions& options) {
  check_search_box(oracle, box);
  const auto start = Clock::now();
  CallCounter call(oracle, options.max_oracle_calls);
  SearchReport report;
  CharacteristicSet set;
  // Discovered entries with their planes, and the confirming answer per vertex.
  std::vector<std::pair<CharacteristicEntry, AffineFunction>> found;
  std::map<std::size_t, std::pair<CharacteristicEntry, AffineFunction>> confirmations;

  if (call.exhausted()) throw BudgetExceeded("oracle call budget of 0 exhausted", nullptr);
  const RationalVector lambda0 = box.corner(0);
  const OracleResult first = call(lambda0);
  set.insert(entry_of(first, lambda0));
  found.emplace_back(entry_of(first, lambda0), first.plane());
  Skeleton skeleton(box, plane_of(first));

  std::vector<std::size_t> queue = skeleton.vertex_ids();
  std::size_t head = 0;
  std::optional<std::mt19937_64> rng;
  if (options.shuffle_seed) rng.emplace(*options.shuffle_seed);

  auto finish = [&] {
    report.oracle_calls = call.calls();
    report.num_vertices = skeleton.num_vertices();
    report.num_minimizers = set.size();
    report.cut_planes = skeleton.hyperplanes().size();
    report.degenerate_vertices = count_degenerate(skeleton);
    report.wall_time_ms = elapsed_ms(start);
  };

  while (head < queue.size()) {
    if (rng) {
      std::uniform_int_distribution<std::size_t> pick(head, queue.size() - 1);
      std::swap(queue[head], queue[pick(*rng)]);
    }
    const std::size_t v = queue[head++];
    if (!skeleton.alive(v)) continue;
    if (call.exhausted()) {
      finish();
      budget_exhausted(std::move(set), std::move(skeleton), report);
    }
    const RationalVector lambda = skeleton.vertex(v).point.lambda;
    const Rational z = skeleton.vertex(v).point.z;
    const OracleResult r = call(lambda);
    if (r.value < z) {
      set.insert(entry_of(r, lambda));
      found.emplace_back(entry_of(r, lambda), r.plane());
      const CutReport cut = skeleton.cut(plane_of(r), v);
      if (!cut.applied) throw InternalError("oracle improved on a vertex but the cut removed nothing");
      if (!cut.on_plane.empty()) ++report.coincident_cuts;
      if (options.on_cut) options.on_cut(skeleton, cut);
      queue.insert(queue.end(), cut.added.begin(), cut.added.end());
    } else {
      skeleton.confirm(v);
      if (!skeleton.find_plane(r.plane())) ++report.tie_minimizers;
      confirmations.emplace(v, std::pair{entry_of(r, lambda), r.plane()});
    }
  }

  // The planes cut along the way depend on the processing order when several
  // planes meet in a lower-dimensional face. The reported set keeps only what
  // the final envelope determines: its facet planes and the oracle's answers
  // at its vertices.
  const auto ids = skeleton.vertex_ids();
  CharacteristicSet canonical;
  for (auto& [entry, plane] : found) {
    std::vector<RationalVector> touching;
    for (auto id : ids) {
      const auto& p = skeleton.vertex(id).point;
      if (plane.at(p.lambda) == p.z) touching.push_back(p.lambda);
    }
    if (affine_dimension(touching) == static_cast<int>(box.size())) canonical.insert(std::move(entry));
  }
  for (auto& [id, answer] : confirmations) canonical.insert(std::move(answer.first));
  set = std::move(canonical);
  finish();
  return {std::move(set), std::move(skeleton), report};
}

DualMaxResult dual_max(const Oracle& oracle, const Box& box, const SearchOptions& options) {
  check_search_box(oracle, box);
  const auto start = Clock::now();
  CallCounter call(oracle, options.max_oracle_calls);
  DualMaxResult result;
  CharacteristicSet set;

  if (call.exhausted()) throw BudgetExceeded("oracle call budget of 0 exhausted", nullptr);
  const RationalVector lambda0 = box.corner(0);
  const OracleResult first = call(lambda0);
  set.insert(entry_of(first, lambda0));
  Skeleton skeleton(box, plane_of(first));
  std::vector<OracleResult> answers{first};

  auto finish = [&] {
    result.report.oracle_calls = call.calls();
    result.report.num_vertices = skeleton.num_vertices();
    result.report.num_minimizers = set.size();
    result.report.degenerate_vertices = count_degenerate(skeleton);
    result.report.wall_time_ms = elapsed_ms(start);
  };

  std::size_t current = highest(skeleton, skeleton.vertex_ids());
  for (;;) {
    if (call.exhausted()) {
      finish();
      budget_exhausted(std::move(set), std::move(skeleton), result.report);
    }
    const RationalVector lambda = skeleton.vertex(current).point.lambda;
    const Rational z = skeleton.vertex(current).point.z;
    result.trace.push_back(z);
    OracleResult r = call(lambda);
    if (r.value < z) {
      set.insert(entry_of(r, lambda));
      answers.push_back(r);
      const CutReport cut = skeleton.cut(plane_of(r), current);
      if (!cut.applied) throw InternalError("oracle improved on a vertex but the cut removed nothing");
      if (!cut.on_plane.empty()) ++result.report.coincident_cuts;
      if (options.on_cut) options.on_cut(skeleton, cut);
      std::vector<std::size_t> facet = cut.added;
      facet.insert(facet.end(), cut.on_plane.begin(), cut.on_plane.end());
      current = highest(skeleton, facet);
      continue;
    }
    skeleton.confirm(current);
    result.lambda = lambda;
    result.value = z;
    // Among the minimizers tight at the maximum, report the one closest to
    // the requested instance.
    result.minimizer = std::move(r);
    Rational best = l1_norm(result.minimizer.slope);
    for (const auto& a : answers)
      if (a.plane().at(lambda) == z && l1_norm(a.slope) < best) {
        best = l1_norm(a.slope);
        result.minimizer = a;
      }
    break;
  }
  finish();
  return result;
}

Rational soft_objective(const Rational& f_value, const RationalVector& h_value, const PenaltySpec& penalty) {
  if (penalty.weights.size() != h_value.size() || penalty.target.size() != h_value.size())
    throw DimensionError("penalty weights and target must have one entry per constraint");
  Rational total = f_value;
  for (std::size_t i = 0; i < h_value.size(); ++i) {
    Rational d = h_value[i] - penalty.target[i];
    if (penalty.kind == PenaltyKind::kSquared)
      total += penalty.weights[i] * d * d;
    else
      total += penalty.weights[i] * abs(d);
  }
  return total;
}

std::size_t select_soft(const CharacteristicSet& set, const PenaltySpec& penalty) {
  if (set.empty()) throw std::invalid_argument("select_soft needs a nonempty set");
  for (const auto& w : penalty.weights)
    if (w < 0) throw ValidationError("penalty weights must be nonnegative");
  const auto& entries = set.entries();
  std::size_t best = 0;
  Rational best_score = soft_objective(entries[0].f_value, entries[0].h_value, penalty);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    Rational score = soft_objective(entries[i].f_value, entries[i].h_value, penalty);
    const auto& e = entries[i];
    const auto& b = entries[best];
    bool better = score < best_score;
    if (score == best_score) better = e.f_value < b.f_value || (e.f_value == b.f_value && e.labeling < b.labeling);
    if (better) {
      best = i;
      best_score = std::move(score);
    }
  }
  return best;
}

AdaptResult adapt_search(const LagrangianProblem& problem, const RationalVector& b_hat, const SlackBounds& bounds,
                         const RationalVector& alpha, const PenaltySpec& penalty, Backend backend,
                         const SearchOptions& options) {
  const std::size_t m = problem.num_constraints();
  if (b_hat.size() != m || alpha.size() != m) throw DimensionError("b_hat and alpha need one entry per constraint");
  for (const auto& a : alpha)
    if (a < 0) throw ValidationError("alpha must be nonnegative");
  const Box& box = problem.box();
  AdaptResult out;

  const OraclePtr slack = slack_wrap(make_lagrangian_oracle(problem.with_target(b_hat), backend), bounds);
  DualMaxResult step2 = dual_max(*slack, box, options);
  out.slack_minimizer = step2.minimizer;
  out.slack_report = step2.report;
  out.b_star.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.b_star[i] = step2.minimizer.h_value[i] + step2.minimizer.slack[i];

  const OraclePtr equality = make_lagrangian_oracle(problem.with_target(out.b_star), backend);
  DualMaxResult step3 = dual_max(*equality, box, options);
  out.lambda_star = step3.lambda;
  out.equality_minimizer = step3.minimizer;
  out.equality_report = step3.report;

  RationalVector lo(m), hi(m);
  std::vector<bool> free_dims(m);
  RationalVector free_lo, free_hi;
  for (std::size_t i = 0; i < m; ++i) {
    lo[i] = std::max<Rational>(out.lambda_star[i] - alpha[i], box.lower()[i]);
    hi[i] = std::min<Rational>(out.lambda_star[i] + alpha[i], box.upper()[i]);
    free_dims[i] = lo[i] < hi[i];
    if (free_dims[i]) {
      free_lo.push_back(lo[i]);
      free_hi.push_back(hi[i]);
    }
  }
  out.local_box = Box(lo, hi);
  if (free_lo.empty()) {
    const OracleResult r = equality->call(out.lambda_star);
    out.local_set.insert(entry_of(r, out.lambda_star));
    out.local_report.oracle_calls = 1;
    out.local_report.num_minimizers = 1;
  } else {
    Box free_box(free_lo, free_hi);
    const OraclePtr local = restrict_oracle(equality, free_dims, out.lambda_star, free_box);
    SearchResult step4 = dual_search(*local, free_box, options);
    out.local_set = std::move(step4.set);
    out.local_report = step4.report;
  }

  CharacteristicSet candidates = out.local_set;
  candidates.insert(entry_of(step2.minimizer, step2.lambda));
  candidates.insert(entry_of(step3.minimizer, step3.lambda));
  out.choice = candidates.entries()[select_soft(candidates, penalty)];
  out.objective = soft_objective(out.choice.f_value, out.choice.h_value, penalty);
  return out;
}

}  // namespace lagskel
