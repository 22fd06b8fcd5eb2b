#include "lagskel/oracle.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <deque>
#include <map>
#include <set>

#include "lagskel/errors.hpp"
#include "lagskel/maxflow.hpp"

namespace lagskel {
namespace {

// Terminal and pairwise capacities of the st-graph for a submodular energy.
// Label 1 <-> source side. A node's source arc is cut when it takes label 0,
// its sink arc when it takes label 1.
struct CutGraph {
  std::vector<Rational> source_cap;
  std::vector<Rational> sink_cap;
  struct Arc {
    std::size_t from, to;
    Rational cap;
  };
  std::vector<Arc> arcs;
};

CutGraph build_cut_graph(const PairwiseEnergy& f) {
  const std::size_t n = f.size();
  std::vector<Rational> linear(n);
  for (std::size_t i = 0; i < n; ++i) linear[i] = f.unary()[i].one - f.unary()[i].zero;

  CutGraph g;
  // phi(xu, xv) = A + (C - A) xu + (D - C) xv + (B + C - A - D) (1 - xu) xv
  for (const auto& e : f.edges()) {
    linear[e.u] += e.t10 - e.t00;
    linear[e.v] += e.t11 - e.t10;
    Rational w = e.t01 + e.t10 - e.t00 - e.t11;
    // Cost paid when xu = 0 (sink side) and xv = 1 (source side): arc v -> u.
    if (w > 0) g.arcs.push_back({e.v, e.u, std::move(w)});
  }
  g.source_cap.assign(n, Rational(0));
  g.sink_cap.assign(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (linear[i] > 0)
      g.sink_cap[i] = linear[i];
    else if (linear[i] < 0)
      g.source_cap[i] = -linear[i];
  }
  return g;
}

template <typename Cap>
Labeling solve_cut(const CutGraph& g, const mpz_class& scale, Cap (*convert)(const mpz_class&)) {
  const std::size_t n = g.source_cap.size();
  BkMaxFlow<Cap> flow(n);
  auto scaled = [&](const Rational& r) {
    mpz_class v = r.get_num() * (scale / r.get_den());
    return convert(v);
  };
  for (std::size_t i = 0; i < n; ++i)
    if (g.source_cap[i] != 0 || g.sink_cap[i] != 0) flow.add_terminal_weights(i, scaled(g.source_cap[i]), scaled(g.sink_cap[i]));
  for (const auto& a : g.arcs) flow.add_edge(a.from, a.to, scaled(a.cap), Cap(0));
  flow.solve();
  auto reach = flow.source_reachable();
  Labeling x(n, 0);
  for (std::size_t i = 0; i < n; ++i) x[i] = reach[i] ? 1 : 0;
  return x;
}

std::int64_t to_int64(const mpz_class& v) { return static_cast<std::int64_t>(v.get_si()); }
mpz_class to_mpz(const mpz_class& v) { return v; }

bool lexicographically_less(const Labeling& a, const Labeling& b) { return a < b; }

void check_lambda(const Oracle& oracle, std::span<const Rational> lambda) {
  if (lambda.size() != oracle.dimension())
    throw DimensionError("oracle expects " + std::to_string(oracle.dimension()) + " multipliers, got " +
                         std::to_string(lambda.size()));
  if (!oracle.domain().contains(lambda))
    throw DomainError("multiplier (" + to_string(lambda) + ") is outside the oracle domain");
}

class LagrangianOracle final : public Oracle {
 public:
  LagrangianOracle(LagrangianProblem problem, Backend backend) : problem_(std::move(problem)), backend_(backend) {
    if (backend_ == Backend::kBrute && problem_.num_variables() > kBruteForceLimit)
      throw CapacityError("brute-force backend supports at most " + std::to_string(kBruteForceLimit) + " variables");
    if (backend_ == Backend::kMincut) validate_submodular_box();
  }

  std::size_t dimension() const override { return problem_.num_constraints(); }
  const Box& domain() const override { return problem_.box(); }

  OracleResult call(std::span<const Rational> lambda) const override {
    check_lambda(*this, lambda);
    const PairwiseEnergy assembled = assemble_lagrangian(problem_, lambda);
    MinimizeResult best = backend_ == Backend::kMincut ? mincut_minimize(assembled) : brute_minimize(assembled);
    OracleResult r;
    r.f_value = evaluate_energy(problem_.energy(), best.minimizer);
    r.h_value = evaluate_constraints(problem_, best.minimizer);
    r.slack.assign(dimension(), Rational(0));
    r.slope.resize(dimension());
    for (std::size_t i = 0; i < dimension(); ++i) r.slope[i] = r.h_value[i] - problem_.target()[i];
    r.value = std::move(best.value);
    r.minimizer = std::move(best.minimizer);
    return r;
  }

 private:
  void validate_submodular_box() const {
    const auto& box = problem_.box();
    Rational worst = 0;  // smallest disagreement weight reachable inside the box
    bool has_edge_dim = false;
    for (std::size_t i = 0; i < problem_.num_constraints(); ++i) {
      const Rational& w = problem_.constraints()[i].edge_coeff;
      if (w == 0) continue;
      has_edge_dim = true;
      worst += w > 0 ? box.lower()[i] * w : box.upper()[i] * w;
    }
    for (const auto& e : problem_.energy().edges()) {
      if (e.t01 + e.t10 + 2 * worst >= e.t00 + e.t11) continue;
      if (!has_edge_dim) throw ConfigurationError("energy is not submodular and no constraint adds disagreement weight");
      std::string detail;
      auto bounds = submodularity_lambda_bound(problem_);
      for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (!bounds[i]) continue;
        if (!detail.empty()) detail += "; ";
        detail += "dimension " + std::to_string(i) + " ('" + problem_.constraints()[i].name + "') has lower bound " +
                  to_string(box.lower()[i]) + ", needs >= " + to_string(*bounds[i]);
      }
      throw ConfigurationError("search box admits non-submodular Lagrangians for the mincut backend: " + detail);
    }
  }

  LagrangianProblem problem_;
  Backend backend_;
};

class ShortestPathOracle final : public Oracle {
 public:
  ShortestPathOracle(PathGraph graph, std::size_t source, std::size_t target, RationalVector delay_target, Box box)
      : graph_(std::move(graph)), source_(source), target_(target), delay_target_(std::move(delay_target)), box_(std::move(box)) {
    const std::size_t m = box_.size();
    if (delay_target_.size() != m) throw DimensionError("delay target length does not match box dimension");
    if (source_ >= graph_.num_nodes || target_ >= graph_.num_nodes) throw ValidationError("terminal out of range");
    adjacency_.resize(graph_.num_nodes);
    for (std::size_t k = 0; k < graph_.edges.size(); ++k) {
      const auto& e = graph_.edges[k];
      if (e.from >= graph_.num_nodes || e.to >= graph_.num_nodes) throw ValidationError("edge endpoint out of range");
      if (e.delay.size() != m) throw DimensionError("edge " + std::to_string(k) + " has a delay vector of wrong length");
      Rational lowest = e.length;
      for (std::size_t i = 0; i < m; ++i) lowest += e.delay[i] >= 0 ? box_.lower()[i] * e.delay[i] : box_.upper()[i] * e.delay[i];
      if (lowest < 0)
        throw ConfigurationError("edge " + std::to_string(k) + " gets negative modified weight " + to_string(lowest) +
                                 " inside the box");
      adjacency_[e.from].push_back(k);
    }
    std::vector<bool> seen(graph_.num_nodes, false);
    std::deque<std::size_t> queue{source_};
    seen[source_] = true;
    while (!queue.empty()) {
      auto u = queue.front();
      queue.pop_front();
      for (auto k : adjacency_[u])
        if (!seen[graph_.edges[k].to]) {
          seen[graph_.edges[k].to] = true;
          queue.push_back(graph_.edges[k].to);
        }
    }
    if (!seen[target_]) throw InfeasibleError("no path from source to target");
  }

  std::size_t dimension() const override { return box_.size(); }
  const Box& domain() const override { return box_; }

  OracleResult call(std::span<const Rational> lambda) const override {
    check_lambda(*this, lambda);
    const std::size_t n = graph_.num_nodes;
    std::vector<Rational> weight(graph_.edges.size());
    for (std::size_t k = 0; k < weight.size(); ++k) weight[k] = graph_.edges[k].length + dot(graph_.edges[k].delay, lambda);

    std::vector<std::optional<Rational>> dist(n);
    std::vector<long> via(n, -1);
    std::vector<bool> done(n, false);
    std::set<std::pair<Rational, std::size_t>> frontier;
    dist[source_] = Rational(0);
    frontier.emplace(Rational(0), source_);
    while (!frontier.empty()) {
      auto [d, u] = *frontier.begin();
      frontier.erase(frontier.begin());
      if (done[u]) continue;
      done[u] = true;
      if (u == target_) break;
      for (auto k : adjacency_[u]) {
        const auto v = graph_.edges[k].to;
        if (done[v]) continue;
        Rational candidate = d + weight[k];
        if (!dist[v] || candidate < *dist[v]) {
          if (dist[v]) frontier.erase({*dist[v], v});
          dist[v] = candidate;
          via[v] = static_cast<long>(k);
          frontier.emplace(std::move(candidate), v);
        }
      }
    }

    OracleResult r;
    r.minimizer.assign(graph_.edges.size(), 0);
    for (std::size_t v = target_; v != source_;) {
      const auto k = static_cast<std::size_t>(via[v]);
      r.minimizer[k] = 1;
      v = graph_.edges[k].from;
    }
    const std::size_t m = dimension();
    r.f_value = 0;
    r.h_value.assign(m, Rational(0));
    for (std::size_t k = 0; k < graph_.edges.size(); ++k) {
      if (!r.minimizer[k]) continue;
      r.f_value += graph_.edges[k].length;
      for (std::size_t i = 0; i < m; ++i) r.h_value[i] += graph_.edges[k].delay[i];
    }
    r.slack.assign(m, Rational(0));
    r.slope.resize(m);
    for (std::size_t i = 0; i < m; ++i) r.slope[i] = r.h_value[i] - delay_target_[i];
    r.value = r.f_value + dot(r.slope, lambda);
    return r;
  }

 private:
  PathGraph graph_;
  std::size_t source_, target_;
  RationalVector delay_target_;
  Box box_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

class SlackOracle final : public Oracle {
 public:
  SlackOracle(OraclePtr inner, SlackBounds bounds) : inner_(std::move(inner)), bounds_(std::move(bounds)) {
    const std::size_t m = inner_->dimension();
    if (bounds_.k_minus.size() != m || bounds_.k_plus.size() != m)
      throw DimensionError("slack bounds must have one entry per constraint");
    total_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (bounds_.k_minus[i] < 0 || bounds_.k_plus[i] < 0) throw ValidationError("slack bounds must be nonnegative");
      total_[i] = bounds_.k_minus[i] + bounds_.k_plus[i];
    }
  }

  std::size_t dimension() const override { return inner_->dimension(); }
  const Box& domain() const override { return inner_->domain(); }

  OracleResult call(std::span<const Rational> lambda) const override {
    OracleResult r = inner_->call(lambda);
    for (std::size_t i = 0; i < dimension(); ++i) {
      // y*_i is the slack minimizing lambda_i * y_i over [0, k_i]; 0 on ties.
      r.slack[i] = lambda[i] < 0 ? total_[i] : Rational(0);
      Rational shift = r.slack[i] - bounds_.k_plus[i];
      r.slope[i] += shift;
      r.value += lambda[i] * shift;
    }
    return r;
  }

 private:
  OraclePtr inner_;
  SlackBounds bounds_;
  RationalVector total_;
};

class RestrictedOracle final : public Oracle {
 public:
  RestrictedOracle(OraclePtr inner, std::vector<bool> free_dims, RationalVector fixed_point, Box free_box)
      : inner_(std::move(inner)), free_(std::move(free_dims)), fixed_(std::move(fixed_point)), box_(std::move(free_box)) {
    if (free_.size() != inner_->dimension() || fixed_.size() != inner_->dimension())
      throw DimensionError("restriction masks must match the oracle dimension");
    if (static_cast<std::size_t>(std::count(free_.begin(), free_.end(), true)) != box_.size())
      throw DimensionError("restricted box must have one dimension per free coordinate");
  }

  std::size_t dimension() const override { return box_.size(); }
  const Box& domain() const override { return box_; }

  OracleResult call(std::span<const Rational> lambda) const override {
    check_lambda(*this, lambda);
    RationalVector full = fixed_;
    for (std::size_t i = 0, k = 0; i < free_.size(); ++i)
      if (free_[i]) full[i] = lambda[k++];
    OracleResult r = inner_->call(full);
    RationalVector slope;
    for (std::size_t i = 0; i < free_.size(); ++i) {
      if (free_[i])
        slope.push_back(r.slope[i]);
      else
        r.plane_offset += r.slope[i] * fixed_[i];
    }
    r.slope = std::move(slope);
    return r;
  }

 private:
  OraclePtr inner_;
  std::vector<bool> free_;
  RationalVector fixed_;
  Box box_;
};

}  // namespace

MinimizeResult mincut_minimize(const PairwiseEnergy& f) {
  if (!is_submodular(f)) throw SubmodularityError("mincut_minimize requires a submodular energy");
  const CutGraph g = build_cut_graph(f);

  mpz_class scale = 1;
  auto fold = [&](const Rational& r) {
    if (r != 0) mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), r.get_den().get_mpz_t());
  };
  for (std::size_t i = 0; i < g.source_cap.size(); ++i) {
    fold(g.source_cap[i]);
    fold(g.sink_cap[i]);
  }
  for (const auto& a : g.arcs) fold(a.cap);

  Rational total = 0;
  for (std::size_t i = 0; i < g.source_cap.size(); ++i) total += g.source_cap[i] + g.sink_cap[i];
  for (const auto& a : g.arcs) total += a.cap;
  const mpz_class scaled_total = mpz_class(total * scale);
  const mpz_class limit = mpz_class(1) << 62;

  Labeling x = scaled_total < limit ? solve_cut<std::int64_t>(g, scale, &to_int64) : solve_cut<mpz_class>(g, scale, &to_mpz);
  Rational value = evaluate_energy(f, x);
  return {std::move(x), std::move(value)};
}

MinimizeResult brute_minimize(const PairwiseEnergy& f) {
  const std::size_t n = f.size();
  if (n > kBruteForceLimit)
    throw CapacityError("brute_minimize supports at most " + std::to_string(kBruteForceLimit) + " variables, got " +
                        std::to_string(n));
  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t k = 0; k < f.edges().size(); ++k) {
    incident[f.edges()[k].u].push_back(k);
    incident[f.edges()[k].v].push_back(k);
  }

  Labeling x(n, 0);
  Rational value = evaluate_energy(f, x);
  Labeling best = x;
  Rational best_value = value;
  const std::uint64_t count = std::uint64_t{1} << n;
  // Gray code walk: each step flips one variable and updates the value
  // incrementally.
  for (std::uint64_t step = 1; step < count; ++step) {
    const auto j = static_cast<std::size_t>(std::countr_zero(step));
    const std::uint8_t old_bit = x[j];
    const std::uint8_t new_bit = old_bit ^ 1U;
    const auto& un = f.unary()[j];
    value += new_bit ? un.one - un.zero : un.zero - un.one;
    for (auto k : incident[j]) {
      const auto& e = f.edges()[k];
      if (e.u == j) {
        value += e.at(new_bit, x[e.v]) - e.at(old_bit, x[e.v]);
      } else {
        value += e.at(x[e.u], new_bit) - e.at(x[e.u], old_bit);
      }
    }
    x[j] = new_bit;
    if (value < best_value || (value == best_value && lexicographically_less(x, best))) {
      best_value = value;
      best = x;
    }
  }
  return {std::move(best), std::move(best_value)};
}

OraclePtr make_lagrangian_oracle(const LagrangianProblem& problem, Backend backend) {
  return std::make_shared<LagrangianOracle>(problem, backend);
}

OraclePtr make_shortest_path_oracle(PathGraph graph, std::size_t source, std::size_t target, RationalVector delay_target,
                                    Box box) {
  return std::make_shared<ShortestPathOracle>(std::move(graph), source, target, std::move(delay_target), std::move(box));
}

PairwiseEnergy project_selection_energy(std::span<const Rational> profits,
                                        std::span<const std::pair<std::size_t, std::size_t>> prerequisites) {
  const std::size_t n = profits.size();
  std::vector<UnaryTerm> unary(n);
  Rational penalty = 1;
  for (std::size_t i = 0; i < n; ++i) {
    unary[i] = {Rational(0), Rational(-profits[i])};
    penalty += abs(profits[i]);
  }
  std::vector<PairwiseTerm> edges;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;
  for (auto [needs, needed] : prerequisites) {
    if (needs >= n || needed >= n) throw ValidationError("prerequisite refers to an unknown project");
    if (needs == needed) throw ValidationError("prerequisite relation must be irreflexive");
    auto key = std::minmax(needs, needed);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, edges.size()).first;
      edges.push_back({key.first, key.second, 0, 0, 0, 0});
    }
    auto& e = edges[it->second];
    // Violation: needs selected (1), needed not selected (0).
    if (e.u == needs)
      e.t10 += penalty;
    else
      e.t01 += penalty;
  }
  return PairwiseEnergy(std::move(unary), std::move(edges));
}

ConstraintSpec group_count_constraint(std::string name, std::span<const std::size_t> members, std::size_t num_projects) {
  ConstraintSpec c;
  c.name = std::move(name);
  c.node_coeffs.assign(num_projects, Rational(0));
  for (auto i : members) {
    if (i >= num_projects) throw ValidationError("group member out of range");
    c.node_coeffs[i] = 1;
  }
  return c;
}

OraclePtr slack_wrap(OraclePtr inner, SlackBounds bounds) {
  return std::make_shared<SlackOracle>(std::move(inner), std::move(bounds));
}

OraclePtr restrict_oracle(OraclePtr inner, std::vector<bool> free_dims, RationalVector fixed_point, Box free_box) {
  return std::make_shared<RestrictedOracle>(std::move(inner), std::move(free_dims), std::move(fixed_point),
                                            std::move(free_box));
}

}  // namespace lagskel
