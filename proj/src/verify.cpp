#include "lagskel/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "lagskel/errors.hpp"

namespace lagskel {
namespace {

struct Incidence {
  std::size_t edge;
  std::size_t other;
  bool is_u;
};

std::optional<RationalVector> solve(std::vector<RationalVector> a, RationalVector b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational factor = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= factor * a[c][k];
      b[r] -= factor * b[c];
    }
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= a[i][i];
  return b;
}

struct Face {
  RationalVector normal;  // over (lambda, z)
  Rational rhs;
};

std::vector<Face> faces_of(const Box& box, const std::vector<AffineFunction>& planes) {
  const std::size_t m = box.size();
  std::vector<Face> faces;
  for (const auto& p : planes) {
    RationalVector normal(m + 1);
    for (std::size_t i = 0; i < m; ++i) normal[i] = -p.slope[i];
    normal[m] = 1;
    faces.push_back({std::move(normal), p.constant});
  }
  for (std::size_t i = 0; i < m; ++i)
    for (const auto* bound : {&box.lower(), &box.upper()}) {
      RationalVector normal(m + 1);
      normal[i] = 1;
      faces.push_back({std::move(normal), (*bound)[i]});
    }
  return faces;
}

bool tight(const Face& face, const DualPoint& p) {
  Rational lhs = face.normal.back() * p.z;
  for (std::size_t i = 0; i < p.lambda.size(); ++i) lhs += face.normal[i] * p.lambda[i];
  return lhs == face.rhs;
}

bool feasible(const Box& box, const std::vector<AffineFunction>& planes, const DualPoint& p) {
  if (!box.contains(p.lambda)) return false;
  return std::all_of(planes.begin(), planes.end(), [&](const auto& h) { return p.z <= h.at(p.lambda); });
}

bool is_corner(const Box& box, const RationalVector& lambda) {
  for (std::size_t i = 0; i < box.size(); ++i)
    if (lambda[i] != box.lower()[i] && lambda[i] != box.upper()[i]) return false;
  return true;
}

Rational random_rational(std::mt19937_64& rng, int magnitude) {
  std::uniform_int_distribution<int> num(-magnitude, magnitude);
  std::uniform_int_distribution<int> den(1, 3);
  return make_rational(num(rng), den(rng));
}

std::string describe(const RationalVector& v) { return "(" + to_string(v) + ")"; }

}  // namespace

void for_each_labeling(const LagrangianProblem& problem,
                       const std::function<void(const Labeling&, const Rational&, const RationalVector&)>& visit) {
  const auto& f = problem.energy();
  const std::size_t n = f.size();
  if (n > kExhaustiveLimit)
    throw CapacityError("exhaustive enumeration is limited to " + std::to_string(kExhaustiveLimit) + " variables");
  const std::size_t m = problem.num_constraints();
  std::vector<std::vector<Incidence>> incident(n);
  for (std::size_t e = 0; e < f.edges().size(); ++e) {
    incident[f.edges()[e].u].push_back({e, f.edges()[e].v, true});
    incident[f.edges()[e].v].push_back({e, f.edges()[e].u, false});
  }
  Labeling x(n, 0);
  Rational value = evaluate_energy(f, x);
  RationalVector h = evaluate_constraints(problem, x);
  visit(x, value, h);
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::size_t i = static_cast<std::size_t>(__builtin_ctzll(k));
    const std::uint8_t old = x[i];
    const std::uint8_t now = old ^ 1;
    const int sign = now ? 1 : -1;
    const auto& u = f.unary()[i];
    value += now ? u.one - u.zero : u.zero - u.one;
    for (std::size_t c = 0; c < m; ++c) {
      const auto& spec = problem.constraints()[c];
      if (!spec.node_coeffs.empty()) h[c] += sign * spec.node_coeffs[i];
    }
    for (const auto& inc : incident[i]) {
      const auto& e = f.edges()[inc.edge];
      const std::uint8_t xo = x[inc.other];
      if (inc.is_u)
        value += e.at(now, xo) - e.at(old, xo);
      else
        value += e.at(xo, now) - e.at(xo, old);
      // |x_i - x_o| flips between 0 and 1.
      const int diff = (now != xo) ? 1 : -1;
      for (std::size_t c = 0; c < m; ++c) {
        const auto& w = problem.constraints()[c].edge_coeff;
        if (w != 0) h[c] += diff * w;
      }
    }
    x[i] = now;
    visit(x, value, h);
  }
}

ClassTable exhaustive_classes(const LagrangianProblem& problem) {
  ClassTable table;
  for_each_labeling(problem, [&](const Labeling& x, const Rational& value, const RationalVector& h) {
    auto it = table.find(h);
    if (it == table.end()) {
      table.emplace(h, ClassMinimum{value, x});
    } else if (value < it->second.f_value || (value == it->second.f_value && x < it->second.labeling)) {
      it->second = {value, x};
    }
  });
  return table;
}

Rational dual_from_classes(const ClassTable& table, const RationalVector& target, std::span<const Rational> lambda) {
  std::optional<Rational> best;
  for (const auto& [h, min] : table) {
    Rational v = min.f_value;
    for (std::size_t i = 0; i < h.size(); ++i) v += lambda[i] * (h[i] - target[i]);
    if (!best || v < *best) best = std::move(v);
  }
  if (!best) throw std::invalid_argument("empty class table");
  return *best;
}

SkeletonShape shape_of(const Skeleton& skeleton) {
  SkeletonShape shape;
  for (auto id : skeleton.vertex_ids())
    if (!shape.vertices.insert(skeleton.vertex(id).point).second) shape.duplicate_vertices = true;
  for (const auto& e : skeleton.edges()) {
    const auto& a = skeleton.vertex(e.from).point;
    if (e.kind == EdgeKind::kVerticalRay) {
      shape.rays.insert(a);
      continue;
    }
    const auto& b = skeleton.vertex(e.to).point;
    shape.edges.insert(b < a ? std::pair{b, a} : std::pair{a, b});
  }
  return shape;
}

SkeletonShape envelope_from_scratch(const Box& box, const std::vector<AffineFunction>& planes) {
  const std::size_t m = box.size();
  const auto faces = faces_of(box, planes);
  const std::size_t r = faces.size();
  SkeletonShape shape;

  std::vector<std::size_t> pick(m + 1);
  for (std::size_t i = 0; i <= m; ++i) pick[i] = i;
  while (r >= m + 1) {
    std::vector<RationalVector> a;
    RationalVector b;
    for (auto k : pick) {
      a.push_back(faces[k].normal);
      b.push_back(faces[k].rhs);
    }
    if (auto sol = solve(std::move(a), std::move(b))) {
      DualPoint p{RationalVector(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(m)), (*sol)[m]};
      if (feasible(box, planes, p)) shape.vertices.insert(std::move(p));
    }
    std::size_t i = m + 1;
    while (i > 0 && pick[i - 1] == r - (m + 1) + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j <= m; ++j) pick[j] = pick[j - 1] + 1;
  }

  const std::vector<DualPoint> verts(shape.vertices.begin(), shape.vertices.end());
  std::vector<std::vector<std::size_t>> tight_sets(verts.size());
  for (std::size_t v = 0; v < verts.size(); ++v) {
    for (std::size_t k = 0; k < r; ++k)
      if (tight(faces[k], verts[v])) tight_sets[v].push_back(k);
    if (is_corner(box, verts[v].lambda)) shape.rays.insert(verts[v]);
  }
  for (std::size_t u = 0; u < verts.size(); ++u)
    for (std::size_t w = u + 1; w < verts.size(); ++w) {
      std::vector<std::size_t> common;
      std::set_intersection(tight_sets[u].begin(), tight_sets[u].end(), tight_sets[w].begin(), tight_sets[w].end(),
                            std::back_inserter(common));
      if (common.size() < m) continue;
      std::vector<RationalVector> rows;
      for (auto k : common) rows.push_back(faces[k].normal);
      if (matrix_rank(std::move(rows)) == m) shape.edges.insert({verts[u], verts[w]});
    }
  return shape;
}

std::optional<std::size_t> first_skeleton_mismatch(const Skeleton& skeleton) {
  const auto& planes = skeleton.hyperplanes();
  Skeleton replay(skeleton.box(), planes.front());
  std::vector<AffineFunction> forms{planes.front().form};
  if (!(shape_of(replay) == envelope_from_scratch(skeleton.box(), forms))) return 0;
  for (std::size_t k = 1; k < planes.size(); ++k) {
    replay.cut(planes[k]);
    forms.push_back(planes[k].form);
    if (!(shape_of(replay) == envelope_from_scratch(skeleton.box(), forms))) return k;
  }
  if (!(shape_of(replay) == shape_of(skeleton))) return planes.size();
  return std::nullopt;
}

std::vector<CheckOutcome> run_invariant_suite(const LagrangianProblem& problem, Backend backend,
                                              const SuiteOptions& options) {
  std::vector<CheckOutcome> out;
  const auto oracle = make_lagrangian_oracle(problem, backend);
  const ClassTable classes = exhaustive_classes(problem);
  const SearchResult result = dual_search(*oracle, problem.box());
  const auto& entries = result.set.entries();
  const Box& box = problem.box();
  const std::size_t m = box.size();

  {
    CheckOutcome c{"characteristic-set optimality", true, ""};
    for (const auto& e : entries) {
      const auto& best = classes.at(e.h_value);
      if (best.f_value != e.f_value) {
        c.passed = false;
        c.detail = "labeling " + to_bitstring(e.labeling) + " has f=" + to_string(e.f_value) + " but H=" +
                   describe(e.h_value) + " admits f=" + to_string(best.f_value) + " via " + to_bitstring(best.labeling);
        break;
      }
    }
    out.push_back(std::move(c));
  }

  {
    CheckOutcome c{"completeness on lambda grid", true, ""};
    const std::size_t steps = std::max<std::size_t>(options.grid_steps, 1);
    std::vector<std::size_t> k(m, 0);
    for (bool more = true; more && c.passed;) {
      RationalVector lambda(m);
      for (std::size_t i = 0; i < m; ++i)
        lambda[i] = box.lower()[i] +
                    (box.upper()[i] - box.lower()[i]) * make_rational(static_cast<long>(k[i]), static_cast<long>(steps));
      const Rational truth = dual_from_classes(classes, problem.target(), lambda);
      std::optional<Rational> found;
      for (const auto& e : entries) {
        Rational v = e.f_value;
        for (std::size_t i = 0; i < m; ++i) v += lambda[i] * (e.h_value[i] - problem.target()[i]);
        if (!found || v < *found) found = std::move(v);
      }
      if (*found != truth) {
        c.passed = false;
        c.detail = "at lambda=" + describe(lambda) + " the set gives " + to_string(*found) + " but g=" + to_string(truth);
      }
      std::size_t i = 0;
      while (i < m && ++k[i] > steps) k[i++] = 0;
      more = i < m;
    }
    out.push_back(std::move(c));
  }

  {
    CheckOutcome c{"skeleton equals envelope after every cut", true, ""};
    if (auto step = first_skeleton_mismatch(result.skeleton)) {
      c.passed = false;
      c.detail = "mismatch after cut " + std::to_string(*step);
    }
    out.push_back(std::move(c));
  }

  {
    const auto& r = result.report;
    CheckOutcome c{"oracle call count", true, ""};
    std::ostringstream d;
    d << "calls=" << r.oracle_calls << " vertices=" << r.num_vertices << " minimizers=" << r.num_minimizers
      << " planes=" << r.cut_planes << " degenerate=" << r.degenerate_vertices << " ties=" << r.tie_minimizers
      << (r.general_position() ? " general-position" : " degenerate-instance");
    c.detail = d.str();
    c.passed = r.oracle_calls == r.num_vertices + r.cut_planes &&
               (!r.general_position() || r.cut_planes == r.num_minimizers);
    out.push_back(std::move(c));
  }

  {
    CheckOutcome c{"weak duality and dual maximum", true, ""};
    std::size_t tried = 0;
    for (const auto& [h, best] : classes) {
      if (tried++ >= options.max_targets) break;
      const auto target_oracle = make_lagrangian_oracle(problem.with_target(h), backend);
      const DualMaxResult dm = dual_max(*target_oracle, box);
      Rational peak;
      bool first = true;
      for (auto id : result.skeleton.vertex_ids()) {
        const auto& p = result.skeleton.vertex(id).point;
        Rational z = p.z;
        for (std::size_t i = 0; i < m; ++i) z -= p.lambda[i] * (h[i] - problem.target()[i]);
        if (first || z > peak) peak = std::move(z);
        first = false;
      }
      std::string failure;
      if (dm.value > best.f_value)
        failure = "dual value " + to_string(dm.value) + " exceeds constrained minimum " + to_string(best.f_value);
      else if (dm.value != peak)
        failure = "dual value " + to_string(dm.value) + " differs from skeleton maximum " + to_string(peak);
      else if (result.set.contains(best.f_value, h) && dm.value != best.f_value)
        failure = "zero gap expected but dual value is " + to_string(dm.value);
      if (!failure.empty()) {
        c.passed = false;
        c.detail = "target " + describe(h) + ": " + failure;
        break;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

LagrangianProblem random_instance(std::uint64_t seed, const RandomInstanceOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  std::bernoulli_distribution coin_edge(options.edge_probability);
  std::bernoulli_distribution coin_edge_constraint(options.edge_constraint_probability);

  const std::size_t n = uniform(options.min_nodes, options.max_nodes);
  const std::size_t m = uniform(options.min_constraints, options.max_constraints);

  std::vector<UnaryTerm> unary(n);
  for (auto& u : unary) u = {random_rational(rng, 4), random_rational(rng, 4)};
  std::vector<PairwiseTerm> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (!coin_edge(rng)) continue;
      PairwiseTerm e{u, v, random_rational(rng, 3), random_rational(rng, 3), 0, random_rational(rng, 3)};
      const Rational need = e.t00 + e.t11 - e.t01;
      e.t10 = std::max<Rational>(need, need + random_rational(rng, 3) + 3);
      edges.push_back(std::move(e));
    }
  PairwiseEnergy f(std::move(unary), std::move(edges));

  std::vector<ConstraintSpec> constraints;
  bool edge_used = false;
  for (std::size_t c = 0; c < m; ++c) {
    ConstraintSpec spec{"h" + std::to_string(c + 1), RationalVector(n), 0, 0};
    for (auto& a : spec.node_coeffs) a = Rational(std::uniform_int_distribution<int>(-2, 2)(rng));
    if (!edge_used && !f.edges().empty() && coin_edge_constraint(rng)) {
      spec.edge_coeff = Rational(static_cast<long>(uniform(1, 2)));
      edge_used = true;
    }
    if (spec.edge_coeff == 0 && std::all_of(spec.node_coeffs.begin(), spec.node_coeffs.end(), [](auto& a) { return a == 0; }))
      spec.node_coeffs[uniform(0, n - 1)] = 1;
    constraints.push_back(std::move(spec));
  }

  RationalVector lo(m), hi(m);
  for (std::size_t c = 0; c < m; ++c) {
    const Rational half(static_cast<long>(uniform(2, 5)));
    lo[c] = -half;
    hi[c] = half;
  }
  LagrangianProblem problem(f, constraints, {}, Box(lo, hi));
  const auto bounds = submodularity_lambda_bound(problem);
  for (std::size_t c = 0; c < m; ++c)
    if (bounds[c] && *bounds[c] > lo[c]) lo[c] = *bounds[c];
  return problem.with_box(Box(lo, hi));
}

}  // namespace lagskel
