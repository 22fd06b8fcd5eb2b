#include "lagskel/energy.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "lagskel/errors.hpp"

namespace lagskel {

std::string to_bitstring(const Labeling& x) {
  std::string s;
  s.reserve(x.size());
  for (auto bit : x) s.push_back(bit ? '1' : '0');
  return s;
}

const Rational& PairwiseTerm::at(std::uint8_t xu, std::uint8_t xv) const {
  if (xu) return xv ? t11 : t10;
  return xv ? t01 : t00;
}

PairwiseEnergy::PairwiseEnergy(std::vector<UnaryTerm> unary, std::vector<PairwiseTerm> edges, Rational constant)
    : unary_(std::move(unary)), edges_(std::move(edges)), constant_(std::move(constant)) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& e : edges_) {
    if (e.u >= unary_.size() || e.v >= unary_.size())
      throw ValidationError("edge endpoint out of range: (" + std::to_string(e.u) + ", " + std::to_string(e.v) + ")");
    if (e.u == e.v) throw ValidationError("self loop on node " + std::to_string(e.u));
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert(key).second)
      throw ValidationError("duplicate edge (" + std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
  }
}

Rational evaluate_energy(const PairwiseEnergy& f, const Labeling& x) {
  if (x.size() != f.size())
    throw DimensionError("labeling has length " + std::to_string(x.size()) + ", energy has " +
                         std::to_string(f.size()) + " variables");
  Rational sum = f.constant();
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] ? f.unary()[i].one : f.unary()[i].zero;
  for (const auto& e : f.edges()) sum += e.at(x[e.u], x[e.v]);
  return sum;
}

bool is_submodular(const PairwiseEnergy& f) {
  return std::all_of(f.edges().begin(), f.edges().end(),
                     [](const PairwiseTerm& e) { return e.t01 + e.t10 >= e.t00 + e.t11; });
}

Box::Box(RationalVector lower, RationalVector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw DimensionError("box bounds have different lengths");
  for (std::size_t i = 0; i < lower_.size(); ++i)
    if (lower_[i] > upper_[i])
      throw ValidationError("box dimension " + std::to_string(i) + " has lower bound above upper bound");
}

Box Box::cube(std::size_t dims, const Rational& half_width) {
  return Box(RationalVector(dims, -half_width), RationalVector(dims, half_width));
}

bool Box::contains(std::span<const Rational> lambda) const {
  if (lambda.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (lambda[i] < lower_[i] || lambda[i] > upper_[i]) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.size() != size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (other.lower_[i] < lower_[i] || other.upper_[i] > upper_[i]) return false;
  return true;
}

bool Box::full_dimensional() const {
  for (std::size_t i = 0; i < size(); ++i)
    if (!(lower_[i] < upper_[i])) return false;
  return true;
}

RationalVector Box::corner(std::size_t index) const {
  const std::size_t m = size();
  RationalVector c(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool high = (index >> (m - 1 - i)) & 1U;
    c[i] = high ? upper_[i] : lower_[i];
  }
  return c;
}

std::vector<RationalVector> Box::corners() const {
  std::vector<RationalVector> out;
  const std::size_t count = std::size_t{1} << size();
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(corner(k));
  return out;
}

Rational AffineFunction::at(std::span<const Rational> lambda) const { return constant + dot(slope, lambda); }

LagrangianProblem::LagrangianProblem(PairwiseEnergy f, std::vector<ConstraintSpec> constraints, RationalVector target,
                                     Box box)
    : f_(std::move(f)), constraints_(std::move(constraints)), target_(std::move(target)), box_(std::move(box)) {
  const std::size_t m = constraints_.size();
  if (m == 0) throw ValidationError("a problem needs at least one constraint");
  if (target_.empty()) target_.assign(m, Rational(0));
  if (target_.size() != m)
    throw DimensionError("target has " + std::to_string(target_.size()) + " entries for " + std::to_string(m) +
                         " constraints");
  if (box_.size() != m)
    throw DimensionError("box has " + std::to_string(box_.size()) + " dimensions for " + std::to_string(m) +
                         " constraints");
  if (!box_.full_dimensional()) throw ValidationError("search box must satisfy lower < upper in every dimension");
  for (auto& c : constraints_) {
    if (c.node_coeffs.empty()) c.node_coeffs.assign(f_.size(), Rational(0));
    if (c.node_coeffs.size() != f_.size())
      throw DimensionError("constraint '" + c.name + "' has " + std::to_string(c.node_coeffs.size()) +
                           " node coefficients for " + std::to_string(f_.size()) + " variables");
    const bool any_node = std::any_of(c.node_coeffs.begin(), c.node_coeffs.end(), [](const Rational& a) { return a != 0; });
    if (!any_node && c.edge_coeff == 0)
      throw ValidationError("constraint '" + c.name + "' has neither node nor edge coefficients");
  }
}

LagrangianProblem LagrangianProblem::with_target(RationalVector target) const {
  LagrangianProblem copy = *this;
  if (target.size() != num_constraints()) throw DimensionError("target length does not match constraint count");
  copy.target_ = std::move(target);
  return copy;
}

LagrangianProblem LagrangianProblem::with_box(Box box) const {
  if (box.size() != num_constraints()) throw DimensionError("box dimension does not match constraint count");
  if (!box.full_dimensional()) throw ValidationError("search box must satisfy lower < upper in every dimension");
  LagrangianProblem copy = *this;
  copy.box_ = std::move(box);
  return copy;
}

RationalVector evaluate_constraints(const LagrangianProblem& problem, const Labeling& x) {
  const auto& f = problem.energy();
  if (x.size() != f.size())
    throw DimensionError("labeling has length " + std::to_string(x.size()) + ", problem has " +
                         std::to_string(f.size()) + " variables");
  std::size_t disagreements = 0;
  for (const auto& e : f.edges()) disagreements += x[e.u] != x[e.v];
  RationalVector h;
  h.reserve(problem.num_constraints());
  for (const auto& c : problem.constraints()) {
    Rational value = c.offset + c.edge_coeff * static_cast<unsigned long>(disagreements);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i]) value += c.node_coeffs[i];
    h.push_back(std::move(value));
  }
  return h;
}

Rational evaluate_lagrangian(const LagrangianProblem& problem, const Labeling& x, std::span<const Rational> lambda) {
  if (lambda.size() != problem.num_constraints()) throw DimensionError("multiplier length does not match constraint count");
  auto h = evaluate_constraints(problem, x);
  Rational value = evaluate_energy(problem.energy(), x);
  for (std::size_t i = 0; i < h.size(); ++i) value += lambda[i] * (h[i] - problem.target()[i]);
  return value;
}

PairwiseEnergy assemble_lagrangian(const LagrangianProblem& problem, std::span<const Rational> lambda) {
  const std::size_t m = problem.num_constraints();
  if (lambda.size() != m) throw DimensionError("multiplier length does not match constraint count");
  if (!problem.box().contains(lambda)) throw DomainError("multiplier (" + to_string(lambda) + ") is outside the search box");

  const auto& f = problem.energy();
  std::vector<UnaryTerm> unary = f.unary();
  std::vector<PairwiseTerm> edges = f.edges();
  Rational constant = f.constant();
  Rational disagreement = 0;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& c = problem.constraints()[k];
    const Rational& l = lambda[k];
    if (l == 0) continue;
    constant += l * (c.offset - problem.target()[k]);
    for (std::size_t i = 0; i < unary.size(); ++i)
      if (c.node_coeffs[i] != 0) unary[i].one += l * c.node_coeffs[i];
    disagreement += l * c.edge_coeff;
  }
  if (disagreement != 0) {
    for (auto& e : edges) {
      e.t01 += disagreement;
      e.t10 += disagreement;
    }
  }
  return PairwiseEnergy(std::move(unary), std::move(edges), std::move(constant));
}

std::vector<std::optional<Rational>> submodularity_lambda_bound(const LagrangianProblem& problem) {
  std::vector<std::optional<Rational>> bounds;
  const auto& edges = problem.energy().edges();
  for (const auto& c : problem.constraints()) {
    if (c.edge_coeff < 0)
      throw ConfigurationError("constraint '" + c.name +
                               "' has a negative edge coefficient; disagreement coefficients must be positive");
    if (c.edge_coeff == 0 || edges.empty()) {
      bounds.emplace_back(std::nullopt);
      continue;
    }
    std::optional<Rational> worst;
    for (const auto& e : edges) {
      Rational excess = e.t00 + e.t11 - e.t01 - e.t10;
      if (!worst || excess > *worst) worst = excess;
    }
    bounds.emplace_back(Rational(*worst / (2 * c.edge_coeff)));
  }
  return bounds;
}

}  // namespace lagskel
