#include "lagskel/domains.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lagskel/errors.hpp"

namespace lagskel {

std::vector<std::pair<std::size_t, std::size_t>> grid_edges(std::size_t width, std::size_t height) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t i = r * width + c;
      if (c + 1 < width) edges.emplace_back(i, i + 1);
      if (r + 1 < height) edges.emplace_back(i, i + width);
    }
  return edges;
}

PairwiseEnergy build_grid_energy(const GridProblem& grid) {
  const std::size_t n = grid.size();
  if (grid.cost0.size() != n || grid.cost1.size() != n)
    throw DimensionError("cost maps must have width*height entries");
  if (grid.beta < 0) throw ValidationError("smoothness weight beta must be nonnegative");
  const auto edges = grid_edges(grid.width, grid.height);
  if (grid.edge_weights && grid.edge_weights->size() != edges.size())
    throw DimensionError("edge weights must have one entry per grid edge");

  std::vector<UnaryTerm> unary(n);
  for (std::size_t i = 0; i < n; ++i) unary[i] = {grid.cost0[i], grid.cost1[i]};
  std::vector<PairwiseTerm> pairs;
  pairs.reserve(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    Rational b = grid.beta;
    if (grid.edge_weights) {
      if ((*grid.edge_weights)[e] < 0) throw ValidationError("edge weights must be nonnegative");
      b *= (*grid.edge_weights)[e];
    }
    pairs.push_back({edges[e].first, edges[e].second, 0, b, b, 0});
  }
  return PairwiseEnergy(std::move(unary), std::move(pairs));
}

ConstraintSpec size_constraint(std::size_t n) { return {"size", RationalVector(n, Rational(1)), 0, 0}; }

std::pair<ConstraintSpec, ConstraintSpec> mean_constraint(const GridProblem& grid, const std::array<Rational, 2>& b_hat) {
  ConstraintSpec mv{"mean_v", {}, 0, 0}, mh{"mean_h", {}, 0, 0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    mv.node_coeffs.push_back(grid.v(i) - b_hat[0]);
    mh.node_coeffs.push_back(grid.h(i) - b_hat[1]);
  }
  return {std::move(mv), std::move(mh)};
}

ConstraintSpec covariance_constraint(const GridProblem& grid, const std::array<Rational, 2>& mu, const Rational& b_hat) {
  ConstraintSpec c{"cov", {}, 0, 0};
  for (std::size_t i = 0; i < grid.size(); ++i)
    c.node_coeffs.push_back((grid.v(i) - mu[0]) * (grid.h(i) - mu[1]) - b_hat);
  return c;
}

ConstraintSpec variance_constraint(const GridProblem& grid, Axis axis, const Rational& mu, const Rational& b_hat) {
  ConstraintSpec c{axis == Axis::kVertical ? "var_v" : "var_h", {}, 0, 0};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Rational d = (axis == Axis::kVertical ? grid.v(i) : grid.h(i)) - mu;
    c.node_coeffs.push_back(d * d - b_hat);
  }
  return c;
}

BoundaryConstraint boundary_constraint(const GridProblem& grid) {
  // Potts tables give t00 + t11 - t01 - t10 = -2b, so the bound is -max b.
  Rational bound = 0;
  bool any = false;
  const std::size_t count = grid_edges(grid.width, grid.height).size();
  for (std::size_t e = 0; e < count; ++e) {
    Rational b = grid.beta;
    if (grid.edge_weights) b *= (*grid.edge_weights)[e];
    if (!any || -b > bound) bound = -b;
    any = true;
  }
  return {{"boundary", {}, 1, 0}, bound};
}

std::size_t instance_count_bound(StatisticKind kind, std::size_t n) {
  switch (kind) {
    case StatisticKind::kSize:
      return n;
    case StatisticKind::kBoundary:
      return 2 * n;
    default:
      return n * n * n;
  }
}

SyntheticImage synthetic_blob(std::size_t width, std::size_t height, std::uint64_t seed, double noise_sigma) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double cy = height * (0.35 + 0.3 * unit(rng));
  const double cx = width * (0.35 + 0.3 * unit(rng));
  const double ry = height * (0.15 + 0.15 * unit(rng));
  const double rx = width * (0.15 + 0.15 * unit(rng));
  constexpr int kBackground = 80, kForeground = 170;
  std::normal_distribution<double> noise(0.0, noise_sigma);

  SyntheticImage img;
  img.width = width;
  img.height = height;
  const std::size_t n = width * height;
  img.truth.resize(n);
  img.intensity.resize(n);
  img.cost0.resize(n);
  img.cost1.resize(n);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t i = r * width + c;
      const double dy = (r + 0.5 - cy) / ry, dx = (c + 0.5 - cx) / rx;
      img.truth[i] = dy * dy + dx * dx <= 1.0;
      const double value = (img.truth[i] ? kForeground : kBackground) + noise(rng);
      const int level = static_cast<int>(std::clamp(std::lround(value), 0L, 255L));
      img.intensity[i] = static_cast<std::uint8_t>(level);
      img.cost0[i] = std::abs(level - kBackground);
      img.cost1[i] = std::abs(level - kForeground);
    }
  return img;
}

std::size_t pixel_error(const Labeling& a, const Labeling& b) {
  if (a.size() != b.size()) throw DimensionError("labelings differ in length");
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) count += a[i] != b[i];
  return count;
}

}  // namespace lagskel
