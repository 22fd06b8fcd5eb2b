#pragma once

// Grid segmentation energies with shape-statistic constraints, plus a
// synthetic image generator used for the segmentation experiments.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lagskel/energy.hpp"

namespace lagskel {

/// A 4-connected grid of height x width pixels stored row-major. Pixel
/// (row, col) has coordinates v = row + 1, h = col + 1.
struct GridProblem {
  std::size_t width = 0;
  std::size_t height = 0;
  RationalVector cost0;  // cost of label 0 per pixel
  RationalVector cost1;  // cost of label 1 per pixel
  Rational beta = 0;
  // Optional per-edge multipliers of beta, in grid_edges order.
  std::optional<RationalVector> edge_weights;

  std::size_t size() const { return width * height; }
  std::size_t index(std::size_t row, std::size_t col) const { return row * width + col; }
  Rational v(std::size_t i) const { return Rational(static_cast<unsigned long>(i / width + 1)); }
  Rational h(std::size_t i) const { return Rational(static_cast<unsigned long>(i % width + 1)); }
};

/// Right then down neighbour of each pixel, pixels in row-major order.
std::vector<std::pair<std::size_t, std::size_t>> grid_edges(std::size_t width, std::size_t height);

/// Unaries from the cost maps and a Potts table (0, b, b, 0) per edge with
/// b = beta * weight. Throws ValidationError for negative beta or weights and
/// DimensionError for mismatched cost maps.
PairwiseEnergy build_grid_energy(const GridProblem& grid);

ConstraintSpec size_constraint(std::size_t n);

/// (sum_i (v_i - b_v) x_i, sum_i (h_i - b_h) x_i); both vanish on a nonempty
/// labeling exactly when its mean coordinate equals b_hat.
std::pair<ConstraintSpec, ConstraintSpec> mean_constraint(const GridProblem& grid, const std::array<Rational, 2>& b_hat);

/// sum_i ((v_i - mu_v)(h_i - mu_h) - b_hat) x_i.
ConstraintSpec covariance_constraint(const GridProblem& grid, const std::array<Rational, 2>& mu, const Rational& b_hat);

enum class Axis { kVertical, kHorizontal };

/// sum_i ((c_i - mu)^2 - b_hat) x_i along one axis.
ConstraintSpec variance_constraint(const GridProblem& grid, Axis axis, const Rational& mu, const Rational& b_hat);

struct BoundaryConstraint {
  ConstraintSpec spec;
  // Smallest multiplier keeping the Lagrangian submodular.
  Rational lower_bound;
};

/// Number of disagreeing neighbour pairs.
BoundaryConstraint boundary_constraint(const GridProblem& grid);

enum class StatisticKind { kSize, kMean, kCovariance, kVariance, kBoundary };

/// Upper bound on the number of distinct constraint values over nonempty
/// labelings of an n-pixel grid: n for size, 2n for boundary, n^3 otherwise.
std::size_t instance_count_bound(StatisticKind kind, std::size_t n);

/// Synthetic segmentation instance: an elliptic ground-truth blob and noisy
/// integer intensities, turned into per-pixel costs |I - mean_label|.
struct SyntheticImage {
  std::size_t width = 0;
  std::size_t height = 0;
  Labeling truth;
  std::vector<std::uint8_t> intensity;
  RationalVector cost0;
  RationalVector cost1;
};

SyntheticImage synthetic_blob(std::size_t width, std::size_t height, std::uint64_t seed, double noise_sigma = 60.0);

std::size_t pixel_error(const Labeling& a, const Labeling& b);

}  // namespace lagskel
