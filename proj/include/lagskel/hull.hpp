#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lagskel/rational.hpp"

namespace lagskel {

using IndexEdge = std::pair<std::size_t, std::size_t>;

/// Edges (1-faces) of the convex hull of points in R^d, d <= 3, as index
/// pairs (i < j) into the input. Points that are not extreme never appear;
/// duplicated points are represented by their first occurrence. Inputs of
/// lower affine dimension are handled (a segment yields one edge). Fewer
/// than two distinct points yield no edges. Throws
/// UnsupportedDimensionError for d > 3.
///
/// d = 1: the two extremes. d = 2: exact monotone chain. d = 3: gift
/// wrapping across facets, where each facet's full coplanar point set is
/// reduced to its 2D hull so degenerate (non-triangular) facets come out
/// right.
std::vector<IndexEdge> hull_edges(std::span<const RationalVector> points);

/// Affine dimension of the point set (-1 for an empty set).
int affine_dimension(std::span<const RationalVector> points);

/// Rank of a set of row vectors, exact.
std::size_t matrix_rank(std::vector<RationalVector> rows);

}  // namespace lagskel
