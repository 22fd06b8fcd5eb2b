#pragma once

// Vertex/edge skeleton of the concave piecewise-linear envelope
//   g_X(lambda) = min_{x in X} (constant_x + slope_x . lambda)
// over a box S, as the polyhedron {(lambda, z) : lambda in S, z <= g_X(lambda)}.
// Segment edges join finite vertices; each box corner additionally carries a
// vertical ray towards z = -infinity. Cutting with a new plane removes the
// vertices strictly above it, intersects the crossing edges and rays, and
// closes the new facet with the edges of its convex hull.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lagskel/energy.hpp"
#include "lagskel/hull.hpp"

namespace lagskel {

inline constexpr std::size_t kMaxSkeletonDimension = 3;

struct DualPoint {
  RationalVector lambda;
  Rational z;
  friend bool operator==(const DualPoint&, const DualPoint&) = default;
  friend bool operator<(const DualPoint& a, const DualPoint& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.z < b.z;
  }
};

/// A plane z = form(lambda) plus every labeling known to produce it.
struct Hyperplane {
  AffineFunction form;
  std::vector<Labeling> witnesses;
};

struct SkeletonVertex {
  std::size_t id = 0;
  DualPoint point;
  bool confirmed = false;
};

enum class EdgeKind { kSegment, kVerticalRay };

struct SkeletonEdge {
  std::size_t from = 0;
  std::size_t to = 0;  // unused for rays
  EdgeKind kind = EdgeKind::kSegment;
};

struct CutReport {
  bool applied = false;
  std::vector<std::size_t> added;     // new intersection vertices
  std::vector<std::size_t> removed;   // vertices strictly above the plane
  std::vector<std::size_t> on_plane;  // kept vertices lying exactly on the plane
};

class Skeleton {
 public:
  /// Initial skeleton: one vertex per box corner on `first`, the box's edges
  /// as segments and a ray per corner. Requires a full-dimensional box with
  /// 1 <= dimension <= 3.
  Skeleton(Box box, Hyperplane first);

  std::size_t dimension() const { return box_.size(); }
  const Box& box() const { return box_; }
  const std::vector<Hyperplane>& hyperplanes() const { return planes_; }
  std::optional<std::size_t> find_plane(const AffineFunction& form) const;
  void add_witness(const AffineFunction& form, const Labeling& x);

  /// Cuts with `plane`. `seed` may name a vertex known to lie strictly above
  /// it; otherwise one is searched. A plane already stored, or one with no
  /// vertex strictly above it, leaves the skeleton unchanged (applied=false).
  CutReport cut(const Hyperplane& plane, std::optional<std::size_t> seed = std::nullopt);

  /// min over stored planes at lambda. Throws DomainError outside the box.
  Rational envelope_value(std::span<const Rational> lambda) const;

  bool alive(std::size_t id) const { return id < nodes_.size() && nodes_[id].alive; }
  const SkeletonVertex& vertex(std::size_t id) const;
  std::vector<std::size_t> vertex_ids() const;
  std::size_t num_vertices() const { return alive_count_; }
  const std::vector<std::size_t>& neighbors(std::size_t id) const { return nodes_.at(id).adj; }
  bool has_ray(std::size_t id) const { return nodes_.at(id).ray; }
  std::vector<SkeletonEdge> edges() const;
  void confirm(std::size_t id);

  /// Number of stored planes and box faces passing through the vertex.
  std::size_t tight_count(std::size_t id) const;

  /// "v <id> <lambda...> <z> <0|1>" per vertex, then "e <id> <id|RAY>" per edge.
  std::string dump() const;

 private:
  struct Node {
    SkeletonVertex vertex;
    std::vector<std::size_t> adj;
    bool ray = false;
    bool alive = true;
  };

  std::size_t add_node(DualPoint p, bool ray);
  void link(std::size_t a, std::size_t b);
  void unlink(std::size_t a, std::size_t b);

  Box box_;
  std::vector<Node> nodes_;
  std::size_t alive_count_ = 0;
  std::vector<Hyperplane> planes_;
};

/// Edges of the convex hull of points lying on one non-vertical plane,
/// computed on their lambda projections; from/to index the input. Throws
/// UnsupportedDimensionError for more than 3 lambda coordinates.
std::vector<SkeletonEdge> conv_edge(std::span<const DualPoint> points);

}  // namespace lagskel
