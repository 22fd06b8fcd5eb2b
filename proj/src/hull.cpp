#include "lagskel/hull.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <map>
#include <optional>
#include <set>

#include "lagskel/errors.hpp"

namespace lagskel {
namespace {

using Vec3 = std::array<Rational, 3>;

Vec3 to_vec3(const RationalVector& p) { return {p[0], p[1], p[2]}; }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Rational dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
Vec3 combine(const Rational& s, const Vec3& a, const Rational& t, const Vec3& b) {
  return {s * a[0] + t * b[0], s * a[1] + t * b[1], s * a[2] + t * b[2]};
}
bool is_zero(const Vec3& v) { return v[0] == 0 && v[1] == 0 && v[2] == 0; }

Rational orient2d(const RationalVector& a, const RationalVector& b, const RationalVector& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Strictly convex hull in CCW order (collinear points dropped). `pts` are 2D.
std::vector<std::size_t> monotone_chain(const std::vector<RationalVector>& pts, std::vector<std::size_t> ids) {
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
  if (ids.size() < 3) return ids;
  std::vector<std::size_t> hull(2 * ids.size());
  std::size_t k = 0;
  for (auto id : ids) {
    while (k >= 2 && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[id]) <= 0) --k;
    hull[k++] = id;
  }
  const std::size_t lower = k + 1;
  for (auto it = ids.rbegin() + 1; it != ids.rend(); ++it) {
    while (k >= lower && orient2d(pts[hull[k - 2]], pts[hull[k - 1]], pts[*it]) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

IndexEdge ordered(std::size_t a, std::size_t b) { return a < b ? IndexEdge{a, b} : IndexEdge{b, a}; }

void add_cycle(const std::vector<std::size_t>& cycle, std::set<IndexEdge>& out) {
  if (cycle.size() == 2) {
    out.insert(ordered(cycle[0], cycle[1]));
    return;
  }
  for (std::size_t i = 0; i < cycle.size(); ++i) out.insert(ordered(cycle[i], cycle[(i + 1) % cycle.size()]));
}

// Extremes of collinear points.
IndexEdge segment_extremes(const std::vector<RationalVector>& pts, const std::vector<std::size_t>& ids) {
  auto lo = *std::min_element(ids.begin(), ids.end(), [&](auto a, auto b) { return pts[a] < pts[b]; });
  auto hi = *std::max_element(ids.begin(), ids.end(), [&](auto a, auto b) { return pts[a] < pts[b]; });
  return ordered(lo, hi);
}

// Projects coplanar 3D points with plane normal n onto the coordinate plane
// where n has a nonzero component.
std::vector<RationalVector> project_plane(const std::vector<RationalVector>& pts, const Vec3& n) {
  std::size_t drop = n[0] != 0 ? 0 : (n[1] != 0 ? 1 : 2);
  std::vector<RationalVector> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    RationalVector q;
    for (std::size_t i = 0; i < 3; ++i)
      if (i != drop) q.push_back(p[i]);
    out.push_back(std::move(q));
  }
  return out;
}

class GiftWrap {
 public:
  explicit GiftWrap(const std::vector<RationalVector>& pts) : pts_(pts) {
    for (const auto& p : pts_) v_.push_back(to_vec3(p));
  }

  std::set<IndexEdge> run(const std::vector<std::size_t>& ids) {
    ids_ = ids;
    auto [normal, anchor] = initial_facet();
    emit_facet(normal, anchor);
    while (!pending_.empty()) {
      auto [a, b, n] = pending_.front();
      pending_.pop_front();
      if (directed_.count({b, a})) continue;
      Vec3 next = pivot(a, sub(v_[b], v_[a]), n);
      emit_facet(next, a);
      if (!directed_.count({b, a})) throw InternalError("gift wrapping lost track of a hull edge");
    }
    return edges_;
  }

 private:
  struct Pending {
    std::size_t a, b;
    Vec3 normal;
  };

  // Rotates the supporting plane with outward normal n about the axis through
  // point a with direction u (n . u == 0) until it hits the first point not
  // on the current plane. Returns the new outward normal.
  Vec3 pivot(std::size_t a, const Vec3& u, const Vec3& n) const {
    const Vec3 r = cross(u, n);
    std::optional<std::size_t> best;
    Rational best_alpha, best_beta;
    for (auto p : ids_) {
      const Vec3 d = sub(v_[p], v_[a]);
      Rational alpha = dot3(n, d);
      if (alpha == 0) continue;
      Rational beta = dot3(r, d);
      if (!best || alpha * best_beta > best_alpha * beta) {
        best = p;
        best_alpha = std::move(alpha);
        best_beta = std::move(beta);
      }
    }
    if (!best) throw InternalError("gift wrapping pivot found no candidate");
    return combine(best_beta, n, -best_alpha, r);
  }

  std::vector<std::size_t> on_plane(const Vec3& n, std::size_t anchor) const {
    std::vector<std::size_t> out;
    for (auto p : ids_)
      if (dot3(n, sub(v_[p], v_[anchor])) == 0) out.push_back(p);
    return out;
  }

  bool collinear(const std::vector<std::size_t>& ids) const {
    if (ids.size() < 3) return true;
    const Vec3 d = sub(v_[ids[1]], v_[ids[0]]);
    for (std::size_t k = 2; k < ids.size(); ++k)
      if (!is_zero(cross(d, sub(v_[ids[k]], v_[ids[0]])))) return false;
    return true;
  }

  // The other extreme of a collinear set that contains the lexicographic
  // minimum `a` of all points.
  std::size_t far_extreme(std::size_t a, const std::vector<std::size_t>& ids) const {
    std::size_t far = a;
    for (auto p : ids)
      if (pts_[p] > pts_[far]) far = p;
    return far;
  }

  std::pair<Vec3, std::size_t> initial_facet() const {
    const std::size_t a = *std::min_element(ids_.begin(), ids_.end(), [&](auto x, auto y) { return pts_[x] < pts_[y]; });
    Vec3 n0{Rational(-1), Rational(0), Rational(0)};
    auto support = on_plane(n0, a);
    if (!collinear(support)) return {n0, a};
    Vec3 n1;
    if (support.size() >= 2) {
      n1 = pivot(a, sub(v_[far_extreme(a, support)], v_[a]), n0);
      return {n1, a};
    }
    n1 = pivot(a, Vec3{Rational(0), Rational(1), Rational(0)}, n0);
    support = on_plane(n1, a);
    if (!collinear(support)) return {n1, a};
    return {pivot(a, sub(v_[far_extreme(a, support)], v_[a]), n1), a};
  }

  void emit_facet(const Vec3& n, std::size_t anchor) {
    auto ids = on_plane(n, anchor);
    auto projected = project_plane(pts_, n);
    auto cycle = monotone_chain(projected, ids);
    if (cycle.size() < 3) throw InternalError("gift wrapping produced a degenerate facet");
    // Orient counter-clockwise as seen from outside.
    const Vec3 turn = cross(sub(v_[cycle[1]], v_[cycle[0]]), sub(v_[cycle[2]], v_[cycle[0]]));
    if (dot3(turn, n) < 0) std::reverse(cycle.begin(), cycle.end());
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const std::size_t a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      directed_.insert({a, b});
      edges_.insert(ordered(a, b));
      pending_.push_back({a, b, n});
    }
  }

  const std::vector<RationalVector>& pts_;
  std::vector<Vec3> v_;
  std::vector<std::size_t> ids_;
  std::set<std::pair<std::size_t, std::size_t>> directed_;
  std::set<IndexEdge> edges_;
  std::deque<Pending> pending_;
};

}  // namespace

std::size_t matrix_rank(std::vector<RationalVector> rows) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && rows[pivot][c] == 0) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = rank + 1; r < rows.size(); ++r) {
      if (rows[r][c] == 0) continue;
      Rational factor = rows[r][c] / rows[rank][c];
      for (std::size_t k = c; k < cols; ++k) rows[r][k] -= factor * rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

int affine_dimension(std::span<const RationalVector> points) {
  if (points.empty()) return -1;
  std::vector<RationalVector> diffs;
  for (std::size_t i = 1; i < points.size(); ++i) {
    RationalVector d(points[i].size());
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = points[i][k] - points[0][k];
    diffs.push_back(std::move(d));
  }
  return static_cast<int>(matrix_rank(std::move(diffs)));
}

std::vector<IndexEdge> hull_edges(std::span<const RationalVector> points) {
  if (points.empty()) return {};
  const std::size_t dims = points[0].size();
  if (dims > 3) throw UnsupportedDimensionError("hull edges are supported for at most 3 dimensions");
  for (const auto& p : points)
    if (p.size() != dims) throw DimensionError("hull points have mixed dimensions");

  std::vector<RationalVector> pts(points.begin(), points.end());
  std::vector<std::size_t> ids;
  {
    std::map<RationalVector, std::size_t> first;
    for (std::size_t i = 0; i < pts.size(); ++i)
      if (first.emplace(pts[i], i).second) ids.push_back(i);
  }
  if (ids.size() < 2) return {};

  std::vector<RationalVector> unique;
  for (auto i : ids) unique.push_back(pts[i]);
  const int rank = affine_dimension(unique);

  std::set<IndexEdge> edges;
  if (rank == 1) {
    edges.insert(segment_extremes(pts, ids));
  } else if (rank == 2) {
    std::vector<RationalVector> planar = pts;
    if (dims == 3) {
      Vec3 n;
      const Vec3 p0 = to_vec3(unique[0]);
      for (std::size_t i = 1; i < unique.size() && is_zero(n); ++i)
        for (std::size_t j = i + 1; j < unique.size() && is_zero(n); ++j)
          n = cross(sub(to_vec3(unique[i]), p0), sub(to_vec3(unique[j]), p0));
      planar = project_plane(pts, n);
    }
    add_cycle(monotone_chain(planar, ids), edges);
  } else {
    GiftWrap wrap(pts);
    edges = wrap.run(ids);
  }
  return {edges.begin(), edges.end()};
}

}  // namespace lagskel
