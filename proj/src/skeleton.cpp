#include "lagskel/skeleton.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "lagskel/errors.hpp"

namespace lagskel {

Skeleton::Skeleton(Box box, Hyperplane first) : box_(std::move(box)) {
  const std::size_t m = box_.size();
  if (m == 0 || m > kMaxSkeletonDimension)
    throw UnsupportedDimensionError("skeletons support 1 to " + std::to_string(kMaxSkeletonDimension) +
                                    " multiplier dimensions, got " + std::to_string(m));
  if (!box_.full_dimensional()) throw ValidationError("skeleton box must be full-dimensional");
  if (first.form.slope.size() != m) throw DimensionError("plane slope length does not match box dimension");

  const std::size_t count = std::size_t{1} << m;
  for (std::size_t k = 0; k < count; ++k) {
    RationalVector corner = box_.corner(k);
    Rational z = first.form.at(corner);
    add_node({std::move(corner), std::move(z)}, true);
  }
  // Box edges join corners differing in exactly one coordinate.
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t bit = 0; bit < m; ++bit) {
      const std::size_t b = a ^ (std::size_t{1} << bit);
      if (a < b) link(a, b);
    }
  planes_.push_back(std::move(first));
}

std::size_t Skeleton::add_node(DualPoint p, bool ray) {
  Node node;
  node.vertex.id = nodes_.size();
  node.vertex.point = std::move(p);
  node.ray = ray;
  nodes_.push_back(std::move(node));
  ++alive_count_;
  return nodes_.size() - 1;
}

void Skeleton::link(std::size_t a, std::size_t b) {
  auto& adj = nodes_[a].adj;
  if (std::find(adj.begin(), adj.end(), b) != adj.end()) return;
  adj.push_back(b);
  nodes_[b].adj.push_back(a);
}

void Skeleton::unlink(std::size_t a, std::size_t b) {
  auto drop = [](std::vector<std::size_t>& v, std::size_t x) { v.erase(std::remove(v.begin(), v.end(), x), v.end()); };
  drop(nodes_[a].adj, b);
  drop(nodes_[b].adj, a);
}

std::optional<std::size_t> Skeleton::find_plane(const AffineFunction& form) const {
  for (std::size_t i = 0; i < planes_.size(); ++i)
    if (planes_[i].form == form) return i;
  return std::nullopt;
}

void Skeleton::add_witness(const AffineFunction& form, const Labeling& x) {
  auto idx = find_plane(form);
  if (!idx) throw std::invalid_argument("add_witness: plane is not stored");
  auto& w = planes_[*idx].witnesses;
  if (std::find(w.begin(), w.end(), x) == w.end()) w.push_back(x);
}

CutReport Skeleton::cut(const Hyperplane& plane, std::optional<std::size_t> seed) {
  CutReport report;
  if (plane.form.slope.size() != dimension()) throw DimensionError("plane slope length does not match box dimension");
  if (auto idx = find_plane(plane.form)) {
    for (const auto& x : plane.witnesses) add_witness(plane.form, x);
    return report;
  }

  // Signed height of each vertex above the plane, computed lazily.
  std::vector<std::optional<Rational>> height(nodes_.size());
  auto above = [&](std::size_t id) -> const Rational& {
    if (!height[id]) {
      const auto& p = nodes_[id].vertex.point;
      height[id] = p.z - plane.form.at(p.lambda);
    }
    return *height[id];
  };

  if (!(seed && alive(*seed) && above(*seed) > 0)) {
    seed.reset();
    for (std::size_t id = 0; id < nodes_.size() && !seed; ++id)
      if (nodes_[id].alive && above(id) > 0) seed = id;
  }
  if (!seed) return report;

  // Breadth-first search over vertices on or above the plane. By concavity
  // of the envelope this region is connected in the skeleton graph.
  std::vector<bool> visited(nodes_.size(), false);
  std::deque<std::size_t> queue{*seed};
  visited[*seed] = true;
  std::vector<std::size_t> region;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    region.push_back(u);
    for (auto w : nodes_[u].adj)
      if (!visited[w] && above(w) >= 0) {
        visited[w] = true;
        queue.push_back(w);
      }
  }
  std::sort(region.begin(), region.end());
  for (auto id : region) (above(id) > 0 ? report.removed : report.on_plane).push_back(id);

  // Intersections with crossing edges and rays.
  const std::size_t m = dimension();
  for (auto u : report.removed) {
    const auto adj = nodes_[u].adj;
    for (auto w : adj) {
      if (above(w) >= 0) continue;
      const auto& pu = nodes_[u].vertex.point;
      const auto& pw = nodes_[w].vertex.point;
      const Rational t = above(u) / (above(u) - above(w));
      RationalVector lambda(m);
      for (std::size_t i = 0; i < m; ++i) lambda[i] = pu.lambda[i] + t * (pw.lambda[i] - pu.lambda[i]);
      Rational z = plane.form.at(lambda);
      const std::size_t q = add_node({std::move(lambda), std::move(z)}, false);
      link(q, w);
      report.added.push_back(q);
    }
    if (nodes_[u].ray) {
      RationalVector lambda = nodes_[u].vertex.point.lambda;
      Rational z = plane.form.at(lambda);
      report.added.push_back(add_node({std::move(lambda), std::move(z)}, true));
    }
  }
  for (auto u : report.removed) {
    const auto adj = nodes_[u].adj;
    for (auto w : adj) unlink(u, w);
    nodes_[u].alive = false;
    nodes_[u].ray = false;
    --alive_count_;
  }

  // Close the new facet.
  std::vector<std::size_t> facet = report.added;
  facet.insert(facet.end(), report.on_plane.begin(), report.on_plane.end());
  std::vector<DualPoint> points;
  points.reserve(facet.size());
  for (auto id : facet) points.push_back(nodes_[id].vertex.point);
  for (const auto& e : conv_edge(points)) link(facet[e.from], facet[e.to]);

  planes_.push_back(plane);
  report.applied = true;
  return report;
}

Rational Skeleton::envelope_value(std::span<const Rational> lambda) const {
  if (!box_.contains(lambda)) throw DomainError("multiplier (" + to_string(lambda) + ") is outside the skeleton box");
  Rational best = planes_.front().form.at(lambda);
  for (std::size_t i = 1; i < planes_.size(); ++i) {
    Rational v = planes_[i].form.at(lambda);
    if (v < best) best = std::move(v);
  }
  return best;
}

const SkeletonVertex& Skeleton::vertex(std::size_t id) const {
  if (!alive(id)) throw std::out_of_range("no live skeleton vertex with id " + std::to_string(id));
  return nodes_[id].vertex;
}

std::vector<std::size_t> Skeleton::vertex_ids() const {
  std::vector<std::size_t> ids;
  ids.reserve(alive_count_);
  for (const auto& n : nodes_)
    if (n.alive) ids.push_back(n.vertex.id);
  return ids;
}

std::vector<SkeletonEdge> Skeleton::edges() const {
  std::vector<SkeletonEdge> out;
  for (const auto& n : nodes_) {
    if (!n.alive) continue;
    std::vector<std::size_t> adj = n.adj;
    std::sort(adj.begin(), adj.end());
    for (auto w : adj)
      if (n.vertex.id < w) out.push_back({n.vertex.id, w, EdgeKind::kSegment});
    if (n.ray) out.push_back({n.vertex.id, n.vertex.id, EdgeKind::kVerticalRay});
  }
  return out;
}

void Skeleton::confirm(std::size_t id) {
  if (!alive(id)) throw std::out_of_range("no live skeleton vertex with id " + std::to_string(id));
  nodes_[id].vertex.confirmed = true;
}

std::size_t Skeleton::tight_count(std::size_t id) const {
  const auto& p = vertex(id).point;
  std::size_t count = 0;
  for (const auto& h : planes_)
    if (h.form.at(p.lambda) == p.z) ++count;
  for (std::size_t i = 0; i < dimension(); ++i)
    count += (p.lambda[i] == box_.lower()[i]) + (p.lambda[i] == box_.upper()[i]);
  return count;
}

std::string Skeleton::dump() const {
  std::ostringstream out;
  for (const auto& n : nodes_) {
    if (!n.alive) continue;
    out << "v " << n.vertex.id;
    for (const auto& l : n.vertex.point.lambda) out << ' ' << to_fraction_string(l);
    out << ' ' << to_fraction_string(n.vertex.point.z) << ' ' << (n.vertex.confirmed ? 1 : 0) << '\n';
  }
  for (const auto& e : edges()) {
    out << "e " << e.from << ' ';
    if (e.kind == EdgeKind::kVerticalRay)
      out << "RAY";
    else
      out << e.to;
    out << '\n';
  }
  return out.str();
}

std::vector<SkeletonEdge> conv_edge(std::span<const DualPoint> points) {
  std::vector<RationalVector> lambdas;
  lambdas.reserve(points.size());
  for (const auto& p : points) lambdas.push_back(p.lambda);
  if (!lambdas.empty() && lambdas.front().size() > kMaxSkeletonDimension)
    throw UnsupportedDimensionError("conv_edge supports at most " + std::to_string(kMaxSkeletonDimension) +
                                    " multiplier dimensions");
  std::vector<SkeletonEdge> out;
  for (auto [a, b] : hull_edges(lambdas)) out.push_back({a, b, EdgeKind::kSegment});
  return out;
}

}  // namespace lagskel
