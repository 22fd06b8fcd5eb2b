#pragma once

// Augmenting-path max-flow with search-tree reuse (Boykov-Kolmogorov).
// Two trees grow from the terminals; after each augmentation the orphaned
// subtrees are re-adopted instead of being rebuilt, which keeps the search
// cheap on grid graphs. Capacities are exact: Cap is either int64_t or
// mpz_class, never floating point.

#include <cstddef>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lagskel {

template <typename Cap>
class BkMaxFlow {
 public:
  explicit BkMaxFlow(std::size_t num_nodes)
      : first_(num_nodes, kNone),
        terminal_cap_(num_nodes, Cap(0)),
        parent_(num_nodes, kNone),
        tree_(num_nodes, Tree::kFree),
        timestamp_(num_nodes, 0),
        dist_(num_nodes, 0),
        in_queue_(num_nodes, false) {}

  std::size_t num_nodes() const { return first_.size(); }

  /// Adds capacity from the source (source_cap) and to the sink (sink_cap).
  void add_terminal_weights(std::size_t node, const Cap& source_cap, const Cap& sink_cap) {
    const Cap& common = source_cap < sink_cap ? source_cap : sink_cap;
    base_flow_ += common;
    terminal_cap_[node] += source_cap;
    terminal_cap_[node] -= sink_cap;
  }

  /// Arc u->v with capacity cap and v->u with capacity reverse_cap.
  void add_edge(std::size_t u, std::size_t v, const Cap& cap, const Cap& reverse_cap) {
    if (u == v) throw std::invalid_argument("BkMaxFlow: self loop");
    const std::size_t a = head_.size();
    head_.push_back(static_cast<int>(v));
    next_.push_back(first_[u]);
    residual_.push_back(cap);
    first_[u] = static_cast<long>(a);
    head_.push_back(static_cast<int>(u));
    next_.push_back(first_[v]);
    residual_.push_back(reverse_cap);
    first_[v] = static_cast<long>(a + 1);
  }

  /// Runs to completion and returns the max-flow value.
  Cap solve() {
    init_trees();
    long current = kNone;
    while (true) {
      if (current != kNone && tree_[current] == Tree::kFree) current = kNone;
      long node = current;
      if (node == kNone) {
        node = next_active();
        if (node == kNone) break;
      }
      long middle = kNone;
      if (tree_[node] == Tree::kSource) {
        for (long a = first_[node]; a != kNone; a = next_[a]) {
          if (residual_[a] == 0) continue;
          const int j = head_[a];
          if (tree_[j] == Tree::kFree) {
            tree_[j] = Tree::kSource;
            parent_[j] = sister(a);
            timestamp_[j] = timestamp_[node];
            dist_[j] = dist_[node] + 1;
            activate(j);
          } else if (tree_[j] == Tree::kSink) {
            middle = a;
            break;
          } else if (timestamp_[j] <= timestamp_[node] && dist_[j] > dist_[node]) {
            parent_[j] = sister(a);
            timestamp_[j] = timestamp_[node];
            dist_[j] = dist_[node] + 1;
          }
        }
      } else {
        for (long a = first_[node]; a != kNone; a = next_[a]) {
          const long back = sister(a);
          if (residual_[back] == 0) continue;
          const int j = head_[a];
          if (tree_[j] == Tree::kFree) {
            tree_[j] = Tree::kSink;
            parent_[j] = back;
            timestamp_[j] = timestamp_[node];
            dist_[j] = dist_[node] + 1;
            activate(j);
          } else if (tree_[j] == Tree::kSource) {
            middle = back;
            break;
          } else if (timestamp_[j] <= timestamp_[node] && dist_[j] > dist_[node]) {
            parent_[j] = back;
            timestamp_[j] = timestamp_[node];
            dist_[j] = dist_[node] + 1;
          }
        }
      }

      ++clock_;
      if (middle != kNone) {
        // The node may have more paths to offer; keep working on it.
        current = node;
        augment(middle);
        adopt_orphans();
      } else {
        current = kNone;
      }
    }
    return flow_ + base_flow_;
  }

  /// Nodes reachable from the source in the final residual graph. This is
  /// the source side of the unique inclusion-minimal minimum cut.
  std::vector<bool> source_reachable() const {
    std::vector<bool> seen(num_nodes(), false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < num_nodes(); ++i)
      if (terminal_cap_[i] > 0) {
        seen[i] = true;
        queue.push_back(i);
      }
    while (!queue.empty()) {
      const std::size_t i = queue.front();
      queue.pop_front();
      for (long a = first_[i]; a != kNone; a = next_[a]) {
        const int j = head_[a];
        if (!seen[j] && residual_[a] > 0) {
          seen[j] = true;
          queue.push_back(j);
        }
      }
    }
    return seen;
  }

 private:
  enum class Tree : unsigned char { kFree, kSource, kSink };
  static constexpr long kNone = -1;
  static constexpr long kTerminal = -2;
  static constexpr long kOrphan = -3;

  static long sister(long a) { return a ^ 1L; }

  void activate(long node) {
    if (!in_queue_[node]) {
      in_queue_[node] = true;
      active_.push_back(node);
    }
  }

  long next_active() {
    while (!active_.empty()) {
      const long node = active_.front();
      active_.pop_front();
      in_queue_[node] = false;
      if (tree_[node] != Tree::kFree) return node;
    }
    return kNone;
  }

  void init_trees() {
    for (std::size_t i = 0; i < num_nodes(); ++i) {
      if (terminal_cap_[i] > 0) {
        tree_[i] = Tree::kSource;
      } else if (terminal_cap_[i] < 0) {
        tree_[i] = Tree::kSink;
      } else {
        tree_[i] = Tree::kFree;
        parent_[i] = kNone;
        continue;
      }
      parent_[i] = kTerminal;
      timestamp_[i] = 0;
      dist_[i] = 1;
      activate(static_cast<long>(i));
    }
  }

  void augment(long middle) {
    Cap bottleneck = residual_[middle];
    // Source half: flow runs from the terminal down to head_[sister(middle)].
    for (long i = head_[sister(middle)];;) {
      const long a = parent_[i];
      if (a == kTerminal) {
        if (terminal_cap_[i] < bottleneck) bottleneck = terminal_cap_[i];
        break;
      }
      if (residual_[sister(a)] < bottleneck) bottleneck = residual_[sister(a)];
      i = head_[a];
    }
    for (long i = head_[middle];;) {
      const long a = parent_[i];
      if (a == kTerminal) {
        Cap sink_cap = -terminal_cap_[i];
        if (sink_cap < bottleneck) bottleneck = sink_cap;
        break;
      }
      if (residual_[a] < bottleneck) bottleneck = residual_[a];
      i = head_[a];
    }

    residual_[sister(middle)] += bottleneck;
    residual_[middle] -= bottleneck;
    for (long i = head_[sister(middle)];;) {
      const long a = parent_[i];
      if (a == kTerminal) {
        terminal_cap_[i] -= bottleneck;
        if (terminal_cap_[i] == 0) make_orphan(i);
        break;
      }
      residual_[a] += bottleneck;
      residual_[sister(a)] -= bottleneck;
      if (residual_[sister(a)] == 0) make_orphan(i);
      i = head_[a];
    }
    for (long i = head_[middle];;) {
      const long a = parent_[i];
      if (a == kTerminal) {
        terminal_cap_[i] += bottleneck;
        if (terminal_cap_[i] == 0) make_orphan(i);
        break;
      }
      residual_[sister(a)] += bottleneck;
      residual_[a] -= bottleneck;
      if (residual_[a] == 0) make_orphan(i);
      i = head_[a];
    }
    flow_ += bottleneck;
  }

  void make_orphan(long node) {
    parent_[node] = kOrphan;
    orphans_.push_back(node);
  }

  // Distance of node to its terminal through valid parents, or -1 if the
  // path passes through an orphan.
  long origin_distance(long start) {
    long d = 0;
    long i = start;
    while (true) {
      if (timestamp_[i] == clock_) {
        d += dist_[i];
        break;
      }
      const long a = parent_[i];
      ++d;
      if (a == kTerminal) {
        timestamp_[i] = clock_;
        dist_[i] = 1;
        break;
      }
      if (a == kOrphan || a == kNone) return -1;
      i = head_[a];
    }
    // Cache distances along the path.
    for (long j = start; timestamp_[j] != clock_; j = head_[parent_[j]]) {
      timestamp_[j] = clock_;
      dist_[j] = d--;
    }
    return dist_[start];
  }

  void adopt_orphans() {
    while (!orphans_.empty()) {
      const long i = orphans_.front();
      orphans_.pop_front();
      const bool source_side = tree_[i] == Tree::kSource;

      long best_arc = kNone;
      long best_dist = std::numeric_limits<long>::max();
      for (long a = first_[i]; a != kNone; a = next_[a]) {
        const long j = head_[a];
        if (tree_[j] != tree_[i]) continue;
        const Cap& cap = source_side ? residual_[sister(a)] : residual_[a];
        if (cap == 0) continue;
        const long d = origin_distance(j);
        if (d >= 0 && d < best_dist) {
          best_arc = a;
          best_dist = d;
        }
      }

      if (best_arc != kNone) {
        parent_[i] = best_arc;
        timestamp_[i] = clock_;
        dist_[i] = best_dist + 1;
        continue;
      }

      // No valid parent: the node becomes free.
      for (long a = first_[i]; a != kNone; a = next_[a]) {
        const long j = head_[a];
        if (tree_[j] != tree_[i]) continue;
        const Cap& cap = source_side ? residual_[sister(a)] : residual_[a];
        if (cap > 0) activate(j);
        const long pj = parent_[j];
        if (pj >= 0 && head_[pj] == i) make_orphan(j);
      }
      tree_[i] = Tree::kFree;
      parent_[i] = kNone;
    }
  }

  std::vector<long> first_;
  std::vector<int> head_;
  std::vector<long> next_;
  std::vector<Cap> residual_;
  std::vector<Cap> terminal_cap_;  // > 0: residual from source, < 0: residual to sink
  std::vector<long> parent_;
  std::vector<Tree> tree_;
  std::vector<long> timestamp_;
  std::vector<long> dist_;
  std::vector<bool> in_queue_;
  std::deque<long> active_;
  std::deque<long> orphans_;
  long clock_ = 1;
  Cap flow_ = Cap(0);
  Cap base_flow_ = Cap(0);
};

}  // namespace lagskel
