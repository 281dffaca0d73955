#include "detour/spf.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <stdexcept>

namespace detour {

std::vector<NodeId> ShortestPathTree::path_to(NodeId d) const {
  std::vector<NodeId> path;
  if (!reached(d)) return path;
  for (NodeId v = d; v != kNoNode; v = parent[static_cast<size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<LinkId> ShortestPathTree::links_to(NodeId d) const {
  std::vector<LinkId> links;
  if (!reached(d)) return links;
  for (NodeId v = d; v != source; v = parent[static_cast<size_t>(v)]) {
    links.push_back(parent_link[static_cast<size_t>(v)]);
  }
  std::reverse(links.begin(), links.end());
  return links;
}

ShortestPathTree tie_broken_tree(const Topology& t, NodeId src, const FailureScenario& excluded,
                                 std::vector<double> dist) {
  const auto n = static_cast<size_t>(t.node_count());
  ShortestPathTree tree;
  tree.source = src;
  tree.dist = std::move(dist);
  tree.parent.assign(n, kNoNode);
  tree.parent_link.assign(n, kNoLink);
  tree.next_link.assign(n, kNoLink);

  // Depth-first walk over tight arcs, smallest neighbor first. The first
  // visit of a node follows its lexicographically smallest shortest path.
  std::vector<char> visited(n, 0);
  struct Frame {
    NodeId node;
    size_t next_arc;
  };
  std::vector<Frame> stack{{src, 0}};
  visited[static_cast<size_t>(src)] = 1;
  while (!stack.empty()) {
    auto& top = stack.back();
    auto arcs = t.arcs(top.node);
    if (top.next_arc == arcs.size()) {
      stack.pop_back();
      continue;
    }
    const Arc& arc = arcs[top.next_arc++];
    const auto to = static_cast<size_t>(arc.to);
    if (visited[to] || tree.dist[to] == kInf || !excluded.node_alive(arc.to) ||
        !excluded.link_alive(t, arc.link)) {
      continue;
    }
    if (tree.dist[static_cast<size_t>(top.node)] + arc.weight != tree.dist[to]) continue;
    visited[to] = 1;
    tree.parent[to] = top.node;
    tree.parent_link[to] = arc.link;
    tree.next_link[to] = top.node == src ? arc.link : tree.next_link[static_cast<size_t>(top.node)];
    stack.push_back({arc.to, 0});
  }
  // Distances the walk could not justify (inconsistent input) are dropped.
  for (size_t v = 0; v < n; ++v) {
    if (!visited[v]) tree.dist[v] = kInf;
  }
  return tree;
}

ShortestPathTree shortest_tree(const Topology& t, NodeId src, const FailureScenario& excluded,
                               std::optional<std::span<const NodeId>> targets, SpfStats* stats) {
  if (stats) ++stats->tree_runs;
  const auto n = static_cast<size_t>(t.node_count());
  std::vector<double> dist(n, kInf);
  if (!excluded.node_alive(src)) return tie_broken_tree(t, src, excluded, std::move(dist));

  std::vector<char> pending(n, 0);
  size_t remaining = 0;
  if (targets) {
    for (NodeId d : *targets) {
      if (!pending[static_cast<size_t>(d)] && d != src) {
        pending[static_cast<size_t>(d)] = 1;
        ++remaining;
      }
    }
  }

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  std::vector<char> settled(n, 0);
  dist[static_cast<size_t>(src)] = 0.0;
  heap.push({0.0, src});
  double stop_at = kInf;
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    if (d > stop_at) break;
    heap.pop();
    const auto vi = static_cast<size_t>(v);
    if (settled[vi]) continue;
    settled[vi] = 1;
    if (targets && pending[vi]) {
      pending[vi] = 0;
      --remaining;
    }
    // Once the last target is settled, finish the nodes tied with it so that
    // every tight predecessor of every target is final.
    if (targets && remaining == 0 && stop_at == kInf) stop_at = d;
    for (const Arc& arc : t.arcs(v)) {
      if (!excluded.node_alive(arc.to) || !excluded.link_alive(t, arc.link)) continue;
      const double candidate = d + arc.weight;
      auto& slot = dist[static_cast<size_t>(arc.to)];
      if (candidate < slot) {
        slot = candidate;
        heap.push({candidate, arc.to});
      }
    }
  }
  for (size_t v = 0; v < n; ++v) {
    if (!settled[v]) dist[v] = kInf;
  }
  return tie_broken_tree(t, src, excluded, std::move(dist));
}

ShortestPathTree bellman_ford_tree(const Topology& t, NodeId src, const FailureScenario& excluded) {
  const auto n = static_cast<size_t>(t.node_count());
  std::vector<double> dist(n, kInf);
  if (excluded.node_alive(src)) {
    std::deque<NodeId> queue{src};
    std::vector<char> queued(n, 0);
    dist[static_cast<size_t>(src)] = 0.0;
    queued[static_cast<size_t>(src)] = 1;
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop_front();
      queued[static_cast<size_t>(v)] = 0;
      for (const Arc& arc : t.arcs(v)) {
        if (!excluded.node_alive(arc.to) || !excluded.link_alive(t, arc.link)) continue;
        const double candidate = dist[static_cast<size_t>(v)] + arc.weight;
        const auto to = static_cast<size_t>(arc.to);
        if (candidate < dist[to]) {
          dist[to] = candidate;
          if (!queued[to]) {
            queued[to] = 1;
            queue.push_back(arc.to);
          }
        }
      }
    }
  }
  return tie_broken_tree(t, src, excluded, std::move(dist));
}

std::vector<std::vector<double>> floyd_warshall(const Topology& t) {
  const auto n = static_cast<size_t>(t.node_count());
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (size_t v = 0; v < n; ++v) d[v][v] = 0.0;
  for (const auto& l : t.links()) {
    auto u = static_cast<size_t>(l.u), v = static_cast<size_t>(l.v);
    d[u][v] = std::min(d[u][v], l.weight);
    d[v][u] = std::min(d[v][u], l.weight);
  }
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (d[i][k] == kInf) continue;
      for (size_t j = 0; j < n; ++j) {
        const double via = d[i][k] + d[k][j];
        if (via < d[i][j]) d[i][j] = via;
      }
    }
  }
  return d;
}

AllToAll::AllToAll(const Topology& t, SpfStats* stats) : topology_(&t) {
  const NodeId n = t.node_count();
  if (!is_connected(t)) throw TopologyError("all-to-all routing needs a connected topology");
  trees_.reserve(static_cast<size_t>(n));
  affected_.resize(static_cast<size_t>(n));
  for (NodeId s = 0; s < n; ++s) {
    trees_.push_back(shortest_tree(t, s, {}, std::nullopt, stats));
    const auto arcs = t.arcs(s);
    auto& sets = affected_[static_cast<size_t>(s)];
    sets.resize(arcs.size());
    const auto& tree = trees_.back();
    for (NodeId d = 0; d < n; ++d) {
      if (d == s) continue;
      const LinkId first = tree.next_link[static_cast<size_t>(d)];
      for (size_t i = 0; i < arcs.size(); ++i) {
        if (arcs[i].link == first) {
          sets[i].push_back(d);
          break;
        }
      }
    }
  }
}

std::span<const NodeId> AllToAll::affected(NodeId n, LinkId link) const {
  const auto arcs = topology_->arcs(n);
  for (size_t i = 0; i < arcs.size(); ++i) {
    if (arcs[i].link == link) return affected_[static_cast<size_t>(n)][i];
  }
  return {};
}

bool AllToAll::path_avoids_link(NodeId from, NodeId d, LinkId link) const {
  const auto& tree = trees_[static_cast<size_t>(from)];
  for (NodeId v = d; v != from; v = tree.parent[static_cast<size_t>(v)]) {
    if (tree.parent_link[static_cast<size_t>(v)] == link) return false;
  }
  return true;
}

bool AllToAll::path_avoids_node(NodeId from, NodeId d, NodeId node) const {
  if (from == node) return false;
  const auto& tree = trees_[static_cast<size_t>(from)];
  for (NodeId v = d; v != from; v = tree.parent[static_cast<size_t>(v)]) {
    if (v == node) return false;
  }
  return true;
}

std::size_t AllToAll::rule_count() const {
  const auto n = trees_.size();
  return n * (n - 1);
}

int Digraph::add_arc(int from, int to, double weight) {
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({from, to, weight, false});
  auto& list = out_[static_cast<size_t>(from)];
  auto pos = std::upper_bound(list.begin(), list.end(), to,
                              [this](int head, int arc_id) { return head < arcs_[static_cast<size_t>(arc_id)].to; });
  list.insert(pos, id);
  return id;
}

std::optional<int> Digraph::find_arc(int from, int to) const {
  for (int id : out_arcs(from)) {
    const auto& a = arc(id);
    if (!a.removed && a.to == to) return id;
  }
  return std::nullopt;
}

std::optional<DigraphPath> bellman_ford_path(const Digraph& g, int src, int dst) {
  const auto n = static_cast<size_t>(g.node_count());
  std::vector<double> dist(n, kInf);
  std::vector<size_t> relaxations(n, 0);
  std::vector<char> queued(n, 0);
  std::deque<int> queue{src};
  dist[static_cast<size_t>(src)] = 0.0;
  queued[static_cast<size_t>(src)] = 1;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    queued[static_cast<size_t>(v)] = 0;
    for (int id : g.out_arcs(v)) {
      const auto& a = g.arc(id);
      if (a.removed) continue;
      const double candidate = dist[static_cast<size_t>(v)] + a.weight;
      const auto to = static_cast<size_t>(a.to);
      if (candidate < dist[to]) {
        dist[to] = candidate;
        if (++relaxations[to] > n) throw std::runtime_error("negative cycle in digraph");
        if (!queued[to]) {
          queued[to] = 1;
          queue.push_back(a.to);
        }
      }
    }
  }
  return tight_path(g, dist, src, dst);
}

std::vector<double> dijkstra_distances(const Digraph& g, int src) {
  const auto n = static_cast<size_t>(g.node_count());
  std::vector<double> dist(n, kInf);
  std::vector<char> settled(n, 0);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  dist[static_cast<size_t>(src)] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (settled[static_cast<size_t>(v)]) continue;
    settled[static_cast<size_t>(v)] = 1;
    for (int id : g.out_arcs(v)) {
      const auto& a = g.arc(id);
      if (a.removed) continue;
      if (a.weight < 0.0) throw std::invalid_argument("dijkstra_path: negative arc");
      const double candidate = d + a.weight;
      if (candidate < dist[static_cast<size_t>(a.to)]) {
        dist[static_cast<size_t>(a.to)] = candidate;
        heap.push({candidate, a.to});
      }
    }
  }
  return dist;
}

std::optional<DigraphPath> dijkstra_path(const Digraph& g, int src, int dst) {
  return tight_path(g, dijkstra_distances(g, src), src, dst);
}

std::optional<DigraphPath> tight_path(const Digraph& g, const std::vector<double>& dist, int src, int dst) {
  const auto n = static_cast<size_t>(g.node_count());
  if (dist[static_cast<size_t>(dst)] == kInf) return std::nullopt;
  std::vector<int> parent_arc(n, -1);
  std::vector<char> visited(n, 0);
  struct Frame {
    int node;
    size_t next;
  };
  std::vector<Frame> stack{{src, 0}};
  visited[static_cast<size_t>(src)] = 1;
  while (!stack.empty() && !visited[static_cast<size_t>(dst)]) {
    auto& top = stack.back();
    auto arcs = g.out_arcs(top.node);
    if (top.next == arcs.size()) {
      stack.pop_back();
      continue;
    }
    const int id = arcs[top.next++];
    const auto& a = g.arc(id);
    const auto to = static_cast<size_t>(a.to);
    if (a.removed || visited[to]) continue;
    if (dist[static_cast<size_t>(top.node)] + a.weight != dist[to]) continue;
    visited[to] = 1;
    parent_arc[to] = id;
    stack.push_back({a.to, 0});
  }
  if (!visited[static_cast<size_t>(dst)]) return std::nullopt;

  DigraphPath path;
  path.weight = dist[static_cast<size_t>(dst)];
  for (int v = dst; v != src; v = g.arc(parent_arc[static_cast<size_t>(v)]).from) {
    path.nodes.push_back(v);
    path.arcs.push_back(parent_arc[static_cast<size_t>(v)]);
  }
  path.nodes.push_back(src);
  std::reverse(path.nodes.begin(), path.nodes.end());
  std::reverse(path.arcs.begin(), path.arcs.end());
  return path;
}

}  // namespace detour
