#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "detour/graph.hpp"

namespace detour {

// Counts one-to-many shortest path computations.
struct SpfStats {
  std::size_t tree_runs = 0;
};

// Shortest path tree from one source under the deterministic tie-break:
// among equal-weight shortest paths the one whose node sequence is
// lexicographically smallest wins (smallest next hop at the first point of
// divergence). Such paths are closed under prefixes and suffixes, so
// hop-by-hop forwarding on per-node trees reproduces each tree path.
struct ShortestPathTree {
  NodeId source = kNoNode;
  std::vector<double> dist;         // kInf when not reached
  std::vector<NodeId> parent;       // kNoNode for the source and unreached nodes
  std::vector<LinkId> parent_link;  // link from parent into the node
  std::vector<LinkId> next_link;    // first link on the path from the source

  bool reached(NodeId d) const { return dist[static_cast<size_t>(d)] != kInf; }
  // Node sequence source..d, empty when unreached.
  std::vector<NodeId> path_to(NodeId d) const;
  std::vector<LinkId> links_to(NodeId d) const;
};

// Dijkstra over the topology seen through `excluded` (the failed element is
// hidden; the topology itself is untouched). With `targets`, the search stops
// once every target and every node at most as far as the farthest target is
// settled; other nodes may be left unreached.
ShortestPathTree shortest_tree(const Topology& t, NodeId src, const FailureScenario& excluded = {},
                               std::optional<std::span<const NodeId>> targets = std::nullopt,
                               SpfStats* stats = nullptr);

// Builds the tie-broken tree from an exact distance vector (any engine).
ShortestPathTree tie_broken_tree(const Topology& t, NodeId src, const FailureScenario& excluded,
                                 std::vector<double> dist);

// Queued Bellman-Ford (SPFA) distances; same tie-break applied afterwards.
ShortestPathTree bellman_ford_tree(const Topology& t, NodeId src, const FailureScenario& excluded = {});

// All-pairs distances. Used as a cross-validation oracle.
std::vector<std::vector<double>> floyd_warshall(const Topology& t);

// Per-source primary trees plus, for every node and incident link, the
// destinations whose primary path from that node leaves over that link.
class AllToAll {
 public:
  AllToAll() = default;
  AllToAll(const Topology& t, SpfStats* stats = nullptr);  // throws TopologyError if disconnected

  const ShortestPathTree& tree(NodeId src) const { return trees_[static_cast<size_t>(src)]; }
  double dist(NodeId s, NodeId d) const { return tree(s).dist[static_cast<size_t>(d)]; }
  LinkId next_link(NodeId s, NodeId d) const { return tree(s).next_link[static_cast<size_t>(d)]; }
  std::span<const NodeId> affected(NodeId n, LinkId link) const;

  bool path_avoids_link(NodeId from, NodeId d, LinkId link) const;
  bool path_avoids_node(NodeId from, NodeId d, NodeId v) const;
  std::size_t rule_count() const;

 private:
  const Topology* topology_ = nullptr;
  std::vector<ShortestPathTree> trees_;
  // affected_[n][i] corresponds to topology.arcs(n)[i]
  std::vector<std::vector<std::vector<NodeId>>> affected_;
};

// Directed graph with possibly negative arc weights, used by the disjoint
// path baselines. Out-lists are kept sorted by head node.
class Digraph {
 public:
  struct Arc {
    int from = -1;
    int to = -1;
    double weight = 0.0;
    bool removed = false;
  };

  explicit Digraph(int node_count) : out_(static_cast<size_t>(node_count)) {}

  int add_arc(int from, int to, double weight);
  void remove_arc(int id) { arcs_[static_cast<size_t>(id)].removed = true; }
  int node_count() const { return static_cast<int>(out_.size()); }
  int arc_count() const { return static_cast<int>(arcs_.size()); }
  const Arc& arc(int id) const { return arcs_[static_cast<size_t>(id)]; }
  std::span<const int> out_arcs(int node) const { return out_[static_cast<size_t>(node)]; }
  std::optional<int> find_arc(int from, int to) const;

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_;
};

struct DigraphPath {
  std::vector<int> nodes;
  std::vector<int> arcs;
  double weight = 0.0;
};

// Queued Bellman-Ford from src to dst with the lexicographic tie-break.
// Throws std::runtime_error on a reachable negative cycle.
std::optional<DigraphPath> bellman_ford_path(const Digraph& g, int src, int dst);

// Dijkstra for digraphs whose live arcs are all non-negative.
std::vector<double> dijkstra_distances(const Digraph& g, int src);
std::optional<DigraphPath> dijkstra_path(const Digraph& g, int src, int dst);

// Lexicographically smallest src->dst path over arcs that are tight with
// respect to `dist`.
std::optional<DigraphPath> tight_path(const Digraph& g, const std::vector<double>& dist, int src, int dst);

}  // namespace detour
