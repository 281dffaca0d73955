#pragma once

#include <optional>
#include <vector>

#include "detour/forwarding.hpp"
#include "detour/graph.hpp"

namespace detour {

enum class Disjointness { kLink, kNode };

struct WeightedPath {
  std::vector<NodeId> nodes;
  double weight = 0.0;
};

// Min-sum pair of disjoint s->d paths. `primary` is the lighter of the two
// (lexicographically smaller node sequence on a tie).
struct DisjointPair {
  WeightedPath primary;
  WeightedPath backup;

  double total() const { return primary.weight + backup.weight; }
};

// Bhandari: shortest path, reverse its arcs with negated weights, second
// shortest path by queued Bellman-Ford, cancel interlacing arcs. The node
// variant runs the same procedure on the node-split digraph. nullopt when no
// disjoint pair exists.
std::optional<DisjointPair> bhandari(const Topology& t, NodeId s, NodeId d, Disjointness kind);
inline std::optional<DisjointPair> bhandari_link_disjoint(const Topology& t, NodeId s, NodeId d) {
  return bhandari(t, s, d, Disjointness::kLink);
}
inline std::optional<DisjointPair> bhandari_node_disjoint(const Topology& t, NodeId s, NodeId d) {
  return bhandari(t, s, d, Disjointness::kNode);
}

// Suurballe's reduced-cost formulation; same contract as bhandari(). Kept as
// an independent cross-check.
std::optional<DisjointPair> suurballe(const Topology& t, NodeId s, NodeId d, Disjointness kind);

// Crankback-protected disjoint path rules for every ordered pair. Rules match
// (source, destination, incoming port). A node on the primary path that
// finds its next link dead sends the packet back along the traversed prefix;
// the source then switches to the backup path. Pairs without a disjoint pair
// keep only their shortest path and are reported as uncovered.
ForwardingMatrix disjoint_rules(const Topology& t, Disjointness kind);

}  // namespace detour
