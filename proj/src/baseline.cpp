#include "detour/baseline.hpp"

#include <algorithm>
#include <map>

#include "detour/spf.hpp"

namespace detour {

namespace {

// Directed view of the topology used by both disjoint path algorithms. In
// the node-split form node x becomes in(x) = 2x and out(x) = 2x + 1 joined by
// a zero-weight arc, and a link {u,v} becomes out(u)->in(v), out(v)->in(u).
struct SplitGraph {
  Digraph graph;
  std::vector<int> twin;  // opposite arc of the same physical link, -1 if none
  int source = -1;
  int target = -1;
  Disjointness kind;

  SplitGraph(const Topology& t, NodeId s, NodeId d, Disjointness k)
      : graph(k == Disjointness::kLink ? t.node_count() : 2 * t.node_count()), kind(k) {
    if (kind == Disjointness::kLink) {
      for (const auto& l : t.links()) {
        const int a = graph.add_arc(l.u, l.v, l.weight);
        const int b = graph.add_arc(l.v, l.u, l.weight);
        twin.resize(static_cast<size_t>(b) + 1, -1);
        twin[static_cast<size_t>(a)] = b;
        twin[static_cast<size_t>(b)] = a;
      }
      source = s;
      target = d;
    } else {
      for (NodeId x = 0; x < t.node_count(); ++x) graph.add_arc(2 * x, 2 * x + 1, 0.0);
      for (const auto& l : t.links()) {
        graph.add_arc(2 * l.u + 1, 2 * l.v, l.weight);
        graph.add_arc(2 * l.v + 1, 2 * l.u, l.weight);
      }
      twin.assign(static_cast<size_t>(t.node_count() + 2 * t.link_count()), -1);
      source = 2 * s + 1;
      target = 2 * d;
    }
  }

  NodeId to_node(int v) const { return kind == Disjointness::kLink ? v : v / 2; }
};

double path_weight(const Topology& t, const std::vector<NodeId>& nodes) {
  double w = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i) w += t.link(t.link_between(nodes[i], nodes[i + 1])).weight;
  return w;
}

// Turns the surviving arcs (original arc ids, after cancelling every arc
// used in both directions) into two node sequences.
std::optional<DisjointPair> assemble_pair(const Topology& t, const SplitGraph& sg, const std::vector<int>& arcs) {
  std::map<int, std::vector<int>> out;  // tail -> heads, sorted
  for (int id : arcs) out[sg.graph.arc(id).from].push_back(sg.graph.arc(id).to);
  for (auto& [tail, heads] : out) std::sort(heads.begin(), heads.end());

  auto walk = [&]() -> std::optional<std::vector<NodeId>> {
    std::vector<int> seq{sg.source};
    while (seq.back() != sg.target) {
      auto it = out.find(seq.back());
      if (it == out.end() || it->second.empty()) return std::nullopt;
      seq.push_back(it->second.front());
      it->second.erase(it->second.begin());
      if (seq.size() > arcs.size() + 1) return std::nullopt;
    }
    // Loop-erase (zero-weight cycles can survive cancellation) and collapse
    // split node halves.
    std::vector<NodeId> nodes;
    for (int v : seq) {
      const NodeId x = sg.to_node(v);
      if (!nodes.empty() && nodes.back() == x) continue;
      auto seen = std::find(nodes.begin(), nodes.end(), x);
      if (seen != nodes.end()) nodes.erase(seen + 1, nodes.end());
      else nodes.push_back(x);
    }
    return nodes;
  };

  auto first = walk();
  auto second = walk();
  if (!first || !second) return std::nullopt;
  WeightedPath a{*first, path_weight(t, *first)};
  WeightedPath b{*second, path_weight(t, *second)};
  if (b.weight < a.weight || (b.weight == a.weight && b.nodes < a.nodes)) std::swap(a, b);
  return DisjointPair{std::move(a), std::move(b)};
}

// Cancels P1 arcs whose reversal P2 used; returns surviving original arcs.
std::vector<int> cancel_interlacing(const std::vector<int>& first, const std::vector<int>& second,
                                    const std::map<int, int>& reversal_of) {
  std::vector<int> cancelled;
  std::vector<int> kept;
  for (int id : second) {
    if (auto it = reversal_of.find(id); it != reversal_of.end()) cancelled.push_back(it->second);
    else kept.push_back(id);
  }
  for (int id : first) {
    if (std::find(cancelled.begin(), cancelled.end(), id) == cancelled.end()) kept.push_back(id);
  }
  return kept;
}

}  // namespace

std::optional<DisjointPair> bhandari(const Topology& t, NodeId s, NodeId d, Disjointness kind) {
  if (s == d || !t.has_node(s) || !t.has_node(d)) return std::nullopt;
  SplitGraph sg(t, s, d, kind);
  auto first = bellman_ford_path(sg.graph, sg.source, sg.target);
  if (!first) return std::nullopt;

  std::map<int, int> reversal_of;  // new arc -> original P1 arc
  for (int id : first->arcs) {
    const auto a = sg.graph.arc(id);
    sg.graph.remove_arc(id);
    if (sg.twin[static_cast<size_t>(id)] >= 0) sg.graph.remove_arc(sg.twin[static_cast<size_t>(id)]);
    reversal_of[sg.graph.add_arc(a.to, a.from, -a.weight)] = id;
  }
  auto second = bellman_ford_path(sg.graph, sg.source, sg.target);
  if (!second) return std::nullopt;
  return assemble_pair(t, sg, cancel_interlacing(first->arcs, second->arcs, reversal_of));
}

std::optional<DisjointPair> suurballe(const Topology& t, NodeId s, NodeId d, Disjointness kind) {
  if (s == d || !t.has_node(s) || !t.has_node(d)) return std::nullopt;
  SplitGraph sg(t, s, d, kind);
  const Digraph& g = sg.graph;
  auto first = dijkstra_path(g, sg.source, sg.target);
  if (!first) return std::nullopt;

  const auto dist = dijkstra_distances(g, sg.source);

  // Reduced costs w + d(u) - d(v) >= 0. Arc ids match g; arcs touching
  // unreachable nodes stay but are removed.
  Digraph reduced(g.node_count());
  for (int id = 0; id < g.arc_count(); ++id) {
    const auto& a = g.arc(id);
    const double du = dist[static_cast<size_t>(a.from)];
    const double dv = dist[static_cast<size_t>(a.to)];
    const bool usable = du != kInf && dv != kInf;
    reduced.add_arc(a.from, a.to, usable ? a.weight + du - dv : 0.0);
    if (!usable) reduced.remove_arc(id);
  }
  std::map<int, int> reversal_of;
  for (int id : first->arcs) {
    reduced.remove_arc(id);
    if (const int tw = sg.twin[static_cast<size_t>(id)]; tw >= 0) reduced.remove_arc(tw);
    const auto& a = g.arc(id);
    reversal_of[reduced.add_arc(a.to, a.from, 0.0)] = id;
  }
  auto second = dijkstra_path(reduced, sg.source, sg.target);
  if (!second) return std::nullopt;
  return assemble_pair(t, sg, cancel_interlacing(first->arcs, second->arcs, reversal_of));
}

ForwardingMatrix disjoint_rules(const Topology& t, Disjointness kind) {
  ForwardingMatrix fw(kind == Disjointness::kLink ? MatrixMode::kDisjointLink : MatrixMode::kDisjointNode,
                      t.node_count());
  const auto primary = LabelMatch::exact(FailureLabel::primary());
  auto link = [&](NodeId a, NodeId b) { return t.link_between(a, b); };

  for (NodeId s = 0; s < t.node_count(); ++s) {
    std::optional<ShortestPathTree> fallback_tree;
    for (NodeId d = 0; d < t.node_count(); ++d) {
      if (d == s) continue;
      const auto pair = bhandari(t, s, d, kind);
      if (!pair) {
        fw.add_uncovered({s, FailureLabel::primary(), s, d});
        if (!fallback_tree) fallback_tree = shortest_tree(t, s, {}, std::nullopt, &fw.stats);
        const auto path = fallback_tree->path_to(d);
        for (size_t i = 0; i + 1 < path.size(); ++i) {
          const LinkId in = i == 0 ? kLocalPort : link(path[i - 1], path[i]);
          fw.set_rule(path[i], {primary, d, s, in}, Action::output(link(path[i], path[i + 1])));
        }
        continue;
      }
      const auto& p = pair->primary.nodes;
      const auto& b = pair->backup.nodes;
      const LinkId backup_first = link(b[0], b[1]);

      // Source: primary first hop, or backup if that link is already dead.
      const LinkId p_first = link(p[0], p[1]);
      fw.set_rule(s, {primary, d, s, kLocalPort},
                  Action::group_ref(fw.add_group(s, {Bucket{p_first, Action::output(p_first)},
                                                     Bucket{backup_first, Action::output(backup_first)}})));
      // Intermediate primary nodes: forward, or crank back toward the source.
      for (size_t i = 1; i + 1 < p.size(); ++i) {
        const LinkId in = link(p[i - 1], p[i]);
        const LinkId fwd = link(p[i], p[i + 1]);
        fw.set_rule(p[i], {primary, d, s, in},
                    Action::group_ref(fw.add_group(p[i], {Bucket{fwd, Action::output(fwd)}, Bucket{in, Action::output(in)}})));
        // Returning packets arrive over `fwd` and keep going back.
        if (i + 2 < p.size()) {
          fw.set_rule(p[i], {primary, d, s, link(p[i], p[i + 1])}, Action::output(in));
        }
      }
      // Crankback reaching the source switches to the backup path.
      if (p.size() > 2) fw.set_rule(s, {primary, d, s, p_first}, Action::output(backup_first));
      for (size_t j = 1; j + 1 < b.size(); ++j) {
        fw.set_rule(b[j], {primary, d, s, link(b[j - 1], b[j])}, Action::output(link(b[j], b[j + 1])));
      }
    }
  }
  return fw;
}

}  // namespace detour
