#include "detour/protect.hpp"

#include <functional>
#include <map>
#include <set>
#include <tuple>

#include "detour/spf.hpp"

namespace detour {

namespace {

MatchKey primary_key(NodeId d) { return {LabelMatch::exact(FailureLabel::primary()), d}; }
MatchKey labeled_key(const FailureLabel& label, NodeId d) { return {LabelMatch::exact(label), d}; }

// Installs the labeled rules along one detour path. path[0] is the detecting
// node, which switches over through its primary group instead of a labeled
// rule. The first node for which `pops` holds removes the label; the nodes
// after it keep plain labeled rules (dead until optimize() drops them).
// `special` may claim a hop (returning true) to install its own rule.
void install_detour(ForwardingMatrix& fw, const FailureLabel& label, NodeId d, const std::vector<NodeId>& path,
                    const std::vector<LinkId>& links, const std::function<bool(NodeId)>& pops,
                    const std::function<bool(size_t)>& special = {}) {
  bool popped = false;
  for (size_t i = 1; i + 1 < path.size(); ++i) {
    const NodeId x = path[i];
    const auto key = labeled_key(label, d);
    if (!popped && pops(x)) {
      fw.set_rule(x, key, Action::pop(links[i]));
      popped = true;
      continue;
    }
    if (!popped && special && special(i)) continue;
    // Detours of different detecting nodes may share NodeFail rules; a pop
    // installed by one of them must survive.
    const Action* existing = fw.find_rule(x, key);
    if (existing && existing->kind == Action::Kind::kPopLabelOutput) continue;
    fw.set_rule(x, key, Action::output(links[i]));
  }
}

void set_failover_group(ForwardingMatrix& fw, NodeId n, NodeId d, LinkId primary_link, Bucket backup) {
  const int group = fw.add_group(n, {Bucket{primary_link, Action::output(primary_link)}, backup});
  fw.set_rule(n, primary_key(d), Action::group_ref(group));
}

void install_primary_rules(ForwardingMatrix& fw, const AllToAll& spf, NodeId node_count) {
  for (NodeId n = 0; n < node_count; ++n) {
    for (NodeId d = 0; d < node_count; ++d) {
      if (d != n) fw.set_rule(n, primary_key(d), Action::output(spf.next_link(n, d)));
    }
  }
}

enum class Family { kLink, kNode };

// Per-link or per-node protection; shared by the two single-family variants.
ForwardingMatrix single_family_rules(const Topology& t, Family family) {
  ForwardingMatrix fw(family == Family::kLink ? MatrixMode::kPerLink : MatrixMode::kPerNode, t.node_count());
  const AllToAll spf(t, &fw.stats);
  install_primary_rules(fw, spf, t.node_count());

  for (NodeId n = 0; n < t.node_count(); ++n) {
    for (const Arc& arc : t.arcs(n)) {
      const LinkId l = arc.link;
      const NodeId v = arc.to;
      const auto affected = spf.affected(n, l);
      const auto excluded = family == Family::kLink ? FailureScenario::link_down(l) : FailureScenario::node_down(v);
      const auto label = family == Family::kLink ? FailureLabel::link_fail(n, v) : FailureLabel::node_fail(v);
      const auto tree = shortest_tree(t, n, excluded, affected, &fw.stats);

      for (NodeId d : affected) {
        if (!tree.reached(d)) {
          set_failover_group(fw, n, d, l, Bucket{kNoLink, Action::drop()});
          fw.add_uncovered({n, label, kNoNode, d});
          continue;
        }
        const auto path = tree.path_to(d);
        const auto links = tree.links_to(d);
        set_failover_group(fw, n, d, l, Bucket{links[0], Action::push(label, links[0])});
        if (family == Family::kLink) {
          install_detour(fw, label, d, path, links, [&](NodeId x) { return spf.path_avoids_link(x, d, l); });
        } else {
          install_detour(fw, label, d, path, links, [&](NodeId x) { return spf.path_avoids_node(x, d, v); });
        }
      }
    }
  }
  return fw;
}

}  // namespace

ForwardingMatrix per_link_rules(const Topology& t) { return single_family_rules(t, Family::kLink); }

ForwardingMatrix per_node_rules(const Topology& t) { return single_family_rules(t, Family::kNode); }

ForwardingMatrix hybrid_rules(const Topology& t) {
  ForwardingMatrix fw(MatrixMode::kHybrid, t.node_count());
  const AllToAll spf(t, &fw.stats);
  install_primary_rules(fw, spf, t.node_count());

  // A LinkFail(*, v) rule at x that forwards into v needs x's node-failure
  // detour for that destination, even when x's own primary path does not
  // use v. Those destinations are added to x's node-failure search.
  struct Upgrade {
    NodeId node;
    FailureLabel label;
    NodeId dst;
    LinkId link_to_v;
  };
  std::vector<Upgrade> upgrades;
  std::map<std::pair<NodeId, NodeId>, std::set<NodeId>> extra_targets;  // (x, v) -> destinations

  for (NodeId n = 0; n < t.node_count(); ++n) {
    for (const Arc& arc : t.arcs(n)) {
      const LinkId l = arc.link;
      const NodeId v = arc.to;
      const auto affected = spf.affected(n, l);
      const auto label = FailureLabel::link_fail(n, v);
      const auto tree = shortest_tree(t, n, FailureScenario::link_down(l), affected, &fw.stats);

      for (NodeId d : affected) {
        if (!tree.reached(d)) {
          set_failover_group(fw, n, d, l, Bucket{kNoLink, Action::drop()});
          fw.add_uncovered({n, label, kNoNode, d});
          continue;
        }
        const auto path = tree.path_to(d);
        const auto links = tree.links_to(d);
        set_failover_group(fw, n, d, l, Bucket{links[0], Action::push(label, links[0])});
        // The label may only go once the primary path avoids both the link
        // and the node behind it.
        auto pops = [&](NodeId x) { return spf.path_avoids_link(x, d, l) && spf.path_avoids_node(x, d, v); };
        auto into_v = [&](size_t i) {
          if (path[i + 1] != v || v == d) return false;
          upgrades.push_back({path[i], label, d, links[i]});
          extra_targets[{path[i], v}].insert(d);
          return true;
        };
        install_detour(fw, label, d, path, links, pops, into_v);
      }
    }
  }

  // Node-failure family, keeping the first hop of every searched detour.
  std::map<std::tuple<NodeId, NodeId, NodeId>, LinkId> node_first_hop;  // (x, v, d) -> link
  for (NodeId n = 0; n < t.node_count(); ++n) {
    for (const Arc& arc : t.arcs(n)) {
      const LinkId l = arc.link;
      const NodeId v = arc.to;
      const auto affected = spf.affected(n, l);
      std::vector<NodeId> targets(affected.begin(), affected.end());
      if (auto it = extra_targets.find({n, v}); it != extra_targets.end()) {
        targets.insert(targets.end(), it->second.begin(), it->second.end());
      }
      const auto label = FailureLabel::node_fail(v);
      const auto tree = shortest_tree(t, n, FailureScenario::node_down(v), targets, &fw.stats);
      for (NodeId d : targets) {
        if (!tree.reached(d)) continue;
        const auto path = tree.path_to(d);
        const auto links = tree.links_to(d);
        node_first_hop[{n, v, d}] = links[0];
        install_detour(fw, label, d, path, links, [&](NodeId x) { return spf.path_avoids_node(x, d, v); });
      }
    }
  }

  for (const auto& up : upgrades) {
    const NodeId v = up.label.far;
    Bucket fallback{kNoLink, Action::drop()};
    if (auto it = node_first_hop.find({up.node, v, up.dst}); it != node_first_hop.end()) {
      const LinkId out = it->second;
      fallback = spf.path_avoids_node(up.node, up.dst, v)
                     ? Bucket{out, Action::pop(out)}
                     : Bucket{out, Action::rewrite(FailureLabel::node_fail(v), out)};
    } else {
      fw.add_uncovered({up.node, FailureLabel::node_fail(v), kNoNode, up.dst});
    }
    const int group = fw.add_group(up.node, {Bucket{up.link_to_v, Action::output(up.link_to_v)}, fallback});
    fw.set_rule(up.node, labeled_key(up.label, up.dst), Action::group_ref(group));
  }
  return fw;
}

}  // namespace detour
