#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "detour/protect.hpp"

namespace detour {

namespace {

bool is_labeled(const MatchKey& key) { return key.label.any_toward || !key.label.label.is_primary(); }

struct Reachability {
  std::set<std::pair<NodeId, MatchKey>> used;
  // (node, dst, v): a packet labeled toward v found no labeled rule there.
  std::set<std::tuple<NodeId, NodeId, NodeId>> fallbacks;
};

// Every labeled rule some packet can match, found by following each label
// push or rewrite through all group buckets until the label is popped or the
// packet falls back to a primary rule.
Reachability reachable_labeled_rules(const ForwardingMatrix& fw, const Topology& t) {
  struct State {
    NodeId node;
    FailureLabel label;
    NodeId dst;
    auto operator<=>(const State&) const = default;
  };
  std::set<State> seen;
  std::vector<State> work;
  Reachability r;

  auto follow = [&](NodeId from, const Action& a, const FailureLabel& carried, NodeId dst, auto& self) -> void {
    switch (a.kind) {
      case Action::Kind::kOutput:
        if (!carried.is_primary()) work.push_back({t.link(a.link).opposite(from), carried, dst});
        break;
      case Action::Kind::kPushLabelOutput:
      case Action::Kind::kRewriteLabelOutput:
        work.push_back({t.link(a.link).opposite(from), a.label, dst});
        break;
      case Action::Kind::kGroup:
        for (const auto& b : fw.group(a.group).buckets) self(from, b.action, carried, dst, self);
        break;
      case Action::Kind::kPopLabelOutput:
      case Action::Kind::kDrop:
        break;
    }
  };

  for (NodeId n = 0; n < fw.node_count(); ++n) {
    for (const auto& [key, action] : fw.rules(n)) {
      if (!is_labeled(key)) follow(n, action, FailureLabel::primary(), key.dst, follow);
    }
  }
  while (!work.empty()) {
    const State s = work.back();
    work.pop_back();
    if (s.node == s.dst || !seen.insert(s).second) continue;
    const auto match = fw.lookup(s.node, s.label, s.dst, kNoNode, kAnyPort);
    if (!match.action || !is_labeled(*match.key)) {
      r.fallbacks.insert({s.node, s.dst, s.label.far});
      continue;
    }
    r.used.insert({s.node, *match.key});
    follow(s.node, *match.action, s.label, s.dst, follow);
  }
  return r;
}

}  // namespace

ForwardingMatrix optimize(const ForwardingMatrix& fw, const Topology& t) {
  ForwardingMatrix out = fw;

  // Label stripping: drop labeled rules downstream of pop points, and any
  // other labeled rule no packet reaches.
  const auto reach = reachable_labeled_rules(fw, t);
  for (NodeId n = 0; n < fw.node_count(); ++n) {
    for (const auto& [key, action] : fw.rules(n)) {
      if (is_labeled(key) && !reach.used.count({n, key})) out.erase_rule(n, key);
    }
  }

  // LinkFail(u, v) rules equal to the NodeFail(v) rule at the same node and
  // destination collapse with it into a single {*,v} rule.
  for (NodeId n = 0; n < out.node_count(); ++n) {
    std::map<std::pair<NodeId, NodeId>, std::vector<MatchKey>> link_rules;  // (v, dst) -> keys
    for (const auto& [key, action] : out.rules(n)) {
      if (!key.label.any_toward && key.label.label.kind == FailureLabel::Kind::kLinkFail) {
        link_rules[{key.label.label.far, key.dst}].push_back(key);
      }
    }
    for (const auto& [target, keys] : link_rules) {
      const auto [v, dst] = target;
      // A wildcard would capture packets that now fall through to primary.
      if (reach.fallbacks.count({n, dst, v})) continue;
      const MatchKey node_key{LabelMatch::exact(FailureLabel::node_fail(v)), dst};
      const Action* node_action = out.find_rule(n, node_key);
      if (!node_action) continue;
      const Action shared = *node_action;
      std::vector<MatchKey> equal;
      for (const auto& k : keys) {
        if (*out.find_rule(n, k) == shared) equal.push_back(k);
      }
      if (equal.empty()) continue;
      for (const auto& k : equal) out.erase_rule(n, k);
      out.erase_rule(n, node_key);
      out.set_rule(n, {LabelMatch::toward(v), dst}, shared);
    }
  }

  out.compact_groups();
  return out;
}

}  // namespace detour
