#include "detour/graph.hpp"

#include <algorithm>
#include <charconv>
#include <array>

namespace detour {

Topology::Topology(NodeId node_count) {
  if (node_count < 0) throw TopologyError("negative node count");
  adjacency_.resize(static_cast<size_t>(node_count));
}

LinkId Topology::add_link(NodeId u, NodeId v, double weight) {
  if (!has_node(u) || !has_node(v)) {
    throw TopologyError("link endpoint out of range: " + std::to_string(u) + "-" + std::to_string(v));
  }
  if (u == v) throw TopologyError("self-loop at node " + std::to_string(u));
  if (!(weight >= 0.0) || weight == kInf) {
    throw TopologyError("invalid weight on link " + std::to_string(u) + "-" + std::to_string(v));
  }
  if (find_link(u, v)) {
    throw TopologyError("duplicate link " + std::to_string(u) + "-" + std::to_string(v));
  }
  if (u > v) std::swap(u, v);
  const auto id = static_cast<LinkId>(links_.size());
  links_.push_back({u, v, weight});

  auto insert_sorted = [](std::vector<Arc>& list, Arc arc) {
    auto pos = std::lower_bound(list.begin(), list.end(), arc,
                                [](const Arc& a, const Arc& b) { return a.to < b.to; });
    list.insert(pos, arc);
  };
  insert_sorted(adjacency_[static_cast<size_t>(u)], {v, id, weight});
  insert_sorted(adjacency_[static_cast<size_t>(v)], {u, id, weight});
  return id;
}

std::optional<LinkId> Topology::find_link(NodeId u, NodeId v) const {
  if (!has_node(u) || !has_node(v)) return std::nullopt;
  const auto& list = adjacency_[static_cast<size_t>(u)];
  auto pos = std::lower_bound(list.begin(), list.end(), v,
                              [](const Arc& a, NodeId n) { return a.to < n; });
  if (pos != list.end() && pos->to == v) return pos->link;
  return std::nullopt;
}

LinkId Topology::link_between(NodeId u, NodeId v) const {
  if (auto id = find_link(u, v)) return *id;
  throw TopologyError("no link " + std::to_string(u) + "-" + std::to_string(v));
}

Topology Topology::with_unit_weights() const {
  Topology out(node_count());
  for (const auto& l : links_) out.add_link(l.u, l.v, 1.0);
  return out;
}

bool Topology::operator==(const Topology& other) const {
  if (node_count() != other.node_count() || link_count() != other.link_count()) return false;
  for (const auto& l : links_) {
    auto id = other.find_link(l.u, l.v);
    if (!id || other.link(*id).weight != l.weight) return false;
  }
  return true;
}

bool FailureScenario::link_alive(const Topology& t, LinkId id) const {
  switch (kind_) {
    case Kind::kNone:
      return true;
    case Kind::kLinkDown:
      return id != link_;
    case Kind::kNodeDown:
      return !t.link(id).touches(node_);
  }
  return true;
}

std::string FailureScenario::describe(const Topology& t) const {
  switch (kind_) {
    case Kind::kNone:
      return "none";
    case Kind::kLinkDown: {
      const auto& l = t.link(link_);
      return "link:" + std::to_string(l.u) + "-" + std::to_string(l.v);
    }
    case Kind::kNodeDown:
      return "node:" + std::to_string(node_);
  }
  return "none";
}

namespace {

NodeId parse_node(std::string_view text, const std::string& whole) {
  NodeId value = kNoNode;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw TopologyError("bad scenario '" + whole + "'");
  }
  return value;
}

}  // namespace

FailureScenario parse_scenario(const Topology& t, const std::string& text) {
  if (text.empty() || text == "none") return FailureScenario::none();
  std::string_view view(text);
  if (view.starts_with("link:")) {
    auto rest = view.substr(5);
    auto dash = rest.find('-');
    if (dash == std::string_view::npos) throw TopologyError("bad scenario '" + text + "'");
    NodeId u = parse_node(rest.substr(0, dash), text);
    NodeId v = parse_node(rest.substr(dash + 1), text);
    return FailureScenario::link_down(t.link_between(u, v));
  }
  if (view.starts_with("node:")) {
    NodeId v = parse_node(view.substr(5), text);
    if (!t.has_node(v)) throw TopologyError("unknown node in scenario '" + text + "'");
    return FailureScenario::node_down(v);
  }
  throw TopologyError("bad scenario '" + text + "'");
}

bool is_connected(const Topology& t, const FailureScenario& excluded) {
  const NodeId n = t.node_count();
  NodeId start = kNoNode;
  NodeId alive = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (excluded.node_alive(v)) {
      ++alive;
      if (start == kNoNode) start = v;
    }
  }
  if (alive <= 1) return true;

  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<NodeId> stack{start};
  seen[static_cast<size_t>(start)] = 1;
  NodeId reached = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (const auto& arc : t.arcs(v)) {
      if (seen[static_cast<size_t>(arc.to)] || !excluded.link_alive(t, arc.link)) continue;
      seen[static_cast<size_t>(arc.to)] = 1;
      ++reached;
      stack.push_back(arc.to);
    }
  }
  return reached == alive;
}

bool is_two_connected(const Topology& t) {
  const NodeId n = t.node_count();
  if (n < 3 || !is_connected(t)) return false;

  // Hopcroft-Tarjan articulation points, iterative.
  std::vector<int> disc(static_cast<size_t>(n), -1);
  std::vector<int> low(static_cast<size_t>(n), 0);
  struct Frame {
    NodeId node;
    NodeId parent;
    size_t next_arc;
  };
  int timer = 0;
  int root_children = 0;
  std::vector<Frame> stack;
  stack.push_back({0, kNoNode, 0});
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    auto& top = stack.back();
    auto arcs = t.arcs(top.node);
    if (top.next_arc < arcs.size()) {
      NodeId to = arcs[top.next_arc++].to;
      if (to == top.parent) continue;
      if (disc[static_cast<size_t>(to)] >= 0) {
        low[static_cast<size_t>(top.node)] =
            std::min(low[static_cast<size_t>(top.node)], disc[static_cast<size_t>(to)]);
      } else {
        disc[static_cast<size_t>(to)] = low[static_cast<size_t>(to)] = timer++;
        if (top.node == 0) ++root_children;
        stack.push_back({to, top.node, 0});
      }
      continue;
    }
    Frame done = top;
    stack.pop_back();
    if (stack.empty()) break;
    NodeId parent = stack.back().node;
    low[static_cast<size_t>(parent)] =
        std::min(low[static_cast<size_t>(parent)], low[static_cast<size_t>(done.node)]);
    if (parent != 0 && low[static_cast<size_t>(done.node)] >= disc[static_cast<size_t>(parent)]) {
      return false;
    }
  }
  return root_children <= 1;
}

std::string format_weight(double w) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), w);
  return std::string(buf.data(), end);
}

}  // namespace detour
