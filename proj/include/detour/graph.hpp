#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace detour {

using NodeId = std::int32_t;
using LinkId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr LinkId kNoLink = -1;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A physical, undirected link. Stored with u < v.
struct Link {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  double weight = 0.0;

  NodeId opposite(NodeId n) const { return n == u ? v : u; }
  bool touches(NodeId n) const { return n == u || n == v; }
  bool operator==(const Link&) const = default;
};

// One direction of a physical link as seen from a node's adjacency list.
struct Arc {
  NodeId to = kNoNode;
  LinkId link = kNoLink;
  double weight = 0.0;
};

// Weighted graph of nodes [0, n) and undirected physical links. Each link is
// realized as the arc pair (u,v) and (v,u). Adjacency lists are sorted by
// neighbor id. Immutable after construction.
class Topology {
 public:
  Topology() = default;
  explicit Topology(NodeId node_count);

  // Throws TopologyError on self-loops, parallel links, negative weights or
  // out-of-range endpoints.
  LinkId add_link(NodeId u, NodeId v, double weight);

  NodeId node_count() const { return static_cast<NodeId>(adjacency_.size()); }
  LinkId link_count() const { return static_cast<LinkId>(links_.size()); }

  const Link& link(LinkId id) const { return links_.at(static_cast<size_t>(id)); }
  std::span<const Link> links() const { return links_; }
  std::span<const Arc> arcs(NodeId n) const { return adjacency_.at(static_cast<size_t>(n)); }

  std::optional<LinkId> find_link(NodeId u, NodeId v) const;
  LinkId link_between(NodeId u, NodeId v) const;  // throws if absent
  bool has_node(NodeId n) const { return n >= 0 && n < node_count(); }
  size_t degree(NodeId n) const { return arcs(n).size(); }

  // Copy with every link weight set to 1 (hop-count metric).
  Topology with_unit_weights() const;

  // Equality compares node count and the set of links with their weights.
  bool operator==(const Topology& other) const;

 private:
  std::vector<Link> links_;
  std::vector<std::vector<Arc>> adjacency_;
};

// The single failed element of a scenario. LinkDown kills both arcs of the
// physical link; NodeDown kills the node and every incident link.
class FailureScenario {
 public:
  enum class Kind { kNone, kLinkDown, kNodeDown };

  FailureScenario() = default;
  static FailureScenario none() { return {}; }
  static FailureScenario link_down(LinkId link) { return {Kind::kLinkDown, link, kNoNode}; }
  static FailureScenario node_down(NodeId node) { return {Kind::kNodeDown, kNoLink, node}; }

  Kind kind() const { return kind_; }
  LinkId failed_link() const { return link_; }
  NodeId failed_node() const { return node_; }

  bool node_alive(NodeId n) const { return !(kind_ == Kind::kNodeDown && n == node_); }
  bool link_alive(const Topology& t, LinkId id) const;

  std::string describe(const Topology& t) const;
  bool operator==(const FailureScenario&) const = default;

 private:
  FailureScenario(Kind k, LinkId l, NodeId n) : kind_(k), link_(l), node_(n) {}

  Kind kind_ = Kind::kNone;
  LinkId link_ = kNoLink;
  NodeId node_ = kNoNode;
};

// Shortest decimal form that reads back to the same double.
std::string format_weight(double w);

// Parses "none", "link:u-v" or "node:v".
FailureScenario parse_scenario(const Topology& t, const std::string& text);

bool is_connected(const Topology& t, const FailureScenario& excluded = {});

// Connected and free of articulation nodes.
bool is_two_connected(const Topology& t);

}  // namespace detour
