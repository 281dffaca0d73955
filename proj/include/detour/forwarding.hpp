#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "detour/graph.hpp"
#include "detour/spf.hpp"

namespace detour {

// Tag carried by a packet. LinkFail(u, v): node u saw its link to v down and
// detoured. NodeFail(v): v is presumed down.
struct FailureLabel {
  enum class Kind : std::uint8_t { kPrimary, kLinkFail, kNodeFail };

  Kind kind = Kind::kPrimary;
  NodeId near = kNoNode;  // detecting endpoint, LinkFail only
  NodeId far = kNoNode;   // opposite endpoint, or the failed node

  static FailureLabel primary() { return {}; }
  static FailureLabel link_fail(NodeId u, NodeId v) { return {Kind::kLinkFail, u, v}; }
  static FailureLabel node_fail(NodeId v) { return {Kind::kNodeFail, kNoNode, v}; }

  bool is_primary() const { return kind == Kind::kPrimary; }
  auto operator<=>(const FailureLabel&) const = default;
};

std::string to_string(const FailureLabel& label);
FailureLabel parse_label(const std::string& text);

// Label side of a rule match: an exact label, or the wildcard {*,v} that
// matches LinkFail(*, v) and NodeFail(v), i.e. any failure report toward v.
struct LabelMatch {
  FailureLabel label;
  bool any_toward = false;

  static LabelMatch exact(FailureLabel l) { return {l, false}; }
  static LabelMatch toward(NodeId v) { return {FailureLabel::node_fail(v), true}; }
  bool matches(const FailureLabel& l) const;
  auto operator<=>(const LabelMatch&) const = default;
};

std::string to_string(const LabelMatch& match);
LabelMatch parse_label_match(const std::string& text);

// Incoming-port match values besides a link id.
inline constexpr LinkId kAnyPort = -2;
inline constexpr LinkId kLocalPort = -1;  // originated at this node

struct MatchKey {
  LabelMatch label;
  NodeId dst = kNoNode;
  NodeId src = kNoNode;  // kNoNode: any source
  LinkId in_port = kAnyPort;

  auto operator<=>(const MatchKey&) const = default;
};

struct Action {
  enum class Kind : std::uint8_t { kOutput, kPushLabelOutput, kPopLabelOutput, kRewriteLabelOutput, kGroup, kDrop };

  Kind kind = Kind::kDrop;
  LinkId link = kNoLink;
  FailureLabel label;  // push / rewrite target
  int group = -1;

  static Action output(LinkId l) { return {Kind::kOutput, l, {}, -1}; }
  static Action push(FailureLabel lbl, LinkId l) { return {Kind::kPushLabelOutput, l, lbl, -1}; }
  static Action pop(LinkId l) { return {Kind::kPopLabelOutput, l, {}, -1}; }
  static Action rewrite(FailureLabel lbl, LinkId l) { return {Kind::kRewriteLabelOutput, l, lbl, -1}; }
  static Action group_ref(int id) { return {Kind::kGroup, kNoLink, {}, id}; }
  static Action drop() { return {}; }

  auto operator<=>(const Action&) const = default;
};

// Fast-failover bucket: fires when `watch` is live (kNoLink: always live).
struct Bucket {
  LinkId watch = kNoLink;
  Action action;

  auto operator<=>(const Bucket&) const = default;
};

struct GroupEntry {
  int id = -1;
  NodeId node = kNoNode;
  std::vector<Bucket> buckets;
};

// A (failure, destination) case with no surviving detour.
struct UncoveredCase {
  NodeId node = kNoNode;
  FailureLabel label;
  NodeId src = kNoNode;
  NodeId dst = kNoNode;

  auto operator<=>(const UncoveredCase&) const = default;
};

enum class MatrixMode { kShortestOnly, kPerLink, kPerNode, kHybrid, kDisjointLink, kDisjointNode };

std::string to_string(MatrixMode mode);
MatrixMode parse_matrix_mode(const std::string& text);

class ForwardingMatrix {
 public:
  using RuleTable = std::map<MatchKey, Action>;

  ForwardingMatrix() = default;
  ForwardingMatrix(MatrixMode mode, NodeId node_count);

  MatrixMode mode() const { return mode_; }
  NodeId node_count() const { return static_cast<NodeId>(rules_.size()); }

  void set_rule(NodeId node, const MatchKey& key, const Action& action);
  bool erase_rule(NodeId node, const MatchKey& key);
  const Action* find_rule(NodeId node, const MatchKey& key) const;
  const RuleTable& rules(NodeId node) const { return rules_[static_cast<size_t>(node)]; }

  // Identical (node, bucket list) pairs share one group.
  int add_group(NodeId node, std::vector<Bucket> buckets);
  const GroupEntry& group(int id) const { return groups_.at(static_cast<size_t>(id)); }
  const std::vector<GroupEntry>& groups() const { return groups_; }
  // Drops groups no rule refers to and renumbers the rest in creation order.
  void compact_groups();

  void add_uncovered(const UncoveredCase& c) { uncovered_.push_back(c); }
  const std::vector<UncoveredCase>& uncovered() const { return uncovered_; }

  // Lookup order: exact (label, dst, src, port), exact (label, dst), the
  // {*,v} wildcard, then the primary rule for dst.
  struct Match {
    const MatchKey* key = nullptr;
    const Action* action = nullptr;
  };
  Match lookup(NodeId node, const FailureLabel& label, NodeId dst, NodeId src, LinkId in_port) const;

  std::size_t rule_count() const;
  std::size_t primary_rule_count() const;  // rules with an exact primary match and no source
  std::size_t group_rule_count() const;

  SpfStats stats;

 private:
  MatrixMode mode_ = MatrixMode::kShortestOnly;
  std::vector<RuleTable> rules_;
  std::vector<GroupEntry> groups_;
  std::map<std::pair<NodeId, std::vector<Bucket>>, int> group_ids_;
  std::vector<UncoveredCase> uncovered_;
};

bool operator==(const ForwardingMatrix& a, const ForwardingMatrix& b);

// Only the all-to-all shortest path rules.
ForwardingMatrix shortest_path_rules(const Topology& t);

// Sorted, deterministic JSON. Links are written as neighbor node ids, so
// the topology is needed in both directions.
std::string matrix_to_json(const ForwardingMatrix& fw, const Topology& t);
ForwardingMatrix matrix_from_json(const std::string& text, const Topology& t);
// One line per rule and group, for diffing.
std::string matrix_to_text(const ForwardingMatrix& fw, const Topology& t);

}  // namespace detour
