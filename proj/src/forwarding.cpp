#include "detour/forwarding.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace detour {

namespace {

NodeId parse_id(std::string_view text, const std::string& whole) {
  NodeId value = kNoNode;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("bad label '" + whole + "'");
  }
  return value;
}

}  // namespace

std::string to_string(const FailureLabel& label) {
  switch (label.kind) {
    case FailureLabel::Kind::kPrimary:
      return "primary";
    case FailureLabel::Kind::kLinkFail:
      return "link:" + std::to_string(label.near) + "-" + std::to_string(label.far);
    case FailureLabel::Kind::kNodeFail:
      return "node:" + std::to_string(label.far);
  }
  return "?";
}

FailureLabel parse_label(const std::string& text) {
  std::string_view v(text);
  if (v == "primary") return FailureLabel::primary();
  if (v.starts_with("link:")) {
    auto rest = v.substr(5);
    auto dash = rest.find('-');
    if (dash == std::string_view::npos) throw std::invalid_argument("bad label '" + text + "'");
    return FailureLabel::link_fail(parse_id(rest.substr(0, dash), text), parse_id(rest.substr(dash + 1), text));
  }
  if (v.starts_with("node:")) return FailureLabel::node_fail(parse_id(v.substr(5), text));
  throw std::invalid_argument("bad label '" + text + "'");
}

bool LabelMatch::matches(const FailureLabel& l) const {
  if (!any_toward) return l == label;
  return (l.kind == FailureLabel::Kind::kLinkFail || l.kind == FailureLabel::Kind::kNodeFail) &&
         l.far == label.far;
}

std::string to_string(const LabelMatch& match) {
  if (match.any_toward) return "any:" + std::to_string(match.label.far);
  return to_string(match.label);
}

LabelMatch parse_label_match(const std::string& text) {
  if (text.starts_with("any:")) return LabelMatch::toward(parse_id(std::string_view(text).substr(4), text));
  return LabelMatch::exact(parse_label(text));
}

std::string to_string(MatrixMode mode) {
  switch (mode) {
    case MatrixMode::kShortestOnly:
      return "shortest";
    case MatrixMode::kPerLink:
      return "per-link";
    case MatrixMode::kPerNode:
      return "per-node";
    case MatrixMode::kHybrid:
      return "hybrid";
    case MatrixMode::kDisjointLink:
      return "disjoint-link";
    case MatrixMode::kDisjointNode:
      return "disjoint-node";
  }
  return "?";
}

MatrixMode parse_matrix_mode(const std::string& text) {
  for (auto m : {MatrixMode::kShortestOnly, MatrixMode::kPerLink, MatrixMode::kPerNode, MatrixMode::kHybrid,
                 MatrixMode::kDisjointLink, MatrixMode::kDisjointNode}) {
    if (to_string(m) == text) return m;
  }
  throw std::invalid_argument("unknown variant '" + text + "'");
}

ForwardingMatrix::ForwardingMatrix(MatrixMode mode, NodeId node_count)
    : mode_(mode), rules_(static_cast<size_t>(node_count)) {}

void ForwardingMatrix::set_rule(NodeId node, const MatchKey& key, const Action& action) {
  rules_.at(static_cast<size_t>(node))[key] = action;
}

bool ForwardingMatrix::erase_rule(NodeId node, const MatchKey& key) {
  return rules_.at(static_cast<size_t>(node)).erase(key) > 0;
}

const Action* ForwardingMatrix::find_rule(NodeId node, const MatchKey& key) const {
  const auto& table = rules_.at(static_cast<size_t>(node));
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

int ForwardingMatrix::add_group(NodeId node, std::vector<Bucket> buckets) {
  auto key = std::make_pair(node, buckets);
  if (auto it = group_ids_.find(key); it != group_ids_.end()) return it->second;
  const int id = static_cast<int>(groups_.size());
  groups_.push_back({id, node, std::move(buckets)});
  group_ids_.emplace(std::move(key), id);
  return id;
}

void ForwardingMatrix::compact_groups() {
  std::vector<char> used(groups_.size(), 0);
  for (const auto& table : rules_) {
    for (const auto& [key, action] : table) {
      if (action.kind == Action::Kind::kGroup) used[static_cast<size_t>(action.group)] = 1;
    }
  }
  std::vector<int> remap(groups_.size(), -1);
  std::vector<GroupEntry> kept;
  group_ids_.clear();
  for (size_t i = 0; i < groups_.size(); ++i) {
    if (!used[i]) continue;
    remap[i] = static_cast<int>(kept.size());
    auto g = std::move(groups_[i]);
    g.id = remap[i];
    group_ids_.emplace(std::make_pair(g.node, g.buckets), g.id);
    kept.push_back(std::move(g));
  }
  groups_ = std::move(kept);
  for (auto& table : rules_) {
    for (auto& [key, action] : table) {
      if (action.kind == Action::Kind::kGroup) action.group = remap[static_cast<size_t>(action.group)];
    }
  }
}

ForwardingMatrix::Match ForwardingMatrix::lookup(NodeId node, const FailureLabel& label, NodeId dst, NodeId src,
                                                 LinkId in_port) const {
  const auto& table = rules_.at(static_cast<size_t>(node));
  auto try_key = [&](const MatchKey& key) -> Match {
    auto it = table.find(key);
    if (it == table.end()) return {};
    return {&it->first, &it->second};
  };
  if (auto m = try_key({LabelMatch::exact(label), dst, src, in_port}); m.action) return m;
  if (auto m = try_key({LabelMatch::exact(label), dst, kNoNode, kAnyPort}); m.action) return m;
  if (!label.is_primary()) {
    if (auto m = try_key({LabelMatch::toward(label.far), dst, kNoNode, kAnyPort}); m.action) return m;
    if (auto m = try_key({LabelMatch::exact(FailureLabel::primary()), dst, kNoNode, kAnyPort}); m.action) return m;
  }
  return {};
}

std::size_t ForwardingMatrix::rule_count() const {
  std::size_t total = 0;
  for (const auto& table : rules_) total += table.size();
  return total;
}

std::size_t ForwardingMatrix::primary_rule_count() const {
  std::size_t total = 0;
  for (const auto& table : rules_) {
    for (const auto& [key, action] : table) {
      if (!key.label.any_toward && key.label.label.is_primary() && key.src == kNoNode) ++total;
    }
  }
  return total;
}

std::size_t ForwardingMatrix::group_rule_count() const {
  std::size_t total = 0;
  for (const auto& table : rules_) {
    for (const auto& [key, action] : table) {
      if (action.kind == Action::Kind::kGroup) ++total;
    }
  }
  return total;
}

bool operator==(const ForwardingMatrix& a, const ForwardingMatrix& b) {
  if (a.mode() != b.mode() || a.node_count() != b.node_count()) return false;
  for (NodeId n = 0; n < a.node_count(); ++n) {
    if (a.rules(n) != b.rules(n)) return false;
  }
  if (a.groups().size() != b.groups().size()) return false;
  for (size_t i = 0; i < a.groups().size(); ++i) {
    if (a.groups()[i].node != b.groups()[i].node || a.groups()[i].buckets != b.groups()[i].buckets) return false;
  }
  return a.uncovered() == b.uncovered();
}

ForwardingMatrix shortest_path_rules(const Topology& t) {
  ForwardingMatrix fw(MatrixMode::kShortestOnly, t.node_count());
  AllToAll spf(t, &fw.stats);
  for (NodeId n = 0; n < t.node_count(); ++n) {
    for (NodeId d = 0; d < t.node_count(); ++d) {
      if (d == n) continue;
      fw.set_rule(n, {LabelMatch::exact(FailureLabel::primary()), d}, Action::output(spf.next_link(n, d)));
    }
  }
  return fw;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json neighbor_or_null(const Topology& t, NodeId node, LinkId link) {
  if (link < 0) return nullptr;
  return t.link(link).opposite(node);
}

LinkId link_from_neighbor(const Topology& t, NodeId node, const json& j) {
  if (j.is_null()) return kNoLink;
  return t.link_between(node, j.get<NodeId>());
}

std::string action_kind_name(Action::Kind k) {
  switch (k) {
    case Action::Kind::kOutput:
      return "output";
    case Action::Kind::kPushLabelOutput:
      return "push";
    case Action::Kind::kPopLabelOutput:
      return "pop";
    case Action::Kind::kRewriteLabelOutput:
      return "rewrite";
    case Action::Kind::kGroup:
      return "group";
    case Action::Kind::kDrop:
      return "drop";
  }
  return "?";
}

Action::Kind parse_action_kind(const std::string& s) {
  for (auto k : {Action::Kind::kOutput, Action::Kind::kPushLabelOutput, Action::Kind::kPopLabelOutput,
                 Action::Kind::kRewriteLabelOutput, Action::Kind::kGroup, Action::Kind::kDrop}) {
    if (action_kind_name(k) == s) return k;
  }
  throw std::invalid_argument("unknown action '" + s + "'");
}

json action_json(const Action& a, const Topology& t, NodeId node) {
  json j;
  j["type"] = action_kind_name(a.kind);
  switch (a.kind) {
    case Action::Kind::kGroup:
      j["group"] = a.group;
      break;
    case Action::Kind::kDrop:
      break;
    case Action::Kind::kPushLabelOutput:
    case Action::Kind::kRewriteLabelOutput:
      j["label"] = to_string(a.label);
      [[fallthrough]];
    default:
      j["out"] = neighbor_or_null(t, node, a.link);
  }
  return j;
}

Action action_from_json(const json& j, const Topology& t, NodeId node) {
  Action a;
  a.kind = parse_action_kind(j.at("type").get<std::string>());
  if (j.contains("group")) a.group = j["group"].get<int>();
  if (j.contains("label")) a.label = parse_label(j["label"].get<std::string>());
  if (j.contains("out")) a.link = link_from_neighbor(t, node, j["out"]);
  return a;
}

std::string action_text(const Action& a, const Topology& t, NodeId node) {
  auto out = [&] { return a.link < 0 ? std::string("-") : std::to_string(t.link(a.link).opposite(node)); };
  switch (a.kind) {
    case Action::Kind::kOutput:
      return "output " + out();
    case Action::Kind::kPushLabelOutput:
      return "push " + to_string(a.label) + " output " + out();
    case Action::Kind::kPopLabelOutput:
      return "pop output " + out();
    case Action::Kind::kRewriteLabelOutput:
      return "rewrite " + to_string(a.label) + " output " + out();
    case Action::Kind::kGroup:
      return "group " + std::to_string(a.group);
    case Action::Kind::kDrop:
      return "drop";
  }
  return "?";
}

json port_json(const Topology& t, NodeId node, LinkId port) {
  if (port == kAnyPort) return nullptr;
  if (port == kLocalPort) return "local";
  return t.link(port).opposite(node);
}

LinkId port_from_json(const Topology& t, NodeId node, const json& j) {
  if (j.is_null()) return kAnyPort;
  if (j.is_string() && j.get<std::string>() == "local") return kLocalPort;
  return t.link_between(node, j.get<NodeId>());
}

}  // namespace

std::string matrix_to_json(const ForwardingMatrix& fw, const Topology& t) {
  json root;
  root["mode"] = to_string(fw.mode());
  root["nodes"] = fw.node_count();
  json rules = json::array();
  for (NodeId n = 0; n < fw.node_count(); ++n) {
    for (const auto& [key, action] : fw.rules(n)) {
      json r;
      r["node"] = n;
      r["match"] = to_string(key.label);
      r["dst"] = key.dst;
      if (key.src != kNoNode) r["src"] = key.src;
      if (key.in_port != kAnyPort) r["in"] = port_json(t, n, key.in_port);
      r["action"] = action_json(action, t, n);
      rules.push_back(std::move(r));
    }
  }
  root["rules"] = std::move(rules);
  json groups = json::array();
  for (const auto& g : fw.groups()) {
    json jg;
    jg["id"] = g.id;
    jg["node"] = g.node;
    json buckets = json::array();
    for (const auto& b : g.buckets) {
      buckets.push_back({{"watch", neighbor_or_null(t, g.node, b.watch)}, {"action", action_json(b.action, t, g.node)}});
    }
    jg["buckets"] = std::move(buckets);
    groups.push_back(std::move(jg));
  }
  root["groups"] = std::move(groups);
  json uncovered = json::array();
  for (const auto& u : fw.uncovered()) {
    json ju{{"node", u.node}, {"label", to_string(u.label)}, {"dst", u.dst}};
    if (u.src != kNoNode) ju["src"] = u.src;
    uncovered.push_back(std::move(ju));
  }
  root["uncovered"] = std::move(uncovered);
  root["shortest_path_runs"] = fw.stats.tree_runs;

  // One array element per line keeps diffs readable without the bulk of a
  // fully indented dump.
  std::ostringstream out;
  out << "{\n";
  bool first_key = true;
  for (auto it = root.begin(); it != root.end(); ++it) {
    if (!first_key) out << ",\n";
    first_key = false;
    out << "  " << json(it.key()).dump() << ": ";
    if (it->is_array() && !it->empty()) {
      out << "[\n";
      for (size_t i = 0; i < it->size(); ++i) {
        out << "    " << (*it)[i].dump() << (i + 1 < it->size() ? ",\n" : "\n");
      }
      out << "  ]";
    } else {
      out << it->dump();
    }
  }
  out << "\n}\n";
  return out.str();
}

ForwardingMatrix matrix_from_json(const std::string& text, const Topology& t) {
  const json root = json::parse(text);
  const auto nodes = root.at("nodes").get<NodeId>();
  if (nodes != t.node_count()) throw std::invalid_argument("matrix node count does not match topology");
  ForwardingMatrix fw(parse_matrix_mode(root.at("mode").get<std::string>()), nodes);
  // Groups first so ids line up with creation order.
  for (const auto& jg : root.at("groups")) {
    const auto node = jg.at("node").get<NodeId>();
    std::vector<Bucket> buckets;
    for (const auto& jb : jg.at("buckets")) {
      buckets.push_back({link_from_neighbor(t, node, jb.at("watch")), action_from_json(jb.at("action"), t, node)});
    }
    const int id = fw.add_group(node, std::move(buckets));
    if (id != jg.at("id").get<int>()) throw std::invalid_argument("group ids are not dense");
  }
  for (const auto& r : root.at("rules")) {
    const auto node = r.at("node").get<NodeId>();
    MatchKey key;
    key.label = parse_label_match(r.at("match").get<std::string>());
    key.dst = r.at("dst").get<NodeId>();
    if (r.contains("src")) key.src = r["src"].get<NodeId>();
    if (r.contains("in")) key.in_port = port_from_json(t, node, r["in"]);
    fw.set_rule(node, key, action_from_json(r.at("action"), t, node));
  }
  for (const auto& ju : root.at("uncovered")) {
    UncoveredCase u;
    u.node = ju.at("node").get<NodeId>();
    u.label = parse_label(ju.at("label").get<std::string>());
    u.dst = ju.at("dst").get<NodeId>();
    if (ju.contains("src")) u.src = ju["src"].get<NodeId>();
    fw.add_uncovered(u);
  }
  if (root.contains("shortest_path_runs")) fw.stats.tree_runs = root["shortest_path_runs"].get<std::size_t>();
  return fw;
}

std::string matrix_to_text(const ForwardingMatrix& fw, const Topology& t) {
  std::ostringstream out;
  out << "# mode " << to_string(fw.mode()) << " nodes " << fw.node_count() << " rules " << fw.rule_count()
      << " groups " << fw.groups().size() << '\n';
  for (NodeId n = 0; n < fw.node_count(); ++n) {
    for (const auto& [key, action] : fw.rules(n)) {
      out << "rule " << n << ' ' << to_string(key.label) << " dst " << key.dst;
      if (key.src != kNoNode) out << " src " << key.src;
      if (key.in_port == kLocalPort) out << " in local";
      else if (key.in_port != kAnyPort) out << " in " << t.link(key.in_port).opposite(n);
      out << " -> " << action_text(action, t, n) << '\n';
    }
  }
  for (const auto& g : fw.groups()) {
    out << "group " << g.id << " node " << g.node << ':';
    for (const auto& b : g.buckets) {
      out << " [watch " << (b.watch < 0 ? std::string("-") : std::to_string(t.link(b.watch).opposite(g.node)))
          << ": " << action_text(b.action, t, g.node) << ']';
    }
    out << '\n';
  }
  for (const auto& u : fw.uncovered()) {
    out << "uncovered node " << u.node << ' ' << to_string(u.label);
    if (u.src != kNoNode) out << " src " << u.src;
    out << " dst " << u.dst << '\n';
  }
  return out.str();
}

}  // namespace detour
