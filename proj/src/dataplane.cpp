#include "detour/dataplane.hpp"

#include <set>
#include <sstream>
#include <tuple>

namespace detour {

std::string to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::kDelivered:
      return "delivered";
    case TraceStatus::kDropped:
      return "dropped";
    case TraceStatus::kLoop:
      return "loop";
  }
  return "dropped";
}

std::vector<NodeId> Trace::nodes() const {
  std::vector<NodeId> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.node);
  return out;
}

namespace {

const Action* resolve(const ForwardingMatrix& fw, const Topology& t, const FailureScenario& scenario,
                      const Action& action) {
  if (action.kind != Action::Kind::kGroup) return &action;
  for (const auto& b : fw.group(action.group).buckets) {
    if (b.watch == kNoLink || scenario.link_alive(t, b.watch)) return &b.action;
  }
  return nullptr;
}

}  // namespace

Trace simulate(const ForwardingMatrix& fw, const Topology& t, const FailureScenario& scenario, NodeId src,
               NodeId dst) {
  Trace trace;
  trace.src = src;
  trace.dst = dst;
  std::set<std::tuple<NodeId, FailureLabel, LinkId>> seen;

  NodeId node = src;
  FailureLabel label = FailureLabel::primary();
  LinkId in_port = kLocalPort;

  auto stop = [&](TraceStatus status, std::optional<MatchKey> matched = std::nullopt) {
    trace.steps.push_back({node, std::move(matched), label, kNoLink, kNoNode, 0.0});
    trace.status = status;
  };

  while (true) {
    if (node == dst && scenario.node_alive(node)) {
      stop(TraceStatus::kDelivered);
      break;
    }
    if (!scenario.node_alive(node)) {
      stop(TraceStatus::kDropped);
      break;
    }
    if (!seen.insert({node, label, in_port}).second) {
      stop(TraceStatus::kLoop);
      break;
    }
    const auto match = fw.lookup(node, label, dst, src, in_port);
    if (!match.action) {
      stop(TraceStatus::kDropped);
      break;
    }
    const Action* action = resolve(fw, t, scenario, *match.action);
    if (!action || action->kind == Action::Kind::kDrop || action->kind == Action::Kind::kGroup) {
      stop(TraceStatus::kDropped, *match.key);
      break;
    }
    switch (action->kind) {
      case Action::Kind::kPushLabelOutput:
      case Action::Kind::kRewriteLabelOutput:
        label = action->label;
        break;
      case Action::Kind::kPopLabelOutput:
        label = FailureLabel::primary();
        break;
      default:
        break;
    }
    if (!scenario.link_alive(t, action->link)) {
      stop(TraceStatus::kDropped, *match.key);
      break;
    }
    const Link& link = t.link(action->link);
    const NodeId next = link.opposite(node);
    trace.steps.push_back({node, *match.key, label, action->link, next, link.weight});
    trace.total_weight += link.weight;
    in_port = action->link;
    node = next;
  }
  trace.crankback_weight = crankback_of(trace);
  return trace;
}

double crankback_of(const Trace& trace) {
  std::set<std::pair<NodeId, NodeId>> arcs;
  double total = 0.0;
  for (const auto& s : trace.steps) {
    if (s.link == kNoLink) continue;
    if (arcs.count({s.next, s.node})) total += s.weight;
    arcs.insert({s.node, s.next});
  }
  return total;
}

std::string format_trace(const Trace& trace) {
  std::ostringstream out;
  for (const auto& s : trace.steps) {
    out << s.node << ' ' << to_string(s.label) << ' ';
    if (s.link == kNoLink) {
      out << "- 0\n";
    } else {
      out << s.node << '-' << s.next << ' ' << format_weight(s.weight) << '\n';
    }
  }
  out << to_string(trace.status) << " total=" << format_weight(trace.total_weight)
      << " crankback=" << format_weight(trace.crankback_weight) << '\n';
  return out.str();
}

}  // namespace detour
