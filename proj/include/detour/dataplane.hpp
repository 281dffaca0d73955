#pragma once

#include <optional>
#include <string>
#include <vector>

#include "detour/forwarding.hpp"
#include "detour/graph.hpp"

namespace detour {

struct TraceStep {
  NodeId node = kNoNode;
  std::optional<MatchKey> matched;  // empty at the destination and on a miss
  FailureLabel label;               // label after the action
  LinkId link = kNoLink;            // kNoLink: the packet stops here
  NodeId next = kNoNode;
  double weight = 0.0;
};

enum class TraceStatus { kDelivered, kDropped, kLoop };

std::string to_string(TraceStatus status);

struct Trace {
  NodeId src = kNoNode;
  NodeId dst = kNoNode;
  std::vector<TraceStep> steps;
  TraceStatus status = TraceStatus::kDropped;
  double total_weight = 0.0;
  double crankback_weight = 0.0;

  bool delivered() const { return status == TraceStatus::kDelivered; }
  std::vector<NodeId> nodes() const;
};

// Forwards one packet from src to dst. Groups pick their first bucket whose
// watched link is live; a dead node never forwards. The walk stops on
// delivery, an explicit Drop, a missing rule, output onto a dead link, or a
// repeated (node, label, incoming port) state.
Trace simulate(const ForwardingMatrix& fw, const Topology& t, const FailureScenario& scenario, NodeId src,
               NodeId dst);

// Weight of traversed arcs whose reverse arc was traversed earlier.
double crankback_of(const Trace& trace);

// One line per step, "node label link weight", then
// "delivered|dropped|loop total=X crankback=Y".
std::string format_trace(const Trace& trace);

}  // namespace detour
