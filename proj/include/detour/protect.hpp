#pragma once

#include "detour/forwarding.hpp"
#include "detour/graph.hpp"

namespace detour {

// Primary rules follow the tie-broken all-to-all shortest paths. For every
// node n and incident link l toward v, each destination whose primary path
// leaves n over l gets a fast-failover group at n: output on l while it is
// live, otherwise push LinkFail(n, v) and follow n's shortest path in the
// topology without l. Nodes along that detour match the label; the first
// one whose own primary path avoids l pops it.
//
// Costs |N| + 2|L| one-to-many shortest path runs (see ForwardingMatrix::stats).
ForwardingMatrix per_link_rules(const Topology& t);

// As per_link_rules, but the detour avoids the whole opposite node v and the
// label is NodeFail(v). Destination v itself cannot be protected.
ForwardingMatrix per_node_rules(const Topology& t);

// Link-failure detours first; a detour node that would forward a
// LinkFail(*, v) packet into v over a dead link rewrites the label to
// NodeFail(v) and continues on the node-failure detour. Both rule families
// share one matrix.
ForwardingMatrix hybrid_rules(const Topology& t);

// Removes labeled rules no packet can reach (everything strictly downstream
// of a pop point included), then folds LinkFail(u, v) rules that act exactly
// like the NodeFail(v) rule at the same node and destination into one {*,v}
// wildcard rule. Forwarding behavior is unchanged; rule count never grows.
ForwardingMatrix optimize(const ForwardingMatrix& fw, const Topology& t);

}  // namespace detour
