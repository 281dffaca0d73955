#pragma once

#include <iosfwd>
#include <string>

#include "detour/graph.hpp"

namespace detour {

// Edge-list text format:
//
//   <node count>
//   <u> <v> <weight>     one undirected link per line, listed once
//
// '#' starts a comment; blank lines are ignored. Errors carry the 1-based
// line number.
Topology parse_topology(std::istream& in);
Topology load_topology(const std::string& path);

// Weights are written in shortest round-trip form, so load(save(t)) == t.
void write_topology(std::ostream& out, const Topology& t);
void save_topology(const Topology& t, const std::string& path);

}  // namespace detour
