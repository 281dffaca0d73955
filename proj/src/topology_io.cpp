#include "detour/topology_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace detour {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw TopologyError("line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

Topology parse_topology(std::istream& in) {
  std::string raw;
  int line_no = 0;
  std::optional<Topology> topology;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (!topology) {
      NodeId count = 0;
      if (fields.size() != 1 || !parse_number(fields[0], count) || count < 0) {
        fail(line_no, "expected node count");
      }
      topology.emplace(count);
      continue;
    }
    NodeId u = 0, v = 0;
    double w = 0.0;
    if (fields.size() != 3 || !parse_number(fields[0], u) || !parse_number(fields[1], v) ||
        !parse_number(fields[2], w)) {
      fail(line_no, "expected 'u v weight'");
    }
    try {
      topology->add_link(u, v, w);
    } catch (const TopologyError& e) {
      fail(line_no, e.what());
    }
  }
  if (!topology) throw TopologyError("empty topology file");
  return std::move(*topology);
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open " + path);
  return parse_topology(in);
}

void write_topology(std::ostream& out, const Topology& t) {
  out << t.node_count() << '\n';
  for (const auto& l : t.links()) out << l.u << ' ' << l.v << ' ' << format_weight(l.weight) << '\n';
}

void save_topology(const Topology& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw TopologyError("cannot write " + path);
  write_topology(out, t);
}

}  // namespace detour
