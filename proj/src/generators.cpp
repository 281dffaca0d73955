#include "detour/generators.hpp"

#include <cmath>

namespace detour {

std::string to_string(NetworkKind kind) {
  switch (kind) {
    case NetworkKind::kErdosRenyi:
      return "erdos-renyi";
    case NetworkKind::kLattice:
      return "lattice";
    case NetworkKind::kWaxman:
      return "waxman";
  }
  return "?";
}

NetworkKind parse_network_kind(const std::string& text) {
  if (text == "er" || text == "erdos-renyi") return NetworkKind::kErdosRenyi;
  if (text == "lattice") return NetworkKind::kLattice;
  if (text == "waxman") return NetworkKind::kWaxman;
  throw std::invalid_argument("unknown network kind '" + text + "'");
}

double draw_unit_weight(Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> grid(1, (std::uint64_t{1} << 32) - 1);
  return static_cast<double>(grid(rng)) * kWeightQuantum;
}

double quantize_weight(double w) {
  double steps = std::round(w / kWeightQuantum);
  if (steps < 1.0) steps = 1.0;
  return steps * kWeightQuantum;
}

double erdos_renyi_link_probability(int n) { return 2.0 * std::log(static_cast<double>(n)) / n; }

Topology generate_erdos_renyi(int n, std::uint64_t seed, int retry_budget) {
  if (n < 3) throw std::invalid_argument("erdos-renyi needs n >= 3");
  Rng rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  const double p = erdos_renyi_link_probability(n);
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    Topology t(n);
    for (NodeId u = 0; u < n; ++u) {
      for (NodeId v = u + 1; v < n; ++v) {
        if (coin(rng) < p) t.add_link(u, v, draw_unit_weight(rng));
      }
    }
    if (is_two_connected(t)) return t;
  }
  throw GenerationError("no two-connected erdos-renyi graph after " + std::to_string(retry_budget) +
                        " attempts (n=" + std::to_string(n) + ")");
}

Topology generate_lattice(int n, std::uint64_t seed) {
  const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (n < 9 || side * side != n) {
    throw std::invalid_argument("lattice size must be a perfect square >= 9, got " + std::to_string(n));
  }
  Rng rng(seed);
  Topology t(n);
  for (int r = 0; r < side; ++r) {
    for (int c = 0; c < side; ++c) {
      const NodeId id = r * side + c;
      if (c + 1 < side) t.add_link(id, id + 1, draw_unit_weight(rng));
      if (r + 1 < side) t.add_link(id, id + side, draw_unit_weight(rng));
    }
  }
  return t;
}

double waxman_link_probability(double distance, double max_distance) {
  constexpr double kAlpha = 0.5;
  constexpr double kBeta = 0.5;
  if (max_distance <= 0.0) return kAlpha;
  return kAlpha * std::exp(-distance / (kBeta * max_distance));
}

WaxmanSample sample_waxman(int n, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WaxmanSample s;
  s.x.resize(static_cast<size_t>(n));
  s.y.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    s.x[static_cast<size_t>(i)] = unit(rng);
    s.y[static_cast<size_t>(i)] = unit(rng);
  }
  auto dist = [&](int a, int b) {
    return std::hypot(s.x[static_cast<size_t>(a)] - s.x[static_cast<size_t>(b)],
                      s.y[static_cast<size_t>(a)] - s.y[static_cast<size_t>(b)]);
  };
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) s.max_distance = std::max(s.max_distance, dist(a, b));
  }
  s.topology = Topology(n);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b = a + 1; b < n; ++b) {
      const double d = dist(a, b);
      if (unit(rng) < waxman_link_probability(d, s.max_distance)) {
        s.topology.add_link(a, b, quantize_weight(d));
      }
    }
  }
  return s;
}

Topology generate_waxman(int n, std::uint64_t seed, int retry_budget) {
  if (n < 3) throw std::invalid_argument("waxman needs n >= 3");
  Rng rng(seed);
  for (int attempt = 0; attempt < retry_budget; ++attempt) {
    auto sample = sample_waxman(n, rng);
    if (is_two_connected(sample.topology)) return std::move(sample.topology);
  }
  throw GenerationError("no two-connected waxman graph after " + std::to_string(retry_budget) +
                        " attempts (n=" + std::to_string(n) + ")");
}

Topology generate(NetworkKind kind, int n, std::uint64_t seed, int retry_budget) {
  switch (kind) {
    case NetworkKind::kErdosRenyi:
      return generate_erdos_renyi(n, seed, retry_budget);
    case NetworkKind::kLattice:
      return generate_lattice(n, seed);
    case NetworkKind::kWaxman:
      return generate_waxman(n, seed, retry_budget);
  }
  throw std::invalid_argument("unknown network kind");
}

}  // namespace detour
