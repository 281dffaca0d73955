#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "detour/graph.hpp"

namespace detour {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class NetworkKind { kErdosRenyi, kLattice, kWaxman };

std::string to_string(NetworkKind kind);
NetworkKind parse_network_kind(const std::string& text);

inline constexpr int kDefaultRetryBudget = 10000;

// Link weights are drawn on a dyadic grid of 2^-32 so that every path sum
// in a generated topology is exact in binary64.
inline constexpr double kWeightQuantum = 1.0 / 4294967296.0;

using Rng = std::mt19937_64;

// Uniform weight in the open interval (0, 1).
double draw_unit_weight(Rng& rng);
// Rounds a positive real to the weight grid, never to zero.
double quantize_weight(double w);

// Erdos-Renyi G(n, p) with p = 2 ln(n) / n, rejection-sampled until
// two-connected.
Topology generate_erdos_renyi(int n, std::uint64_t seed, int retry_budget = kDefaultRetryBudget);
double erdos_renyi_link_probability(int n);

// sqrt(n) x sqrt(n) grid with horizontal and vertical links only.
Topology generate_lattice(int n, std::uint64_t seed);

// Waxman graph in the unit square: a pair at distance d is linked with
// probability 0.5 * exp(-d / (0.5 * a)), a being the largest pairwise distance.
// Link weight is the Euclidean distance. Rejection-sampled until two-connected.
Topology generate_waxman(int n, std::uint64_t seed, int retry_budget = kDefaultRetryBudget);
double waxman_link_probability(double distance, double max_distance);

// One unconditioned Waxman draw; exposes node positions for acceptance tests.
struct WaxmanSample {
  std::vector<double> x, y;
  double max_distance = 0.0;
  Topology topology;
};
WaxmanSample sample_waxman(int n, Rng& rng);

Topology generate(NetworkKind kind, int n, std::uint64_t seed, int retry_budget = kDefaultRetryBudget);

}  // namespace detour
