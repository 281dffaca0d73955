#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "detour/forwarding.hpp"
#include "detour/generators.hpp"
#include "detour/graph.hpp"

namespace detour {

// Entry counts and path ratios of one matrix on one topology, or the mean of
// several such rows.
struct MetricsRow {
  std::string network;
  MatrixMode variant = MatrixMode::kShortestOnly;
  int size = 0;

  double flow_entries = 0.0;
  double base_entries = 0.0;        // |N|(|N|-1)
  double additional_entries = 0.0;  // flow_entries - base_entries
  double group_fwd_entries = 0.0;
  double distinct_groups = 0.0;

  double primary_ratio = 0.0;
  double backup_avg = 0.0;
  double backup_min = 0.0;
  double backup_max = 0.0;
  double crankback_avg = 0.0;
  double crankback_max = 0.0;

  // (failure, pair) cases left out of the ratios because the packet was not
  // delivered, and traces that hit a forwarding loop.
  double undelivered = 0.0;
  double loops = 0.0;
};

// Link failures for link-protecting variants, intermediate node failures
// for node-protecting ones.
bool protects_nodes(MatrixMode mode);

// Ratios of one ordered pair, relative to `shortest`. Backup and crankback
// fields are NaN when no failure case was delivered; primary is NaN when
// the failure-free packet was not delivered.
struct PairRatios {
  double primary = 0.0;
  double backup_avg = 0.0;
  double backup_min = 0.0;
  double backup_max = 0.0;
  double crankback_avg = 0.0;
  double crankback_max = 0.0;
  int undelivered = 0;
  int loops = 0;
};

PairRatios pair_ratios(const ForwardingMatrix& fw, const Topology& t, NodeId s, NodeId d, double shortest);

// Simulates every ordered pair without failure and under every failure of
// an element on its primary path. Ratios are relative to the shortest path
// weight; per-pair mean, min and max are averaged over pairs.
MetricsRow measure(const ForwardingMatrix& fw, const Topology& t);

// kShortestOnly, the three protection schemes, or the two disjoint
// baselines. `optimized` applies to the protection schemes.
ForwardingMatrix build_matrix(const Topology& t, MatrixMode mode, bool optimized = true);

struct ExperimentConfig {
  std::vector<NetworkKind> kinds{NetworkKind::kErdosRenyi};
  std::vector<int> sizes{9, 16, 25, 36};
  int runs = 100;
  std::uint64_t seed = 1;
  int threads = 1;
  bool optimize = true;
  bool unit_weights = false;
  int retry_budget = kDefaultRetryBudget;
  std::vector<MatrixMode> variants{MatrixMode::kPerLink, MatrixMode::kPerNode, MatrixMode::kHybrid,
                                   MatrixMode::kDisjointLink, MatrixMode::kDisjointNode};
};

ExperimentConfig desk_preset();
ExperimentConfig full_preset();

// key=value lines ('#' comments). Keys: preset, kinds, sizes, runs, seed,
// threads, optimize, unit_weights, retry_budget, variants. Lists are comma
// separated. Later keys override earlier ones.
ExperimentConfig parse_config(std::istream& in);
void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value);

// Seed of one run, derived from the experiment seed and the run coordinates.
std::uint64_t run_seed(std::uint64_t seed, NetworkKind kind, int size, int run);

struct ExperimentReport {
  std::vector<MetricsRow> runs;        // one per (kind, size, run, variant)
  std::vector<MetricsRow> aggregates;  // means per (kind, size, variant)
  std::vector<std::string> notes;      // skipped runs
  std::map<MatrixMode, double> seconds;  // computation wall-clock per variant
};

ExperimentReport run_experiment(const ExperimentConfig& config);

std::string csv_header();
std::string to_csv(const std::vector<MetricsRow>& rows);
std::string to_json(const ExperimentReport& report);

}  // namespace detour
