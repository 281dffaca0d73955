#include "detour/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "detour/baseline.hpp"
#include "detour/dataplane.hpp"
#include "detour/protect.hpp"
#include "detour/spf.hpp"

namespace detour {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Mean {
  double sum = 0.0;
  std::size_t count = 0;

  void add(double v) {
    if (std::isnan(v)) return;
    sum += v;
    ++count;
  }
  double value() const { return count ? sum / static_cast<double>(count) : kNaN; }
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

}  // namespace

bool protects_nodes(MatrixMode mode) {
  return mode == MatrixMode::kPerNode || mode == MatrixMode::kHybrid || mode == MatrixMode::kDisjointNode;
}

PairRatios pair_ratios(const ForwardingMatrix& fw, const Topology& t, NodeId s, NodeId d, double shortest) {
  PairRatios r;
  r.primary = r.backup_avg = r.backup_min = r.backup_max = r.crankback_avg = r.crankback_max = kNaN;
  const Trace base = simulate(fw, t, FailureScenario::none(), s, d);
  if (base.status == TraceStatus::kLoop) ++r.loops;
  if (!base.delivered() || shortest <= 0.0) {
    ++r.undelivered;
    return r;
  }
  r.primary = base.total_weight / shortest;

  std::vector<FailureScenario> failures;
  if (protects_nodes(fw.mode())) {
    const auto path = base.nodes();
    for (size_t i = 1; i + 1 < path.size(); ++i) failures.push_back(FailureScenario::node_down(path[i]));
  } else {
    for (const auto& step : base.steps) {
      if (step.link != kNoLink) failures.push_back(FailureScenario::link_down(step.link));
    }
  }
  Mean backup, crank;
  for (const auto& f : failures) {
    const Trace tr = simulate(fw, t, f, s, d);
    if (tr.status == TraceStatus::kLoop) ++r.loops;
    if (!tr.delivered()) {
      ++r.undelivered;
      continue;
    }
    const double ratio = tr.total_weight / shortest;
    const double cb = tr.crankback_weight / shortest;
    backup.add(ratio);
    crank.add(cb);
    r.backup_min = std::isnan(r.backup_min) ? ratio : std::min(r.backup_min, ratio);
    r.backup_max = std::isnan(r.backup_max) ? ratio : std::max(r.backup_max, ratio);
    r.crankback_max = std::isnan(r.crankback_max) ? cb : std::max(r.crankback_max, cb);
  }
  r.backup_avg = backup.value();
  r.crankback_avg = crank.value();
  return r;
}

MetricsRow measure(const ForwardingMatrix& fw, const Topology& t) {
  const AllToAll spf(t);
  const NodeId n = t.node_count();

  MetricsRow row;
  row.variant = fw.mode();
  row.size = n;
  row.flow_entries = static_cast<double>(fw.rule_count());
  row.base_entries = static_cast<double>(n) * static_cast<double>(n - 1);
  row.additional_entries = row.flow_entries - row.base_entries;
  row.group_fwd_entries = static_cast<double>(fw.group_rule_count());
  row.distinct_groups = static_cast<double>(fw.groups().size());

  Mean primary, backup_avg, backup_min, backup_max, crank_avg, crank_max;
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s == d) continue;
      const auto r = pair_ratios(fw, t, s, d, spf.dist(s, d));
      row.undelivered += r.undelivered;
      row.loops += r.loops;
      primary.add(r.primary);
      backup_avg.add(r.backup_avg);
      backup_min.add(r.backup_min);
      backup_max.add(r.backup_max);
      crank_avg.add(r.crankback_avg);
      crank_max.add(r.crankback_max);
    }
  }
  row.primary_ratio = primary.value();
  row.backup_avg = backup_avg.value();
  row.backup_min = backup_min.value();
  row.backup_max = backup_max.value();
  row.crankback_avg = crank_avg.value();
  row.crankback_max = crank_max.value();
  return row;
}

ForwardingMatrix build_matrix(const Topology& t, MatrixMode mode, bool optimized) {
  switch (mode) {
    case MatrixMode::kShortestOnly:
      return shortest_path_rules(t);
    case MatrixMode::kPerLink:
      return optimized ? optimize(per_link_rules(t), t) : per_link_rules(t);
    case MatrixMode::kPerNode:
      return optimized ? optimize(per_node_rules(t), t) : per_node_rules(t);
    case MatrixMode::kHybrid:
      return optimized ? optimize(hybrid_rules(t), t) : hybrid_rules(t);
    case MatrixMode::kDisjointLink:
      return disjoint_rules(t, Disjointness::kLink);
    case MatrixMode::kDisjointNode:
      return disjoint_rules(t, Disjointness::kNode);
  }
  throw std::invalid_argument("unknown matrix mode");
}

ExperimentConfig desk_preset() { return ExperimentConfig{}; }

ExperimentConfig full_preset() {
  ExperimentConfig c;
  c.sizes = {9, 16, 25, 36, 49, 64, 81, 100};
  c.runs = 1000;
  return c;
}

void apply_config_value(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "preset") {
    if (value == "desk") {
      config = desk_preset();
    } else if (value == "full") {
      config = full_preset();
    } else {
      throw std::invalid_argument("unknown preset '" + value + "'");
    }
  } else if (key == "kinds" || key == "kind") {
    config.kinds.clear();
    for (const auto& k : split_list(value)) config.kinds.push_back(parse_network_kind(k));
  } else if (key == "sizes") {
    config.sizes.clear();
    for (const auto& s : split_list(value)) config.sizes.push_back(std::stoi(s));
  } else if (key == "runs") {
    config.runs = std::stoi(value);
  } else if (key == "seed") {
    config.seed = std::stoull(value);
  } else if (key == "threads") {
    config.threads = std::stoi(value);
  } else if (key == "optimize") {
    config.optimize = parse_bool(value);
  } else if (key == "unit_weights") {
    config.unit_weights = parse_bool(value);
  } else if (key == "retry_budget") {
    config.retry_budget = std::stoi(value);
  } else if (key == "variants") {
    config.variants.clear();
    for (const auto& v : split_list(value)) config.variants.push_back(parse_matrix_mode(v));
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(number) + ": expected key=value");
    try {
      apply_config_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
    }
  }
  return config;
}

std::uint64_t run_seed(std::uint64_t seed, NetworkKind kind, int size, int run) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(kind), static_cast<std::uint32_t>(size),
                    static_cast<std::uint32_t>(run)};
  Rng rng(seq);
  return rng();
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  struct Job {
    NetworkKind kind;
    int size;
    int run;
  };
  struct Outcome {
    std::vector<MetricsRow> rows;
    std::string note;
    std::map<MatrixMode, double> seconds;
  };
  std::vector<Job> jobs;
  for (auto kind : config.kinds) {
    for (int size : config.sizes) {
      for (int run = 0; run < config.runs; ++run) jobs.push_back({kind, size, run});
    }
  }
  std::vector<Outcome> outcomes(jobs.size());

  auto execute = [&](const Job& job, Outcome& out) {
    const auto seed = run_seed(config.seed, job.kind, job.size, job.run);
    Topology t;
    try {
      t = generate(job.kind, job.size, seed, config.retry_budget);
    } catch (const std::exception& e) {
      out.note = to_string(job.kind) + " size " + std::to_string(job.size) + " run " + std::to_string(job.run) +
                 " skipped: " + e.what();
      return;
    }
    if (config.unit_weights) t = t.with_unit_weights();
    for (auto mode : config.variants) {
      const auto start = std::chrono::steady_clock::now();
      const auto fw = build_matrix(t, mode, config.optimize);
      out.seconds[mode] += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      auto row = measure(fw, t);
      row.network = to_string(job.kind);
      out.rows.push_back(std::move(row));
    }
  };

  const int threads = std::max(1, config.threads > 0 ? config.threads
                                                     : static_cast<int>(std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        execute(jobs[i], outcomes[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  ExperimentReport report;
  std::map<std::tuple<NetworkKind, int, MatrixMode>, std::vector<const MetricsRow*>> groups;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto& out = outcomes[i];
    if (!out.note.empty()) report.notes.push_back(out.note);
    for (const auto& [mode, s] : out.seconds) report.seconds[mode] += s;
    for (auto& row : out.rows) report.runs.push_back(row);
  }
  for (const auto& row : report.runs) {
    groups[{parse_network_kind(row.network), row.size, row.variant}].push_back(&row);
  }
  for (auto kind : config.kinds) {
    for (int size : config.sizes) {
      for (auto mode : config.variants) {
        auto it = groups.find({kind, size, mode});
        if (it == groups.end()) continue;
        Mean f[13];
        for (const auto* r : it->second) {
          const double values[13] = {r->flow_entries,  r->base_entries,   r->additional_entries, r->group_fwd_entries,
                                     r->distinct_groups, r->primary_ratio, r->backup_avg,         r->backup_min,
                                     r->backup_max,     r->crankback_avg,  r->crankback_max,      r->undelivered,
                                     r->loops};
          for (int k = 0; k < 13; ++k) f[k].add(values[k]);
        }
        MetricsRow agg;
        agg.network = to_string(kind);
        agg.variant = mode;
        agg.size = size;
        agg.flow_entries = f[0].value();
        agg.base_entries = f[1].value();
        agg.additional_entries = f[2].value();
        agg.group_fwd_entries = f[3].value();
        agg.distinct_groups = f[4].value();
        agg.primary_ratio = f[5].value();
        agg.backup_avg = f[6].value();
        agg.backup_min = f[7].value();
        agg.backup_max = f[8].value();
        agg.crankback_avg = f[9].value();
        agg.crankback_max = f[10].value();
        agg.undelivered = f[11].value();
        agg.loops = f[12].value();
        report.aggregates.push_back(agg);
      }
    }
  }
  return report;
}

std::string csv_header() {
  return "network,variant,size,flow_entries,group_fwd_entries,distinct_groups,primary_ratio,backup_avg,backup_min,"
         "backup_max,crankback_avg,crankback_max";
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = csv_header() + "\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%.3f,%.3f,%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.network.c_str(),
                  to_string(r.variant).c_str(), r.size, r.flow_entries, r.group_fwd_entries, r.distinct_groups,
                  r.primary_ratio, r.backup_avg, r.backup_min, r.backup_max, r.crankback_avg, r.crankback_max);
    out += buf;
  }
  return out;
}

std::string to_json(const ExperimentReport& report) {
  using nlohmann::ordered_json;
  auto number = [](double v) { return std::isnan(v) ? ordered_json(nullptr) : ordered_json(v); };
  auto row_json = [&](const MetricsRow& r) {
    ordered_json j;
    j["network"] = r.network;
    j["variant"] = to_string(r.variant);
    j["size"] = r.size;
    j["flow_entries"] = number(r.flow_entries);
    j["base_entries"] = number(r.base_entries);
    j["additional_entries"] = number(r.additional_entries);
    j["group_fwd_entries"] = number(r.group_fwd_entries);
    j["distinct_groups"] = number(r.distinct_groups);
    j["primary_ratio"] = number(r.primary_ratio);
    j["backup_avg"] = number(r.backup_avg);
    j["backup_min"] = number(r.backup_min);
    j["backup_max"] = number(r.backup_max);
    j["crankback_avg"] = number(r.crankback_avg);
    j["crankback_max"] = number(r.crankback_max);
    j["undelivered"] = number(r.undelivered);
    j["loops"] = number(r.loops);
    return j;
  };
  ordered_json root;
  root["aggregates"] = ordered_json::array();
  for (const auto& r : report.aggregates) root["aggregates"].push_back(row_json(r));
  root["runs"] = ordered_json::array();
  for (const auto& r : report.runs) root["runs"].push_back(row_json(r));
  root["notes"] = report.notes;
  root["seconds"] = ordered_json::object();
  for (const auto& [mode, s] : report.seconds) root["seconds"][to_string(mode)] = s;
  return root.dump(2) + "\n";
}

}  // namespace detour
