#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "detour/dataplane.hpp"
#include "detour/eval.hpp"
#include "detour/generators.hpp"
#include "detour/topology_io.hpp"

using namespace detour;

namespace {

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Failure-disjoint forwarding rules: compute, simulate, evaluate"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "Generate a two-connected random topology");
  std::string kind = "erdos-renyi";
  int n = 25;
  std::uint64_t seed = 1;
  int retries = kDefaultRetryBudget;
  std::string gen_out;
  gen->add_option("-k,--kind", kind, "erdos-renyi | lattice | waxman")->capture_default_str();
  gen->add_option("-n,--nodes", n, "Node count")->capture_default_str();
  gen->add_option("-s,--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--retries", retries, "Rejection sampling budget")->capture_default_str();
  gen->add_option("-o,--out", gen_out, "Output file (default stdout)");

  auto* compute = app.add_subcommand("compute", "Compute a forwarding matrix for a topology");
  std::string topo_path;
  std::string variant = "per-link";
  bool no_optimize = false;
  bool unit_weights = false;
  std::string format = "json";
  std::string compute_out;
  compute->add_option("topology", topo_path, "Edge-list file")->required();
  compute->add_option("-v,--variant", variant,
                      "shortest | per-link | per-node | hybrid | disjoint-link | disjoint-node")
      ->capture_default_str();
  compute->add_flag("--no-optimize", no_optimize, "Keep the unoptimized rule set");
  compute->add_flag("--unit-weights", unit_weights, "Treat every link as weight 1 (hop count)");
  compute->add_option("-f,--format", format, "json | text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  compute->add_option("-o,--out", compute_out, "Output file (default stdout)");

  auto* sim = app.add_subcommand("simulate", "Forward one packet under a failure and print its trace");
  std::string matrix_path;
  std::string scenario_text = "none";
  NodeId src = 0;
  NodeId dst = 0;
  sim->add_option("topology", topo_path, "Edge-list file")->required();
  sim->add_option("-m,--matrix", matrix_path, "JSON matrix from `compute` (otherwise computed with --variant)");
  sim->add_option("-v,--variant", variant, "Variant used when no matrix is given")->capture_default_str();
  sim->add_flag("--no-optimize", no_optimize, "Keep the unoptimized rule set");
  sim->add_flag("--unit-weights", unit_weights, "Treat every link as weight 1");
  sim->add_option("--scenario", scenario_text, "none | link:u-v | node:v")->capture_default_str();
  sim->add_option("--src", src, "Source node")->required();
  sim->add_option("--dst", dst, "Destination node")->required();

  auto* eval = app.add_subcommand("evaluate", "Run the generator/metrics experiment and emit CSV");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string csv_out;
  std::string json_out;
  bool per_run = false;
  eval->add_option("-c,--config", config_path, "key=value configuration file");
  eval->add_option("--set", overrides, "Extra key=value settings applied after the file (repeatable)");
  eval->add_option("--preset", [&](const CLI::results_t& r) { overrides.insert(overrides.begin(), "preset=" + r[0]); return true; },
                   "desk | full");
  eval->add_option("--kinds", [&](const CLI::results_t& r) { overrides.push_back("kinds=" + r[0]); return true; },
                   "Comma separated generator kinds");
  eval->add_option("--sizes", [&](const CLI::results_t& r) { overrides.push_back("sizes=" + r[0]); return true; },
                   "Comma separated node counts");
  eval->add_option("--runs", [&](const CLI::results_t& r) { overrides.push_back("runs=" + r[0]); return true; },
                   "Runs per size");
  eval->add_option("--seed", [&](const CLI::results_t& r) { overrides.push_back("seed=" + r[0]); return true; },
                   "Experiment seed");
  eval->add_option("--threads", [&](const CLI::results_t& r) { overrides.push_back("threads=" + r[0]); return true; },
                   "Parallel runs (0: all cores)");
  eval->add_option("--variants", [&](const CLI::results_t& r) { overrides.push_back("variants=" + r[0]); return true; },
                   "Comma separated variants");
  eval->add_flag_callback("--no-optimize", [&] { overrides.push_back("optimize=false"); }, "Skip rule optimization");
  eval->add_flag_callback("--unit-weights", [&] { overrides.push_back("unit_weights=true"); }, "Hop-count weights");
  eval->add_flag("--per-run", per_run, "CSV rows per run instead of per size");
  eval->add_option("-o,--out", csv_out, "CSV output file (default stdout)");
  eval->add_option("--json", json_out, "Also write a JSON report with base/additional entries and timings");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      std::ostringstream s;
      write_topology(s, generate(parse_network_kind(kind), n, seed, retries));
      write_output(gen_out, s.str());
    } else if (compute->parsed()) {
      Topology t = load_topology(topo_path);
      if (unit_weights) t = t.with_unit_weights();
      const auto fw = build_matrix(t, parse_matrix_mode(variant), !no_optimize);
      write_output(compute_out, format == "json" ? matrix_to_json(fw, t) : matrix_to_text(fw, t));
      for (const auto& u : fw.uncovered()) {
        std::cerr << "uncovered: node " << u.node << " label " << to_string(u.label) << " dst " << u.dst;
        if (u.src != kNoNode) std::cerr << " src " << u.src;
        std::cerr << '\n';
      }
    } else if (sim->parsed()) {
      Topology t = load_topology(topo_path);
      if (unit_weights) t = t.with_unit_weights();
      if (!t.has_node(src) || !t.has_node(dst)) throw std::invalid_argument("unknown source or destination");
      const auto fw = matrix_path.empty() ? build_matrix(t, parse_matrix_mode(variant), !no_optimize)
                                          : matrix_from_json(read_file(matrix_path), t);
      const auto trace = simulate(fw, t, parse_scenario(t, scenario_text), src, dst);
      std::cout << format_trace(trace);
      return trace.delivered() ? 0 : 2;
    } else if (eval->parsed()) {
      ExperimentConfig config;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::runtime_error("cannot read " + config_path);
        config = parse_config(in);
      }
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key=value, got '" + kv + "'");
        apply_config_value(config, kv.substr(0, eq), kv.substr(eq + 1));
      }
      const auto report = run_experiment(config);
      for (const auto& note : report.notes) std::cerr << note << '\n';
      write_output(csv_out, to_csv(per_run ? report.runs : report.aggregates));
      if (!json_out.empty()) write_output(json_out, to_json(report));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
