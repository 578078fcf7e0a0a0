// Command-line front end: validate scenario files, run demand traces under
// the placement strategies, and sweep the heuristic's replication count.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rsucrm/charts.hpp"
#include "rsucrm/errors.hpp"
#include "rsucrm/harness.hpp"
#include "rsucrm/scenario.hpp"

namespace {

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t pos = csv.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(csv.substr(start));
      break;
    }
    out.push_back(csv.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// "--seeds 8" means eight consecutive seeds starting at the scenario's seed;
// "--seeds 7,11,40" means exactly those seeds.
std::vector<std::uint64_t> resolve_seeds(const std::string& arg,
                                         std::uint64_t scenario_seed) {
  std::vector<std::uint64_t> seeds;
  if (arg.find(',') == std::string::npos) {
    const std::uint64_t count = std::stoull(arg);
    if (count < 1) throw std::invalid_argument("--seeds: count below 1");
    for (std::uint64_t i = 0; i < count; ++i) seeds.push_back(scenario_seed + i);
    return seeds;
  }
  for (const std::string& tok : split_list(arg)) seeds.push_back(std::stoull(tok));
  return seeds;
}

rsucrm::SelectionPolicy make_policy(const std::string& mode, double rho,
                                    double omega) {
  rsucrm::SelectionPolicy policy;
  if (mode == "lex") {
    policy.mode = rsucrm::SelectionPolicy::Mode::lexicographic;
  } else if (mode == "weighted") {
    policy.mode = rsucrm::SelectionPolicy::Mode::weighted;
  } else {
    throw std::invalid_argument("--policy: expected lex or weighted");
  }
  policy.rho = rho;
  policy.omega = omega;
  return policy;
}

int write_outputs(const std::vector<rsucrm::MetricsRow>& rows,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  rsucrm::emit_csv(rows, (fs::path(out_dir) / "metrics.csv").string());
  const rsucrm::ComparisonSummary summary = rsucrm::compare_methods(rows);
  const std::string text = rsucrm::format_summary(summary);
  {
    std::ofstream sout(fs::path(out_dir) / "summary.txt", std::ios::binary);
    sout << text;
  }
  rsucrm::emit_charts(rows, fs::path(out_dir) / "charts");
  std::cout << text;
  int infeasible = 0;
  for (const auto& r : rows) infeasible += r.infeasible ? 1 : 0;
  if (infeasible > 0) {
    std::cerr << infeasible << " row(s) were infeasible\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planner and trace simulator for RSU cloud service placement"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string methods_arg = "heuristic,exact,purist";
  int k = 100;
  std::string seeds_arg = "1";
  double omega = 0.5;
  std::string policy_arg = "lex";
  double rho = 0.5;
  std::string out_dir = "out";
  bool no_timing = false;
  std::string k_values_arg = "1,10,100";

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("--scenario", scenario_path, "scenario JSON file")
      ->required();

  CLI::App* run = app.add_subcommand("run", "run the demand trace");
  run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--methods", methods_arg, "comma list: heuristic,exact,purist");
  run->add_option("--k", k, "heuristic replications per frontier level");
  run->add_option("--seeds", seeds_arg, "seed count, or comma list of seeds");
  run->add_option("--omega", omega, "first-step objective weight in [0,1]");
  run->add_option("--policy", policy_arg, "selection policy: lex or weighted");
  run->add_option("--rho", rho, "weighted policy: migration weight in [0,1]");
  run->add_option("--out", out_dir, "output directory");
  run->add_flag("--no-timing", no_timing,
                "write wall_time_s as 0 for byte-stable output");

  CLI::App* sweep = app.add_subcommand(
      "sweep-k", "run the heuristic at several replication counts");
  sweep->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--values", k_values_arg, "comma list of K values");
  sweep->add_option("--seeds", seeds_arg, "seed count, or comma list of seeds");
  sweep->add_option("--omega", omega, "first-step objective weight in [0,1]");
  sweep->add_option("--policy", policy_arg, "selection policy: lex or weighted");
  sweep->add_option("--rho", rho, "weighted policy: migration weight in [0,1]");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_flag("--no-timing", no_timing,
                  "write wall_time_s as 0 for byte-stable output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const rsucrm::Scenario sc = rsucrm::load_scenario(scenario_path);
      std::cout << "scenario OK: " << sc.graph.node_count() << " nodes, "
                << sc.graph.edge_count() << " edges, " << sc.services.size()
                << " service(s), " << sc.trace.steps_mbps.size()
                << " trace steps\n";
      return 0;
    }

    rsucrm::RunSpec spec;
    spec.scenario = rsucrm::load_scenario(scenario_path);
    spec.seeds = resolve_seeds(seeds_arg, spec.scenario.seed);
    spec.policy = make_policy(policy_arg, rho, omega);
    spec.record_timing = !no_timing;

    if (run->parsed()) {
      for (const std::string& name : split_list(methods_arg)) {
        spec.methods.push_back(rsucrm::parse_method(name, k));
      }
    } else {
      for (const std::string& tok : split_list(k_values_arg)) {
        const int kv = std::stoi(tok);
        rsucrm::MethodSpec m = rsucrm::parse_method("heuristic", kv);
        m.label = "heuristic-k" + std::to_string(kv);
        spec.methods.push_back(m);
      }
    }

    const std::vector<rsucrm::MetricsRow> rows = rsucrm::run_trace(spec);
    return write_outputs(rows, out_dir);
  } catch (const rsucrm::InfeasibleError& ex) {
    std::cerr << "infeasible: " << ex.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << '\n';
    return 3;
  }
}
