#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rsucrm/configuration.hpp"
#include "rsucrm/planner.hpp"
#include "rsucrm/scenario.hpp"

namespace rsucrm {

// One measurement: a method's selected deployment at one trace step under one
// seed. `infeasible` marks steps the method could not solve; such rows keep
// zeroed metrics and the run continues.
struct MetricsRow {
  std::uint64_t seed{0};
  int step{0};
  std::string method;
  double demand_mbps{0};
  std::int64_t vm_migrations_added{0};
  std::int64_t vm_migrations_removed{0};
  std::int64_t control_plane_ops{0};
  std::int64_t host_count{0};
  double total_infrastructure_delay_s{0};
  double mean_unit_delay_s{0};
  double max_edge_utilization{0};
  double wall_time_s{0};
  bool infeasible{false};

  friend bool operator==(const MetricsRow&, const MetricsRow&) = default;
};

struct MethodSpec {
  enum class Kind { heuristic, exact, purist };
  Kind kind{Kind::heuristic};
  std::string label;
  int k{100};  // heuristic replications; ignored by the other kinds
};

inline MethodSpec parse_method(const std::string& name, int k) {
  if (name == "heuristic") return {MethodSpec::Kind::heuristic, name, k};
  if (name == "exact") return {MethodSpec::Kind::exact, name, k};
  if (name == "purist") return {MethodSpec::Kind::purist, name, k};
  throw std::invalid_argument("unknown method '" + name + "'");
}

struct RunSpec {
  Scenario scenario;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds;
  SelectionPolicy policy;
  bool record_timing{true};  // off: wall_time_s written as 0 for byte-stable output

  void validate() const {
    if (methods.empty()) throw std::invalid_argument("run spec: no methods");
    if (seeds.empty()) throw std::invalid_argument("run spec: no seeds");
    for (const auto& m : methods) {
      if (m.k < 1) throw std::invalid_argument("run spec: K below 1");
      if (m.label.find(',') != std::string::npos ||
          m.label.find('\n') != std::string::npos)
        throw std::invalid_argument("run spec: method label unfit for CSV");
    }
  }
};

namespace detail {

inline void fill_config_metrics(const PlannerContext& ctx, const PofEntry& entry,
                                MetricsRow* row) {
  row->host_count = entry.host_count;
  row->total_infrastructure_delay_s = entry.total_delay_s;
  const std::int64_t units = entry.config.assignment.total_units();
  row->mean_unit_delay_s =
      units > 0 ? entry.total_delay_s / static_cast<double>(units) : 0;
  double util = 0;
  const auto& loads = entry.config.assignment.edge_load_units;
  for (std::size_t e = 0; e < loads.size(); ++e) {
    const double u = static_cast<double>(loads[e]) *
                     ctx.scenario.lut_interval_mbps /
                     ctx.scenario.graph.edge(static_cast<int>(e)).capacity_mbps;
    util = std::max(util, u);
  }
  row->max_edge_utilization = util;
}

}  // namespace detail

// Runs the demand trace once per seed and method. Demands are sampled once
// per (seed, step) and shared bit-exactly by all methods; each method carries
// its own previous configuration for the reconfiguration metrics, which are
// zero on the first step (there is nothing to diff against). Rows come back
// sorted by (seed, step, method).
inline std::vector<MetricsRow> run_trace(const RunSpec& spec) {
  spec.validate();
  const PlannerContext ctx = make_context(spec.scenario);
  const int steps = static_cast<int>(ctx.scenario.trace.steps_mbps.size());
  std::vector<MetricsRow> rows;

  for (std::uint64_t seed : spec.seeds) {
    std::map<std::string, std::optional<Configuration>> prev;
    for (const auto& m : spec.methods) prev[m.label] = std::nullopt;

    for (int step = 0; step < steps; ++step) {
      const DemandMatrix demands = sample_demands(ctx.scenario, step, seed);

      for (const auto& m : spec.methods) {
        MetricsRow row;
        row.seed = seed;
        row.step = step;
        row.method = m.label;
        row.demand_mbps =
            ctx.scenario.trace.steps_mbps[static_cast<std::size_t>(step)];

        const auto t0 = std::chrono::steady_clock::now();
        std::optional<Configuration> chosen;
        try {
          const Configuration* p =
              prev[m.label] ? &*prev[m.label] : nullptr;
          switch (m.kind) {
            case MethodSpec::Kind::heuristic: {
              const ParetoFrontier pof = generate_pof(
                  ctx, demands, m.k,
                  derive_seed(seed, {seed_tag::step,
                                     static_cast<std::uint64_t>(step)}));
              if (!pof.empty())
                chosen = select_configuration(ctx, pof, p, spec.policy).config;
              break;
            }
            case MethodSpec::Kind::exact: {
              const ParetoFrontier pof = exact_pof(ctx, demands);
              if (!pof.empty())
                chosen = select_configuration(ctx, pof, p, spec.policy).config;
              break;
            }
            case MethodSpec::Kind::purist:
              chosen = purist_cost(ctx, demands);
              break;
          }
        } catch (const InfeasibleError&) {
          chosen.reset();
        }
        if (spec.record_timing) {
          row.wall_time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                  .count();
        }

        if (!chosen) {
          row.infeasible = true;
        } else {
          chosen->step = step;
          detail::fill_config_metrics(ctx, make_pof_entry(ctx, *chosen), &row);
          if (prev[m.label]) {
            const ReconfigReport rr =
                make_reconfig_report(*prev[m.label], *chosen, spec.policy.rho);
            row.vm_migrations_added = rr.vm_added;
            row.vm_migrations_removed = rr.vm_literal;
            row.control_plane_ops = rr.control_ops;
          }
          prev[m.label] = std::move(chosen);
        }
        rows.push_back(std::move(row));
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
    if (a.seed != b.seed) return a.seed < b.seed;
    if (a.step != b.step) return a.step < b.step;
    return a.method < b.method;
  });
  return rows;
}

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, p);
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "seed,step,method,demand_mbps,vm_migrations_added,vm_migrations_removed,"
    "control_plane_ops,host_count,total_infrastructure_delay_s,"
    "mean_unit_delay_s,max_edge_utilization,wall_time_s,infeasible";

inline std::string format_csv(const std::vector<MetricsRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const MetricsRow& r : rows) {
    out += std::to_string(r.seed);
    out += ',';
    out += std::to_string(r.step);
    out += ',';
    out += r.method;
    out += ',';
    out += detail::format_double(r.demand_mbps);
    out += ',';
    out += std::to_string(r.vm_migrations_added);
    out += ',';
    out += std::to_string(r.vm_migrations_removed);
    out += ',';
    out += std::to_string(r.control_plane_ops);
    out += ',';
    out += std::to_string(r.host_count);
    out += ',';
    out += detail::format_double(r.total_infrastructure_delay_s);
    out += ',';
    out += detail::format_double(r.mean_unit_delay_s);
    out += ',';
    out += detail::format_double(r.max_edge_utilization);
    out += ',';
    out += detail::format_double(r.wall_time_s);
    out += ',';
    out += r.infeasible ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << format_csv(rows);
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::vector<MetricsRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("unexpected CSV header in " + path);

  auto parse_u64 = [](const std::string& s) {
    std::uint64_t v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::runtime_error("bad integer field '" + s + "'");
    return v;
  };
  auto parse_i64 = [](const std::string& s) {
    std::int64_t v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::runtime_error("bad integer field '" + s + "'");
    return v;
  };
  auto parse_f64 = [](const std::string& s) {
    double v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::runtime_error("bad numeric field '" + s + "'");
    return v;
  };

  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        f.push_back(line.substr(start));
        break;
      }
      f.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (f.size() != 13) throw std::runtime_error("bad CSV row: " + line);
    MetricsRow r;
    r.seed = parse_u64(f[0]);
    r.step = static_cast<int>(parse_i64(f[1]));
    r.method = f[2];
    r.demand_mbps = parse_f64(f[3]);
    r.vm_migrations_added = parse_i64(f[4]);
    r.vm_migrations_removed = parse_i64(f[5]);
    r.control_plane_ops = parse_i64(f[6]);
    r.host_count = parse_i64(f[7]);
    r.total_infrastructure_delay_s = parse_f64(f[8]);
    r.mean_unit_delay_s = parse_f64(f[9]);
    r.max_edge_utilization = parse_f64(f[10]);
    r.wall_time_s = parse_f64(f[11]);
    if (f[12] != "0" && f[12] != "1")
      throw std::runtime_error("bad infeasible flag: " + f[12]);
    r.infeasible = f[12] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

// Aggregates per method, plus a verdict per metric naming the method with the
// lowest mean total (sum over a seed's steps, averaged over seeds).
struct MethodSummary {
  std::string method;
  int rows{0};
  int infeasible_rows{0};
  double mean_total_vm_added{0};
  double mean_total_vm_removed{0};
  double mean_total_control_ops{0};
  double mean_host_count{0};
  double mean_total_delay_s{0};
  double mean_unit_delay_s{0};
  double mean_max_utilization{0};
  double total_wall_time_s{0};
};

struct ComparisonSummary {
  std::vector<MethodSummary> methods;
  std::vector<std::string> verdicts;
};

inline ComparisonSummary compare_methods(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("compare_methods: no rows");
  std::vector<std::string> order;
  std::map<std::string, std::map<std::uint64_t, MethodSummary>> per_seed;
  for (const MetricsRow& r : rows) {
    if (!per_seed.count(r.method)) order.push_back(r.method);
    MethodSummary& s = per_seed[r.method][r.seed];
    ++s.rows;
    if (r.infeasible) ++s.infeasible_rows;
    s.mean_total_vm_added += static_cast<double>(r.vm_migrations_added);
    s.mean_total_vm_removed += static_cast<double>(r.vm_migrations_removed);
    s.mean_total_control_ops += static_cast<double>(r.control_plane_ops);
    s.mean_host_count += static_cast<double>(r.host_count);
    s.mean_total_delay_s += r.total_infrastructure_delay_s;
    s.mean_unit_delay_s += r.mean_unit_delay_s;
    s.mean_max_utilization += r.max_edge_utilization;
    s.total_wall_time_s += r.wall_time_s;
  }

  ComparisonSummary out;
  for (const std::string& method : order) {
    MethodSummary agg;
    agg.method = method;
    const auto& seeds = per_seed[method];
    const double ns = static_cast<double>(seeds.size());
    for (const auto& [seed, s] : seeds) {
      (void)seed;
      agg.rows += s.rows;
      agg.infeasible_rows += s.infeasible_rows;
      agg.mean_total_vm_added += s.mean_total_vm_added / ns;
      agg.mean_total_vm_removed += s.mean_total_vm_removed / ns;
      agg.mean_total_control_ops += s.mean_total_control_ops / ns;
      agg.mean_host_count += s.mean_host_count / (ns * s.rows);
      agg.mean_total_delay_s += s.mean_total_delay_s / ns;
      agg.mean_unit_delay_s += s.mean_unit_delay_s / (ns * s.rows);
      agg.mean_max_utilization += s.mean_max_utilization / (ns * s.rows);
      agg.total_wall_time_s += s.total_wall_time_s;
    }
    out.methods.push_back(agg);
  }

  auto verdict = [&](const std::string& metric, auto getter) {
    const MethodSummary* best = &out.methods.front();
    for (const MethodSummary& s : out.methods) {
      if (getter(s) < getter(*best)) best = &s;
    }
    out.verdicts.push_back(best->method + " minimizes " + metric);
  };
  verdict("vm_migrations_added",
          [](const MethodSummary& s) { return s.mean_total_vm_added; });
  verdict("control_plane_ops",
          [](const MethodSummary& s) { return s.mean_total_control_ops; });
  verdict("host_count", [](const MethodSummary& s) { return s.mean_host_count; });
  verdict("total_infrastructure_delay_s",
          [](const MethodSummary& s) { return s.mean_total_delay_s; });
  return out;
}

inline std::string format_summary(const ComparisonSummary& cs) {
  std::ostringstream os;
  os << "method,rows,infeasible_rows,mean_total_vm_added,mean_total_vm_removed,"
        "mean_total_control_ops,mean_host_count,mean_total_delay_s,"
        "mean_unit_delay_s,mean_max_utilization,total_wall_time_s\n";
  for (const MethodSummary& s : cs.methods) {
    os << s.method << ',' << s.rows << ',' << s.infeasible_rows << ','
       << detail::format_double(s.mean_total_vm_added) << ','
       << detail::format_double(s.mean_total_vm_removed) << ','
       << detail::format_double(s.mean_total_control_ops) << ','
       << detail::format_double(s.mean_host_count) << ','
       << detail::format_double(s.mean_total_delay_s) << ','
       << detail::format_double(s.mean_unit_delay_s) << ','
       << detail::format_double(s.mean_max_utilization) << ','
       << detail::format_double(s.total_wall_time_s) << '\n';
  }
  for (const std::string& v : cs.verdicts) os << "# " << v << '\n';
  return os.str();
}

}  // namespace rsucrm
