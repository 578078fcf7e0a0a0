#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rsucrm/configuration.hpp"
#include "rsucrm/delay.hpp"
#include "rsucrm/errors.hpp"
#include "rsucrm/flow_solver.hpp"
#include "rsucrm/rng.hpp"
#include "rsucrm/routing.hpp"
#include "rsucrm/scenario.hpp"

namespace rsucrm {

// Everything derived from a scenario that planning reuses across steps:
// per-edge delay tables, the candidate path universe, and the marginal cost
// curves the exact solver runs on.
struct PlannerContext {
  Scenario scenario;
  std::vector<DelayLut> luts;
  CandidatePaths paths;
  std::vector<std::int64_t> cap_units;         // per edge, capacity minus one interval
  std::vector<std::vector<double>> marg_norm;  // per edge, normalized marginal delays
};

inline PlannerContext make_context(Scenario sc) {
  validate_scenario(sc);
  PlannerContext ctx;
  ctx.luts = build_luts(sc);
  ctx.paths = enumerate_paths(sc.graph, sc.path_limit);
  ctx.cap_units.reserve(ctx.luts.size());
  ctx.marg_norm.reserve(ctx.luts.size());
  for (const DelayLut& lut : ctx.luts) {
    const std::int64_t cap = lut.max_load_units();
    ctx.cap_units.push_back(cap);
    std::vector<double> marg(static_cast<std::size_t>(cap));
    for (std::int64_t j = 0; j < cap; ++j) {
      marg[static_cast<std::size_t>(j)] =
          (lut.at_units(j + 1) - lut.at_units(j)) / lut.last();
    }
    ctx.marg_norm.push_back(std::move(marg));
  }
  ctx.scenario = std::move(sc);
  return ctx;
}

// A frontier point: the configuration plus the two coordinates the frontier
// is defined over, and the normalized delay the deployment objective uses.
struct PofEntry {
  Configuration config;
  int host_count{0};
  double total_delay_s{0};
  double norm_edge_delay{0};
};

struct ParetoFrontier {
  std::vector<PofEntry> entries;  // host_count ascending, delay descending

  bool empty() const { return entries.empty(); }
};

struct SelectionPolicy {
  enum class Mode { lexicographic, weighted };
  Mode mode{Mode::lexicographic};
  double rho{0.5};    // weighted mode: migrations vs control ops
  double omega{0.5};  // first step: host count vs delay
};

inline PofEntry make_pof_entry(const PlannerContext& ctx, Configuration config) {
  PofEntry e;
  e.host_count = config.host_count();
  e.total_delay_s = total_unit_delay(ctx.scenario.graph, ctx.luts, config.assignment);
  e.norm_edge_delay =
      normalized_edge_delay(ctx.luts, config.assignment.edge_load_units);
  e.config = std::move(config);
  return e;
}

// One random placement attempt: draw `host_count` distinct hosts per service,
// then route greedily. Returns nothing when the draw cannot carry the demand.
inline std::optional<Configuration> generate_candidate(const PlannerContext& ctx,
                                                       const DemandMatrix& demands,
                                                       int host_count,
                                                       std::uint64_t seed) {
  const NetworkGraph& g = ctx.scenario.graph;
  const int n = g.node_count();
  if (host_count < 1 || host_count > n)
    throw std::invalid_argument("generate_candidate: host_count out of range");
  const int n_services = static_cast<int>(ctx.scenario.services.size());
  std::vector<std::vector<int>> hosts(static_cast<std::size_t>(n_services));
  std::vector<std::pair<int, int>> host_pairs;
  for (int k = 0; k < n_services; ++k) {
    Rng rng(derive_seed(seed, {seed_tag::hosts, static_cast<std::uint64_t>(k)}));
    hosts[static_cast<std::size_t>(k)] = rng.sample_indices(n, host_count);
    for (int m : hosts[static_cast<std::size_t>(k)]) host_pairs.push_back({m, k});
  }
  auto as = route_units(g, ctx.luts, demands, hosts, ctx.paths,
                        derive_seed(seed, {seed_tag::route_order}));
  if (!as) return std::nullopt;
  return make_configuration(g, std::move(host_pairs), std::move(*as), 0);
}

// Replica-count levels explored by the heuristic: half the nodes, then half
// of that, and so on down to a single host.
inline std::vector<int> halving_levels(int n) {
  std::vector<int> levels;
  int h = (n + 1) / 2;
  levels.push_back(h);
  while (h > 1) {
    h = (h + 1) / 2;
    levels.push_back(h);
  }
  return levels;
}

// Dominance filter over (host_count, total delay). Exact ties collapse to the
// lexicographically smallest canonical serialization.
inline ParetoFrontier pareto_filter(const PlannerContext& ctx,
                                    std::vector<PofEntry> entries) {
  std::vector<std::string> canon(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    canon[i] = canonical_string(entries[i].config, ctx.scenario.graph,
                                ctx.scenario.services);
  }
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (entries[a].host_count != entries[b].host_count)
      return entries[a].host_count < entries[b].host_count;
    if (entries[a].total_delay_s != entries[b].total_delay_s)
      return entries[a].total_delay_s < entries[b].total_delay_s;
    return canon[a] < canon[b];
  });

  ParetoFrontier pof;
  double best_delay = std::numeric_limits<double>::infinity();
  int last_hosts = -1;
  for (std::size_t i : order) {
    if (entries[i].host_count == last_hosts) continue;  // dominated within size
    if (entries[i].total_delay_s >= best_delay) continue;
    best_delay = entries[i].total_delay_s;
    last_hosts = entries[i].host_count;
    pof.entries.push_back(std::move(entries[i]));
  }
  return pof;
}

// Randomized local search: K independent placements per level, keeping per
// level the feasible candidate with the least total delay. The per-replicate
// seeds depend only on (seed, level, replicate), so enlarging K refines the
// same search rather than reshuffling it, and evaluation order cannot change
// the outcome.
inline ParetoFrontier generate_pof(const PlannerContext& ctx,
                                   const DemandMatrix& demands, int k,
                                   std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("generate_pof: K below 1");
  std::vector<PofEntry> kept;
  for (int level : halving_levels(ctx.scenario.graph.node_count())) {
    std::optional<PofEntry> best;
    std::string best_canon;
    for (int rep = 0; rep < k; ++rep) {
      auto cand = generate_candidate(
          ctx, demands, level,
          derive_seed(seed, {seed_tag::pof, static_cast<std::uint64_t>(level),
                             static_cast<std::uint64_t>(rep)}));
      if (!cand) continue;
      if (!check_feasibility(*cand, ctx.scenario, ctx.luts, demands).ok())
        continue;
      PofEntry entry = make_pof_entry(ctx, std::move(*cand));
      if (!best || entry.total_delay_s < best->total_delay_s) {
        best = std::move(entry);
        best_canon.clear();
      } else if (entry.total_delay_s == best->total_delay_s) {
        if (best_canon.empty())
          best_canon = canonical_string(best->config, ctx.scenario.graph,
                                        ctx.scenario.services);
        std::string c = canonical_string(entry.config, ctx.scenario.graph,
                                         ctx.scenario.services);
        if (c < best_canon) {
          best = std::move(entry);
          best_canon = std::move(c);
        }
      }
    }
    if (best) kept.push_back(std::move(*best));
  }
  return pareto_filter(ctx, std::move(kept));
}

// Picks the frontier entry to deploy. Without a predecessor the deployment
// objective decides; against a predecessor the reconfiguration cost does,
// either lexicographically (migrations, then control ops) or scalarized.
inline const PofEntry& select_configuration(const PlannerContext& ctx,
                                            const ParetoFrontier& pof,
                                            const Configuration* prev,
                                            const SelectionPolicy& policy) {
  if (pof.entries.empty())
    throw InfeasibleError("select_configuration: empty frontier");
  if (policy.omega < 0 || policy.omega > 1 || policy.rho < 0 || policy.rho > 1)
    throw std::invalid_argument("selection policy weights outside [0, 1]");

  const std::size_t count = pof.entries.size();
  auto canon = [&](std::size_t i) {
    return canonical_string(pof.entries[i].config, ctx.scenario.graph,
                            ctx.scenario.services);
  };

  std::size_t best = 0;
  std::vector<double> score1(count), score2(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    const PofEntry& e = pof.entries[i];
    if (!prev) {
      score1[i] = policy.omega * static_cast<double>(e.host_count) +
                  (1 - policy.omega) * e.norm_edge_delay;
    } else if (policy.mode == SelectionPolicy::Mode::lexicographic) {
      score1[i] = static_cast<double>(vm_migrations(*prev, e.config).added);
      score2[i] = static_cast<double>(control_plane_overhead(*prev, e.config));
    } else {
      score1[i] = reconfig_cost(*prev, e.config, policy.rho);
    }
  }
  for (std::size_t i = 1; i < count; ++i) {
    if (score1[i] < score1[best] ||
        (score1[i] == score1[best] && score2[i] < score2[best]) ||
        (score1[i] == score1[best] && score2[i] == score2[best] &&
         canon(i) < canon(best))) {
      best = i;
    }
  }
  return pof.entries[best];
}

namespace detail {

inline void for_each_combination(int n, int size,
                                 const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (;;) {
    fn(idx);
    int i = size - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < size; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

// Exhaustive solving stays within a small envelope: one service, unbounded
// QoS (path-indifferent flows cannot honor per-unit delay caps) and at most
// this many nodes.
inline constexpr int kMaxExactNodes = 12;

inline void exact_guards(const PlannerContext& ctx) {
  if (ctx.scenario.graph.node_count() > kMaxExactNodes)
    throw GuardError("exact solving limited to " +
                     std::to_string(kMaxExactNodes) + " nodes");
  if (ctx.scenario.services.size() != 1)
    throw GuardError("exact solving supports exactly one service");
}

inline void exact_qos_guard(const PlannerContext& ctx) {
  for (const auto& s : ctx.scenario.services) {
    if (s.qos_bounded())
      throw GuardError("exact solving requires unbounded QoS");
  }
}

struct ExactSolution {
  double norm_delay{0};
  std::vector<int> hosts;
  std::vector<std::int64_t> net;  // cycle-free
};

// Optimal routing cost for one host set, or nothing when infeasible.
inline std::optional<ExactSolution> exact_solve_set(
    const PlannerContext& ctx, ConvexRoutingSolver& solver,
    const DemandMatrix& demands, const std::vector<int>& host_set) {
  const NetworkGraph& g = ctx.scenario.graph;
  const int n = g.node_count();
  std::vector<char> is_host(static_cast<std::size_t>(n), 0);
  for (int m : host_set) is_host[static_cast<std::size_t>(m)] = 1;
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  std::int64_t total = 0;
  for (int v = 0; v < n; ++v) {
    if (!is_host[static_cast<std::size_t>(v)]) {
      supplies[static_cast<std::size_t>(v)] = demands.at(v, 0);
      total += demands.at(v, 0);
    }
  }
  // Every routed unit crosses the host boundary at least once.
  std::int64_t cut = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto& ed = g.edge(e);
    if (is_host[static_cast<std::size_t>(ed.u)] !=
        is_host[static_cast<std::size_t>(ed.v)])
      cut += ctx.cap_units[static_cast<std::size_t>(e)];
  }
  if (total > cut) return std::nullopt;

  auto net = solver.solve(supplies, is_host);
  if (!net) return std::nullopt;
  cancel_flow_cycles(g, *net);

  ExactSolution sol;
  sol.hosts = host_set;
  sol.net = std::move(*net);
  for (int e = 0; e < g.edge_count(); ++e) {
    const std::int64_t load = std::abs(sol.net[static_cast<std::size_t>(e)]);
    sol.norm_delay += ctx.luts[static_cast<std::size_t>(e)].at_units(load) /
                      ctx.luts[static_cast<std::size_t>(e)].last();
  }
  return sol;
}

inline Configuration exact_build_config(const PlannerContext& ctx,
                                        const DemandMatrix& demands,
                                        const ExactSolution& sol) {
  const NetworkGraph& g = ctx.scenario.graph;
  const int n = g.node_count();
  std::vector<char> is_host(static_cast<std::size_t>(n), 0);
  for (int m : sol.hosts) is_host[static_cast<std::size_t>(m)] = 1;
  std::vector<std::int64_t> supplies(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    if (!is_host[static_cast<std::size_t>(v)])
      supplies[static_cast<std::size_t>(v)] = demands.at(v, 0);
  }

  Assignment as;
  as.edge_load_units.assign(static_cast<std::size_t>(g.edge_count()), 0);
  for (int m : sol.hosts) {
    for (std::int64_t i = 0; i < demands.at(m, 0); ++i)
      as.units.push_back({m, 0, m, {}});
  }
  for (UnitRoute& u : decompose_flow(g, sol.net, 0, supplies, is_host)) {
    for (std::size_t i = 0; i + 1 < u.path.size(); ++i) {
      const int e = g.edge_between(u.path[i], u.path[i + 1]);
      ++as.edge_load_units[static_cast<std::size_t>(e)];
    }
    as.units.push_back(std::move(u));
  }

  std::vector<std::pair<int, int>> host_pairs;
  for (int m : sol.hosts) host_pairs.push_back({m, 0});
  return make_configuration(g, std::move(host_pairs), std::move(as), 0);
}

inline ConvexRoutingSolver make_solver(const PlannerContext& ctx) {
  return ConvexRoutingSolver(ctx.scenario.graph, ctx.cap_units, ctx.marg_norm);
}

}  // namespace detail

// Optimal deployment by exhaustive host-set enumeration with exact per-set
// routing. omega trades replica count against normalized infrastructure
// delay; host sets are explored per size in lexicographic order and ties fall
// back to lower delay, then to the earlier set.
inline Configuration exact_deployment(const PlannerContext& ctx,
                                      const DemandMatrix& demands, double omega,
                                      int host_bound) {
  detail::exact_guards(ctx);
  detail::exact_qos_guard(ctx);
  if (omega < 0 || omega > 1)
    throw std::invalid_argument("exact_deployment: omega outside [0, 1]");
  const int n = ctx.scenario.graph.node_count();
  const int bound =
      std::min({host_bound, n, ctx.scenario.services[0].host_bound});
  if (bound < 1) throw std::invalid_argument("exact_deployment: host bound below 1");

  ConvexRoutingSolver solver = detail::make_solver(ctx);
  std::optional<detail::ExactSolution> best;
  double best_obj = 0;

  auto consider_size = [&](int size) {
    detail::for_each_combination(n, size, [&](const std::vector<int>& set) {
      auto sol = detail::exact_solve_set(ctx, solver, demands, set);
      if (!sol) return;
      const double obj =
          omega * static_cast<double>(size) + (1 - omega) * sol->norm_delay;
      if (!best || obj < best_obj ||
          (obj == best_obj && sol->norm_delay < best->norm_delay)) {
        best = std::move(*sol);
        best_obj = obj;
      }
    });
  };

  if (omega == 0) {
    // Adding a host never hurts the optimal delay, so the full allowance wins.
    consider_size(bound);
  } else if (omega == 1) {
    for (int size = 1; size <= bound && !best; ++size) consider_size(size);
  } else {
    for (int size = 1; size <= bound; ++size) consider_size(size);
  }
  if (!best) throw InfeasibleError("exact_deployment: no feasible host set");
  return detail::exact_build_config(ctx, demands, *best);
}

// Exact frontier: for every replica count, the delay-optimal deployment; then
// the dominated counts are filtered out.
inline ParetoFrontier exact_pof(const PlannerContext& ctx,
                                const DemandMatrix& demands) {
  detail::exact_guards(ctx);
  detail::exact_qos_guard(ctx);
  const int n = ctx.scenario.graph.node_count();
  const int bound = std::min(n, ctx.scenario.services[0].host_bound);

  ConvexRoutingSolver solver = detail::make_solver(ctx);
  std::vector<PofEntry> entries;
  for (int size = 1; size <= bound; ++size) {
    std::optional<detail::ExactSolution> best;
    detail::for_each_combination(n, size, [&](const std::vector<int>& set) {
      auto sol = detail::exact_solve_set(ctx, solver, demands, set);
      if (!sol) return;
      if (!best || sol->norm_delay < best->norm_delay) best = std::move(*sol);
    });
    if (best)
      entries.push_back(
          make_pof_entry(ctx, detail::exact_build_config(ctx, demands, *best)));
  }
  return pareto_filter(ctx, std::move(entries));
}

// Fewest replicas that can carry the demand at all, delay-optimally routed,
// with the QoS bounds deliberately ignored. Ties on (size, delay) are settled
// by the canonical serialization.
inline Configuration purist_cost(const PlannerContext& ctx,
                                 const DemandMatrix& demands) {
  detail::exact_guards(ctx);
  const int n = ctx.scenario.graph.node_count();
  const int bound = std::min(n, ctx.scenario.services[0].host_bound);
  ConvexRoutingSolver solver = detail::make_solver(ctx);

  for (int size = 1; size <= bound; ++size) {
    std::vector<detail::ExactSolution> tied;
    detail::for_each_combination(n, size, [&](const std::vector<int>& set) {
      auto sol = detail::exact_solve_set(ctx, solver, demands, set);
      if (!sol) return;
      if (tied.empty() || sol->norm_delay < tied.front().norm_delay) {
        tied.assign(1, std::move(*sol));
      } else if (sol->norm_delay == tied.front().norm_delay) {
        tied.push_back(std::move(*sol));
      }
    });
    if (tied.empty()) continue;
    Configuration winner = detail::exact_build_config(ctx, demands, tied.front());
    if (tied.size() > 1) {
      std::string winner_canon = canonical_string(winner, ctx.scenario.graph,
                                                  ctx.scenario.services);
      for (std::size_t i = 1; i < tied.size(); ++i) {
        Configuration c = detail::exact_build_config(ctx, demands, tied[i]);
        std::string cc =
            canonical_string(c, ctx.scenario.graph, ctx.scenario.services);
        if (cc < winner_canon) {
          winner = std::move(c);
          winner_canon = std::move(cc);
        }
      }
    }
    return winner;
  }
  throw InfeasibleError("purist_cost: no feasible host set");
}

}  // namespace rsucrm
