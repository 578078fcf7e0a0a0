#pragma once

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsucrm/delay.hpp"
#include "rsucrm/graph.hpp"
#include "rsucrm/routing.hpp"
#include "rsucrm/rules.hpp"
#include "rsucrm/scenario.hpp"

namespace rsucrm {

// A full deployment at one trace step: where services run, how the switches
// forward their traffic, and the unit routing the rules were derived from.
struct Configuration {
  std::vector<std::pair<int, int>> hosts;  // (node, service), sorted
  std::vector<FlowRule> flow_rules;        // sorted by key
  std::vector<GroupRule> group_rules;      // sorted by key
  Assignment assignment;
  int step{0};

  int host_count() const { return static_cast<int>(hosts.size()); }

  std::vector<std::vector<int>> hosts_by_service(int n_services) const {
    std::vector<std::vector<int>> by(static_cast<std::size_t>(n_services));
    for (const auto& [node, k] : hosts)
      by[static_cast<std::size_t>(k)].push_back(node);
    return by;
  }
};

inline Configuration make_configuration(const NetworkGraph& g,
                                        std::vector<std::pair<int, int>> hosts,
                                        Assignment assignment, int step) {
  Configuration c;
  std::sort(hosts.begin(), hosts.end());
  c.hosts = std::move(hosts);
  c.assignment = std::move(assignment);
  c.step = step;
  derive_rules(g, c.assignment, &c.flow_rules, &c.group_rules);
  return c;
}

struct MigrationCounts {
  std::int64_t added{0};    // instantiated hosts: next minus prev
  std::int64_t literal{0};  // torn-down hosts: prev minus next
};

// Host-set difference between consecutive deployments. `added` is the count
// that matters for reconfiguration cost (spinning up a new replica); the
// literal count of removals is kept for reporting.
inline MigrationCounts vm_migrations(
    const std::vector<std::pair<int, int>>& prev,
    const std::vector<std::pair<int, int>>& next) {
  MigrationCounts mc;
  for (const auto& h : next) {
    if (!std::binary_search(prev.begin(), prev.end(), h)) ++mc.added;
  }
  for (const auto& h : prev) {
    if (!std::binary_search(next.begin(), next.end(), h)) ++mc.literal;
  }
  return mc;
}

inline MigrationCounts vm_migrations(const Configuration& prev,
                                     const Configuration& next) {
  return vm_migrations(prev.hosts, next.hosts);
}

// Control-plane message count for moving between two rule sets. Every rule
// removed and every rule installed is one operation, compared by full
// content; in addition a rule that changes kind (flow <-> group) under the
// same (switch, service, destination) identity is counted once more on each
// side: the data plane treats that as a delete of the old entry followed by
// an add of a different table's entry.
inline std::int64_t control_plane_overhead(const std::vector<FlowRule>& prev_f,
                                           const std::vector<GroupRule>& prev_g,
                                           const std::vector<FlowRule>& next_f,
                                           const std::vector<GroupRule>& next_g) {
  std::int64_t ops = 0;

  const std::set<FlowRule> pf(prev_f.begin(), prev_f.end());
  const std::set<FlowRule> nf(next_f.begin(), next_f.end());
  const std::set<GroupRule> pg(prev_g.begin(), prev_g.end());
  const std::set<GroupRule> ng(next_g.begin(), next_g.end());

  for (const auto& r : nf)
    if (!pf.count(r)) ++ops;
  for (const auto& r : pf)
    if (!nf.count(r)) ++ops;
  for (const auto& r : ng)
    if (!pg.count(r)) ++ops;
  for (const auto& r : pg)
    if (!ng.count(r)) ++ops;

  std::set<RuleKey> prev_flow_keys, prev_group_keys, next_flow_keys, next_group_keys;
  for (const auto& r : prev_f) prev_flow_keys.insert(r.key);
  for (const auto& r : prev_g) prev_group_keys.insert(r.key);
  for (const auto& r : next_f) next_flow_keys.insert(r.key);
  for (const auto& r : next_g) next_group_keys.insert(r.key);

  for (const auto& k : next_flow_keys)
    if (prev_group_keys.count(k)) ++ops;
  for (const auto& k : next_group_keys)
    if (prev_flow_keys.count(k)) ++ops;

  return ops;
}

inline std::int64_t control_plane_overhead(const Configuration& prev,
                                           const Configuration& next) {
  return control_plane_overhead(prev.flow_rules, prev.group_rules,
                                next.flow_rules, next.group_rules);
}

// Scalarized reconfiguration cost: rho trades migrations against control ops.
inline double reconfig_cost(const Configuration& prev, const Configuration& next,
                            double rho) {
  if (rho < 0 || rho > 1) throw std::invalid_argument("rho outside [0, 1]");
  return rho * static_cast<double>(vm_migrations(prev, next).added) +
         (1 - rho) * static_cast<double>(control_plane_overhead(prev, next));
}

struct ReconfigReport {
  std::int64_t vm_added{0};
  std::int64_t vm_literal{0};
  std::int64_t control_ops{0};
  double weighted_cost{0};
};

inline ReconfigReport make_reconfig_report(const Configuration& prev,
                                           const Configuration& next, double rho) {
  ReconfigReport r;
  const MigrationCounts mc = vm_migrations(prev, next);
  r.vm_added = mc.added;
  r.vm_literal = mc.literal;
  r.control_ops = control_plane_overhead(prev, next);
  r.weighted_cost = rho * static_cast<double>(r.vm_added) +
                    (1 - rho) * static_cast<double>(r.control_ops);
  return r;
}

// Sum over edges of the edge's delay at its current load, each normalized by
// that edge's delay at the highest admissible load. Idle edges contribute
// their zero-load term unless skipped.
inline double normalized_edge_delay(const std::vector<DelayLut>& luts,
                                    const std::vector<std::int64_t>& loads,
                                    bool include_idle = true) {
  double sum = 0;
  for (std::size_t e = 0; e < luts.size(); ++e) {
    if (!include_idle && loads[e] == 0) continue;
    sum += luts[e].at_units(loads[e]) / luts[e].last();
  }
  return sum;
}

// Deployment objective: omega weighs the host count against the normalized
// infrastructure delay. Assumes the configuration is feasible.
inline double deployment_objective(const Configuration& c,
                                   const std::vector<DelayLut>& luts,
                                   double omega, bool include_idle = true) {
  if (omega < 0 || omega > 1) throw std::invalid_argument("omega outside [0, 1]");
  return omega * static_cast<double>(c.host_count()) +
         (1 - omega) *
             normalized_edge_delay(luts, c.assignment.edge_load_units, include_idle);
}

struct FeasibilityReport {
  struct Violation {
    int constraint;  // 1..6
    std::string message;
  };
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

// Checks a configuration against the scenario and the demand it is supposed
// to carry:
//   1. every demand unit is served by a host of its service,
//   2. no edge exceeds capacity minus one lut interval,
//   3. recorded edge loads agree with the unit routes,
//   4. host-local demand stays local (and only host-local demand does),
//   5. every unit's path delay at final loads respects the service QoS bound,
//   6. replica count per service stays within its bound.
inline FeasibilityReport check_feasibility(const Configuration& c,
                                           const Scenario& sc,
                                           const std::vector<DelayLut>& luts,
                                           const DemandMatrix& demands) {
  FeasibilityReport rep;
  const NetworkGraph& g = sc.graph;
  const int n_services = static_cast<int>(sc.services.size());
  const auto by_service = c.hosts_by_service(n_services);

  auto is_host = [&](int node, int k) {
    const auto& v = by_service[static_cast<std::size_t>(k)];
    return std::binary_search(v.begin(), v.end(), node);
  };

  // (1) served units match demand and land on valid hosts.
  DemandMatrix served(demands.n_nodes, demands.n_services, demands.interval_mbps);
  for (const UnitRoute& u : c.assignment.units) {
    ++served.at(u.node, u.service);
    if (!is_host(u.host, u.service)) {
      rep.violations.push_back(
          {1, "unit served by non-host node " + g.node_name(u.host)});
    }
  }
  for (int node = 0; node < demands.n_nodes; ++node) {
    for (int k = 0; k < n_services; ++k) {
      if (served.at(node, k) != demands.at(node, k)) {
        rep.violations.push_back(
            {1, "demand at node " + g.node_name(node) + " service " +
                    sc.services[static_cast<std::size_t>(k)].id + ": served " +
                    std::to_string(served.at(node, k)) + " of " +
                    std::to_string(demands.at(node, k)) + " units"});
      }
    }
  }

  // (3) recorded loads agree with unit routes; use recomputed loads below.
  std::vector<std::int64_t> loads(static_cast<std::size_t>(g.edge_count()), 0);
  for (const UnitRoute& u : c.assignment.units) {
    for (std::size_t i = 0; i + 1 < u.path.size(); ++i) {
      const int e = g.edge_between(u.path[i], u.path[i + 1]);
      if (e < 0) {
        rep.violations.push_back({3, "unit path uses a missing edge"});
        continue;
      }
      ++loads[static_cast<std::size_t>(e)];
    }
  }
  if (loads != c.assignment.edge_load_units)
    rep.violations.push_back({3, "edge loads inconsistent with unit routes"});

  // (2) capacity: load <= capacity - one interval, i.e. strictly below C.
  for (int e = 0; e < g.edge_count(); ++e) {
    if (loads[static_cast<std::size_t>(e)] >
        luts[static_cast<std::size_t>(e)].max_load_units()) {
      const auto& ed = g.edge(e);
      rep.violations.push_back(
          {2, "edge (" + g.node_name(ed.u) + "," + g.node_name(ed.v) +
                  ") overloaded: " +
                  std::to_string(loads[static_cast<std::size_t>(e)]) + " units"});
    }
  }

  // (4) locality.
  for (const UnitRoute& u : c.assignment.units) {
    const bool local_origin = is_host(u.node, u.service);
    if (local_origin && (!u.path.empty() || u.host != u.node)) {
      rep.violations.push_back(
          {4, "host-local demand at " + g.node_name(u.node) + " leaves the node"});
    } else if (!local_origin && u.path.empty()) {
      rep.violations.push_back(
          {4, "remote demand at " + g.node_name(u.node) + " has no path"});
    } else if (!u.path.empty() &&
               (u.path.front() != u.node || u.path.back() != u.host)) {
      rep.violations.push_back({4, "unit path endpoints do not match unit"});
    }
  }

  // (5) per-unit QoS.
  for (const UnitRoute& u : c.assignment.units) {
    const ServiceSpec& svc = sc.services[static_cast<std::size_t>(u.service)];
    if (!svc.qos_bounded()) continue;
    double d = 0;
    for (std::size_t i = 0; i + 1 < u.path.size(); ++i) {
      const int e = g.edge_between(u.path[i], u.path[i + 1]);
      d += luts[static_cast<std::size_t>(e)].at_units(
          loads[static_cast<std::size_t>(e)]);
    }
    if (d > svc.qos_bound_s() * (1 + 1e-12)) {
      rep.violations.push_back(
          {5, "unit from " + g.node_name(u.node) + " exceeds QoS bound of " +
                  svc.id});
    }
  }

  // (6) replica bound.
  for (int k = 0; k < n_services; ++k) {
    const int count = static_cast<int>(by_service[static_cast<std::size_t>(k)].size());
    if (count > sc.services[static_cast<std::size_t>(k)].host_bound) {
      rep.violations.push_back(
          {6, "service " + sc.services[static_cast<std::size_t>(k)].id + " uses " +
                  std::to_string(count) + " hosts, bound is " +
                  std::to_string(sc.services[static_cast<std::size_t>(k)].host_bound)});
    }
  }

  return rep;
}

// Stable JSON form: object keys sorted, arrays in canonical order, rational
// weights as "p/q" strings. Two configurations are interchangeable exactly
// when their canonical strings match.
inline nlohmann::json canonical_json(const Configuration& c,
                                     const NetworkGraph& g,
                                     const std::vector<ServiceSpec>& services) {
  using nlohmann::json;
  auto edge_pair = [&](int e) {
    const auto& ed = g.edge(e);
    return json::array({g.node_name(ed.u), g.node_name(ed.v)});
  };
  json root;
  json hosts = json::array();
  for (const auto& [node, k] : c.hosts) {
    hosts.push_back(json::array(
        {g.node_name(node), services[static_cast<std::size_t>(k)].id}));
  }
  root["hosts"] = std::move(hosts);

  json fr = json::array();
  for (const FlowRule& r : c.flow_rules) {
    json jr;
    jr["switch"] = g.node_name(r.key.sw);
    jr["service"] = services[static_cast<std::size_t>(r.key.service)].id;
    jr["destination"] = g.node_name(r.key.dest);
    jr["out_edge"] = edge_pair(r.out_edge);
    fr.push_back(std::move(jr));
  }
  root["flow_rules"] = std::move(fr);

  json gr = json::array();
  for (const GroupRule& r : c.group_rules) {
    json jr;
    jr["switch"] = g.node_name(r.key.sw);
    jr["service"] = services[static_cast<std::size_t>(r.key.service)].id;
    jr["destination"] = g.node_name(r.key.dest);
    json branches = json::array();
    for (const auto& b : r.branches) {
      json jb;
      jb["edge"] = edge_pair(b.out_edge);
      jb["weight"] = b.weight.str();
      branches.push_back(std::move(jb));
    }
    jr["branches"] = std::move(branches);
    gr.push_back(std::move(jr));
  }
  root["group_rules"] = std::move(gr);

  json units = json::array();
  std::vector<UnitRoute> sorted_units = c.assignment.units;
  std::sort(sorted_units.begin(), sorted_units.end(),
            [](const UnitRoute& a, const UnitRoute& b) {
              return std::tie(a.node, a.service, a.host, a.path) <
                     std::tie(b.node, b.service, b.host, b.path);
            });
  for (const UnitRoute& u : sorted_units) {
    json ju;
    ju["node"] = g.node_name(u.node);
    ju["service"] = services[static_cast<std::size_t>(u.service)].id;
    ju["host"] = g.node_name(u.host);
    json path = json::array();
    for (int p : u.path) path.push_back(g.node_name(p));
    ju["path"] = std::move(path);
    units.push_back(std::move(ju));
  }
  root["units"] = std::move(units);
  root["step"] = c.step;
  return root;
}

inline std::string canonical_string(const Configuration& c, const NetworkGraph& g,
                                    const std::vector<ServiceSpec>& services) {
  return canonical_json(c, g, services).dump();
}

}  // namespace rsucrm
