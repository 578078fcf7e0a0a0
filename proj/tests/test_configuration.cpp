#include "rsucrm/configuration.hpp"

#include <gtest/gtest.h>

#include "rsucrm/scenario.hpp"

using namespace rsucrm;

namespace {

NetworkGraph triangle(double cap = 10) {
  return make_graph({"a", "b", "c"},
                    {{"a", "b", cap}, {"a", "c", cap}, {"b", "c", cap}});
}

Scenario tri_scenario(double cap = 10) {
  Scenario sc;
  sc.graph = triangle(cap);
  ServiceSpec s;
  s.id = "s0";
  s.host_bound = 3;
  sc.services = {s};
  sc.trace.steps_mbps = {5};
  sc.trace.sigma = 0;
  sc.lut_interval_mbps = 1;
  sc.queue.processing_delay_us = 10;
  sc.queue.packet_size_bytes = 800;
  sc.queue.ca = 1;
  sc.queue.cs = 1;
  sc.queue.propagation_delay_us = 0;
  sc.path_limit = 4;
  sc.seed = 1;
  validate_scenario(sc);
  return sc;
}

DemandMatrix demands_for(const NetworkGraph& g,
                         const std::vector<std::int64_t>& units) {
  DemandMatrix dm(g.node_count(), 1, 1.0);
  for (int n = 0; n < g.node_count(); ++n)
    dm.at(n, 0) = units[static_cast<std::size_t>(n)];
  return dm;
}

// Routes `units` demand onto `host_nodes` and assembles the configuration.
Configuration routed_config(const Scenario& sc,
                            const std::vector<DelayLut>& luts,
                            const DemandMatrix& dm,
                            const std::vector<int>& host_nodes, int step = 0) {
  const CandidatePaths cp = enumerate_paths(sc.graph, sc.path_limit);
  const auto as = route_units(sc.graph, luts, dm, {host_nodes}, cp, 1);
  EXPECT_TRUE(as.has_value());
  std::vector<std::pair<int, int>> pairs;
  for (int m : host_nodes) pairs.push_back({m, 0});
  return make_configuration(sc.graph, pairs, *as, step);
}

}  // namespace

TEST(Configuration, MakeSortsHostsAndDerivesRules) {
  const Scenario sc = tri_scenario();
  const auto luts = build_luts(sc);
  const DemandMatrix local_only = demands_for(sc.graph, {1, 0, 2});
  const Configuration c = routed_config(sc, luts, local_only, {2, 0});
  ASSERT_EQ(c.hosts.size(), 2u);
  EXPECT_EQ(c.hosts[0], (std::pair<int, int>{0, 0}));
  EXPECT_EQ(c.hosts[1], (std::pair<int, int>{2, 0}));
  EXPECT_EQ(c.host_count(), 2);
  ASSERT_EQ(c.hosts_by_service(1).size(), 1u);
  EXPECT_EQ(c.hosts_by_service(1)[0], (std::vector<int>{0, 2}));
  // All demand is host-local, so no forwarding state exists.
  EXPECT_TRUE(c.flow_rules.empty());
  EXPECT_TRUE(c.group_rules.empty());

  // A single host pulls each remote origin over its direct edge.
  const DemandMatrix dm = demands_for(sc.graph, {1, 2, 2});
  const Configuration single = routed_config(sc, luts, dm, {0});
  ASSERT_EQ(single.flow_rules.size(), 2u);
  EXPECT_EQ(single.flow_rules[0].key, (RuleKey{1, 0, 0}));
  EXPECT_EQ(single.flow_rules[1].key, (RuleKey{2, 0, 0}));
  EXPECT_TRUE(single.group_rules.empty());
}

TEST(Migrations, CountsAreSetDifferences) {
  const std::vector<std::pair<int, int>> prev = {{0, 0}, {3, 0}};
  const std::vector<std::pair<int, int>> next = {{3, 0}, {7, 0}};
  const MigrationCounts mc = vm_migrations(prev, next);
  EXPECT_EQ(mc.added, 1);
  EXPECT_EQ(mc.literal, 1);

  const MigrationCounts from_empty = vm_migrations({}, next);
  EXPECT_EQ(from_empty.added, 2);
  EXPECT_EQ(from_empty.literal, 0);

  const MigrationCounts none = vm_migrations(prev, prev);
  EXPECT_EQ(none.added, 0);
  EXPECT_EQ(none.literal, 0);

  // The same node hosting a different service is a different replica.
  const MigrationCounts svc = vm_migrations({{3, 0}}, {{3, 1}});
  EXPECT_EQ(svc.added, 1);
  EXPECT_EQ(svc.literal, 1);
}

TEST(ControlPlane, ContentDiffsAndKindSwitch) {
  const RuleKey k{1, 0, 0};
  const FlowRule f{k, 0};
  const GroupRule g{k, {{0, Rational(1, 2)}, {2, Rational(1, 2)}}};

  // Identical rule sets cost nothing.
  EXPECT_EQ(control_plane_overhead({f}, {}, {f}, {}), 0);
  EXPECT_EQ(control_plane_overhead({}, {g}, {}, {g}), 0);

  // Same key, new out edge: one delete plus one add.
  const FlowRule f2{k, 2};
  EXPECT_EQ(control_plane_overhead({f}, {}, {f2}, {}), 2);

  // Same key, new weights: one delete plus one add.
  const GroupRule g2{k, {{0, Rational(2, 3)}, {2, Rational(1, 3)}}};
  EXPECT_EQ(control_plane_overhead({}, {g}, {}, {g2}), 2);

  // Flow to group under one key: delete, add, and one extra op per side of
  // the kind switch.
  EXPECT_EQ(control_plane_overhead({f}, {}, {}, {g}), 3);
  EXPECT_EQ(control_plane_overhead({}, {g}, {f}, {}), 3);

  // Disjoint keys just add up.
  const FlowRule other{{2, 0, 0}, 1};
  EXPECT_EQ(control_plane_overhead({f}, {}, {f, other}, {}), 1);
  EXPECT_EQ(control_plane_overhead({f, other}, {}, {}, {}), 2);
}

TEST(ControlPlane, ReconfigCostBlendsBothTerms) {
  const Scenario sc = tri_scenario();
  const auto luts = build_luts(sc);
  const DemandMatrix dm = demands_for(sc.graph, {1, 2, 2});
  const Configuration at_a = routed_config(sc, luts, dm, {0});
  const Configuration at_b = routed_config(sc, luts, dm, {1}, 1);

  // Host a -> host b swaps one replica; each side has two flow rules and no
  // key survives, so every rule is one delete or one add.
  const MigrationCounts mc = vm_migrations(at_a, at_b);
  EXPECT_EQ(mc.added, 1);
  EXPECT_EQ(mc.literal, 1);
  EXPECT_EQ(control_plane_overhead(at_a, at_b), 4);
  EXPECT_DOUBLE_EQ(reconfig_cost(at_a, at_b, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(reconfig_cost(at_a, at_b, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(reconfig_cost(at_a, at_b, 0.0), 4.0);
  EXPECT_THROW(reconfig_cost(at_a, at_b, 1.5), std::invalid_argument);

  const ReconfigReport rep = make_reconfig_report(at_a, at_b, 0.5);
  EXPECT_EQ(rep.vm_added, 1);
  EXPECT_EQ(rep.vm_literal, 1);
  EXPECT_EQ(rep.control_ops, 4);
  EXPECT_DOUBLE_EQ(rep.weighted_cost, 2.5);
}

TEST(Objective, AllLocalDeployment) {
  const Scenario sc = default_scenario();
  const auto luts = build_luts(sc);
  const CandidatePaths cp = enumerate_paths(sc.graph, sc.path_limit);
  const DemandMatrix dm = sample_demands(sc, 0, 7);
  std::vector<int> all_nodes;
  std::vector<std::pair<int, int>> pairs;
  for (int m = 0; m < sc.graph.node_count(); ++m) {
    all_nodes.push_back(m);
    pairs.push_back({m, 0});
  }
  const auto as = route_units(sc.graph, luts, dm, {all_nodes}, cp, 1);
  ASSERT_TRUE(as.has_value());
  const Configuration c = make_configuration(sc.graph, pairs, *as, 0);

  // Hosts everywhere leave every edge idle.
  EXPECT_DOUBLE_EQ(deployment_objective(c, luts, 1.0), 10.0);
  const double idle_ratio = luts[0].at_units(0) / luts[0].last();
  EXPECT_NEAR(deployment_objective(c, luts, 0.0), 13 * idle_ratio, 1e-12);
  EXPECT_DOUBLE_EQ(deployment_objective(c, luts, 0.0, false), 0.0);
  EXPECT_NEAR(deployment_objective(c, luts, 0.5),
              5.0 + 0.5 * 13 * idle_ratio, 1e-12);
  EXPECT_THROW(deployment_objective(c, luts, -0.1), std::invalid_argument);

  EXPECT_NEAR(normalized_edge_delay(luts, c.assignment.edge_load_units),
              13 * idle_ratio, 1e-12);
  EXPECT_EQ(normalized_edge_delay(luts, c.assignment.edge_load_units, false), 0);
}

TEST(Feasibility, CleanConfigurationPasses) {
  const Scenario sc = tri_scenario();
  const auto luts = build_luts(sc);
  const DemandMatrix dm = demands_for(sc.graph, {1, 2, 2});
  const Configuration c = routed_config(sc, luts, dm, {0});
  const FeasibilityReport rep = check_feasibility(c, sc, luts, dm);
  EXPECT_TRUE(rep.ok()) << (rep.violations.empty()
                                ? ""
                                : rep.violations[0].message);
}

TEST(Feasibility, DetectsEachViolationKind) {
  const Scenario sc = tri_scenario();
  const auto luts = build_luts(sc);
  const DemandMatrix dm = demands_for(sc.graph, {1, 2, 2});
  const Configuration good = routed_config(sc, luts, dm, {0});

  auto only_constraint = [](const FeasibilityReport& rep) {
    EXPECT_FALSE(rep.ok());
    int c = rep.violations.empty() ? 0 : rep.violations[0].constraint;
    for (const auto& v : rep.violations) EXPECT_EQ(v.constraint, c);
    return c;
  };

  {  // (1) a dropped local unit leaves demand unserved.
    Configuration c = good;
    for (std::size_t i = 0; i < c.assignment.units.size(); ++i) {
      if (c.assignment.units[i].path.empty()) {
        c.assignment.units.erase(c.assignment.units.begin() +
                                 static_cast<std::ptrdiff_t>(i));
        break;
      }
    }
    EXPECT_EQ(only_constraint(check_feasibility(c, sc, luts, dm)), 1);
  }

  {  // (2) more units on an edge than capacity admits.
    const DemandMatrix heavy = demands_for(sc.graph, {0, 10, 0});
    Configuration c;
    c.hosts = {{0, 0}};
    c.step = 0;
    c.assignment.edge_load_units.assign(
        static_cast<std::size_t>(sc.graph.edge_count()), 0);
    const int e01 = sc.graph.edge_between(0, 1);
    for (int i = 0; i < 10; ++i) c.assignment.units.push_back({1, 0, 0, {1, 0}});
    c.assignment.edge_load_units[static_cast<std::size_t>(e01)] = 10;
    derive_rules(sc.graph, c.assignment, &c.flow_rules, &c.group_rules);
    EXPECT_EQ(only_constraint(check_feasibility(c, sc, luts, heavy)), 2);
  }

  {  // (3) stored loads that disagree with the unit routes.
    Configuration c = good;
    ++c.assignment.edge_load_units[0];
    EXPECT_EQ(only_constraint(check_feasibility(c, sc, luts, dm)), 3);
  }

  {  // (4) host-local demand that leaves its node.
    const DemandMatrix one = demands_for(sc.graph, {0, 1, 0});
    Configuration c;
    c.hosts = {{0, 0}, {1, 0}};
    c.step = 0;
    c.assignment.units.push_back({1, 0, 0, {1, 0}});
    c.assignment.edge_load_units.assign(
        static_cast<std::size_t>(sc.graph.edge_count()), 0);
    c.assignment.edge_load_units[static_cast<std::size_t>(
        sc.graph.edge_between(0, 1))] = 1;
    derive_rules(sc.graph, c.assignment, &c.flow_rules, &c.group_rules);
    EXPECT_EQ(only_constraint(check_feasibility(c, sc, luts, one)), 4);
  }

  {  // (4) remote demand with no path at all.
    const DemandMatrix one = demands_for(sc.graph, {0, 1, 0});
    Configuration c;
    c.hosts = {{0, 0}};
    c.step = 0;
    c.assignment.units.push_back({1, 0, 0, {}});
    c.assignment.edge_load_units.assign(
        static_cast<std::size_t>(sc.graph.edge_count()), 0);
    EXPECT_EQ(only_constraint(check_feasibility(c, sc, luts, one)), 4);
  }

  {  // (5) a QoS bound tighter than one hop's delay.
    Scenario strict = sc;
    strict.services[0].qos_bound_us = 100;  // one loaded hop costs ~720 us
    const DemandMatrix one = demands_for(sc.graph, {0, 1, 0});
    const Configuration c = routed_config(strict, luts, one, {0});
    EXPECT_EQ(only_constraint(check_feasibility(c, strict, luts, one)), 5);
  }

  {  // (6) more replicas than the service allows.
    Scenario tight = sc;
    tight.services[0].host_bound = 1;
    const DemandMatrix two = demands_for(sc.graph, {1, 1, 0});
    const Configuration c = routed_config(tight, luts, two, {0, 1});
    EXPECT_EQ(only_constraint(check_feasibility(c, tight, luts, two)), 6);
  }
}

TEST(Canonical, StableAcrossUnitOrder) {
  const Scenario sc = tri_scenario();
  const auto luts = build_luts(sc);
  const DemandMatrix dm = demands_for(sc.graph, {1, 3, 3});
  const Configuration a = routed_config(sc, luts, dm, {0});

  Configuration b = a;
  std::reverse(b.assignment.units.begin(), b.assignment.units.end());
  std::vector<FlowRule> flows;
  std::vector<GroupRule> groups;
  derive_rules(sc.graph, b.assignment, &flows, &groups);
  EXPECT_EQ(b.flow_rules, flows);
  EXPECT_EQ(b.group_rules, groups);

  EXPECT_EQ(canonical_string(a, sc.graph, sc.services),
            canonical_string(b, sc.graph, sc.services));

  Configuration other = a;
  other.hosts = {{1, 0}};
  EXPECT_NE(canonical_string(a, sc.graph, sc.services),
            canonical_string(other, sc.graph, sc.services));

  Configuration later = a;
  later.step = 3;
  EXPECT_NE(canonical_string(a, sc.graph, sc.services),
            canonical_string(later, sc.graph, sc.services));
}

TEST(Canonical, WeightsSerializedAsExactRationals) {
  const NetworkGraph g = triangle();
  Assignment as;
  as.edge_load_units.assign(static_cast<std::size_t>(g.edge_count()), 0);
  const Path direct = {1, 0};
  const Path detour = {1, 2, 0};
  as.units.push_back({1, 0, 0, direct});
  as.units.push_back({1, 0, 0, direct});
  as.units.push_back({1, 0, 0, detour});
  for (const UnitRoute& u : as.units)
    for (int e : path_edges(g, u.path))
      ++as.edge_load_units[static_cast<std::size_t>(e)];
  const Configuration c = make_configuration(g, {{0, 0}}, as, 0);
  ServiceSpec s;
  s.id = "s0";
  s.host_bound = 3;
  const std::string text = canonical_string(c, g, {s});
  EXPECT_NE(text.find("\"2/3\""), std::string::npos) << text;
  EXPECT_NE(text.find("\"1/3\""), std::string::npos) << text;
}
