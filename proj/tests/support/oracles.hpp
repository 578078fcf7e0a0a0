// Independent reference implementations the test suites check the library
// against. Everything here favors obviousness over speed: nested loops,
// exhaustive enumeration, no shared code with the headers under test beyond
// the data types themselves.
#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "rsucrm/delay.hpp"
#include "rsucrm/graph.hpp"
#include "rsucrm/rng.hpp"
#include "rsucrm/rules.hpp"
#include "rsucrm/scenario.hpp"

namespace oracle {

using namespace rsucrm;

inline bool same_flow(const FlowRule& a, const FlowRule& b) {
  return a.key.sw == b.key.sw && a.key.service == b.key.service &&
         a.key.dest == b.key.dest && a.out_edge == b.out_edge;
}

inline bool same_group(const GroupRule& a, const GroupRule& b) {
  if (!(a.key.sw == b.key.sw && a.key.service == b.key.service &&
        a.key.dest == b.key.dest))
    return false;
  if (a.branches.size() != b.branches.size()) return false;
  for (std::size_t i = 0; i < a.branches.size(); ++i) {
    if (a.branches[i].out_edge != b.branches[i].out_edge) return false;
    if (!(a.branches[i].weight == b.branches[i].weight)) return false;
  }
  return true;
}

inline bool same_key(const RuleKey& a, const RuleKey& b) {
  return a.sw == b.sw && a.service == b.service && a.dest == b.dest;
}

// Reference count of control-plane operations: one per rule present on one
// side but not content-identical on the other, plus one per side for every
// key that switches kind between the flow and group tables.
inline std::int64_t rules_diff(const std::vector<FlowRule>& prev_f,
                               const std::vector<GroupRule>& prev_g,
                               const std::vector<FlowRule>& next_f,
                               const std::vector<GroupRule>& next_g) {
  std::int64_t ops = 0;
  for (const auto& r : next_f) {
    bool found = false;
    for (const auto& p : prev_f)
      if (same_flow(r, p)) found = true;
    if (!found) ++ops;
  }
  for (const auto& r : prev_f) {
    bool found = false;
    for (const auto& p : next_f)
      if (same_flow(r, p)) found = true;
    if (!found) ++ops;
  }
  for (const auto& r : next_g) {
    bool found = false;
    for (const auto& p : prev_g)
      if (same_group(r, p)) found = true;
    if (!found) ++ops;
  }
  for (const auto& r : prev_g) {
    bool found = false;
    for (const auto& p : next_g)
      if (same_group(r, p)) found = true;
    if (!found) ++ops;
  }
  for (const auto& r : next_f) {
    for (const auto& p : prev_g)
      if (same_key(r.key, p.key)) ++ops;
  }
  for (const auto& r : next_g) {
    for (const auto& p : prev_f)
      if (same_key(r.key, p.key)) ++ops;
  }
  return ops;
}

// Draws a rule set with distinct keys, each key randomly a flow or a group
// rule. Group weights are unit counts over their total, the shape the routing
// layer produces.
inline void random_rule_set(Rng& rng, int max_rules,
                            std::vector<FlowRule>* flows,
                            std::vector<GroupRule>* groups) {
  flows->clear();
  groups->clear();
  const int count = static_cast<int>(rng.next_below(
      static_cast<std::uint64_t>(max_rules) + 1));
  std::vector<RuleKey> keys;
  while (static_cast<int>(keys.size()) < count) {
    RuleKey k{static_cast<int>(rng.next_below(6)),
              static_cast<int>(rng.next_below(3)),
              static_cast<int>(rng.next_below(6))};
    bool dup = false;
    for (const auto& existing : keys)
      if (same_key(existing, k)) dup = true;
    if (!dup) keys.push_back(k);
  }
  for (const RuleKey& k : keys) {
    if (rng.next_below(2) == 0) {
      flows->push_back({k, static_cast<int>(rng.next_below(8))});
      continue;
    }
    const int branch_count = 2 + static_cast<int>(rng.next_below(2));
    std::vector<int> edges;
    while (static_cast<int>(edges.size()) < branch_count) {
      const int e = static_cast<int>(rng.next_below(8));
      if (std::find(edges.begin(), edges.end(), e) == edges.end())
        edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    std::vector<std::int64_t> counts;
    std::int64_t total = 0;
    for (int i = 0; i < branch_count; ++i) {
      counts.push_back(1 + static_cast<std::int64_t>(rng.next_below(4)));
      total += counts.back();
    }
    GroupRule gr;
    gr.key = k;
    for (int i = 0; i < branch_count; ++i) {
      gr.branches.push_back({edges[static_cast<std::size_t>(i)],
                             Rational(counts[static_cast<std::size_t>(i)], total)});
    }
    groups->push_back(std::move(gr));
  }
}

// Reference migration counts by quadratic scan over the two host lists.
inline void hosts_diff(const std::vector<std::pair<int, int>>& prev,
                       const std::vector<std::pair<int, int>>& next,
                       std::int64_t* added, std::int64_t* removed) {
  *added = 0;
  *removed = 0;
  for (const auto& h : next) {
    bool found = false;
    for (const auto& p : prev)
      if (p == h) found = true;
    if (!found) ++*added;
  }
  for (const auto& h : prev) {
    bool found = false;
    for (const auto& p : next)
      if (p == h) found = true;
    if (!found) ++*removed;
  }
}

// Random sorted host list over 10 nodes and 3 services.
inline std::vector<std::pair<int, int>> random_hosts(Rng& rng) {
  const int count = static_cast<int>(rng.next_below(9));
  std::vector<std::pair<int, int>> hosts;
  while (static_cast<int>(hosts.size()) < count) {
    std::pair<int, int> h{static_cast<int>(rng.next_below(10)),
                          static_cast<int>(rng.next_below(3))};
    if (std::find(hosts.begin(), hosts.end(), h) == hosts.end())
      hosts.push_back(h);
  }
  std::sort(hosts.begin(), hosts.end());
  return hosts;
}

// Derives a successor rule set by keeping, dropping, rewriting or switching
// the kind of each rule, then sprinkling in fresh ones, so diffs of every
// flavor show up: pure adds, pure deletes, content changes under one key and
// flow/group kind switches.
inline void mutate_rule_set(Rng& rng, const std::vector<FlowRule>& base_f,
                            const std::vector<GroupRule>& base_g,
                            std::vector<FlowRule>* flows,
                            std::vector<GroupRule>* groups) {
  flows->clear();
  groups->clear();
  auto fresh_group_for = [&](const RuleKey& k) {
    GroupRule gr;
    gr.key = k;
    const int e0 = static_cast<int>(rng.next_below(7));
    const std::int64_t c0 = 1 + static_cast<std::int64_t>(rng.next_below(4));
    const std::int64_t c1 = 1 + static_cast<std::int64_t>(rng.next_below(4));
    gr.branches = {{e0, Rational(c0, c0 + c1)}, {e0 + 1, Rational(c1, c0 + c1)}};
    return gr;
  };
  for (const FlowRule& r : base_f) {
    const std::uint64_t roll = rng.next_below(100);
    if (roll < 50) {
      flows->push_back(r);
    } else if (roll < 70) {
      // dropped
    } else if (roll < 85) {
      flows->push_back({r.key, static_cast<int>(rng.next_below(8))});
    } else {
      groups->push_back(fresh_group_for(r.key));
    }
  }
  for (const GroupRule& r : base_g) {
    const std::uint64_t roll = rng.next_below(100);
    if (roll < 50) {
      groups->push_back(r);
    } else if (roll < 70) {
      // dropped
    } else if (roll < 85) {
      groups->push_back(fresh_group_for(r.key));
    } else {
      flows->push_back({r.key, static_cast<int>(rng.next_below(8))});
    }
  }
  std::vector<FlowRule> extra_f;
  std::vector<GroupRule> extra_g;
  random_rule_set(rng, 4, &extra_f, &extra_g);
  auto key_taken = [&](const RuleKey& k) {
    for (const auto& r : *flows)
      if (same_key(r.key, k)) return true;
    for (const auto& r : *groups)
      if (same_key(r.key, k)) return true;
    return false;
  };
  for (const auto& r : extra_f)
    if (!key_taken(r.key)) flows->push_back(r);
  for (const auto& r : extra_g)
    if (!key_taken(r.key)) groups->push_back(r);
}

// Minimum over every way of routing the demand units of non-host origins to
// the hosts, of the normalized infrastructure delay (every edge's delay at
// its final load over its delay at the highest admissible load). Paths may be
// any loopless walk; per-origin unit orderings are collapsed by forcing
// non-decreasing path indices. Returns nothing when no routing respects
// capacity.
class RoutingOracle {
 public:
  RoutingOracle(const NetworkGraph& g, const std::vector<DelayLut>& luts)
      : g_(g), luts_(luts) {}

  std::optional<double> best_norm_delay(const DemandMatrix& demands,
                                        const std::vector<int>& host_set) {
    const int n = g_.node_count();
    std::vector<char> is_host(static_cast<std::size_t>(n), 0);
    for (int m : host_set) is_host[static_cast<std::size_t>(m)] = 1;

    // Per non-host origin: unit count and all loopless paths to any host.
    origins_.clear();
    for (int v = 0; v < n; ++v) {
      if (is_host[static_cast<std::size_t>(v)]) continue;
      const std::int64_t b = demands.at(v, 0);
      if (b == 0) continue;
      Origin o;
      o.units = b;
      std::vector<char> visited(static_cast<std::size_t>(n), 0);
      std::vector<int> edges;
      visited[static_cast<std::size_t>(v)] = 1;
      collect_paths(v, is_host, &visited, &edges, &o.paths);
      if (o.paths.empty()) return std::nullopt;
      origins_.push_back(std::move(o));
    }

    loads_.assign(static_cast<std::size_t>(g_.edge_count()), 0);
    best_ = std::numeric_limits<double>::infinity();
    descend(0, 0, 0);
    if (best_ == std::numeric_limits<double>::infinity()) return std::nullopt;
    return best_;
  }

 private:
  struct Origin {
    std::int64_t units{0};
    std::vector<std::vector<int>> paths;  // edge index lists
  };

  void collect_paths(int u, const std::vector<char>& is_host,
                     std::vector<char>* visited, std::vector<int>* edges,
                     std::vector<std::vector<int>>* out) {
    for (const auto& [nbr, e] : g_.neighbors(u)) {
      if ((*visited)[static_cast<std::size_t>(nbr)]) continue;
      edges->push_back(e);
      if (is_host[static_cast<std::size_t>(nbr)]) {
        out->push_back(*edges);
      } else {
        (*visited)[static_cast<std::size_t>(nbr)] = 1;
        collect_paths(nbr, is_host, visited, edges, out);
        (*visited)[static_cast<std::size_t>(nbr)] = 0;
      }
      edges->pop_back();
    }
  }

  double current_norm() const {
    double sum = 0;
    for (std::size_t e = 0; e < loads_.size(); ++e)
      sum += luts_[e].at_units(loads_[e]) / luts_[e].last();
    return sum;
  }

  // Assigns units origin by origin; within an origin the path index may not
  // decrease, so each multiset of paths is tried exactly once. The running
  // normalized delay only grows with extra load, so it prunes.
  void descend(std::size_t oi, std::int64_t unit, std::size_t min_path) {
    if (current_norm() >= best_) return;
    if (oi == origins_.size()) {
      best_ = current_norm();
      return;
    }
    const Origin& o = origins_[oi];
    if (unit == o.units) {
      descend(oi + 1, 0, 0);
      return;
    }
    for (std::size_t pi = min_path; pi < o.paths.size(); ++pi) {
      bool fits = true;
      for (int e : o.paths[pi]) {
        if (loads_[static_cast<std::size_t>(e)] >=
            luts_[static_cast<std::size_t>(e)].max_load_units()) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      for (int e : o.paths[pi]) ++loads_[static_cast<std::size_t>(e)];
      descend(oi, unit + 1, pi);
      for (int e : o.paths[pi]) --loads_[static_cast<std::size_t>(e)];
    }
  }

  const NetworkGraph& g_;
  const std::vector<DelayLut>& luts_;
  std::vector<Origin> origins_;
  std::vector<std::int64_t> loads_;
  double best_{0};
};

}  // namespace oracle
