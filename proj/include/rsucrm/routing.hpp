#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rsucrm/delay.hpp"
#include "rsucrm/graph.hpp"
#include "rsucrm/rng.hpp"
#include "rsucrm/rules.hpp"
#include "rsucrm/scenario.hpp"

namespace rsucrm {

// A loopless node sequence from origin to host. Empty means the demand is
// served on its own node and never touches the network.
using Path = std::vector<int>;

inline int path_hops(const Path& p) {
  return p.empty() ? 0 : static_cast<int>(p.size()) - 1;
}

// The k-shortest loopless paths for every ordered node pair, ordered by hop
// count and lexicographically by node sequence within equal hop counts.
class CandidatePaths {
 public:
  CandidatePaths() = default;
  CandidatePaths(int n, int limit)
      : n_(n), limit_(limit),
        table_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {}

  int limit() const { return limit_; }

  const std::vector<Path>& between(int s, int t) const {
    return table_[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(t)];
  }

  bool contains(int s, int t, const Path& p) const {
    const auto& lst = between(s, t);
    return std::find(lst.begin(), lst.end(), p) != lst.end();
  }

  std::vector<Path>& mutable_between(int s, int t) {
    return table_[static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) +
                  static_cast<std::size_t>(t)];
  }

 private:
  int n_{0};
  int limit_{0};
  std::vector<std::vector<Path>> table_;
};

// Iterative deepening by hop count with a BFS-distance admissibility prune.
// Exploring neighbors in ascending index order makes the output order (and
// therefore everything downstream) deterministic.
inline CandidatePaths enumerate_paths(const NetworkGraph& g, int limit) {
  if (limit < 1) throw std::invalid_argument("path limit below 1");
  const int n = g.node_count();
  CandidatePaths cp(n, limit);
  std::vector<int> stack_nodes;
  std::vector<char> visited(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    const std::vector<int> dist = hop_distances(g, t);
    for (int s = 0; s < n; ++s) {
      auto& out = cp.mutable_between(s, t);
      if (s == t) {
        out.push_back({});
        continue;
      }
      for (int max_hops = dist[static_cast<std::size_t>(s)];
           max_hops <= n - 1 && static_cast<int>(out.size()) < limit;
           ++max_hops) {
        stack_nodes.assign(1, s);
        std::fill(visited.begin(), visited.end(), 0);
        visited[static_cast<std::size_t>(s)] = 1;
        std::function<void(int, int)> dfs = [&](int u, int depth) {
          if (static_cast<int>(out.size()) >= limit) return;
          if (depth == max_hops) {
            if (u == t) out.push_back(stack_nodes);
            return;
          }
          for (const auto& [nbr, e] : g.neighbors(u)) {
            (void)e;
            if (visited[static_cast<std::size_t>(nbr)]) continue;
            if (depth + 1 + dist[static_cast<std::size_t>(nbr)] > max_hops)
              continue;
            visited[static_cast<std::size_t>(nbr)] = 1;
            stack_nodes.push_back(nbr);
            dfs(nbr, depth + 1);
            stack_nodes.pop_back();
            visited[static_cast<std::size_t>(nbr)] = 0;
          }
        };
        dfs(s, 0);
      }
    }
  }
  return cp;
}

// One lut interval of one service's demand, pinned to its origin, chosen host
// and path.
struct UnitRoute {
  int node{0};
  int service{0};
  int host{0};
  Path path;  // empty when host == node

  friend bool operator==(const UnitRoute&, const UnitRoute&) = default;
};

struct Assignment {
  std::vector<UnitRoute> units;
  std::vector<std::int64_t> edge_load_units;  // per edge index

  std::int64_t total_units() const {
    return static_cast<std::int64_t>(units.size());
  }
};

inline std::vector<int> path_edges(const NetworkGraph& g, const Path& p) {
  std::vector<int> edges;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    const int e = g.edge_between(p[i], p[i + 1]);
    if (e < 0) throw std::invalid_argument("path uses a missing edge");
    edges.push_back(e);
  }
  return edges;
}

// Greedy unit-by-unit placement. Host-local demand is pinned first and is
// free. Remaining units are shuffled once, then each takes the (host, path)
// candidate with the least marginal delay at the loads left by its
// predecessors; capacity admits a unit only if every edge stays at or below
// capacity minus one interval. Ties are broken uniformly at random.
inline std::optional<Assignment> route_units(
    const NetworkGraph& g, const std::vector<DelayLut>& luts,
    const DemandMatrix& demands, const std::vector<std::vector<int>>& hosts,
    const CandidatePaths& paths, std::uint64_t order_seed) {
  const int n = g.node_count();
  const int n_services = demands.n_services;
  if (static_cast<int>(hosts.size()) != n_services)
    throw std::invalid_argument("route_units: one host list per service required");
  for (const auto& h : hosts) {
    if (h.empty())
      throw std::invalid_argument("route_units: empty host set for a service");
  }

  std::vector<std::vector<char>> is_host(
      static_cast<std::size_t>(n_services),
      std::vector<char>(static_cast<std::size_t>(n), 0));
  for (int k = 0; k < n_services; ++k) {
    for (int m : hosts[static_cast<std::size_t>(k)])
      is_host[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = 1;
  }

  Assignment as;
  as.edge_load_units.assign(static_cast<std::size_t>(g.edge_count()), 0);

  // Local units first, in (node, service) order.
  std::vector<std::pair<int, int>> pending;
  for (int node = 0; node < n; ++node) {
    for (int k = 0; k < n_services; ++k) {
      const std::int64_t b = demands.at(node, k);
      if (b == 0) continue;
      if (is_host[static_cast<std::size_t>(k)][static_cast<std::size_t>(node)]) {
        for (std::int64_t i = 0; i < b; ++i)
          as.units.push_back({node, k, node, {}});
      } else {
        for (std::int64_t i = 0; i < b; ++i) pending.push_back({node, k});
      }
    }
  }

  Rng order_rng(derive_seed(order_seed, {seed_tag::route_order}));
  Rng tie_rng(derive_seed(order_seed, {seed_tag::route_tie}));
  order_rng.shuffle(pending);

  // Candidate (host, path) options per origin/service, precomputed with edge
  // index lists so the hot loop only touches load counters and lut buckets.
  struct Cand {
    int host;
    const Path* path;
    std::vector<int> edges;
  };
  std::map<std::pair<int, int>, std::vector<Cand>> cands;
  auto candidates_for = [&](int node, int k) -> const std::vector<Cand>& {
    auto it = cands.find({node, k});
    if (it != cands.end()) return it->second;
    std::vector<Cand> list;
    for (int m : hosts[static_cast<std::size_t>(k)]) {
      for (const Path& p : paths.between(node, m)) {
        list.push_back({m, &p, path_edges(g, p)});
      }
    }
    return cands.emplace(std::pair<int, int>{node, k}, std::move(list))
        .first->second;
  };

  std::vector<std::size_t> tied;
  for (const auto& [node, k] : pending) {
    const auto& list = candidates_for(node, k);
    double best = 0;
    tied.clear();
    for (std::size_t ci = 0; ci < list.size(); ++ci) {
      const Cand& c = list[ci];
      bool ok = true;
      double delay = 0;
      for (int e : c.edges) {
        const std::int64_t load = as.edge_load_units[static_cast<std::size_t>(e)];
        if (load >= luts[static_cast<std::size_t>(e)].max_load_units()) {
          ok = false;
          break;
        }
        delay += luts[static_cast<std::size_t>(e)].buckets[static_cast<std::size_t>(load)];
      }
      if (!ok) continue;
      if (tied.empty() || delay < best) {
        best = delay;
        tied.assign(1, ci);
      } else if (delay == best) {
        tied.push_back(ci);
      }
    }
    if (tied.empty()) return std::nullopt;
    const std::size_t pick =
        tied.size() == 1
            ? tied[0]
            : tied[static_cast<std::size_t>(tie_rng.next_below(tied.size()))];
    const Cand& c = list[pick];
    for (int e : c.edges) ++as.edge_load_units[static_cast<std::size_t>(e)];
    as.units.push_back({node, k, c.host, *c.path});
  }
  return as;
}

// Sum over all units of the unit's path delay evaluated at the final loads.
inline double total_unit_delay(const NetworkGraph& g,
                               const std::vector<DelayLut>& luts,
                               const Assignment& as) {
  double sum = 0;
  for (const UnitRoute& u : as.units) {
    for (std::size_t i = 0; i + 1 < u.path.size(); ++i) {
      const int e = g.edge_between(u.path[i], u.path[i + 1]);
      sum += luts[static_cast<std::size_t>(e)].at_units(
          as.edge_load_units[static_cast<std::size_t>(e)]);
    }
  }
  return sum;
}

// Folds unit routes into per-switch forwarding state. At every switch crossed
// by a (service, host) commodity, the units that leave on one edge only form
// a flow rule; a split becomes a group rule whose branch weights are the unit
// counts normalized exactly.
inline void derive_rules(const NetworkGraph& g, const Assignment& as,
                         std::vector<FlowRule>* flows,
                         std::vector<GroupRule>* groups) {
  std::map<RuleKey, std::map<int, std::int64_t>> out_counts;
  for (const UnitRoute& u : as.units) {
    for (std::size_t i = 0; i + 1 < u.path.size(); ++i) {
      const int sw = u.path[i];
      const int e = g.edge_between(u.path[i], u.path[i + 1]);
      ++out_counts[{sw, u.service, u.host}][e];
    }
  }
  flows->clear();
  groups->clear();
  for (const auto& [key, by_edge] : out_counts) {
    if (by_edge.size() == 1) {
      flows->push_back({key, by_edge.begin()->first});
      continue;
    }
    std::int64_t total = 0;
    for (const auto& [e, cnt] : by_edge) total += cnt;
    GroupRule gr;
    gr.key = key;
    for (const auto& [e, cnt] : by_edge) {
      gr.branches.push_back({e, Rational(cnt, total)});
    }
    groups->push_back(std::move(gr));
  }
}

}  // namespace rsucrm
