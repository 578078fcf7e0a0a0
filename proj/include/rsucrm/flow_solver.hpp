#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rsucrm/graph.hpp"
#include "rsucrm/routing.hpp"

namespace rsucrm {

// Minimum-cost routing of unit demands to a host set over undirected edges
// whose cost is convex in the carried load. Each edge e admits at most cap[e]
// units; sending its (j+1)-th unit costs marg[e][j], a non-decreasing
// sequence. Convexity makes unit-by-unit successive shortest paths exact:
// after each augmentation the residual network stays free of negative cycles,
// which is certified by the node potentials.
//
// The object keeps its scratch buffers so a host-set sweep can reuse one
// instance across thousands of solves without allocating.
class ConvexRoutingSolver {
 public:
  ConvexRoutingSolver(const NetworkGraph& g, std::vector<std::int64_t> cap,
                      std::vector<std::vector<double>> marg)
      : g_(&g), cap_(std::move(cap)), marg_(std::move(marg)) {
    const int n = g.node_count();
    n_total_ = n + 2;  // graph nodes + sink + source
    sink_ = n;
    source_ = n + 1;
    dist_.resize(static_cast<std::size_t>(n_total_));
    done_.resize(static_cast<std::size_t>(n_total_));
    pi_.resize(static_cast<std::size_t>(n_total_));
    parent_node_.resize(static_cast<std::size_t>(n_total_));
    parent_edge_.resize(static_cast<std::size_t>(n_total_));
    net_.resize(static_cast<std::size_t>(g.edge_count()));
    remaining_.resize(static_cast<std::size_t>(n));
  }

  // Net signed flow per edge (positive means from edge.u to edge.v), or
  // nullopt when the demand cannot be carried.
  std::optional<std::vector<std::int64_t>> solve(
      const std::vector<std::int64_t>& supplies, const std::vector<char>& is_host) {
    const int n = g_->node_count();
    std::fill(net_.begin(), net_.end(), 0);
    std::fill(pi_.begin(), pi_.end(), 0.0);
    remaining_ = supplies;
    std::int64_t left = 0;
    for (int v = 0; v < n; ++v) {
      if (is_host[static_cast<std::size_t>(v)] &&
          remaining_[static_cast<std::size_t>(v)] != 0)
        throw std::invalid_argument("solver: host nodes cannot carry remote demand");
      left += remaining_[static_cast<std::size_t>(v)];
    }

    while (left > 0) {
      if (!dijkstra(is_host)) return std::nullopt;
      // Walk sink -> source, shifting one unit.
      int cur = sink_;
      while (cur != source_) {
        const int prev = parent_node_[static_cast<std::size_t>(cur)];
        const int e = parent_edge_[static_cast<std::size_t>(cur)];
        if (e >= 0) {
          if (g_->edge(e).u == prev)
            ++net_[static_cast<std::size_t>(e)];
          else
            --net_[static_cast<std::size_t>(e)];
        } else if (prev == source_) {
          --remaining_[static_cast<std::size_t>(cur)];
        }
        cur = prev;
      }
      --left;
      const double dt = dist_[static_cast<std::size_t>(sink_)];
      for (int v = 0; v < n_total_; ++v) {
        pi_[static_cast<std::size_t>(v)] +=
            std::min(dist_[static_cast<std::size_t>(v)], dt);
      }
    }
    return net_;
  }

 private:
  bool dijkstra(const std::vector<char>& is_host) {
    const double inf = std::numeric_limits<double>::infinity();
    std::fill(dist_.begin(), dist_.end(), inf);
    std::fill(done_.begin(), done_.end(), 0);
    dist_[static_cast<std::size_t>(source_)] = 0;
    parent_node_[static_cast<std::size_t>(source_)] = source_;

    const int n = g_->node_count();
    for (;;) {
      int a = -1;
      double best = inf;
      for (int v = 0; v < n_total_; ++v) {
        if (!done_[static_cast<std::size_t>(v)] &&
            dist_[static_cast<std::size_t>(v)] < best) {
          best = dist_[static_cast<std::size_t>(v)];
          a = v;
        }
      }
      if (a < 0) break;
      done_[static_cast<std::size_t>(a)] = 1;
      if (a == sink_) break;
      const double da = dist_[static_cast<std::size_t>(a)];

      auto relax = [&](int b, double cost, int via_edge) {
        // Reduced cost; tiny negatives are float noise from the potentials.
        double rc = cost + pi_[static_cast<std::size_t>(a)] -
                    pi_[static_cast<std::size_t>(b)];
        if (rc < 0) rc = 0;
        if (da + rc < dist_[static_cast<std::size_t>(b)]) {
          dist_[static_cast<std::size_t>(b)] = da + rc;
          parent_node_[static_cast<std::size_t>(b)] = a;
          parent_edge_[static_cast<std::size_t>(b)] = via_edge;
        }
      };

      if (a == source_) {
        for (int o = 0; o < n; ++o) {
          if (remaining_[static_cast<std::size_t>(o)] > 0) relax(o, 0, -1);
        }
        continue;
      }
      if (is_host[static_cast<std::size_t>(a)]) relax(sink_, 0, -1);
      for (const auto& [nbr, e] : g_->neighbors(a)) {
        const std::int64_t f_ab =
            g_->edge(e).u == a ? net_[static_cast<std::size_t>(e)]
                               : -net_[static_cast<std::size_t>(e)];
        if (f_ab >= 0) {
          if (f_ab < cap_[static_cast<std::size_t>(e)]) {
            relax(nbr, marg_[static_cast<std::size_t>(e)][static_cast<std::size_t>(f_ab)], e);
          }
        } else {
          relax(nbr, -marg_[static_cast<std::size_t>(e)][static_cast<std::size_t>(-f_ab - 1)], e);
        }
      }
    }
    return dist_[static_cast<std::size_t>(sink_)] <
           std::numeric_limits<double>::infinity();
  }

  const NetworkGraph* g_;
  std::vector<std::int64_t> cap_;
  std::vector<std::vector<double>> marg_;
  int n_total_{0};
  int sink_{0};
  int source_{0};
  std::vector<double> dist_;
  std::vector<char> done_;
  std::vector<double> pi_;
  std::vector<int> parent_node_;
  std::vector<int> parent_edge_;
  std::vector<std::int64_t> net_;
  std::vector<std::int64_t> remaining_;
};

// Removes directed cycles from a net flow. With strictly increasing marginals
// an optimal flow has none and this is a no-op; with flat (zero) marginals
// the solver may legitimately produce them, and dropping the circulation
// changes neither feasibility nor cost.
inline void cancel_flow_cycles(const NetworkGraph& g,
                               std::vector<std::int64_t>& net) {
  const int n = g.node_count();
  for (;;) {
    // DFS over arcs with positive flow, looking for a back arc.
    std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0 new, 1 open, 2 done
    std::vector<int> chain;
    std::vector<int> cycle;
    std::function<bool(int)> dfs = [&](int u) -> bool {
      color[static_cast<std::size_t>(u)] = 1;
      chain.push_back(u);
      for (const auto& [nbr, e] : g.neighbors(u)) {
        const std::int64_t f =
            g.edge(e).u == u ? net[static_cast<std::size_t>(e)]
                             : -net[static_cast<std::size_t>(e)];
        if (f <= 0) continue;
        if (color[static_cast<std::size_t>(nbr)] == 1) {
          auto it = std::find(chain.begin(), chain.end(), nbr);
          cycle.assign(it, chain.end());
          return true;
        }
        if (color[static_cast<std::size_t>(nbr)] == 0 && dfs(nbr)) return true;
      }
      color[static_cast<std::size_t>(u)] = 2;
      chain.pop_back();
      return false;
    };
    bool found = false;
    for (int s = 0; s < n && !found; ++s) {
      if (color[static_cast<std::size_t>(s)] == 0) found = dfs(s);
    }
    if (!found) return;

    std::int64_t slack = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int u = cycle[i];
      const int v = cycle[(i + 1) % cycle.size()];
      const int e = g.edge_between(u, v);
      const std::int64_t f = g.edge(e).u == u ? net[static_cast<std::size_t>(e)]
                                              : -net[static_cast<std::size_t>(e)];
      slack = std::min(slack, f);
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const int u = cycle[i];
      const int v = cycle[(i + 1) % cycle.size()];
      const int e = g.edge_between(u, v);
      if (g.edge(e).u == u)
        net[static_cast<std::size_t>(e)] -= slack;
      else
        net[static_cast<std::size_t>(e)] += slack;
    }
  }
}

// Splits an acyclic net flow into one simple path per supplied unit. Origins
// are drained in node order; each walk follows the smallest-index neighbor
// with remaining arc flow and stops at the first host that still has units to
// absorb. Flow conservation guarantees the walk never strands.
inline std::vector<UnitRoute> decompose_flow(
    const NetworkGraph& g, const std::vector<std::int64_t>& net, int service,
    const std::vector<std::int64_t>& supplies, const std::vector<char>& is_host) {
  const int n = g.node_count();
  std::vector<std::int64_t> rem_fwd(static_cast<std::size_t>(g.edge_count()));
  std::vector<std::int64_t> rem_bwd(static_cast<std::size_t>(g.edge_count()));
  for (int e = 0; e < g.edge_count(); ++e) {
    rem_fwd[static_cast<std::size_t>(e)] =
        std::max<std::int64_t>(net[static_cast<std::size_t>(e)], 0);
    rem_bwd[static_cast<std::size_t>(e)] =
        std::max<std::int64_t>(-net[static_cast<std::size_t>(e)], 0);
  }
  std::vector<std::int64_t> absorbed(static_cast<std::size_t>(n), 0);
  for (int v = 0; v < n; ++v) {
    if (!is_host[static_cast<std::size_t>(v)]) continue;
    std::int64_t in = 0;
    for (const auto& [nbr, e] : g.neighbors(v)) {
      (void)nbr;
      const std::int64_t f = g.edge(e).u == v ? net[static_cast<std::size_t>(e)]
                                              : -net[static_cast<std::size_t>(e)];
      in -= f;  // inflow minus outflow
    }
    absorbed[static_cast<std::size_t>(v)] = in;
    if (in < 0) throw std::runtime_error("decompose: host emits flow");
  }

  std::vector<UnitRoute> units;
  for (int origin = 0; origin < n; ++origin) {
    for (std::int64_t s = 0; s < supplies[static_cast<std::size_t>(origin)]; ++s) {
      UnitRoute u;
      u.node = origin;
      u.service = service;
      u.path.assign(1, origin);
      int cur = origin;
      for (;;) {
        if (is_host[static_cast<std::size_t>(cur)] &&
            absorbed[static_cast<std::size_t>(cur)] > 0) {
          --absorbed[static_cast<std::size_t>(cur)];
          break;
        }
        int next = -1;
        int via = -1;
        for (const auto& [nbr, e] : g.neighbors(cur)) {
          const std::int64_t f = g.edge(e).u == cur
                                     ? rem_fwd[static_cast<std::size_t>(e)]
                                     : rem_bwd[static_cast<std::size_t>(e)];
          if (f > 0) {
            next = nbr;
            via = e;
            break;
          }
        }
        if (next < 0) throw std::runtime_error("decompose: walk stranded");
        if (g.edge(via).u == cur)
          --rem_fwd[static_cast<std::size_t>(via)];
        else
          --rem_bwd[static_cast<std::size_t>(via)];
        u.path.push_back(next);
        cur = next;
        if (static_cast<int>(u.path.size()) > n)
          throw std::runtime_error("decompose: walk does not terminate");
      }
      u.host = cur;
      units.push_back(std::move(u));
    }
  }
  return units;
}

}  // namespace rsucrm
