#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "rsucrm/graph.hpp"
#include "rsucrm/routing.hpp"
#include "rsucrm/rules.hpp"

namespace rsucrm {

// Recomputes per-edge loads purely from the forwarding rules and the
// injected unit counts, as the switches themselves would spread traffic.
//
// Weighted splits can feed each other in cycles across different commodities
// or even within one (two units may traverse a shared switch in opposite
// senses), so per-commodity through-flows are obtained as the solution of a
// linear system rather than by walking paths. The system is solved in
// floating point, rounded, and then every equation is re-checked in exact
// integer arithmetic; any residue means the rules do not reproduce integral
// unit flows and is reported as an error.
inline std::vector<std::int64_t> replay_rules(
    const NetworkGraph& g, const std::vector<FlowRule>& flows,
    const std::vector<GroupRule>& groups, const Assignment& as) {
  const int n = g.node_count();
  std::vector<std::int64_t> loads(static_cast<std::size_t>(g.edge_count()), 0);

  // Normalize both rule kinds into (key -> branch list).
  std::map<RuleKey, std::vector<GroupRule::Branch>> table;
  for (const FlowRule& f : flows) {
    if (table.count(f.key)) throw std::runtime_error("replay: duplicate rule key");
    table[f.key] = {{f.out_edge, Rational(1, 1)}};
  }
  for (const GroupRule& gr : groups) {
    if (table.count(gr.key)) throw std::runtime_error("replay: duplicate rule key");
    table[gr.key] = gr.branches;
  }

  // Injections per commodity (service, dest): units that enter the network.
  std::map<std::pair<int, int>, std::vector<std::int64_t>> inj;
  for (const UnitRoute& u : as.units) {
    if (u.path.empty()) continue;
    auto& v = inj[{u.service, u.host}];
    if (v.empty()) v.assign(static_cast<std::size_t>(n), 0);
    ++v[static_cast<std::size_t>(u.node)];
  }

  for (const auto& [commodity, injections] : inj) {
    const auto [service, dest] = commodity;

    // Switches holding a rule for this commodity, in index order.
    std::vector<int> sw_nodes;
    std::vector<int> sw_of_node(static_cast<std::size_t>(n), -1);
    for (const auto& [key, branches] : table) {
      if (key.service == service && key.dest == dest) {
        sw_of_node[static_cast<std::size_t>(key.sw)] =
            static_cast<int>(sw_nodes.size());
        sw_nodes.push_back(key.sw);
      }
    }
    const int m = static_cast<int>(sw_nodes.size());

    for (int node = 0; node < n; ++node) {
      if (injections[static_cast<std::size_t>(node)] > 0 &&
          sw_of_node[static_cast<std::size_t>(node)] < 0 && node != dest)
        throw std::runtime_error("replay: injected traffic has no rule at its origin");
    }

    // T(s) = inj(s) + sum over upstream branches into s of w * T(upstream).
    std::vector<std::vector<double>> a(
        static_cast<std::size_t>(m),
        std::vector<double>(static_cast<std::size_t>(m + 1), 0));
    for (int i = 0; i < m; ++i) {
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
      a[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
          static_cast<double>(injections[static_cast<std::size_t>(sw_nodes[static_cast<std::size_t>(i)])]);
    }
    for (int j = 0; j < m; ++j) {
      const int from = sw_nodes[static_cast<std::size_t>(j)];
      for (const auto& br : table[{from, service, dest}]) {
        const int to = g.other_end(br.out_edge, from);
        if (to == dest) continue;  // absorbed at the host
        const int i = sw_of_node[static_cast<std::size_t>(to)];
        if (i < 0)
          throw std::runtime_error("replay: traffic forwarded to a switch with no rule");
        a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -=
            br.weight.to_double();
      }
    }

    // Gaussian elimination with partial pivoting.
    std::vector<double> t(static_cast<std::size_t>(m), 0);
    {
      auto mat = a;
      for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r) {
          if (std::fabs(mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) >
              std::fabs(mat[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)]))
            piv = r;
        }
        std::swap(mat[static_cast<std::size_t>(col)], mat[static_cast<std::size_t>(piv)]);
        const double d = mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
        if (std::fabs(d) < 1e-12)
          throw std::runtime_error("replay: singular split system");
        for (int r = 0; r < m; ++r) {
          if (r == col) continue;
          const double f =
              mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / d;
          if (f == 0) continue;
          for (int c = col; c <= m; ++c)
            mat[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -=
                f * mat[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
        }
      }
      for (int i = 0; i < m; ++i)
        t[static_cast<std::size_t>(i)] =
            mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] /
            mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }

    std::vector<std::int64_t> ti(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      ti[static_cast<std::size_t>(i)] =
          static_cast<std::int64_t>(std::llround(t[static_cast<std::size_t>(i)]));
      if (std::fabs(t[static_cast<std::size_t>(i)] -
                    static_cast<double>(ti[static_cast<std::size_t>(i)])) > 1e-6)
        throw std::runtime_error("replay: non-integral through-flow");
      if (ti[static_cast<std::size_t>(i)] < 0)
        throw std::runtime_error("replay: negative through-flow");
    }

    // Exact verification: every branch flow w * T must be an integer, and
    // conservation must hold term by term.
    std::vector<__int128> in_flow(static_cast<std::size_t>(m), 0);
    for (int j = 0; j < m; ++j) {
      const int from = sw_nodes[static_cast<std::size_t>(j)];
      for (const auto& br : table[{from, service, dest}]) {
        const __int128 numer =
            static_cast<__int128>(br.weight.num) * ti[static_cast<std::size_t>(j)];
        if (numer % br.weight.den != 0)
          throw std::runtime_error("replay: branch flow is not integral");
        const std::int64_t flow = static_cast<std::int64_t>(numer / br.weight.den);
        loads[static_cast<std::size_t>(br.out_edge)] += flow;
        const int to = g.other_end(br.out_edge, from);
        if (to != dest) {
          in_flow[static_cast<std::size_t>(sw_of_node[static_cast<std::size_t>(to)])] += flow;
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      const __int128 expect =
          in_flow[static_cast<std::size_t>(i)] +
          injections[static_cast<std::size_t>(sw_nodes[static_cast<std::size_t>(i)])];
      if (expect != static_cast<__int128>(ti[static_cast<std::size_t>(i)]))
        throw std::runtime_error("replay: flow conservation failed");
    }
  }
  return loads;
}

}  // namespace rsucrm
