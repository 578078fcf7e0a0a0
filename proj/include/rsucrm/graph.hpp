#pragma once

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace rsucrm {

// Undirected multigraph-free network topology. Edges are stored once with
// u < v; direction of travel is implied by the switch a rule sits on.
class NetworkGraph {
 public:
  struct Edge {
    int u{0};
    int v{0};
    double capacity_mbps{0};
  };

  NetworkGraph() = default;

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  const std::string& node_name(int n) const { return nodes_[static_cast<std::size_t>(n)]; }

  int node_index(const std::string& name) const {
    for (int i = 0; i < node_count(); ++i) {
      if (nodes_[static_cast<std::size_t>(i)] == name) return i;
    }
    throw std::invalid_argument("unknown node '" + name + "'");
  }

  // Neighbors of n as (neighbor, edge index), sorted by neighbor index.
  const std::vector<std::pair<int, int>>& neighbors(int n) const {
    return adj_[static_cast<std::size_t>(n)];
  }

  // Index of edge {a, b}, or -1 when absent.
  int edge_between(int a, int b) const {
    for (const auto& [nbr, e] : adj_[static_cast<std::size_t>(a)]) {
      if (nbr == b) return e;
    }
    return -1;
  }

  int other_end(int e, int from) const {
    const Edge& ed = edges_[static_cast<std::size_t>(e)];
    return ed.u == from ? ed.v : ed.u;
  }

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    if (a.nodes_ != b.nodes_ || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
      if (a.edges_[i].u != b.edges_[i].u || a.edges_[i].v != b.edges_[i].v ||
          a.edges_[i].capacity_mbps != b.edges_[i].capacity_mbps)
        return false;
    }
    return true;
  }

  friend NetworkGraph make_graph(
      std::vector<std::string> nodes,
      const std::vector<std::tuple<std::string, std::string, double>>& edges);

 private:
  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
};

inline NetworkGraph make_graph(
    std::vector<std::string> nodes,
    const std::vector<std::tuple<std::string, std::string, double>>& edges) {
  NetworkGraph g;
  if (nodes.empty()) throw std::invalid_argument("graph has no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (nodes[i] == nodes[j])
        throw std::invalid_argument("duplicate node '" + nodes[i] + "'");
    }
  }
  g.nodes_ = std::move(nodes);
  g.adj_.resize(g.nodes_.size());
  for (const auto& [ua, va, cap] : edges) {
    int u = g.node_index(ua);
    int v = g.node_index(va);
    if (u == v)
      throw std::invalid_argument("self-loop (" + ua + "," + va + ")");
    if (cap <= 0)
      throw std::invalid_argument("edge (" + ua + "," + va +
                                  ") has non-positive capacity");
    if (u > v) std::swap(u, v);
    if (g.edge_between(u, v) >= 0)
      throw std::invalid_argument("duplicate edge (" + ua + "," + va + ")");
    const int e = g.edge_count();
    g.edges_.push_back({u, v, cap});
    g.adj_[static_cast<std::size_t>(u)].push_back({v, e});
    g.adj_[static_cast<std::size_t>(v)].push_back({u, e});
  }
  for (auto& lst : g.adj_) std::sort(lst.begin(), lst.end());

  // Connectivity: every demand origin must be able to reach every host.
  std::vector<char> seen(g.nodes_.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int n = q.front();
    q.pop();
    for (const auto& [nbr, e] : g.neighbors(n)) {
      (void)e;
      if (!seen[static_cast<std::size_t>(nbr)]) {
        seen[static_cast<std::size_t>(nbr)] = 1;
        ++reached;
        q.push(nbr);
      }
    }
  }
  if (reached != g.node_count())
    throw std::invalid_argument("graph is not connected");
  return g;
}

// Hop distances from every node to `target` (BFS).
inline std::vector<int> hop_distances(const NetworkGraph& g, int target) {
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(target)] = 0;
  q.push(target);
  while (!q.empty()) {
    const int n = q.front();
    q.pop();
    for (const auto& [nbr, e] : g.neighbors(n)) {
      (void)e;
      if (dist[static_cast<std::size_t>(nbr)] < 0) {
        dist[static_cast<std::size_t>(nbr)] = dist[static_cast<std::size_t>(n)] + 1;
        q.push(nbr);
      }
    }
  }
  return dist;
}

}  // namespace rsucrm
