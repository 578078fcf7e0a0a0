#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "rsucrm/delay.hpp"
#include "rsucrm/graph.hpp"
#include "rsucrm/rng.hpp"

namespace rsucrm {

struct ServiceSpec {
  std::string id;
  int host_bound{1};  // max replicas
  double qos_bound_us{std::numeric_limits<double>::infinity()};  // per-unit path delay cap

  bool qos_bounded() const { return std::isfinite(qos_bound_us); }
  double qos_bound_s() const { return qos_bound_us * 1e-6; }

  friend bool operator==(const ServiceSpec& a, const ServiceSpec& b) {
    return a.id == b.id && a.host_bound == b.host_bound &&
           ((a.qos_bound_us == b.qos_bound_us) ||
            (!a.qos_bounded() && !b.qos_bounded()));
  }
};

struct DemandTrace {
  std::vector<double> steps_mbps;
  double sigma{0};  // relative std-dev of per-node demand around the step mean

  friend bool operator==(const DemandTrace& a, const DemandTrace& b) = default;
};

struct Scenario {
  NetworkGraph graph;
  std::vector<ServiceSpec> services;
  DemandTrace trace;
  double lut_interval_mbps{1};
  QueueParams queue;
  int path_limit{4};
  std::uint64_t seed{1};

  friend bool operator==(const Scenario& a, const Scenario& b) {
    return a.graph == b.graph && a.services == b.services && a.trace == b.trace &&
           a.lut_interval_mbps == b.lut_interval_mbps &&
           a.queue.processing_delay_us == b.queue.processing_delay_us &&
           a.queue.packet_size_bytes == b.queue.packet_size_bytes &&
           a.queue.ca == b.queue.ca && a.queue.cs == b.queue.cs &&
           a.queue.propagation_delay_us == b.queue.propagation_delay_us &&
           a.path_limit == b.path_limit && a.seed == b.seed;
  }
};

// Per-node, per-service demand held as integer counts of lut intervals so
// routing and capacity checks stay exact.
struct DemandMatrix {
  int n_nodes{0};
  int n_services{0};
  double interval_mbps{1};
  std::vector<std::int64_t> units;  // row-major [node][service]

  DemandMatrix() = default;
  DemandMatrix(int nodes, int services, double interval)
      : n_nodes(nodes),
        n_services(services),
        interval_mbps(interval),
        units(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(services), 0) {}

  std::int64_t& at(int n, int k) {
    return units[static_cast<std::size_t>(n) * static_cast<std::size_t>(n_services) +
                 static_cast<std::size_t>(k)];
  }
  std::int64_t at(int n, int k) const {
    return units[static_cast<std::size_t>(n) * static_cast<std::size_t>(n_services) +
                 static_cast<std::size_t>(k)];
  }
  double mbps(int n, int k) const {
    return static_cast<double>(at(n, k)) * interval_mbps;
  }
  std::int64_t total_units() const {
    std::int64_t s = 0;
    for (auto u : units) s += u;
    return s;
  }
};

inline void validate_scenario(const Scenario& sc) {
  sc.queue.validate();
  if (sc.lut_interval_mbps <= 0)
    throw std::invalid_argument("$.lut_interval_mbps: non-positive");
  for (int e = 0; e < sc.graph.edge_count(); ++e) {
    const auto& ed = sc.graph.edge(e);
    const double q = ed.capacity_mbps / sc.lut_interval_mbps;
    if (std::fabs(q - std::round(q)) > 1e-9 * std::max(1.0, q) || q < 1)
      throw std::invalid_argument(
          "$.lut_interval_mbps: interval does not divide capacity of edge (" +
          sc.graph.node_name(ed.u) + "," + sc.graph.node_name(ed.v) + ")");
  }
  if (sc.services.empty()) throw std::invalid_argument("$.services: empty");
  for (std::size_t i = 0; i < sc.services.size(); ++i) {
    const auto& s = sc.services[i];
    const std::string at = "$.services[" + std::to_string(i) + "]";
    if (s.id.empty()) throw std::invalid_argument(at + ".id: empty");
    for (std::size_t j = 0; j < i; ++j) {
      if (sc.services[j].id == s.id)
        throw std::invalid_argument(at + ".id: duplicate '" + s.id + "'");
    }
    if (s.host_bound < 1 || s.host_bound > sc.graph.node_count())
      throw std::invalid_argument(at + ".host_bound: out of range");
    if (s.qos_bounded() && s.qos_bound_us <= 0)
      throw std::invalid_argument(at + ".qos_bound_us: non-positive");
  }
  if (sc.trace.steps_mbps.empty())
    throw std::invalid_argument("$.trace.steps_mbps: empty");
  for (double d : sc.trace.steps_mbps) {
    if (d < 0 || !std::isfinite(d))
      throw std::invalid_argument("$.trace.steps_mbps: negative or non-finite");
  }
  if (sc.trace.sigma < 0) throw std::invalid_argument("$.trace.sigma: negative");
  if (sc.path_limit < 1) throw std::invalid_argument("$.path_limit: below 1");
}

// One lut per edge, index-aligned with graph.edges().
inline std::vector<DelayLut> build_luts(const Scenario& sc) {
  std::vector<DelayLut> luts;
  luts.reserve(static_cast<std::size_t>(sc.graph.edge_count()));
  for (const auto& e : sc.graph.edges()) {
    luts.push_back(build_lut(e.capacity_mbps, sc.lut_interval_mbps, sc.queue));
  }
  return luts;
}

// The ten-RSU reference deployment: a ring with three chords, uniform
// 100 Mbps links.
inline NetworkGraph default_topology() {
  std::vector<std::string> nodes;
  for (int i = 0; i < 10; ++i) nodes.push_back(std::to_string(i));
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (int i = 0; i < 10; ++i) {
    edges.emplace_back(std::to_string(i), std::to_string((i + 1) % 10), 100.0);
  }
  edges.emplace_back("0", "5", 100.0);
  edges.emplace_back("2", "7", 100.0);
  edges.emplace_back("4", "9", 100.0);
  return make_graph(std::move(nodes), edges);
}

inline Scenario default_scenario() {
  Scenario sc;
  sc.graph = default_topology();
  sc.services.push_back(
      {"s0", 10, std::numeric_limits<double>::infinity()});
  sc.trace.steps_mbps = {50, 60, 80, 70, 90, 50, 70};
  sc.trace.sigma = 0.05;
  sc.lut_interval_mbps = 1;
  sc.queue.processing_delay_us = 10;
  sc.queue.packet_size_bytes = 800;
  sc.queue.ca = 1.5;
  sc.queue.cs = 1.5;
  sc.queue.propagation_delay_us = 0;
  sc.path_limit = 4;
  sc.seed = 1;
  validate_scenario(sc);
  return sc;
}

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::string& at,
                         std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw std::invalid_argument(at + ": expected object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known)
      throw std::invalid_argument(at + "." + item.key() + ": unknown key");
  }
  for (const char* k : allowed) {
    if (!obj.contains(k))
      throw std::invalid_argument(at + "." + k + ": missing key");
  }
}

inline double get_number(const nlohmann::json& j, const std::string& at) {
  if (!j.is_number())
    throw std::invalid_argument(at + ": expected number");
  return j.get<double>();
}

inline std::string get_string(const nlohmann::json& j, const std::string& at) {
  if (!j.is_string())
    throw std::invalid_argument(at + ": expected string");
  return j.get<std::string>();
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& root) {
  using nlohmann::json;
  detail::require_keys(root, "$",
                       {"nodes", "edges", "services", "trace",
                        "lut_interval_mbps", "queue", "path_limit", "seed"});

  if (!root["nodes"].is_array() || root["nodes"].empty())
    throw std::invalid_argument("$.nodes: expected non-empty array");
  std::vector<std::string> nodes;
  for (std::size_t i = 0; i < root["nodes"].size(); ++i) {
    nodes.push_back(detail::get_string(root["nodes"][i],
                                       "$.nodes[" + std::to_string(i) + "]"));
  }

  if (!root["edges"].is_array())
    throw std::invalid_argument("$.edges: expected array");
  std::vector<std::tuple<std::string, std::string, double>> edges;
  for (std::size_t i = 0; i < root["edges"].size(); ++i) {
    const std::string at = "$.edges[" + std::to_string(i) + "]";
    const json& e = root["edges"][i];
    if (!e.is_array() || e.size() != 3)
      throw std::invalid_argument(at + ": expected [u, v, capacity_mbps]");
    edges.emplace_back(detail::get_string(e[0], at + "[0]"),
                       detail::get_string(e[1], at + "[1]"),
                       detail::get_number(e[2], at + "[2]"));
  }

  Scenario sc;
  try {
    sc.graph = make_graph(std::move(nodes), edges);
  } catch (const std::invalid_argument& ex) {
    throw std::invalid_argument("$.edges: " + std::string(ex.what()));
  }

  if (!root["services"].is_array())
    throw std::invalid_argument("$.services: expected array");
  for (std::size_t i = 0; i < root["services"].size(); ++i) {
    const std::string at = "$.services[" + std::to_string(i) + "]";
    const json& s = root["services"][i];
    detail::require_keys(s, at, {"id", "host_bound", "qos_bound_us"});
    ServiceSpec spec;
    spec.id = detail::get_string(s["id"], at + ".id");
    spec.host_bound =
        static_cast<int>(detail::get_number(s["host_bound"], at + ".host_bound"));
    if (s["qos_bound_us"].is_null()) {
      spec.qos_bound_us = std::numeric_limits<double>::infinity();
    } else {
      spec.qos_bound_us =
          detail::get_number(s["qos_bound_us"], at + ".qos_bound_us");
    }
    sc.services.push_back(std::move(spec));
  }

  detail::require_keys(root["trace"], "$.trace", {"steps_mbps", "sigma"});
  if (!root["trace"]["steps_mbps"].is_array())
    throw std::invalid_argument("$.trace.steps_mbps: expected array");
  for (std::size_t i = 0; i < root["trace"]["steps_mbps"].size(); ++i) {
    sc.trace.steps_mbps.push_back(detail::get_number(
        root["trace"]["steps_mbps"][i],
        "$.trace.steps_mbps[" + std::to_string(i) + "]"));
  }
  sc.trace.sigma = detail::get_number(root["trace"]["sigma"], "$.trace.sigma");

  sc.lut_interval_mbps =
      detail::get_number(root["lut_interval_mbps"], "$.lut_interval_mbps");

  detail::require_keys(root["queue"], "$.queue",
                       {"processing_delay_us", "packet_size_bytes", "ca", "cs",
                        "propagation_delay_us"});
  sc.queue.processing_delay_us = detail::get_number(
      root["queue"]["processing_delay_us"], "$.queue.processing_delay_us");
  sc.queue.packet_size_bytes = detail::get_number(
      root["queue"]["packet_size_bytes"], "$.queue.packet_size_bytes");
  sc.queue.ca = detail::get_number(root["queue"]["ca"], "$.queue.ca");
  sc.queue.cs = detail::get_number(root["queue"]["cs"], "$.queue.cs");
  sc.queue.propagation_delay_us = detail::get_number(
      root["queue"]["propagation_delay_us"], "$.queue.propagation_delay_us");

  const double pl = detail::get_number(root["path_limit"], "$.path_limit");
  sc.path_limit = static_cast<int>(pl);
  if (static_cast<double>(sc.path_limit) != pl)
    throw std::invalid_argument("$.path_limit: expected integer");
  const double sd = detail::get_number(root["seed"], "$.seed");
  if (sd < 0 || static_cast<double>(static_cast<std::uint64_t>(sd)) != sd)
    throw std::invalid_argument("$.seed: expected non-negative integer");
  sc.seed = static_cast<std::uint64_t>(sd);

  validate_scenario(sc);
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file: " + path);
  nlohmann::json root;
  try {
    in >> root;
  } catch (const nlohmann::json::exception& ex) {
    throw std::invalid_argument("scenario parse error: " + std::string(ex.what()));
  }
  return parse_scenario(root);
}

inline nlohmann::json emit_scenario(const Scenario& sc) {
  using nlohmann::json;
  json root;
  root["nodes"] = sc.graph.nodes();
  json edges = json::array();
  for (const auto& e : sc.graph.edges()) {
    edges.push_back(
        json::array({sc.graph.node_name(e.u), sc.graph.node_name(e.v),
                     e.capacity_mbps}));
  }
  root["edges"] = std::move(edges);
  json services = json::array();
  for (const auto& s : sc.services) {
    json js;
    js["id"] = s.id;
    js["host_bound"] = s.host_bound;
    if (s.qos_bounded())
      js["qos_bound_us"] = s.qos_bound_us;
    else
      js["qos_bound_us"] = nullptr;
    services.push_back(std::move(js));
  }
  root["services"] = std::move(services);
  root["trace"]["steps_mbps"] = sc.trace.steps_mbps;
  root["trace"]["sigma"] = sc.trace.sigma;
  root["lut_interval_mbps"] = sc.lut_interval_mbps;
  root["queue"]["processing_delay_us"] = sc.queue.processing_delay_us;
  root["queue"]["packet_size_bytes"] = sc.queue.packet_size_bytes;
  root["queue"]["ca"] = sc.queue.ca;
  root["queue"]["cs"] = sc.queue.cs;
  root["queue"]["propagation_delay_us"] = sc.queue.propagation_delay_us;
  root["path_limit"] = sc.path_limit;
  root["seed"] = sc.seed;
  return root;
}

namespace seed_tag {
// Stream labels for derive_seed so independent draws never collide.
inline constexpr std::uint64_t demand = 1;
inline constexpr std::uint64_t hosts = 2;
inline constexpr std::uint64_t route_order = 3;
inline constexpr std::uint64_t route_tie = 4;
inline constexpr std::uint64_t pof = 5;
inline constexpr std::uint64_t step = 6;
}  // namespace seed_tag

// Draws the per-node demand for one trace step. Every (node, service) cell is
// an independent normal draw around the step mean, clamped below at one lut
// interval and rounded to whole intervals. The derivation chain makes the
// result a pure function of (scenario shape, step, seed), independent of
// evaluation order.
inline DemandMatrix sample_demands(const Scenario& sc, int step_index,
                                   std::uint64_t seed) {
  if (step_index < 0 ||
      step_index >= static_cast<int>(sc.trace.steps_mbps.size()))
    throw std::invalid_argument("sample_demands: step out of range");
  const double mean = sc.trace.steps_mbps[static_cast<std::size_t>(step_index)];
  DemandMatrix dm(sc.graph.node_count(), static_cast<int>(sc.services.size()),
                  sc.lut_interval_mbps);
  for (int n = 0; n < dm.n_nodes; ++n) {
    for (int k = 0; k < dm.n_services; ++k) {
      Rng rng(derive_seed(seed, {seed_tag::demand,
                                 static_cast<std::uint64_t>(step_index),
                                 static_cast<std::uint64_t>(n),
                                 static_cast<std::uint64_t>(k)}));
      const double draw = rng.next_normal(mean, sc.trace.sigma * mean);
      const double snapped =
          std::floor(draw / sc.lut_interval_mbps + 0.5);
      dm.at(n, k) = std::max<std::int64_t>(
          1, static_cast<std::int64_t>(snapped));
    }
  }
  return dm;
}

}  // namespace rsucrm
