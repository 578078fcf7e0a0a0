#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsucrm/errors.hpp"

namespace rsucrm {

// Queue/transmission parameters shared by every edge of a scenario. Stored in
// the units the scenario file uses; converting once at the point of use keeps
// file round-trips bit-exact.
struct QueueParams {
  double processing_delay_us{10};
  double packet_size_bytes{800};
  double ca{1.5};  // coefficient of variation, arrivals
  double cs{1.5};  // coefficient of variation, service
  double propagation_delay_us{0};

  double packet_bits() const { return packet_size_bytes * 8; }
  double processing_s() const { return processing_delay_us * 1e-6; }
  double propagation_s() const { return propagation_delay_us * 1e-6; }

  void validate() const {
    if (processing_delay_us < 0) throw std::invalid_argument("processing_delay negative");
    if (propagation_delay_us < 0) throw std::invalid_argument("propagation_delay negative");
    if (packet_size_bytes <= 0) throw std::invalid_argument("packet_size non-positive");
    if (ca < 0 || cs < 0) throw std::invalid_argument("variation coefficient negative");
  }
};

// Mean G/G/1 waiting time for arrival rate lambda and service rate mu
// (packets per second): (ca^2+cs^2)/2 * (lambda/mu) / (mu-lambda).
inline double kingman_queue_delay(double lambda, double mu, double ca, double cs) {
  if (lambda < 0 || mu <= 0 || ca < 0 || cs < 0)
    throw std::invalid_argument("kingman_queue_delay: negative input");
  if (lambda >= mu)
    throw SaturationError("kingman_queue_delay: lambda >= mu");
  const double util = lambda / mu;
  return 0.5 * (ca * ca + cs * cs) * util / (mu - lambda);
}

// Per-edge delay lookup table. Bucket j holds the full edge traversal delay
// (processing + transmission + propagation + queueing) when the edge already
// carries j load units of `interval_mbps` each. The last bucket doubles as
// the normalizer for relative-delay objectives.
struct DelayLut {
  double capacity_mbps{0};
  double interval_mbps{0};
  std::vector<double> buckets;

  // Highest admissible load in units: capacity minus one interval.
  std::int64_t max_load_units() const {
    return static_cast<std::int64_t>(buckets.size()) - 1;
  }

  double at_units(std::int64_t j) const {
    if (j < 0 || j >= static_cast<std::int64_t>(buckets.size()))
      throw std::invalid_argument("DelayLut: load " + std::to_string(j) +
                                  " units out of range");
    return buckets[static_cast<std::size_t>(j)];
  }

  double last() const { return buckets.back(); }
};

// Number of lut intervals in `mbps`, which must be a near-exact multiple.
inline std::int64_t load_units(double mbps, double interval_mbps,
                               const char* what) {
  if (mbps < 0) throw std::invalid_argument(std::string(what) + ": negative");
  const double q = mbps / interval_mbps;
  const std::int64_t j = static_cast<std::int64_t>(std::llround(q));
  if (std::fabs(static_cast<double>(j) * interval_mbps - mbps) >
      1e-9 * std::max(1.0, std::fabs(mbps)))
    throw std::invalid_argument(std::string(what) + ": " + std::to_string(mbps) +
                                " is not a multiple of the lut interval");
  return j;
}

inline DelayLut build_lut(double capacity_mbps, double interval_mbps,
                          const QueueParams& p) {
  p.validate();
  if (capacity_mbps <= 0) throw std::invalid_argument("capacity non-positive");
  if (interval_mbps <= 0) throw std::invalid_argument("lut interval non-positive");
  const std::int64_t units =
      load_units(capacity_mbps, interval_mbps, "capacity");
  if (units < 1)
    throw std::invalid_argument("capacity below one lut interval");

  DelayLut lut;
  lut.capacity_mbps = capacity_mbps;
  lut.interval_mbps = interval_mbps;
  lut.buckets.resize(static_cast<std::size_t>(units));
  const double mu = capacity_mbps * 1e6 / p.packet_bits();
  const double fixed = p.processing_s() +
                       p.packet_bits() / (capacity_mbps * 1e6) +
                       p.propagation_s();
  for (std::int64_t j = 0; j < units; ++j) {
    const double lambda =
        static_cast<double>(j) * interval_mbps * 1e6 / p.packet_bits();
    lut.buckets[static_cast<std::size_t>(j)] =
        fixed + kingman_queue_delay(lambda, mu, p.ca, p.cs);
  }
  return lut;
}

inline double edge_delay(const DelayLut& lut, double load_mbps) {
  const std::int64_t j = load_units(load_mbps, lut.interval_mbps, "load");
  if (j > lut.max_load_units())
    throw std::invalid_argument("edge overload: " + std::to_string(load_mbps) +
                                " Mbps on a " + std::to_string(lut.capacity_mbps) +
                                " Mbps edge");
  return lut.at_units(j);
}

// Delay of a path given per-edge luts and current loads in units. Edges are
// identified by index; an empty path (local service) has zero delay.
inline double path_delay(const std::vector<DelayLut>& luts,
                         const std::vector<std::int64_t>& loads_units,
                         std::span<const int> path_edges) {
  double sum = 0;
  for (int e : path_edges) {
    sum += luts[static_cast<std::size_t>(e)].at_units(
        loads_units[static_cast<std::size_t>(e)]);
  }
  return sum;
}

}  // namespace rsucrm
