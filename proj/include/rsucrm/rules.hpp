#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "rsucrm/rational.hpp"

namespace rsucrm {

// Identity of a rule on the data plane: which switch, for which service
// traffic, headed to which host. A flow rule and a group rule with the same
// key are the single- and multi-path forms of the same forwarding decision.
struct RuleKey {
  int sw{0};
  int service{0};
  int dest{0};

  friend bool operator==(const RuleKey&, const RuleKey&) = default;
  friend bool operator<(const RuleKey& a, const RuleKey& b) {
    return std::tie(a.sw, a.service, a.dest) < std::tie(b.sw, b.service, b.dest);
  }
};

// Unipath forwarding entry: all matching traffic leaves on one edge.
struct FlowRule {
  RuleKey key;
  int out_edge{0};

  friend bool operator==(const FlowRule&, const FlowRule&) = default;
  friend bool operator<(const FlowRule& a, const FlowRule& b) {
    return std::tie(a.key, a.out_edge) < std::tie(b.key, b.out_edge);
  }
};

// Multipath forwarding entry: traffic splits over several edges with exact
// rational weights that sum to one.
struct GroupRule {
  struct Branch {
    int out_edge{0};
    Rational weight;

    friend bool operator==(const Branch&, const Branch&) = default;
    friend bool operator<(const Branch& a, const Branch& b) {
      return std::tie(a.out_edge, a.weight.num, a.weight.den) <
             std::tie(b.out_edge, b.weight.num, b.weight.den);
    }
  };

  RuleKey key;
  std::vector<Branch> branches;  // sorted by out_edge, >= 2 entries

  friend bool operator==(const GroupRule&, const GroupRule&) = default;
  friend bool operator<(const GroupRule& a, const GroupRule& b) {
    if (!(a.key == b.key)) return a.key < b.key;
    return a.branches < b.branches;
  }
};

}  // namespace rsucrm
