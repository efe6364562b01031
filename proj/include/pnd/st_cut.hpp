#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "pnd/network.hpp"

namespace pnd {

/// An s-t cut: the source side node set and the arcs leaving it.
struct Cut {
  std::vector<char> source_side;  // per node; source in, sink out
  std::vector<int> arc_ids;       // ascending

  static Cut from_source_side(const NetworkInstance& inst, std::vector<char> side);
  /// Checks the invariant: arc_ids are exactly the arcs leaving source_side.
  bool consistent(const NetworkInstance& inst) const;
};

/// Thrown when exhaustive cut enumeration would exceed the configured node limit.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

inline constexpr int kDefaultEnumerationLimit = 22;

/// Nodes other than source and sink, in id order; bit k of a cut mask refers to entry k.
std::vector<int> internal_nodes(const NetworkInstance& inst);

/// Visits all 2^(|V|-2) cuts in binary-counter order of the internal-node mask.
void for_each_cut(const NetworkInstance& inst,
                  const std::function<void(std::uint64_t mask, const Cut&)>& visit,
                  int limit = kDefaultEnumerationLimit);

std::vector<Cut> enumerate_cuts(const NetworkInstance& inst,
                                int limit = kDefaultEnumerationLimit);

}  // namespace pnd
