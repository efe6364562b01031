#include "pnd/st_cut.hpp"

#include <string>

namespace pnd {

Cut Cut::from_source_side(const NetworkInstance& inst, std::vector<char> side) {
  Cut c;
  c.source_side = std::move(side);
  for (int a = 0; a < inst.arc_count(); ++a) {
    const Arc& arc = inst.arc(a);
    if (c.source_side[arc.tail] && !c.source_side[arc.head]) c.arc_ids.push_back(a);
  }
  return c;
}

bool Cut::consistent(const NetworkInstance& inst) const {
  if (static_cast<int>(source_side.size()) != inst.node_count()) return false;
  if (!source_side[inst.source()] || source_side[inst.sink()]) return false;
  return from_source_side(inst, source_side).arc_ids == arc_ids;
}

std::vector<int> internal_nodes(const NetworkInstance& inst) {
  std::vector<int> nodes;
  for (int v = 0; v < inst.node_count(); ++v)
    if (v != inst.source() && v != inst.sink()) nodes.push_back(v);
  return nodes;
}

void for_each_cut(const NetworkInstance& inst,
                  const std::function<void(std::uint64_t, const Cut&)>& visit, int limit) {
  const std::vector<int> inner = internal_nodes(inst);
  const int k = static_cast<int>(inner.size());
  if (k > limit || k > 62) {
    throw SizeError("cut enumeration over " + std::to_string(k) +
                    " internal nodes exceeds limit " + std::to_string(limit) +
                    "; use a separation strategy instead");
  }
  std::vector<char> side(inst.node_count(), 0);
  side[inst.source()] = 1;
  const std::uint64_t count = std::uint64_t{1} << k;
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    for (int b = 0; b < k; ++b) side[inner[b]] = static_cast<char>((mask >> b) & 1u);
    visit(mask, Cut::from_source_side(inst, side));
  }
}

std::vector<Cut> enumerate_cuts(const NetworkInstance& inst, int limit) {
  std::vector<Cut> cuts;
  for_each_cut(inst, [&](std::uint64_t, const Cut& c) { cuts.push_back(c); }, limit);
  return cuts;
}

}  // namespace pnd
