#pragma once

#include <span>
#include <vector>

#include "pnd/network.hpp"

namespace pnd {

struct MaxFlowResult {
  double value = 0.0;
  std::vector<char> source_side;  // nodes reachable from s in the final residual graph
  std::vector<int> cut_arcs;      // arcs leaving source_side
};

/// Dinic's blocking-flow algorithm on the instance graph with the given arc
/// capacities (negative entries are treated as 0).
MaxFlowResult max_flow_min_cut(const NetworkInstance& inst, std::span<const double> capacity);

/// Reusable solver for repeated max-flow calls on one topology (simulation loop).
class MaxFlow {
 public:
  MaxFlow(int nodes, int source, int sink);
  void add_arc(int tail, int head);  // capacity set per solve, in insertion order
  double solve(std::span<const double> capacity);
  /// Source side of the last solve.
  std::vector<char> source_side() const;

 private:
  struct Edge {
    int to;
    int rev;
    double cap;
  };
  bool bfs();
  double dfs(int u, double pushed);

  int n_, s_, t_;
  std::vector<std::vector<Edge>> graph_;
  std::vector<std::pair<int, int>> arc_pos_;  // (node, edge index) of forward edge
  std::vector<int> level_, iter_;
  double eps_ = 1e-12;
};

}  // namespace pnd
