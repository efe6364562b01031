#include "pnd/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace pnd {

MaxFlow::MaxFlow(int nodes, int source, int sink)
    : n_(nodes), s_(source), t_(sink), graph_(nodes), level_(nodes), iter_(nodes) {}

void MaxFlow::add_arc(int tail, int head) {
  graph_[tail].push_back({head, static_cast<int>(graph_[head].size()), 0.0});
  graph_[head].push_back({tail, static_cast<int>(graph_[tail].size()) - 1, 0.0});
  arc_pos_.emplace_back(tail, static_cast<int>(graph_[tail].size()) - 1);
}

bool MaxFlow::bfs() {
  std::fill(level_.begin(), level_.end(), -1);
  std::queue<int> q;
  level_[s_] = 0;
  q.push(s_);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const Edge& e : graph_[u]) {
      if (e.cap > eps_ && level_[e.to] < 0) {
        level_[e.to] = level_[u] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[t_] >= 0;
}

double MaxFlow::dfs(int u, double pushed) {
  if (u == t_) return pushed;
  for (int& i = iter_[u]; i < static_cast<int>(graph_[u].size()); ++i) {
    Edge& e = graph_[u][i];
    if (e.cap <= eps_ || level_[e.to] != level_[u] + 1) continue;
    double got = dfs(e.to, std::min(pushed, e.cap));
    if (got > eps_) {
      e.cap -= got;
      graph_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve(std::span<const double> capacity) {
  double total_cap = 0.0;
  for (auto& edges : graph_)
    for (Edge& e : edges) e.cap = 0.0;
  for (std::size_t a = 0; a < arc_pos_.size(); ++a) {
    auto [u, idx] = arc_pos_[a];
    graph_[u][idx].cap = std::max(0.0, capacity[a]);
    total_cap += graph_[u][idx].cap;
  }
  eps_ = 1e-12 * (1.0 + total_cap);
  double flow = 0.0;
  while (bfs()) {
    std::fill(iter_.begin(), iter_.end(), 0);
    while (double f = dfs(s_, std::numeric_limits<double>::infinity())) flow += f;
  }
  return flow;
}

std::vector<char> MaxFlow::source_side() const {
  std::vector<char> seen(n_, 0);
  std::vector<int> stack{s_};
  seen[s_] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const Edge& e : graph_[u]) {
      if (e.cap > eps_ && !seen[e.to]) {
        seen[e.to] = 1;
        stack.push_back(e.to);
      }
    }
  }
  return seen;
}

MaxFlowResult max_flow_min_cut(const NetworkInstance& inst, std::span<const double> capacity) {
  MaxFlow mf(inst.node_count(), inst.source(), inst.sink());
  for (const Arc& a : inst.arcs()) mf.add_arc(a.tail, a.head);
  MaxFlowResult r;
  r.value = mf.solve(capacity);
  r.source_side = mf.source_side();
  for (int a = 0; a < inst.arc_count(); ++a) {
    const Arc& arc = inst.arc(a);
    if (r.source_side[arc.tail] && !r.source_side[arc.head]) r.cut_arcs.push_back(a);
  }
  return r;
}

}  // namespace pnd
