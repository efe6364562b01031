#include "pnd/mip.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

namespace pnd::mip {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::node_limit: return "node-limit";
    case Status::time_limit: return "time-limit";
    case Status::memory_limit: return "memory-limit";
    case Status::unbounded: return "unbounded";
    case Status::numerical: return "numerical";
  }
  return "unknown";
}

void CutContext::add_cut(lp::Row row, int family) { pending_.emplace_back(std::move(row), family); }

int CutContext::add_column(double cost, double lower, double upper, bool integer) {
  BranchAndCut& bc = *owner_;
  int j = bc.lp_.add_column(cost, lower, upper);
  bc.problem_.integer.push_back(integer ? 1 : 0);
  bc.root_lo_.push_back(lower);
  bc.root_hi_.push_back(upper);
  ++columns_added_;
  return j;
}

int CutContext::column_count() const { return owner_->lp_.cols(); }

BranchAndCut::BranchAndCut(Problem problem, Settings settings)
    : problem_(std::move(problem)), settings_(settings), lp_(problem_.lp, settings.lp) {
  base_rows_ = lp_.rows();
  row_owner_.assign(base_rows_, -1);
  problem_.integer.resize(problem_.lp.cost.size(), 0);
  root_lo_.assign(problem_.lp.lower.data(), problem_.lp.lower.data() + problem_.lp.lower.size());
  root_hi_.assign(problem_.lp.upper.data(), problem_.lp.upper.data() + problem_.lp.upper.size());
}

std::uint64_t BranchAndCut::row_hash(const lp::Row& r) const {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  auto q = [](double v) { return static_cast<std::uint64_t>(std::llround(v * 1e9)); };
  for (size_t k = 0; k < r.index.size(); ++k) {
    if (r.value[k] == 0.0) continue;
    mix(static_cast<std::uint64_t>(r.index[k]));
    mix(q(r.value[k]));
  }
  mix(static_cast<std::uint64_t>(r.sense));
  mix(q(r.rhs));
  return h;
}

namespace {

bool same_row(const lp::Row& a, const lp::Row& b) {
  if (a.sense != b.sense || std::abs(a.rhs - b.rhs) > 1e-9 * (1 + std::abs(a.rhs))) return false;
  std::vector<std::pair<int, double>> x, y;
  for (size_t k = 0; k < a.index.size(); ++k)
    if (a.value[k] != 0.0) x.emplace_back(a.index[k], a.value[k]);
  for (size_t k = 0; k < b.index.size(); ++k)
    if (b.value[k] != 0.0) y.emplace_back(b.index[k], b.value[k]);
  if (x.size() != y.size()) return false;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  for (size_t k = 0; k < x.size(); ++k) {
    if (x[k].first != y[k].first) return false;
    if (std::abs(x[k].second - y[k].second) > 1e-9 * (1 + std::abs(x[k].second))) return false;
  }
  return true;
}

}  // namespace

int BranchAndCut::flush(CutContext& ctx, Result& res) {
  int added = 0;
  for (auto& [row, family] : ctx.pending_) {
    std::uint64_t h = row_hash(row);
    int found = -1;
    auto range = pool_index_.equal_range(h);
    for (auto it = range.first; it != range.second; ++it) {
      if (same_row(pool_[it->second].row, row)) {
        found = it->second;
        break;
      }
    }
    if (found >= 0 && pool_[found].lp_row >= 0) continue;
    if (found < 0) {
      found = static_cast<int>(pool_.size());
      pool_.push_back({row, family, -1, 0});
      pool_index_.emplace(h, found);
      ++res.cuts;
      ++res.cuts_by_family[family];
    }
    pool_[found].lp_row = lp_.add_row(pool_[found].row);
    pool_[found].idle = 0;
    row_owner_.push_back(found);
    ++added;
  }
  ctx.pending_.clear();
  return added;
}

void BranchAndCut::age_cuts(const lp::LpSolution& sol, Result& res) {
  std::span<const double> x(sol.x.data(), sol.x.size());
  std::vector<int> drop;
  for (int i = base_rows_; i < lp_.rows(); ++i) {
    PoolEntry& e = pool_[row_owner_[i]];
    double act = e.row.activity(x);
    bool binding = std::abs(act - e.row.rhs) <= 1e-6 * (1 + std::abs(e.row.rhs));
    e.idle = binding ? 0 : e.idle + 1;
    if (e.idle >= settings_.deactivate_after && lp_.slack_basic(i)) drop.push_back(i);
  }
  if (drop.empty()) return;
  lp_.remove_rows(drop);
  std::vector<int> owner;
  owner.reserve(lp_.rows());
  for (int i = 0; i < static_cast<int>(row_owner_.size()); ++i) {
    if (std::binary_search(drop.begin(), drop.end(), i)) {
      pool_[row_owner_[i]].lp_row = -1;
      pool_[row_owner_[i]].idle = 0;
      ++res.cuts_deactivated;
      continue;
    }
    if (row_owner_[i] >= 0) pool_[row_owner_[i]].lp_row = static_cast<int>(owner.size());
    owner.push_back(row_owner_[i]);
  }
  row_owner_ = std::move(owner);
}

void BranchAndCut::apply_bounds(const Node& node) {
  for (int j = 0; j < lp_.cols(); ++j)
    if (problem_.integer[j]) lp_.set_bounds(j, root_lo_[j], root_hi_[j]);
  for (const BoundChange& c : node.changes) lp_.set_bounds(c.var, c.lower, c.upper);
}

bool BranchAndCut::is_integral(const Vector& x, std::vector<int>& fractional) const {
  fractional.clear();
  for (int j = 0; j < x.size(); ++j) {
    if (!problem_.integer[j]) continue;
    if (std::abs(x[j] - std::round(x[j])) > settings_.integrality_tol) fractional.push_back(j);
  }
  return fractional.empty();
}

int BranchAndCut::choose_branch(const Vector& x, const std::vector<int>& fractional) const {
  if (brancher_) {
    int j = brancher_(x, fractional);
    if (j >= 0) return j;
  }
  int best = -1;
  double best_frac = -1.0;
  double best_cost = 0.0;
  for (int j : fractional) {
    double f = x[j] - std::floor(x[j]);
    double score = std::min(f, 1.0 - f);
    double cost = std::abs(lp_.cost(j));
    if (score > best_frac + 1e-12 || (std::abs(score - best_frac) <= 1e-12 && cost > best_cost)) {
      best = j;
      best_frac = score;
      best_cost = cost;
    }
  }
  return best;
}

double BranchAndCut::gap_tol(double incumbent) const {
  return settings_.relative_gap * std::max(1.0, std::abs(incumbent));
}

Result BranchAndCut::solve() {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  Result res;
  auto cmp = [](const Node& a, const Node& b) {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(cmp)> open(cmp);
  int next_id = 0;
  open.push(Node{next_id++, 0, -lp::kInf, {}});
  bool limit_hit = false;
  Status limit_status = Status::optimal;
  bool numerical_trouble = false;
  std::vector<int> fractional;
  CutContext ctx;
  ctx.owner_ = this;

  auto accept = [&](const Vector& x, double obj) {
    if (obj < res.objective) {
      res.objective = obj;
      res.incumbent = x;
      if (incumbent_hook_) incumbent_hook_(x, obj);
    }
  };

  while (!open.empty()) {
    if (res.nodes >= settings_.node_limit) {
      limit_hit = true;
      limit_status = Status::node_limit;
      break;
    }
    if (elapsed() > settings_.time_limit) {
      limit_hit = true;
      limit_status = Status::time_limit;
      break;
    }
    double mem_mb = (static_cast<double>(open.size()) * 64.0 +
                     static_cast<double>(lp_.rows()) * (lp_.cols() + lp_.rows()) * 8.0) /
                    (1024.0 * 1024.0);
    if (mem_mb > settings_.memory_limit_mb) {
      limit_hit = true;
      limit_status = Status::memory_limit;
      break;
    }
    Node node = open.top();
    open.pop();
    if (res.incumbent && node.bound >= res.objective - gap_tol(res.objective)) continue;
    ++res.nodes;
    apply_bounds(node);
    ctx.node_ = node.id;
    ctx.depth_ = node.depth;

    const int round_limit = node.depth == 0 ? settings_.root_round_limit : settings_.node_round_limit;
    lp::LpSolution sol;
    bool pruned = false;
    bool branch = false;
    for (int round = 0;; ++round) {
      sol = lp_.solve();
      res.lp_iterations += sol.iterations;
      if (sol.status == lp::Status::infeasible) {
        pruned = true;
        break;
      }
      if (sol.status == lp::Status::unbounded) {
        res.status = Status::unbounded;
        res.seconds = elapsed();
        return res;
      }
      if (sol.status != lp::Status::optimal) {
        numerical_trouble = true;
        pruned = true;
        break;
      }
      age_cuts(sol, res);
      if (res.incumbent && sol.objective >= res.objective - gap_tol(res.objective)) {
        pruned = true;
        break;
      }
      bool integral = is_integral(sol.x, fractional);
      if (integral) {
        // snap integer columns before handing the point out
        for (int j = 0; j < sol.x.size(); ++j)
          if (problem_.integer[j]) sol.x[j] = std::round(sol.x[j]);
      }
      ctx.round_ = round;
      ctx.columns_added_ = 0;
      if (separator_) separator_(sol.x, integral, ctx);
      int added = flush(ctx, res);
      if (added == 0 && ctx.columns_added_ == 0) {
        if (integral) {
          accept(sol.x, sol.objective);
          pruned = true;
        } else {
          branch = true;
        }
        break;
      }
      if (round + 1 >= round_limit && (!integral || round + 1 >= 100 * round_limit)) {
        if (integral) {
          // cannot branch on an integral point that still violates cuts
          numerical_trouble = true;
          pruned = true;
        } else {
          branch = true;
        }
        break;
      }
    }
    if (node.depth == 0) {
      res.root_bound = sol.status == lp::Status::optimal ? sol.objective
                       : sol.status == lp::Status::infeasible ? lp::kInf
                                                               : -lp::kInf;
    }
    if (pruned || !branch) continue;

    int j = choose_branch(sol.x, fractional);
    double v = sol.x[j];
    Node down{next_id++, node.depth + 1, sol.objective, node.changes};
    Node up{next_id++, node.depth + 1, sol.objective, node.changes};
    double lo = root_lo_[j], hi = root_hi_[j];
    for (const BoundChange& c : node.changes)
      if (c.var == j) {
        lo = c.lower;
        hi = c.upper;
      }
    down.changes.push_back({j, lo, std::floor(v)});
    up.changes.push_back({j, std::ceil(v), hi});
    open.push(std::move(down));
    open.push(std::move(up));
  }

  res.seconds = elapsed();
  if (limit_hit) {
    res.status = limit_status;
    double bound = res.objective;
    if (!open.empty()) bound = std::min(bound, open.top().bound);
    res.best_bound = bound;
    return res;
  }
  res.best_bound = res.objective;
  if (numerical_trouble) res.status = Status::numerical;
  else res.status = res.incumbent ? Status::optimal : Status::infeasible;
  return res;
}

}  // namespace pnd::mip
