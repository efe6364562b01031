#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pnd/lp.hpp"

namespace pnd::mip {

enum class Status { optimal, infeasible, node_limit, time_limit, memory_limit, unbounded, numerical };

std::string_view to_string(Status s);

struct Problem {
  lp::LinearProgram lp;
  std::vector<char> integer;  // per column
};

struct Settings {
  long node_limit = 1000000;
  double time_limit = 1800.0;        // seconds
  double memory_limit_mb = 500.0;    // estimate of open-node and LP storage
  double integrality_tol = 1e-6;
  double relative_gap = 1e-6;
  int root_round_limit = 1000;
  int node_round_limit = 20;
  int deactivate_after = 50;         // consecutive non-binding solves before a cut leaves the LP
  lp::Settings lp;
};

/// Handle through which callbacks extend the model mid-solve.
class CutContext {
 public:
  int node_id() const { return node_; }
  int depth() const { return depth_; }
  bool at_root() const { return depth_ == 0; }
  int round() const { return round_; }
  /// Adds a global cut; duplicates of active cuts are ignored.
  void add_cut(lp::Row row, int family = 0);
  /// Adds a continuous or integer column to the LP and returns its index.
  int add_column(double cost, double lower, double upper, bool integer = false);
  int column_count() const;

 private:
  friend class BranchAndCut;
  class BranchAndCut* owner_ = nullptr;
  int node_ = 0;
  int depth_ = 0;
  int round_ = 0;
  std::vector<std::pair<lp::Row, int>> pending_;
  int columns_added_ = 0;
};

struct Result {
  Status status = Status::numerical;
  std::optional<Vector> incumbent;
  double objective = lp::kInf;
  double best_bound = -lp::kInf;
  double root_bound = -lp::kInf;
  long nodes = 0;
  long cuts = 0;
  long cuts_deactivated = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  std::unordered_map<int, long> cuts_by_family;
};

/// Best-bound branch and cut over a minimization problem.
///
/// The separator sees every node LP solution. It adds cuts through the context;
/// an integral point with no new cut is accepted as an incumbent.
class BranchAndCut {
 public:
  using Separator = std::function<void(const Vector& x, bool integral, CutContext& ctx)>;
  using Brancher = std::function<int(const Vector& x, const std::vector<int>& fractional)>;
  using IncumbentHook = std::function<void(const Vector& x, double objective)>;

  BranchAndCut(Problem problem, Settings settings = {});

  void set_separator(Separator s) { separator_ = std::move(s); }
  void set_brancher(Brancher b) { brancher_ = std::move(b); }
  void on_incumbent(IncumbentHook h) { incumbent_hook_ = std::move(h); }

  Result solve();

  const lp::Solver& lp() const { return lp_; }

 private:
  friend class CutContext;
  struct BoundChange {
    int var;
    double lower;
    double upper;
  };
  struct Node {
    int id;
    int depth;
    double bound;
    std::vector<BoundChange> changes;
  };
  struct PoolEntry {
    lp::Row row;
    int family;
    int lp_row = -1;  // -1 when inactive
    int idle = 0;
  };

  void apply_bounds(const Node& node);
  bool is_integral(const Vector& x, std::vector<int>& fractional) const;
  int choose_branch(const Vector& x, const std::vector<int>& fractional) const;
  int flush(CutContext& ctx, Result& res);
  void age_cuts(const lp::LpSolution& sol, Result& res);
  std::uint64_t row_hash(const lp::Row& r) const;
  double gap_tol(double incumbent) const;

  Problem problem_;
  Settings settings_;
  lp::Solver lp_;
  int base_rows_ = 0;
  std::vector<double> root_lo_, root_hi_;
  std::vector<PoolEntry> pool_;
  std::vector<int> row_owner_;  // LP row -> pool index, -1 for original rows
  std::unordered_multimap<std::uint64_t, int> pool_index_;
  Separator separator_;
  Brancher brancher_;
  IncumbentHook incumbent_hook_;
};

}  // namespace pnd::mip
