#pragma once

#include <limits>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pnd/network.hpp"

namespace pnd::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { le, ge, eq };
enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical };

std::string_view to_string(Status s);

/// Sparse row a'x (sense) rhs.
struct Row {
  std::vector<int> index;
  std::vector<double> value;
  Sense sense = Sense::le;
  double rhs = 0.0;

  double activity(std::span<const double> x) const;
};

struct LinearProgram {
  bool maximize = false;
  Vector cost;
  Vector lower;
  Vector upper;
  std::vector<Row> rows;
};

struct LpSolution {
  Status status = Status::numerical;
  double objective = 0.0;
  Vector x;
  Vector duals;          // one per row, sign convention of the stated sense
  Vector reduced_costs;  // one per column
  int iterations = 0;
};

struct Settings {
  int iteration_limit = 100000;
  int refactor_interval = 100;
  int bland_threshold = 1000;
  double pivot_tol = 1e-9;
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double infinite_box = 1e7;  // stand-in for an infinite bound when a column must sit there
};

/// Bounded-variable dual simplex on dense data, with the basis inverse kept explicitly.
///
/// Rows a'x + s = b carry a slack s whose bounds encode the sense. The basis
/// stays dual feasible across row additions, column additions and bound changes,
/// so every `solve()` after the first is a warm reoptimization.
class Solver {
 public:
  explicit Solver(Settings settings = {});
  explicit Solver(const LinearProgram& lp, Settings settings = {});

  int cols() const { return n_; }
  int rows() const { return m_; }

  int add_column(double cost, double lower, double upper,
                 const std::vector<std::pair<int, double>>& entries = {});
  int add_row(const Row& row);
  void add_rows(std::span<const Row> rows);
  void set_bounds(int j, double lower, double upper);
  double lower(int j) const { return lo_[j]; }
  double upper(int j) const { return hi_[j]; }
  double cost(int j) const { return c_[j]; }

  bool slack_basic(int row) const;
  /// Drops the listed rows whose slack is basic; others are kept. Returns the number removed.
  int remove_rows(std::vector<int> rows);

  LpSolution solve();
  LpSolution resolve_with_new_rows(std::span<const Row> rows);

  /// Whether the last solve switched to Bland's rule.
  bool used_bland() const { return bland_used_; }
  const Settings& settings() const { return settings_; }

 private:
  enum class State : signed char { basic, at_lower, at_upper, free_zero };

  int var_count() const { return n_ + m_; }
  Vector column(int j) const;
  double column_dot(const Eigen::RowVectorXd& rho, int j) const;
  double value_nonbasic(int j) const;
  double effective_lower(int j) const;
  double effective_upper(int j) const;
  State resting_state(int j, double d) const;
  bool refactor();
  void slack_basis();
  LpSolution solve_once();
  void compute_primal(Vector& xb) const;
  void compute_duals(Vector& y, Vector& d) const;
  double primal_tol(int j) const;
  LpSolution finish(Status status, const Vector& xb, int iterations);

  Settings settings_;
  int n_ = 0;
  int m_ = 0;
  bool maximize_ = false;
  Matrix a_;                // m x n
  Vector b_;
  Vector c_;                // internal minimization costs
  std::vector<double> lo_;  // n + m, slacks after structurals
  std::vector<double> hi_;
  std::vector<State> state_;
  std::vector<int> basis_;  // var per basis row
  std::vector<int> pos_;    // basis row per var, or -1
  Matrix binv_;
  bool factored_ = false;
  bool bland_used_ = false;
  int pivots_since_refactor_ = 0;
};

LpSolution solve(const LinearProgram& lp, Settings settings = {});

}  // namespace pnd::lp
