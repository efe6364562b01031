#include "pnd/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/LU>

namespace pnd::lp {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration-limit";
    case Status::numerical: return "numerical";
  }
  return "unknown";
}

double Row::activity(std::span<const double> x) const {
  double s = 0.0;
  for (size_t k = 0; k < index.size(); ++k) s += value[k] * x[index[k]];
  return s;
}

namespace {

std::pair<double, double> slack_bounds(Sense s) {
  switch (s) {
    case Sense::le: return {0.0, kInf};
    case Sense::ge: return {-kInf, 0.0};
    case Sense::eq: return {0.0, 0.0};
  }
  return {0.0, 0.0};
}

}  // namespace

Solver::Solver(Settings settings) : settings_(settings) {
  a_.resize(0, 0);
  b_.resize(0);
  c_.resize(0);
  binv_.resize(0, 0);
  factored_ = true;
}

Solver::Solver(const LinearProgram& lp, Settings settings) : Solver(settings) {
  maximize_ = lp.maximize;
  for (int j = 0; j < lp.cost.size(); ++j) add_column(lp.cost[j], lp.lower[j], lp.upper[j]);
  add_rows(lp.rows);
}

Vector Solver::column(int j) const {
  if (j < n_) return a_.col(j);
  Vector e = Vector::Zero(m_);
  e[j - n_] = 1.0;
  return e;
}

double Solver::column_dot(const Eigen::RowVectorXd& rho, int j) const {
  if (j < n_) return rho.dot(a_.col(j).transpose());
  return rho[j - n_];
}

double Solver::effective_lower(int j) const {
  return std::isfinite(lo_[j]) ? lo_[j] : -settings_.infinite_box;
}

double Solver::effective_upper(int j) const {
  return std::isfinite(hi_[j]) ? hi_[j] : settings_.infinite_box;
}

double Solver::value_nonbasic(int j) const {
  switch (state_[j]) {
    case State::at_lower: return effective_lower(j);
    case State::at_upper: return effective_upper(j);
    default: return 0.0;
  }
}

double Solver::primal_tol(int j) const {
  double bound = std::max(std::isfinite(lo_[j]) ? std::abs(lo_[j]) : 0.0,
                          std::isfinite(hi_[j]) ? std::abs(hi_[j]) : 0.0);
  return settings_.primal_tol * std::max(1.0, bound);
}

Solver::State Solver::resting_state(int j, double d) const {
  bool lo_fin = std::isfinite(lo_[j]);
  bool hi_fin = std::isfinite(hi_[j]);
  if (!lo_fin && !hi_fin && d == 0.0) return State::free_zero;
  if (d > 0.0) return State::at_lower;
  if (d < 0.0) return State::at_upper;
  if (lo_fin) return State::at_lower;
  if (hi_fin) return State::at_upper;
  return State::free_zero;
}

int Solver::add_column(double cost, double lower, double upper,
                       const std::vector<std::pair<int, double>>& entries) {
  if (lower > upper) throw std::invalid_argument("lp: column lower bound exceeds upper bound");
  const int j = n_;
  a_.conservativeResize(m_, n_ + 1);
  a_.col(j).setZero();
  for (auto [i, v] : entries) {
    if (i < 0 || i >= m_) throw std::out_of_range("lp: column entry row out of range");
    a_(i, j) += v;
  }
  c_.conservativeResize(n_ + 1);
  c_[j] = maximize_ ? -cost : cost;
  // slacks move up by one index
  for (int& v : basis_)
    if (v >= n_) ++v;
  lo_.insert(lo_.begin() + j, lower);
  hi_.insert(hi_.begin() + j, upper);
  state_.insert(state_.begin() + j, State::at_lower);
  pos_.insert(pos_.begin() + j, -1);
  ++n_;
  double d = c_[j];
  if (m_ > 0) {
    Vector y;
    Vector dd;
    compute_duals(y, dd);
    d = dd[j];
  }
  state_[j] = resting_state(j, d);
  return j;
}

int Solver::add_row(const Row& row) {
  if (row.index.size() != row.value.size()) throw std::invalid_argument("lp: malformed row");
  const int i = m_;
  a_.conservativeResize(m_ + 1, n_);
  a_.row(i).setZero();
  for (size_t k = 0; k < row.index.size(); ++k) {
    int j = row.index[k];
    if (j < 0 || j >= n_) throw std::out_of_range("lp: row index out of range");
    a_(i, j) += row.value[k];
  }
  b_.conservativeResize(m_ + 1);
  b_[i] = row.rhs;
  auto [sl, su] = slack_bounds(row.sense);
  lo_.push_back(sl);
  hi_.push_back(su);
  state_.push_back(State::basic);
  pos_.push_back(i);
  basis_.push_back(n_ + i);
  // B' = [[B, 0], [r, 1]] with r the new row restricted to basic columns.
  if (factored_) {
    Eigen::RowVectorXd r(m_);
    for (int k = 0; k < m_; ++k) {
      int v = basis_[k];
      r[k] = v < n_ ? a_(i, v) : 0.0;
    }
    Matrix nb = Matrix::Zero(m_ + 1, m_ + 1);
    nb.topLeftCorner(m_, m_) = binv_;
    nb.block(m_, 0, 1, m_) = -r * binv_;
    nb(m_, m_) = 1.0;
    binv_ = std::move(nb);
    ++pivots_since_refactor_;
  }
  ++m_;
  return i;
}

void Solver::add_rows(std::span<const Row> rows) {
  for (const Row& r : rows) add_row(r);
}

void Solver::set_bounds(int j, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("lp: lower bound exceeds upper bound");
  lo_[j] = lower;
  hi_[j] = upper;
  if (state_[j] == State::free_zero && (std::isfinite(lower) || std::isfinite(upper)))
    state_[j] = std::isfinite(lower) ? State::at_lower : State::at_upper;
}

bool Solver::slack_basic(int row) const { return state_[n_ + row] == State::basic; }

int Solver::remove_rows(std::vector<int> rows) {
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  int removed = 0;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    const int i = *it;
    if (i < 0 || i >= m_ || !slack_basic(i)) continue;
    const int s = n_ + i;
    const auto p = std::find(basis_.begin(), basis_.end(), s) - basis_.begin();
    // drop row i of A and b
    Matrix na(m_ - 1, n_);
    Vector nb(m_ - 1);
    for (int r = 0, k = 0; r < m_; ++r) {
      if (r == i) continue;
      na.row(k) = a_.row(r);
      nb[k] = b_[r];
      ++k;
    }
    a_ = std::move(na);
    b_ = std::move(nb);
    basis_.erase(basis_.begin() + p);
    for (int& v : basis_)
      if (v > s) --v;
    lo_.erase(lo_.begin() + s);
    hi_.erase(hi_.begin() + s);
    state_.erase(state_.begin() + s);
    --m_;
    ++removed;
  }
  if (removed > 0) {
    pos_.assign(var_count(), -1);
    for (int k = 0; k < m_; ++k) pos_[basis_[k]] = k;
    factored_ = false;
  }
  return removed;
}

bool Solver::refactor() {
  if (m_ == 0) {
    binv_.resize(0, 0);
    factored_ = true;
    return true;
  }
  Matrix bm(m_, m_);
  for (int k = 0; k < m_; ++k) bm.col(k) = column(basis_[k]);
  Eigen::PartialPivLU<Matrix> lu(bm);
  Vector piv = lu.matrixLU().diagonal().cwiseAbs();
  if (!(piv.minCoeff() > 1e-11 * std::max(1.0, piv.maxCoeff()))) return false;
  binv_ = lu.inverse();
  factored_ = true;
  pivots_since_refactor_ = 0;
  return true;
}

void Solver::compute_primal(Vector& xb) const {
  Vector rhs = b_;
  for (int j = 0; j < var_count(); ++j) {
    if (state_[j] == State::basic) continue;
    double v = value_nonbasic(j);
    if (v == 0.0) continue;
    if (j < n_) rhs -= a_.col(j) * v;
    else rhs[j - n_] -= v;
  }
  xb = binv_ * rhs;
}

void Solver::compute_duals(Vector& y, Vector& d) const {
  Vector cb(m_);
  for (int k = 0; k < m_; ++k) cb[k] = basis_[k] < n_ ? c_[basis_[k]] : 0.0;
  y = binv_.transpose() * cb;
  d.resize(var_count());
  d.head(n_) = c_ - a_.transpose() * y;
  d.tail(m_) = -y;
}

LpSolution Solver::finish(Status status, const Vector& xb, int iterations) {
  LpSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.x.resize(n_);
  for (int j = 0; j < n_; ++j) sol.x[j] = state_[j] == State::basic ? xb[pos_[j]] : value_nonbasic(j);
  Vector y, d;
  compute_duals(y, d);
  const double sign = maximize_ ? -1.0 : 1.0;
  sol.duals = sign * y;
  sol.reduced_costs = sign * d.head(n_);
  sol.objective = sign * c_.dot(sol.x);
  return sol;
}

void Solver::slack_basis() {
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == State::basic) state_[j] = resting_state(j, c_[j]);
  }
  for (int i = 0; i < m_; ++i) {
    basis_[i] = n_ + i;
    state_[n_ + i] = State::basic;
  }
  pos_.assign(var_count(), -1);
  for (int k = 0; k < m_; ++k) pos_[basis_[k]] = k;
  binv_ = Matrix::Identity(m_, m_);
  factored_ = true;
  pivots_since_refactor_ = 0;
}

LpSolution Solver::solve() {
  LpSolution sol = solve_once();
  if (sol.status != Status::numerical) return sol;
  // restart from the all-slack basis
  slack_basis();
  const int spent = sol.iterations;
  sol = solve_once();
  sol.iterations += spent;
  return sol;
}

LpSolution Solver::solve_once() {
  bland_used_ = false;
  if (!factored_ && !refactor()) slack_basis();

  const int total = var_count();
  Vector xb, y, d;
  int iterations = 0;
  int& since_refactor = pivots_since_refactor_;
  int degenerate_run = 0;
  bool bland = false;
  int flips = 0;
  bool rechecked_infeasible = false;
  std::vector<double> ratio_cand;

  // Nonbasic states must agree with reduced-cost signs before the dual method starts.
  compute_duals(y, d);
  for (int j = 0; j < total; ++j) {
    if (state_[j] == State::basic) continue;
    if (lo_[j] == hi_[j]) {
      state_[j] = State::at_lower;
      continue;
    }
    State want = state_[j];
    if (d[j] > settings_.dual_tol && state_[j] != State::at_lower) want = State::at_lower;
    if (d[j] < -settings_.dual_tol && state_[j] != State::at_upper) want = State::at_upper;
    if (state_[j] == State::free_zero && std::abs(d[j]) <= settings_.dual_tol) want = State::free_zero;
    state_[j] = want;
  }

  while (true) {
    if (iterations >= settings_.iteration_limit) {
      compute_primal(xb);
      return finish(Status::iteration_limit, xb, iterations);
    }
    compute_primal(xb);

    // leaving row
    int r = -1;
    double best = 0.0;
    bool to_lower = false;
    for (int k = 0; k < m_; ++k) {
      const int v = basis_[k];
      const double tol = primal_tol(v);
      double infeas = 0.0;
      bool low = false;
      if (xb[k] < effective_lower(v) - tol) {
        infeas = effective_lower(v) - xb[k];
        low = true;
      } else if (xb[k] > effective_upper(v) + tol) {
        infeas = xb[k] - effective_upper(v);
      } else {
        continue;
      }
      if (bland) {
        if (r < 0 || v < basis_[r]) {
          r = k;
          to_lower = low;
        }
      } else if (infeas > best) {
        best = infeas;
        r = k;
        to_lower = low;
      }
    }

    compute_duals(y, d);

    if (r < 0) {
      // primal feasible: repair any residual dual infeasibility by flipping bounds
      bool flipped = false;
      for (int j = 0; j < total; ++j) {
        if (state_[j] == State::basic || lo_[j] == hi_[j]) continue;
        if (state_[j] == State::at_lower && d[j] < -settings_.dual_tol) {
          state_[j] = State::at_upper;
          flipped = true;
        } else if (state_[j] == State::at_upper && d[j] > settings_.dual_tol) {
          state_[j] = State::at_lower;
          flipped = true;
        } else if (state_[j] == State::free_zero && std::abs(d[j]) > settings_.dual_tol) {
          state_[j] = d[j] > 0 ? State::at_lower : State::at_upper;
          flipped = true;
        }
      }
      if (flipped && ++flips < 50) continue;
      if (flipped) return finish(Status::numerical, xb, iterations);
      // verify against a fresh factorization before claiming optimality
      if (since_refactor > 0) {
        if (!refactor()) return finish(Status::numerical, xb, iterations);
        since_refactor = 0;
        Vector check;
        compute_primal(check);
        bool ok = true;
        for (int k = 0; k < m_; ++k) {
          int v = basis_[k];
          double tol = primal_tol(v);
          if (check[k] < effective_lower(v) - tol || check[k] > effective_upper(v) + tol) ok = false;
        }
        if (!ok) continue;
        xb = check;
      }
      // a column resting on the stand-in box means the true problem is unbounded
      for (int j = 0; j < total; ++j) {
        double v = state_[j] == State::basic ? xb[pos_[j]] : value_nonbasic(j);
        bool art_lo = !std::isfinite(lo_[j]) && v <= -0.5 * settings_.infinite_box;
        bool art_hi = !std::isfinite(hi_[j]) && v >= 0.5 * settings_.infinite_box;
        if (art_lo || art_hi) return finish(Status::unbounded, xb, iterations);
      }
      return finish(Status::optimal, xb, iterations);
    }

    // pivot row of the tableau
    Eigen::RowVectorXd rho = binv_.row(r);
    // Harris two-pass ratio test
    double theta_max = kInf;
    ratio_cand.assign(total, 0.0);
    std::vector<int> eligible;
    for (int j = 0; j < total; ++j) {
      if (state_[j] == State::basic) continue;
      if (lo_[j] == hi_[j]) continue;
      double alpha = column_dot(rho, j);
      if (std::abs(alpha) <= settings_.pivot_tol) continue;
      // leaving decreases to its lower bound: entering must push x_r up, i.e. alpha*dx < 0
      bool ok;
      if (state_[j] == State::free_zero) ok = true;
      else if (state_[j] == State::at_lower) ok = to_lower ? alpha < 0 : alpha > 0;
      else ok = to_lower ? alpha > 0 : alpha < 0;
      if (!ok) continue;
      ratio_cand[j] = alpha;
      eligible.push_back(j);
      double bound = (std::abs(d[j]) + settings_.dual_tol) / std::abs(alpha);
      theta_max = std::min(theta_max, bound);
    }
    if (eligible.empty()) {
      if (!rechecked_infeasible && since_refactor > 0) {
        rechecked_infeasible = true;
        if (!refactor()) return finish(Status::numerical, xb, iterations);
        since_refactor = 0;
        continue;
      }
      return finish(Status::infeasible, xb, iterations);
    }
    rechecked_infeasible = false;
    int q = -1;
    double q_alpha = 0.0;
    if (bland) {
      double min_ratio = kInf;
      for (int j : eligible) min_ratio = std::min(min_ratio, std::abs(d[j]) / std::abs(ratio_cand[j]));
      for (int j : eligible) {
        if (std::abs(d[j]) / std::abs(ratio_cand[j]) <= min_ratio + 1e-12) {
          q = j;
          q_alpha = ratio_cand[j];
          break;
        }
      }
    } else {
      for (int j : eligible) {
        double alpha = ratio_cand[j];
        if (std::abs(d[j]) / std::abs(alpha) <= theta_max && std::abs(alpha) > std::abs(q_alpha)) {
          q = j;
          q_alpha = alpha;
        }
      }
    }
    if (q < 0) return finish(Status::numerical, xb, iterations);

    if (std::abs(d[q]) <= 1e-12) {
      if (++degenerate_run >= settings_.bland_threshold && !bland) {
        bland = true;
        bland_used_ = true;
      }
    } else {
      degenerate_run = 0;
    }

    // basis change
    const int leaving = basis_[r];
    Vector u = binv_ * column(q);
    const double piv = u[r];
    if (std::abs(piv) <= settings_.pivot_tol) {
      if (!refactor()) return finish(Status::numerical, xb, iterations);
      since_refactor = 0;
      ++iterations;
      continue;
    }
    Eigen::RowVectorXd prow = binv_.row(r) / piv;
    for (int k = 0; k < m_; ++k) {
      if (k == r || u[k] == 0.0) continue;
      binv_.row(k) -= u[k] * prow;
    }
    binv_.row(r) = prow;
    basis_[r] = q;
    pos_[q] = r;
    pos_[leaving] = -1;
    state_[q] = State::basic;
    state_[leaving] = to_lower ? State::at_lower : State::at_upper;
    if (lo_[leaving] == hi_[leaving]) state_[leaving] = State::at_lower;
    ++iterations;
    if (++since_refactor >= settings_.refactor_interval) {
      if (!refactor()) return finish(Status::numerical, xb, iterations);
      since_refactor = 0;
    }
  }
}

LpSolution Solver::resolve_with_new_rows(std::span<const Row> rows) {
  add_rows(rows);
  return solve();
}

LpSolution solve(const LinearProgram& lp, Settings settings) {
  Solver s(lp, settings);
  return s.solve();
}

}  // namespace pnd::lp
