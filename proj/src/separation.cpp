#include "pnd/separation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "pnd/maxflow.hpp"
#include "pnd/mip.hpp"
#include "pnd/submodular.hpp"

namespace pnd {

SepStrategy parse_sep_strategy(std::string_view name) {
  if (name.starts_with("sep-")) name.remove_prefix(4);
  if (name == "enum" || name == "enumeration") return SepStrategy::enumeration;
  if (name == "qcqp") return SepStrategy::qcqp;
  if (name == "mc") return SepStrategy::mc;
  if (name == "bqc") return SepStrategy::bqc;
  if (name == "nw") return SepStrategy::nw;
  throw std::invalid_argument("unknown separation strategy '" + std::string(name) + "'");
}

std::string_view to_string(SepStrategy s) {
  switch (s) {
    case SepStrategy::enumeration: return "enum";
    case SepStrategy::qcqp: return "qcqp";
    case SepStrategy::mc: return "mc";
    case SepStrategy::bqc: return "bqc";
    case SepStrategy::nw: return "nw";
  }
  return "unknown";
}

std::string_view to_string(SeparationResult::Status s) {
  switch (s) {
    case SeparationResult::Status::violated: return "violated-cut";
    case SeparationResult::Status::none: return "none-violated";
    case SeparationResult::Status::limit: return "limit";
  }
  return "unknown";
}

SeparationProblem SeparationProblem::make(const NetworkInstance& net, std::span<const double> xbar,
                                          double omega, double support_tol) {
  SeparationProblem p;
  p.net = &net;
  p.xbar.assign(xbar.begin(), xbar.end());
  p.omega = omega;
  p.demand = net.demand();
  const int m = net.arc_count();
  p.mu_x = Vector::Zero(m);
  p.cov_x = Matrix::Zero(m, m);
  for (int a = 0; a < m; ++a)
    if (xbar[a] > support_tol) p.support.push_back(a);
  for (int a : p.support) {
    p.mu_x[a] = xbar[a] * net.mu()[a];
    for (int b : p.support) p.cov_x(a, b) = xbar[a] * xbar[b] * net.cov()(a, b);
  }
  return p;
}

namespace {

double theta_of_arcs(const SeparationProblem& p, const std::vector<int>& arcs) {
  double mean = 0.0, var = 0.0;
  for (int a : arcs) {
    mean += p.mu_x[a];
    for (int b : arcs) var += p.cov_x(a, b);
  }
  return mean - p.omega * std::sqrt(std::max(0.0, var));
}

SeparationResult finish(const SeparationProblem& p, SeparationResult r) {
  if (r.cut) {
    r.theta = theta_of_arcs(p, r.cut->arc_ids);
    r.violation = p.demand - r.theta;
  }
  return r;
}

}  // namespace

double eval_theta(const SeparationProblem& p, std::span<const char> z, std::span<const char> w) {
  const NetworkInstance& net = *p.net;
  if (!w[net.source()] || w[net.sink()])
    throw std::domain_error("eval_theta: labels must put the source at 1 and the sink at 0");
  std::vector<int> arcs;
  for (int a = 0; a < net.arc_count(); ++a) {
    bool crossing = w[net.arc(a).tail] && !w[net.arc(a).head];
    if (static_cast<bool>(z[a]) != crossing)
      throw std::domain_error("eval_theta: arc labels disagree with node labels at arc " +
                              std::to_string(a));
    if (crossing) arcs.push_back(a);
  }
  return theta_of_arcs(p, arcs);
}

double eval_theta(const SeparationProblem& p, const Cut& cut) { return theta_of_arcs(p, cut.arc_ids); }

SeparationResult separate_enumeration(const SeparationProblem& p, const SepOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  SeparationResult r;
  double best = lp::kInf;
  for_each_cut(
      *p.net,
      [&](std::uint64_t, const Cut& c) {
        ++r.nodes;
        double th = theta_of_arcs(p, c.arc_ids);
        if (th < best) {
          best = th;
          r.cut = c;
        }
      },
      opt.enumeration_limit);
  r = finish(p, r);
  r.status = r.violation > kViolationTol ? SeparationResult::Status::violated : SeparationResult::Status::none;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

namespace {

lp::Row row(std::vector<int> idx, std::vector<double> val, lp::Sense s, double rhs) {
  lp::Row r;
  r.index = std::move(idx);
  r.value = std::move(val);
  r.sense = s;
  r.rhs = rhs;
  return r;
}

// Columns: node labels, then support arc labels, then strategy-specific extras.
struct Formulation {
  mip::Problem prob;
  int nodes = 0;
  std::vector<int> zcol;  // per support position
  std::vector<double> degree;

  int add_col(double cost, double lo, double hi, bool integer) {
    int j = static_cast<int>(prob.lp.cost.size());
    prob.lp.cost.conservativeResize(j + 1);
    prob.lp.lower.conservativeResize(j + 1);
    prob.lp.upper.conservativeResize(j + 1);
    prob.lp.cost[j] = cost;
    prob.lp.lower[j] = lo;
    prob.lp.upper[j] = hi;
    prob.integer.push_back(integer ? 1 : 0);
    return j;
  }
};

Formulation base_formulation(const SeparationProblem& p) {
  const NetworkInstance& net = *p.net;
  Formulation f;
  f.nodes = net.node_count();
  f.prob.lp.cost.resize(0);
  f.degree.assign(f.nodes, 0.0);
  for (int v = 0; v < f.nodes; ++v) {
    double lo = v == net.source() ? 1.0 : 0.0;
    double hi = v == net.sink() ? 0.0 : 1.0;
    f.add_col(0.0, lo, hi, v != net.source() && v != net.sink());
  }
  for (int a : p.support) {
    int z = f.add_col(0.0, 0.0, 1.0, true);
    f.zcol.push_back(z);
    int i = net.arc(a).tail, j = net.arc(a).head;
    f.prob.lp.rows.push_back(row({i, j, z}, {1, -1, -1}, lp::Sense::le, 0));  // w_i - w_j <= z
    f.prob.lp.rows.push_back(row({z, i}, {1, -1}, lp::Sense::le, 0));         // z <= w_i
    f.prob.lp.rows.push_back(row({j, z}, {1, 1}, lp::Sense::le, 1));          // w_j <= 1 - z
    f.degree[i] += p.mu_x[a];
    f.degree[j] += p.mu_x[a];
  }
  return f;
}

Cut cut_from_labels(const SeparationProblem& p, const Vector& x) {
  std::vector<char> side(p.net->node_count());
  for (int v = 0; v < p.net->node_count(); ++v) side[v] = x[v] > 0.5 ? 1 : 0;
  return Cut::from_source_side(*p.net, side);
}

mip::Settings sep_settings(const SepOptions& opt) {
  mip::Settings s;
  s.node_limit = opt.node_limit;
  s.time_limit = opt.time_limit;
  s.relative_gap = 1e-10;
  s.node_round_limit = 60;
  return s;
}

void use_label_branching(mip::BranchAndCut& bc, const Formulation& f) {
  bc.set_brancher([&f](const Vector& x, const std::vector<int>& fractional) {
    int best = -1;
    for (int j : fractional) {
      if (j >= f.nodes) continue;
      if (best < 0 || f.degree[j] > f.degree[best]) best = j;
    }
    (void)x;
    return best;
  });
}

// t <= sqrt(g) through tangents of the square root at g(z) (or a point below t when g(z) = 0)
void tangent_cut(mip::CutContext& ctx, const Vector& x, int tcol, const std::vector<int>& cols,
                 const std::vector<double>& coef, double scale) {
  double g = 0.0;
  for (size_t k = 0; k < cols.size(); ++k) g += coef[k] * x[cols[k]];
  const double t = x[tcol];
  const double root = std::sqrt(std::max(0.0, g));
  if (t <= root + 1e-10 * (1.0 + scale)) return;
  double e = g > 1e-12 ? g : 0.25 * t * t;
  double se = std::sqrt(e);
  lp::Row r;
  r.index.push_back(tcol);
  r.value.push_back(1.0);
  for (size_t k = 0; k < cols.size(); ++k) {
    if (coef[k] == 0.0) continue;
    r.index.push_back(cols[k]);
    r.value.push_back(-coef[k] / (2.0 * se));
  }
  r.sense = lp::Sense::le;
  r.rhs = se / 2.0;
  ctx.add_cut(std::move(r));
}

double t_upper(const SeparationProblem& p) {
  double s = 0.0;
  for (int a : p.support)
    for (int b : p.support) s += std::abs(p.cov_x(a, b));
  return std::sqrt(s);
}

SeparationResult from_mip(const SeparationProblem& p, const mip::Result& res, SeparationResult r) {
  r.nodes += res.nodes;
  if (res.incumbent) r.cut = cut_from_labels(p, *res.incumbent);
  r = finish(p, r);
  bool limited = res.status == mip::Status::node_limit || res.status == mip::Status::time_limit ||
                 res.status == mip::Status::memory_limit;
  if (r.cut && r.violation > kViolationTol) r.status = SeparationResult::Status::violated;
  else if (limited || res.status == mip::Status::numerical) r.status = SeparationResult::Status::limit;
  else r.status = SeparationResult::Status::none;
  return r;
}

SeparationResult solve_conic(const SeparationProblem& p, bool mccormick, const SepOptions& opt) {
  Formulation f = base_formulation(p);
  const double tmax = t_upper(p);
  const int t = f.add_col(-p.omega, 0.0, tmax, false);
  std::vector<int> gcols;
  std::vector<double> gcoef;
  const int n = static_cast<int>(p.support.size());
  for (int k = 0; k < n; ++k) {
    int a = p.support[k];
    f.prob.lp.cost[f.zcol[k]] = p.mu_x[a];
    gcols.push_back(f.zcol[k]);
    gcoef.push_back(p.cov_x(a, a));
  }
  // norm of a nonnegative combination is at most the combination of the norms
  std::vector<int> scols{t};
  std::vector<double> svals{1.0};
  for (int k = 0; k < n; ++k) {
    double s = std::sqrt(std::max(0.0, p.cov_x(p.support[k], p.support[k])));
    if (s == 0.0) continue;
    scols.push_back(f.zcol[k]);
    svals.push_back(-s);
  }
  f.prob.lp.rows.push_back(row(scols, svals, lp::Sense::le, 0.0));
  if (mccormick) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        double c = p.cov_x(p.support[i], p.support[j]);
        if (c == 0.0) continue;
        int y = f.add_col(0.0, 0.0, 1.0, false);
        int zi = f.zcol[i], zj = f.zcol[j];
        // t pushes g up, so only the side of the envelope limiting c y can bind
        if (c < 0) {
          f.prob.lp.rows.push_back(row({zi, zj, y}, {1, 1, -1}, lp::Sense::le, 1));
        } else {
          f.prob.lp.rows.push_back(row({y, zi}, {1, -1}, lp::Sense::le, 0));
          f.prob.lp.rows.push_back(row({y, zj}, {1, -1}, lp::Sense::le, 0));
        }
        gcols.push_back(y);
        gcoef.push_back(2.0 * c);
      }
    f.prob.lp.rows.push_back(row(gcols, gcoef, lp::Sense::ge, 0.0));
  }
  mip::BranchAndCut bc(f.prob, sep_settings(opt));
  use_label_branching(bc, f);
  bc.set_separator([&](const Vector& x, bool, mip::CutContext& ctx) { tangent_cut(ctx, x, t, gcols, gcoef, tmax); });
  return from_mip(p, bc.solve(), {});
}

SeparationResult solve_nw(const SeparationProblem& p, const SepOptions& opt) {
  Formulation f = base_formulation(p);
  const int n = static_cast<int>(p.support.size());
  double total_mu = 0.0, total_var = 0.0;
  for (int a : p.support) {
    total_mu += p.mu_x[a];
    total_var += p.cov_x(a, a);
  }
  const int w = f.add_col(1.0, -p.omega * std::sqrt(total_var) - 1.0, total_mu + 1.0, false);
  SetFunction theta(n, [&p](std::span<const char> in) {
    double mean = 0.0, var = 0.0;
    for (size_t k = 0; k < in.size(); ++k)
      if (in[k]) {
        mean += p.mu_x[p.support[k]];
        var += p.cov_x(p.support[k], p.support[k]);
      }
    return mean - p.omega * std::sqrt(std::max(0.0, var));
  });
  auto nw_row = [&](std::span<const char> s, NwVariant v) {
    NwInequality ineq = nw_inequality(theta, s, v);
    lp::Row r;
    r.index.push_back(w);
    r.value.push_back(1.0);
    for (int k = 0; k < n; ++k) {
      if (ineq.coef[k] == 0.0) continue;
      r.index.push_back(f.zcol[k]);
      r.value.push_back(-ineq.coef[k]);
    }
    r.sense = lp::Sense::ge;
    r.rhs = ineq.constant;
    return r;
  };
  std::vector<char> none(n, 0), all(n, 1);
  for (auto v : {NwVariant::submod1, NwVariant::submod2}) {
    f.prob.lp.rows.push_back(nw_row(none, v));
    f.prob.lp.rows.push_back(nw_row(all, v));
  }
  mip::BranchAndCut bc(f.prob, sep_settings(opt));
  use_label_branching(bc, f);
  bc.set_separator([&](const Vector& x, bool integral, mip::CutContext& ctx) {
    if (!integral) return;
    std::vector<char> s(n);
    for (int k = 0; k < n; ++k) s[k] = x[f.zcol[k]] > 0.5;
    double th = theta(s);
    if (x[w] >= th - 1e-9 * (1.0 + std::abs(th))) return;
    ctx.add_cut(nw_row(s, NwVariant::submod1));
    ctx.add_cut(nw_row(s, NwVariant::submod2));
  });
  return from_mip(p, bc.solve(), {});
}

// min mu_x'z subject to mu_x'z >= level and (mu_x'z - level)^2 <= omega^2 z'Sigma_x z - eps, lazily
mip::Result bqc_stage_two(const SeparationProblem& p, double level, const SepOptions& opt) {
  Formulation f = base_formulation(p);
  const int n = static_cast<int>(p.support.size());
  std::vector<int> cols;
  std::vector<double> mu;
  for (int k = 0; k < n; ++k) {
    f.prob.lp.cost[f.zcol[k]] = p.mu_x[p.support[k]];
    cols.push_back(f.zcol[k]);
    mu.push_back(p.mu_x[p.support[k]]);
  }
  f.prob.lp.rows.push_back(row(cols, mu, lp::Sense::ge, level));
  // sqrt(z'Sigma z) <= sigma'z, so Theta below the level needs (mu - omega sigma)'z < level
  std::vector<double> lean;
  for (int k = 0; k < n; ++k)
    lean.push_back(mu[k] - p.omega * std::sqrt(std::max(0.0, p.cov_x(p.support[k], p.support[k]))));
  f.prob.lp.rows.push_back(row(cols, lean, lp::Sense::le, level));
  mip::BranchAndCut bc(f.prob, sep_settings(opt));
  use_label_branching(bc, f);
  const NetworkInstance& net = *p.net;
  bc.set_separator([&](const Vector& x, bool integral, mip::CutContext& ctx) {
    if (!integral) return;
    double mean = 0.0, var = 0.0;
    for (int k = 0; k < n; ++k) {
      if (x[f.zcol[k]] < 0.5) continue;
      mean += p.mu_x[p.support[k]];
      for (int l = 0; l < n; ++l)
        if (x[f.zcol[l]] > 0.5) var += p.cov_x(p.support[k], p.support[l]);
    }
    double lhs = (mean - level) * (mean - level);
    if (lhs <= p.omega * p.omega * var - kBqcEpsilon) return;
    // reject this labeling
    lp::Row r;
    double ones = 0.0;
    for (int v = 0; v < f.nodes; ++v) {
      if (v == net.source() || v == net.sink()) continue;
      bool on = x[v] > 0.5;
      r.index.push_back(v);
      r.value.push_back(on ? -1.0 : 1.0);
      if (on) ones += 1.0;
    }
    r.sense = lp::Sense::ge;
    r.rhs = 1.0 - ones;
    ctx.add_cut(std::move(r));
  });
  return bc.solve();
}

SeparationResult solve_bqc(const SeparationProblem& p, const SepOptions& opt) {
  SeparationResult r;
  const NetworkInstance& net = *p.net;
  std::vector<double> cap(p.mu_x.data(), p.mu_x.data() + p.mu_x.size());
  MaxFlowResult flow = max_flow_min_cut(net, cap);
  std::optional<Cut> best;
  double best_theta = lp::kInf;
  auto take = [&](const Cut& c) {
    double th = theta_of_arcs(p, c.arc_ids);
    if (th < best_theta) {
      best_theta = th;
      best = c;
    }
  };
  if (flow.value < p.demand - kViolationTol) {
    take(Cut::from_source_side(net, flow.source_side));
    r.linear_stage = true;
    if (!opt.exact_minimum) {
      r.cut = best;
      r = finish(p, r);
      r.status = SeparationResult::Status::violated;
      return r;
    }
  }
  double level = best ? best_theta : p.demand;
  bool limited = false;
  while (true) {
    if (best) level = best_theta - 1e-9 * (1.0 + std::abs(best_theta));
    if (flow.value < level) {
      Cut c = Cut::from_source_side(net, flow.source_side);
      double th = theta_of_arcs(p, c.arc_ids);
      if (th < best_theta - 1e-12) {
        take(c);
        if (!opt.exact_minimum) break;
        continue;
      }
    }
    mip::Result res = bqc_stage_two(p, level, opt);
    r.nodes += res.nodes;
    if (!res.incumbent) {
      limited = res.status != mip::Status::infeasible && res.status != mip::Status::optimal;
      break;
    }
    Cut c = cut_from_labels(p, *res.incumbent);
    double th = theta_of_arcs(p, c.arc_ids);
    if (th >= best_theta) break;
    take(c);
    if (!opt.exact_minimum) break;
  }
  r.cut = best;
  r = finish(p, r);
  if (best && r.violation > kViolationTol) r.status = SeparationResult::Status::violated;
  else r.status = limited ? SeparationResult::Status::limit : SeparationResult::Status::none;
  if (!best) r.theta = lp::kInf, r.violation = -lp::kInf;
  return r;
}

}  // namespace

SeparationResult separate_bnb(const SeparationProblem& p, SepStrategy strategy, const SepOptions& opt) {
  auto start = std::chrono::steady_clock::now();
  const bool diagonal = p.net->is_diagonal();
  SeparationResult r;
  switch (strategy) {
    case SepStrategy::qcqp:
      if (!diagonal) throw std::invalid_argument("separation strategy qcqp needs a diagonal covariance");
      r = solve_conic(p, false, opt);
      break;
    case SepStrategy::nw:
      if (!diagonal) throw std::invalid_argument("separation strategy nw needs a diagonal covariance");
      r = solve_nw(p, opt);
      break;
    case SepStrategy::mc:
      r = solve_conic(p, true, opt);
      break;
    case SepStrategy::bqc:
      r = solve_bqc(p, opt);
      break;
    case SepStrategy::enumeration:
      return separate_enumeration(p, opt);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

SeparationResult separate(const SeparationProblem& p, SepStrategy strategy, const SepOptions& opt) {
  if (strategy == SepStrategy::enumeration) return separate_enumeration(p, opt);
  return separate_bnb(p, strategy, opt);
}

}  // namespace pnd
