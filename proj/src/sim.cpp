#include "pnd/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <limits>
#include <thread>

#include "pnd/linalg.hpp"
#include "pnd/maxflow.hpp"
#include "pnd/rng.hpp"

namespace pnd {

Vector sample_capacities(const NetworkInstance& inst, const Matrix& chol, std::uint64_t seed, long sample) {
  const int m = inst.arc_count();
  CounterRng rng(seed);
  Vector z(m);
  const std::uint64_t base = static_cast<std::uint64_t>(sample) * static_cast<std::uint64_t>(m);
  for (int k = 0; k < m; ++k) z[k] = rng.normal(base + k);
  return inst.mu() + chol.triangularView<Eigen::Lower>() * z;
}

SimReport simulate(const NetworkInstance& inst, const std::vector<char>& design, const SimOptions& opt) {
  const int m = inst.arc_count();
  if (static_cast<int>(design.size()) != m) throw std::invalid_argument("simulate: design size differs from arc count");
  if (opt.samples <= 0) throw std::invalid_argument("simulate: samples must be positive");
  SimReport rep;
  rep.samples = opt.samples;
  rep.seed = opt.seed;
  if (!inst.has_path(design)) {
    std::cerr << "warning: design has no s-t path; service level is 0\n";
    rep.connected = false;
    if (opt.keep_values) rep.values.assign(opt.samples, 0.0);
    return rep;
  }
  const Matrix chol = cholesky(inst.cov());
  std::vector<double> cut(opt.samples);
  std::vector<long> trunc(opt.samples, 0);

  auto work = [&](long lo, long hi) {
    MaxFlow mf(inst.node_count(), inst.source(), inst.sink());
    for (const Arc& a : inst.arcs()) mf.add_arc(a.tail, a.head);
    std::vector<double> cap(m);
    for (long s = lo; s < hi; ++s) {
      Vector c = sample_capacities(inst, chol, opt.seed, s);
      for (int a = 0; a < m; ++a) {
        if (!design[a]) {
          cap[a] = 0.0;
          continue;
        }
        if (c[a] < 0.0) ++trunc[s];
        cap[a] = std::max(0.0, c[a]);
      }
      cut[s] = mf.solve(cap);
    }
  };
  const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(opt.samples)));
  if (workers == 1) {
    work(0, opt.samples);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      long lo = opt.samples * w / workers, hi = opt.samples * (w + 1) / workers;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& t : pool) t.join();
  }

  const double d = inst.demand();
  long met = 0;
  double sum = 0.0;
  rep.min_cut_min = std::numeric_limits<double>::infinity();
  rep.min_cut_max = -std::numeric_limits<double>::infinity();
  for (long s = 0; s < opt.samples; ++s) {
    if (cut[s] >= d - 1e-9) ++met;
    sum += cut[s];
    rep.min_cut_min = std::min(rep.min_cut_min, cut[s]);
    rep.min_cut_max = std::max(rep.min_cut_max, cut[s]);
    rep.truncated += trunc[s];
  }
  rep.service_level = static_cast<double>(met) / opt.samples;
  rep.min_cut_mean = sum / opt.samples;
  if (opt.keep_values) rep.values = std::move(cut);
  return rep;
}

std::vector<TradeoffRow> tradeoff_curve(const NetworkInstance& inst, const std::vector<double>& epsilons,
                                        OmegaModel model, const SolveConfig& base, const SimOptions& sim) {
  auto solve_at = [&](double eps) {
    SolveConfig c = base;
    c.omega = omega_from_epsilon(model, eps);
    return std::pair(c.omega, solve_cqnd(inst, c));
  };
  auto [omega_half, half] = solve_at(0.5);
  (void)omega_half;
  const double reference = half.design.cost;
  std::vector<TradeoffRow> rows;
  for (double eps : epsilons) {
    auto [omega, out] = solve_at(eps);
    TradeoffRow r;
    r.epsilon = eps;
    r.omega = omega;
    r.status = out.stats.status;
    if (!out.design.x.empty()) {
      r.cost = out.design.cost;
      r.cost_ratio = reference > 0.0 ? 100.0 * r.cost / reference : 0.0;
      r.arcs = out.design.arcs();
      SimOptions o = sim;
      o.keep_values = false;
      r.sim = simulate(inst, out.design.x, o);
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string sim_csv_header() { return "design,samples,seed,service_level,min_cut_min,min_cut_mean,min_cut_max,truncated"; }

std::string sim_csv_row(const std::string& label, const SimReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, ",%ld,%llu,%.6f,%.4f,%.4f,%.4f,%ld", r.samples,
                static_cast<unsigned long long>(r.seed), r.service_level, r.min_cut_min, r.min_cut_mean,
                r.min_cut_max, r.truncated);
  return label + buf;
}

std::string tradeoff_csv_header() {
  return "epsilon,omega,model_sl,cost,cost_ratio,simulated_sl,min_cut_mean,status,arcs";
}

std::string tradeoff_csv_row(const TradeoffRow& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%g,%.6f,%.4f,%.6g,%.2f,%.6f,%.4f,", r.epsilon, r.omega, 1.0 - r.epsilon, r.cost,
                r.cost_ratio, r.sim.service_level, r.sim.min_cut_mean);
  std::string arcs;
  for (int a : r.arcs) arcs += (arcs.empty() ? "" : " ") + std::to_string(a);
  return buf + r.status + "," + arcs;
}

}  // namespace pnd
