#include "pnd/cqnd.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pnd/capacity_model.hpp"
#include "pnd/cutgen.hpp"
#include "pnd/maxflow.hpp"
#include "pnd/mip.hpp"
#include "pnd/st_cut.hpp"

namespace pnd {

CutFamilies CutFamilies::parse(std::string_view list) {
  CutFamilies f;
  std::string item;
  std::stringstream ss{std::string(list)};
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty() || item == "none" || item == "oa") continue;
    if (item == "pack") f.pack = true;
    else if (item == "xpack") f.xpack = true;
    else if (item == "polymatroid") f.polymatroid = true;
    else if (item == "cover") f.cover = true;
    else if (item == "aggregate") f.aggregate = true;
    else throw std::invalid_argument("unknown cut family '" + item + "'");
  }
  return f;
}

std::string CutFamilies::str() const {
  std::string s;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!s.empty()) s += ',';
    s += name;
  };
  add(pack, "pack");
  add(xpack, "xpack");
  add(polymatroid, "polymatroid");
  add(cover, "cover");
  add(aggregate, "aggregate");
  return s.empty() ? "none" : s;
}

void SolveConfig::validate() const {
  if (!(omega >= 0.0) || !std::isfinite(omega)) throw std::invalid_argument("omega must be finite and >= 0");
  if (node_limit <= 0) throw std::invalid_argument("node limit must be positive");
  if (!(time_limit > 0.0)) throw std::invalid_argument("time limit must be positive");
  if (!(memory_limit_mb > 0.0)) throw std::invalid_argument("memory limit must be positive");
  if (threads <= 0) throw std::invalid_argument("threads must be positive");
  if (root_rounds <= 0 || node_rounds <= 0) throw std::invalid_argument("round limits must be positive");
  if (branching != "most-fractional") throw std::invalid_argument("unknown branching rule '" + branching + "'");
}

std::vector<int> Design::arcs() const {
  std::vector<int> out;
  for (int a = 0; a < static_cast<int>(x.size()); ++a)
    if (x[a]) out.push_back(a);
  return out;
}

double worst_cut_slack(const NetworkInstance& inst, const std::vector<char>& x, double omega) {
  std::vector<double> xd(x.begin(), x.end());
  auto p = SeparationProblem::make(inst, xd, omega);
  return -separate_enumeration(p).violation;
}

namespace {

constexpr double kCutTol = 1e-6;
constexpr int kMeanFamily = 100;

struct Registered {
  std::vector<int> arcs;
  CapacityModel model;
  bool diagonal = true;
  bool cv = true;
  std::optional<QTilde> qt;
  std::vector<int> zcols;
};

class CqndSeparator {
 public:
  CqndSeparator(const NetworkInstance& inst, const SolveConfig& cfg, SepStrategy strategy)
      : inst_(inst), cfg_(cfg), strategy_(strategy), m_(inst.arc_count()) {}

  void operator()(const Vector& x, bool integral, mip::CutContext& ctx);
  long separations() const { return separations_; }

 private:
  int register_cut(const std::vector<int>& arcs);
  std::vector<double> local(const Registered& r, const std::vector<double>& xb) const;
  void add(mip::CutContext& ctx, const LinearCut& c, const std::vector<int>& cols, std::span<const double> at,
           int family);
  void ensure_products(Registered& r, mip::CutContext& ctx);

  const NetworkInstance& inst_;
  const SolveConfig& cfg_;
  SepStrategy strategy_;
  int m_;
  std::vector<Registered> reg_;
  std::map<std::vector<int>, int> reg_index_;
  std::map<std::pair<int, int>, int> product_col_;
  long separations_ = 0;
};

int CqndSeparator::register_cut(const std::vector<int>& arcs) {
  auto it = reg_index_.find(arcs);
  if (it != reg_index_.end()) return it->second;
  Registered r;
  r.arcs = arcs;
  r.model = CapacityModel::restrict(inst_, arcs, cfg_.omega);
  r.diagonal = r.model.is_diagonal();
  r.cv = check_cv(r.model).empty();
  reg_.push_back(std::move(r));
  int id = static_cast<int>(reg_.size()) - 1;
  reg_index_.emplace(arcs, id);
  return id;
}

std::vector<double> CqndSeparator::local(const Registered& r, const std::vector<double>& xb) const {
  std::vector<double> out(r.arcs.size());
  for (size_t k = 0; k < r.arcs.size(); ++k) out[k] = xb[r.arcs[k]];
  return out;
}

void CqndSeparator::add(mip::CutContext& ctx, const LinearCut& c, const std::vector<int>& cols,
                        std::span<const double> at, int family) {
  if (c.violation(at) < kCutTol) return;
  lp::Row row;
  for (int k = 0; k < c.coef.size(); ++k) {
    if (c.coef[k] == 0.0) continue;
    row.index.push_back(cols[k]);
    row.value.push_back(c.coef[k]);
  }
  row.sense = c.sense == CutSense::ge ? lp::Sense::ge : lp::Sense::le;
  row.rhs = c.rhs;
  ctx.add_cut(std::move(row), family);
}

void CqndSeparator::ensure_products(Registered& r, mip::CutContext& ctx) {
  if (r.qt) return;
  r.qt = build_q_tilde(r.model);
  for (auto [i, j] : r.qt->pairs) {
    std::pair<int, int> key{r.arcs[i], r.arcs[j]};
    auto it = product_col_.find(key);
    if (it == product_col_.end()) {
      int col = ctx.add_column(0.0, 0.0, 1.0, false);
      it = product_col_.emplace(key, col).first;
      const int xi = key.first, xj = key.second;
      auto link = [&](std::vector<int> idx, std::vector<double> val, lp::Sense s, double rhs) {
        lp::Row row;
        row.index = std::move(idx);
        row.value = std::move(val);
        row.sense = s;
        row.rhs = rhs;
        ctx.add_cut(std::move(row), static_cast<int>(CutKind::mccormick_link));
      };
      link({col, xi}, {1, -1}, lp::Sense::le, 0);
      link({col, xj}, {1, -1}, lp::Sense::le, 0);
      link({col, xi, xj}, {1, -1, -1}, lp::Sense::ge, -1);
    }
    r.zcols.push_back(it->second);
  }
}

void CqndSeparator::operator()(const Vector& x, bool, mip::CutContext& ctx) {
  std::vector<double> xb(x.data(), x.data() + m_);
  for (double& v : xb) v = std::clamp(v, 0.0, 1.0);
  const double d = inst_.demand();
  std::vector<int> all(m_);
  for (int a = 0; a < m_; ++a) all[a] = a;

  // mean capacities first
  std::vector<double> cap(m_);
  for (int a = 0; a < m_; ++a) cap[a] = inst_.mu()[a] * xb[a];
  MaxFlowResult flow = max_flow_min_cut(inst_, cap);
  if (flow.value < d - kCutTol) {
    register_cut(flow.cut_arcs);
    LinearCut c;
    c.coef = Vector::Zero(m_);
    for (int a : flow.cut_arcs) c.coef[a] = inst_.mu()[a];
    c.rhs = d;
    c.sense = CutSense::ge;
    add(ctx, c, all, xb, kMeanFamily);
    return;
  }

  auto p = SeparationProblem::make(inst_, xb, cfg_.omega);
  SeparationResult sep = separate(p, strategy_);
  ++separations_;
  if (sep.status == SeparationResult::Status::violated && sep.cut) register_cut(sep.cut->arc_ids);

  // knapsacks live on every LP column: arcs, then shared product columns
  std::vector<double> xall(x.data(), x.data() + x.size());
  for (double& v : xall) v = std::clamp(v, 0.0, 1.0);
  std::vector<Knapsack> knapsacks;
  for (size_t id = 0; id < reg_.size(); ++id) {
    Registered& r = reg_[id];
    std::vector<double> xl = local(r, xb);
    if (eval_f(r.model, xl) < d - kCutTol) add(ctx, oa_gradient_cut(r.model, xl), r.arcs, xl, 0);

    const CutFamilies& fam = cfg_.cuts;
    if ((fam.pack || fam.xpack) && r.diagonal && r.cv) {
      if (auto pk = find_pack(r.model, xl)) {
        if (fam.xpack) add(ctx, lift_pack(r.model, *pk, xl), r.arcs, xl, static_cast<int>(CutKind::extended_pack));
        if (fam.pack) add(ctx, pack_inequality(*pk), r.arcs, xl, static_cast<int>(CutKind::pack));
      }
    }
    if (!fam.polymatroid) continue;
    if (r.cv) {
      LinearCut pc = polymatroid_cut(r.model, xl);
      add(ctx, pc, r.arcs, xl, static_cast<int>(CutKind::polymatroid));
      Knapsack k = as_knapsack(pc);
      Knapsack g;
      g.v = Vector::Zero(m_);
      for (size_t j = 0; j < r.arcs.size(); ++j) g.v[r.arcs[j]] = k.v[j];
      g.rhs = k.rhs;
      knapsacks.push_back(std::move(g));
    } else {
      ensure_products(r, ctx);
      std::vector<int> cols = r.arcs;
      std::vector<double> ext = xl;
      for (size_t q = 0; q < r.zcols.size(); ++q) {
        int col = r.zcols[q];
        auto [i, j] = r.qt->pairs[q];
        if (col >= static_cast<int>(xall.size())) xall.resize(col + 1, 0.0);
        if (col >= x.size()) xall[col] = xl[i] * xl[j];
        cols.push_back(col);
        ext.push_back(xall[col]);
      }
      LinearCut pc = polymatroid_cut(r.qt->shifted_function(), r.qt->gamma(), ext);
      add(ctx, pc, cols, ext, static_cast<int>(CutKind::polymatroid));
      Knapsack k = as_knapsack(pc);
      Knapsack g;
      g.v = Vector::Zero(xall.size());
      for (size_t j = 0; j < cols.size(); ++j) g.v[cols[j]] = k.v[j];
      g.rhs = k.rhs;
      knapsacks.push_back(std::move(g));
    }
  }
  const int width = static_cast<int>(xall.size());
  for (Knapsack& k : knapsacks) {
    const int old = static_cast<int>(k.v.size());
    k.v.conservativeResize(width);
    k.v.tail(width - old).setZero();
  }
  std::vector<int> every(width);
  for (int j = 0; j < width; ++j) every[j] = j;

  if (cfg_.cuts.cover) {
    for (const Knapsack& k : knapsacks) {
      auto cover = find_cover(k, xall);
      if (!cover) continue;
      add(ctx, lift_cover_superadditive(k, *cover, xall), every, xall, static_cast<int>(CutKind::lifted_cover));
    }
  }
  if (cfg_.cuts.aggregate && knapsacks.size() >= 2) {
    if (auto c = aggregate_and_cover(knapsacks, xall))
      add(ctx, *c, every, xall, static_cast<int>(CutKind::aggregated_cover));
  }
}

std::string family_name(int f) {
  if (f == kMeanFamily) return "mean";
  return std::string(to_string(static_cast<CutKind>(f)));
}

std::string status_name(mip::Status s) {
  switch (s) {
    case mip::Status::optimal: return "optimal";
    case mip::Status::infeasible: return "infeasible";
    case mip::Status::node_limit: return "node-limit";
    case mip::Status::time_limit: return "time-limit";
    case mip::Status::memory_limit: return "memory-limit";
    case mip::Status::unbounded: return "unbounded";
    case mip::Status::numerical: return "numerical";
  }
  return "unknown";
}

SepStrategy pick_strategy(const NetworkInstance& inst, const SolveConfig& cfg) {
  if (cfg.separation) return *cfg.separation;
  return inst.node_count() - 2 <= 12 ? SepStrategy::enumeration : SepStrategy::bqc;
}

bool certify(const NetworkInstance& inst, const std::vector<char>& x, double omega, SepStrategy strategy,
             double& slack) {
  if (inst.node_count() - 2 <= kDefaultEnumerationLimit) {
    slack = worst_cut_slack(inst, x, omega);
    return slack >= -kCutTol;
  }
  std::vector<double> xd(x.begin(), x.end());
  auto r = separate(SeparationProblem::make(inst, xd, omega), strategy);
  slack = -r.violation;
  return r.status == SeparationResult::Status::none;
}

}  // namespace

SolveOutcome solve_cqnd(const NetworkInstance& inst, const SolveConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const int m = inst.arc_count();
  const SepStrategy strategy = pick_strategy(inst, config);
  SolveOutcome out;

  // buying everything must already be enough
  {
    std::vector<double> ones(m, 1.0);
    auto r = separate(SeparationProblem::make(inst, ones, config.omega), strategy);
    if (r.status == SeparationResult::Status::violated) {
      out.stats.status = "infeasible";
      out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return out;
    }
  }

  mip::Problem prob;
  prob.lp.cost = inst.costs();
  prob.lp.lower = Vector::Zero(m);
  prob.lp.upper = Vector::Ones(m);
  prob.integer.assign(m, 1);
  // nominal cuts around the source and the sink
  for (int side : {0, 1}) {
    lp::Row row;
    for (int a = 0; a < m; ++a) {
      const Arc& arc = inst.arc(a);
      bool crossing = side == 0 ? arc.tail == inst.source() && arc.head != inst.source()
                                : arc.head == inst.sink() && arc.tail != inst.sink();
      if (!crossing) continue;
      row.index.push_back(a);
      row.value.push_back(inst.mu()[a]);
    }
    row.sense = lp::Sense::ge;
    row.rhs = inst.demand();
    prob.lp.rows.push_back(std::move(row));
  }

  mip::Settings ms;
  ms.node_limit = config.node_limit;
  ms.time_limit = config.time_limit;
  ms.memory_limit_mb = config.memory_limit_mb;
  ms.root_round_limit = config.root_rounds;
  ms.node_round_limit = config.node_rounds;
  ms.deactivate_after = 5;
  mip::BranchAndCut bc(std::move(prob), ms);
  CqndSeparator sep(inst, config, strategy);
  bc.set_separator([&sep](const Vector& x, bool integral, mip::CutContext& ctx) { sep(x, integral, ctx); });
  mip::Result res = bc.solve();

  SolveStats& st = out.stats;
  st.status = status_name(res.status);
  st.nodes = res.nodes;
  st.cuts = res.cuts;
  st.lp_iterations = res.lp_iterations;
  st.separations = sep.separations();
  st.root_bound = res.root_bound;
  st.best_bound = res.best_bound;
  for (auto [family, count] : res.cuts_by_family) {
    st.cuts_by_family[family_name(family)] += count;
    if (family == static_cast<int>(CutKind::cover) || family == static_cast<int>(CutKind::lifted_cover) ||
        family == static_cast<int>(CutKind::aggregated_cover))
      st.covers += count;
  }
  if (res.incumbent) {
    Design& dsn = out.design;
    dsn.x.assign(m, 0);
    for (int a = 0; a < m; ++a) dsn.x[a] = (*res.incumbent)[a] > 0.5 ? 1 : 0;
    dsn.cost = 0.0;
    for (int a = 0; a < m; ++a)
      if (dsn.x[a]) dsn.cost += inst.arc(a).cost;
    st.objective = dsn.cost;
    if (config.certify) dsn.certified = certify(inst, dsn.x, config.omega, strategy, dsn.worst_slack);
    const double zo = dsn.cost;
    if (zo > 0.0) st.rgap = std::max(0.0, 100.0 * (zo - res.root_bound) / zo);
    if (res.status != mip::Status::optimal && zo > 0.0)
      st.egap = std::max(0.0, 100.0 * (zo - res.best_bound) / zo);
  }
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

double root_gap(const NetworkInstance& inst, const SolveConfig& config) {
  return solve_cqnd(inst, config).stats.rgap;
}

std::string csv_header(bool with_time) {
  std::string h = "instance,n,m,beta,omega,cost,rgap,cuts,covers,nodes,";
  if (with_time) h += "time,";
  return h + "status,egap";
}

std::string csv_row(const NetworkInstance& inst, const SolveConfig& config, const SolveOutcome& out,
                    bool with_time) {
  char buf[512];
  std::string beta = inst.beta() ? std::to_string(*inst.beta()) : "";
  if (inst.beta()) {
    std::snprintf(buf, sizeof buf, "%g", *inst.beta());
    beta = buf;
  }
  std::string egap = out.stats.egap ? (std::snprintf(buf, sizeof buf, "%.4f", *out.stats.egap), std::string(buf)) : "";
  std::snprintf(buf, sizeof buf, "%s,%d,%d,%s,%.6g,%.6g,%.4f,%ld,%ld,%ld,", inst.id().c_str(), inst.node_count(),
                inst.arc_count(), beta.c_str(), config.omega, out.design.cost, out.stats.rgap, out.stats.cuts,
                out.stats.covers, out.stats.nodes);
  std::string row = buf;
  if (with_time) {
    std::snprintf(buf, sizeof buf, "%.3f,", out.stats.seconds);
    row += buf;
  }
  return row + out.stats.status + "," + egap;
}

}  // namespace pnd
