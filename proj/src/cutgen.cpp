#include "pnd/cutgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

namespace pnd {

std::string_view to_string(CutKind k) {
  switch (k) {
    case CutKind::oa: return "oa";
    case CutKind::pack: return "pack";
    case CutKind::extended_pack: return "extended-pack";
    case CutKind::polymatroid: return "polymatroid";
    case CutKind::cover: return "cover";
    case CutKind::lifted_cover: return "lifted-cover";
    case CutKind::aggregated_cover: return "aggregated-cover";
    case CutKind::mccormick_link: return "mccormick-link";
  }
  return "unknown";
}

double LinearCut::violation(std::span<const double> x) const {
  double lhs = 0.0;
  for (int i = 0; i < coef.size(); ++i) lhs += coef[i] * x[i];
  return sense == CutSense::ge ? rhs - lhs : lhs - rhs;
}

namespace {

std::vector<int> order_by_xbar(std::span<const double> xbar, int n) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return xbar[a] > xbar[b]; });
  return order;
}

double meets_tol(double d) { return 1e-9 * (1.0 + std::abs(d)); }

}  // namespace

LinearCut oa_gradient_cut(const CapacityModel& model, std::span<const double> xbar) {
  const int n = model.size();
  Eigen::Map<const Vector> x(xbar.data(), n);
  Vector sx = model.cov() * x;
  double norm2 = x.dot(sx);
  Vector u = Vector::Zero(n);
  if (norm2 > 1e-14) {
    u = sx / std::sqrt(norm2);
  } else {
    Vector s1 = model.cov() * Vector::Ones(n);
    double total = s1.sum();
    if (total > 1e-14) u = s1 / std::sqrt(total);
  }
  LinearCut cut;
  cut.coef = model.mu() - model.omega() * u;
  cut.rhs = model.demand();
  cut.sense = CutSense::ge;
  cut.kind = CutKind::oa;
  return cut;
}

std::optional<Pack> find_pack(const CapacityModel& model, std::span<const double> xbar) {
  const int n = model.size();
  const double d = model.demand();
  std::vector<char> in(n, 0);
  if (eval_f_set(model, in) >= d - meets_tol(d)) return std::nullopt;
  for (int i : order_by_xbar(xbar, n)) {
    in[i] = 1;
    if (eval_f_set(model, in) >= d - meets_tol(d)) in[i] = 0;
  }
  Pack p;
  p.in = in;
  p.value = eval_f_set(model, in);
  p.maximal = true;
  for (int i = 0; i < n && p.maximal; ++i) {
    if (in[i]) continue;
    in[i] = 1;
    if (eval_f_set(model, in) < d - meets_tol(d)) p.maximal = false;
    in[i] = 0;
  }
  // a pack covering every arc means the constraint cannot be met at all
  if (std::all_of(p.in.begin(), p.in.end(), [](char c) { return c != 0; })) return std::nullopt;
  return p;
}

LinearCut pack_inequality(const Pack& pack) {
  const int n = static_cast<int>(pack.in.size());
  LinearCut cut;
  cut.coef = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    if (!pack.in[i]) cut.coef[i] = 1.0;
  cut.rhs = 1.0;
  cut.sense = CutSense::ge;
  cut.kind = CutKind::pack;
  return cut;
}

LinearCut lift_pack(const CapacityModel& model, const Pack& pack, std::span<const double> xbar) {
  LinearCut base = pack_inequality(pack);
  const int n = model.size();
  std::vector<int> outside, inside;
  for (int i = 0; i < n; ++i) (pack.in[i] ? inside : outside).push_back(i);
  const int m = static_cast<int>(outside.size());
  if (m > kMaxLiftOutside || inside.empty()) return base;

  const double omega = model.omega();
  const double d = model.demand();
  auto var = [&](int i) { return model.cov()(i, i); };

  // Pareto frontiers of (mu(K), var(K)) per |K| over K subset of N \ P
  std::vector<std::vector<std::pair<double, double>>> front(m + 1);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    double mk = 0.0, vk = 0.0;
    for (int k = 0; k < m; ++k)
      if (mask >> k & 1u) {
        mk += model.mu()[outside[k]];
        vk += var(outside[k]);
      }
    front[std::popcount(mask)].emplace_back(mk, vk);
  }
  for (auto& f : front) {
    std::sort(f.begin(), f.end(), [](auto a, auto b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::pair<double, double>> keep;
    double best_v = std::numeric_limits<double>::infinity();
    for (auto p : f) {
      if (p.second < best_v) {
        keep.push_back(p);
        best_v = p.second;
      }
    }
    f = std::move(keep);
  }
  const int infinite = -1;
  auto smallest_completion = [&](double mu_s, double var_s) {
    for (int k = 0; k <= m; ++k)
      for (auto [mk, vk] : front[k])
        if (mu_s + mk - omega * std::sqrt(std::max(0.0, var_s + vk)) >= d - meets_tol(d)) return k;
    return infinite;
  };

  std::vector<int> order = inside;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return xbar[a] > xbar[b]; });
  const int lift_count = std::min<int>(static_cast<int>(order.size()), kMaxLiftInside);
  std::vector<double> alpha(order.size(), 0.0);

  for (int t = 0; t < lift_count; ++t) {
    double mu_base = 0.0, var_base = 0.0;
    for (size_t k = t + 1; k < order.size(); ++k) {
      mu_base += model.mu()[order[k]];
      var_base += var(order[k]);
    }
    double best = std::numeric_limits<double>::infinity();
    double alpha_total = 0.0;
    for (int k = 0; k < t; ++k) alpha_total += alpha[k];
    for (unsigned mask = 0; mask < (1u << t); ++mask) {
      double mu_s = mu_base, var_s = var_base, absent = alpha_total;
      for (int k = 0; k < t; ++k)
        if (mask >> k & 1u) {
          mu_s += model.mu()[order[k]];
          var_s += var(order[k]);
          absent -= alpha[k];
        }
      int g = smallest_completion(mu_s, var_s);
      if (g == infinite) continue;
      best = std::min(best, g - 1.0 - absent);
    }
    alpha[t] = std::isfinite(best) ? std::max(0.0, best) : static_cast<double>(m);
  }

  LinearCut cut = base;
  bool lifted = false;
  for (size_t k = 0; k < order.size(); ++k) {
    if (alpha[k] <= 0.0) continue;
    cut.coef[order[k]] = alpha[k];
    cut.rhs += alpha[k];
    lifted = true;
  }
  cut.kind = lifted ? CutKind::extended_pack : CutKind::pack;
  return cut;
}

LinearCut polymatroid_cut(const SetFunction& g, double rhs, std::span<const double> xbar) {
  PolymatroidSeparation sep = separate_polymatroid(xbar, g, rhs);
  LinearCut cut;
  cut.coef = sep.vertex.v;
  cut.rhs = rhs;
  cut.sense = CutSense::le;
  cut.kind = CutKind::polymatroid;
  return cut;
}

LinearCut polymatroid_cut(const CapacityModel& model, std::span<const double> xbar) {
  QuadraticForm q = q_coefficients(model);
  const double c = q.constant;
  SetFunction g(q.size(), [q, c](std::span<const char> in) { return q.evaluate(in) - c; });
  return polymatroid_cut(g, -c, xbar);
}

Knapsack as_knapsack(const LinearCut& cut) {
  Knapsack k;
  if (cut.sense == CutSense::le) {
    k.v = cut.coef;
    k.rhs = cut.rhs;
  } else {
    k.v = -cut.coef;
    k.rhs = -cut.rhs;
  }
  return k;
}

std::optional<Cover> find_cover(const Knapsack& k, std::span<const double> xbar) {
  const int n = k.v.size();
  Cover c;
  c.complemented.assign(n, 0);
  double b = k.rhs;
  std::vector<double> val(n);
  for (int i = 0; i < n; ++i) {
    val[i] = xbar[i];
    if (k.v[i] < 0) {
      c.complemented[i] = 1;
      b -= k.v[i];
      val[i] = 1.0 - xbar[i];
    }
  }
  c.adjusted_rhs = b;
  if (b < 0) return std::nullopt;
  const double tol = 1e-9 * (1.0 + std::abs(b));
  double sum = 0.0;
  std::vector<int> picked;
  for (int i : order_by_xbar(val, n)) {
    if (k.v[i] == 0) continue;
    picked.push_back(i);
    sum += std::abs(k.v[i]);
    if (sum > b + tol) break;
  }
  if (sum <= b + tol) return std::nullopt;
  // drop members from the lowest value end while the set stays a cover
  for (int p = static_cast<int>(picked.size()) - 1; p >= 0; --p) {
    int i = picked[p];
    if (sum - std::abs(k.v[i]) > b + tol) {
      sum -= std::abs(k.v[i]);
      picked.erase(picked.begin() + p);
    }
  }
  std::sort(picked.begin(), picked.end());
  c.members = picked;
  return c;
}

LinearCut cover_inequality(const Knapsack& k, const Cover& c) {
  LinearCut cut;
  cut.coef = Vector::Zero(k.v.size());
  cut.rhs = static_cast<double>(c.members.size()) - 1.0;
  for (int i : c.members) {
    if (c.complemented[i]) {
      cut.coef[i] = -1.0;
      cut.rhs -= 1.0;
    } else {
      cut.coef[i] = 1.0;
    }
  }
  cut.sense = CutSense::le;
  cut.kind = CutKind::cover;
  return cut;
}

CoverLiftingFunction::CoverLiftingFunction(std::vector<double> weights, double capacity)
    : a_(std::move(weights)), b_(capacity) {
  std::sort(a_.begin(), a_.end(), std::greater<>());
  const int r = static_cast<int>(a_.size());
  mu_.assign(r + 1, 0.0);
  for (int h = 1; h <= r; ++h) mu_[h] = mu_[h - 1] + a_[h - 1];
  lambda_ = mu_[r] - b_;
  rho_.assign(r, 0.0);
  for (int h = 0; h < r; ++h) rho_[h] = std::max(0.0, a_[h] - (a_[0] - lambda_));
}

double CoverLiftingFunction::operator()(double z) const {
  const int r = static_cast<int>(a_.size());
  if (z <= 0.0 || r == 0) return 0.0;
  if (z <= mu_[1] - lambda_) return 0.0;
  for (int h = 1; h < r; ++h) {
    double lo = mu_[h] - lambda_;
    if (z > lo && z < lo + rho_[h]) return h - (lo + rho_[h] - z) / rho_[1];
    if (z >= lo + rho_[h] && z <= mu_[h + 1] - lambda_) return h;
  }
  return r - 1.0;
}

namespace {

// max pi'y s.t. w'y <= cap over binaries, depth-first with the fractional bound
std::optional<double> knapsack_max(const std::vector<double>& pi, const std::vector<double>& w,
                                   double cap, long node_cap = 2000000) {
  if (cap < -1e-12) return std::nullopt;
  std::vector<int> items;
  double free_gain = 0.0;
  for (size_t i = 0; i < pi.size(); ++i) {
    if (pi[i] <= 0) continue;
    if (w[i] <= 0) free_gain += pi[i];
    else items.push_back(static_cast<int>(i));
  }
  std::sort(items.begin(), items.end(), [&](int a, int b) { return pi[a] / w[a] > pi[b] / w[b]; });
  double best = 0.0;
  long nodes = 0;
  bool aborted = false;
  std::function<void(size_t, double, double)> dfs = [&](size_t k, double val, double room) {
    if (aborted) return;
    if (++nodes > node_cap) {
      aborted = true;
      return;
    }
    best = std::max(best, val);
    double bound = val, r = room;
    for (size_t t = k; t < items.size(); ++t) {
      int i = items[t];
      if (w[i] <= r) {
        bound += pi[i];
        r -= w[i];
      } else {
        bound += pi[i] * r / w[i];
        break;
      }
    }
    if (bound <= best + 1e-12) return;
    for (size_t t = k; t < items.size(); ++t) {
      int i = items[t];
      if (w[i] <= room + 1e-12) dfs(t + 1, val + pi[i], room - w[i]);
    }
  };
  dfs(0, 0.0, cap);
  if (aborted) return std::nullopt;
  return best + free_gain;
}

}  // namespace

LinearCut lift_cover_superadditive(const Knapsack& k, const Cover& c, std::span<const double> xbar) {
  const int n = k.v.size();
  const double b = c.adjusted_rhs;
  std::vector<double> w(n);
  std::vector<double> val(n);  // xbar in the complemented space
  for (int i = 0; i < n; ++i) {
    w[i] = std::abs(k.v[i]);
    val[i] = c.complemented[i] ? 1.0 - xbar[i] : xbar[i];
  }
  std::vector<char> in_cover(n, 0);
  std::vector<double> cover_w;
  for (int i : c.members) {
    in_cover[i] = 1;
    cover_w.push_back(w[i]);
  }
  const double r1 = static_cast<double>(c.members.size()) - 1.0;
  CoverLiftingFunction lift(cover_w, b);
  std::vector<double> pi(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (in_cover[i]) pi[i] = 1.0;
    else if (w[i] > b + 1e-12) pi[i] = r1;
    else pi[i] = std::clamp(lift(w[i]), 0.0, r1);
  }
  // exact re-lift of one variable as if it came last in the sequence
  int pick = -1;
  for (int i = 0; i < n; ++i) {
    if (in_cover[i] || w[i] <= 0 || w[i] > b) continue;
    if (pick < 0 || val[i] > val[pick]) pick = i;
  }
  if (pick >= 0) {
    std::vector<double> others = pi;
    others[pick] = 0.0;
    if (auto best = knapsack_max(others, w, b - w[pick])) pi[pick] = std::max(pi[pick], r1 - *best);
  }
  LinearCut cut;
  cut.coef = Vector::Zero(n);
  cut.rhs = r1;
  for (int i = 0; i < n; ++i) {
    if (pi[i] == 0.0) continue;
    if (c.complemented[i]) {
      cut.coef[i] = -pi[i];
      cut.rhs -= pi[i];
    } else {
      cut.coef[i] = pi[i];
    }
  }
  cut.sense = CutSense::le;
  cut.kind = CutKind::lifted_cover;
  return cut;
}

std::optional<LinearCut> aggregate_and_cover(std::span<const Knapsack> cuts,
                                             std::span<const double> xbar) {
  if (cuts.empty()) return std::nullopt;
  Knapsack sum;
  sum.v = Vector::Zero(cuts.front().v.size());
  for (const Knapsack& k : cuts) {
    sum.v += k.v;
    sum.rhs += k.rhs;
  }
  auto cover = find_cover(sum, xbar);
  if (!cover) return std::nullopt;
  LinearCut cut = lift_cover_superadditive(sum, *cover, xbar);
  cut.kind = CutKind::aggregated_cover;
  return cut;
}

double QTilde::shifted_value(std::span<const char> in) const {
  double v = 0.0;
  for (int i = 0; i < n; ++i)
    if (in[i]) v += q.alpha[i];
  for (int i = 0; i < n; ++i) {
    if (!in[i]) continue;
    for (int j = i + 1; j < n; ++j)
      if (in[j] && q.beta(i, j) < 0) v += 2.0 * q.beta(i, j);
  }
  for (size_t p = 0; p < pairs.size(); ++p)
    if (in[n + p]) v += 2.0 * q.beta(pairs[p].first, pairs[p].second);
  return v;
}

SetFunction QTilde::shifted_function() const {
  QTilde copy = *this;
  return SetFunction(size(), [copy](std::span<const char> in) { return copy.shifted_value(in); });
}

QTilde build_q_tilde(const CapacityModel& model) {
  QTilde qt;
  qt.n = model.size();
  qt.q = q_coefficients(model);
  for (int i = 0; i < qt.n; ++i)
    for (int j = i + 1; j < qt.n; ++j)
      if (qt.q.beta(i, j) > 0) qt.pairs.emplace_back(i, j);
  const int total = qt.size();
  for (size_t p = 0; p < qt.pairs.size(); ++p) {
    auto [i, j] = qt.pairs[p];
    const int z = qt.n + static_cast<int>(p);
    auto link = [&](double ci, double cj, double cz, double rhs, CutSense s) {
      LinearCut c;
      c.coef = Vector::Zero(total);
      c.coef[i] = ci;
      c.coef[j] = cj;
      c.coef[z] = cz;
      c.rhs = rhs;
      c.sense = s;
      c.kind = CutKind::mccormick_link;
      qt.links.push_back(std::move(c));
    };
    link(-1, 0, 1, 0, CutSense::le);   // z <= x_i
    link(0, -1, 1, 0, CutSense::le);   // z <= x_j
    link(-1, -1, 1, -1, CutSense::ge); // z >= x_i + x_j - 1
  }
  return qt;
}

}  // namespace pnd
