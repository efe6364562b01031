#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/LU>

#include "pnd/capacity_model.hpp"
#include "pnd/lp.hpp"
#include "pnd/network.hpp"

// Independent reference computations shared by the unit and acceptance tests.
namespace pnd::oracle {

using lp::LinearProgram;
using lp::Row;
using lp::Sense;

inline Row make_row(std::vector<double> coef, Sense s, double rhs) {
  Row r;
  for (int j = 0; j < static_cast<int>(coef.size()); ++j) {
    if (coef[j] != 0.0) {
      r.index.push_back(j);
      r.value.push_back(coef[j]);
    }
  }
  r.sense = s;
  r.rhs = rhs;
  return r;
}

// Vertex enumeration for a bounded LP: every basis of n tight constraints.
inline std::optional<double> vertex_oracle(const LinearProgram& lp) {
  const int n = lp.cost.size();
  struct Tight {
    Eigen::RowVectorXd a;
    double b;
  };
  std::vector<Tight> cons;
  std::vector<int> must;  // equality rows
  for (const Row& r : lp.rows) {
    Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(n);
    for (size_t k = 0; k < r.index.size(); ++k) a[r.index[k]] += r.value[k];
    if (r.sense == Sense::eq) must.push_back(static_cast<int>(cons.size()));
    cons.push_back({a, r.rhs});
  }
  for (int j = 0; j < n; ++j) {
    Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(n);
    e[j] = 1;
    cons.push_back({e, lp.lower[j]});
    cons.push_back({e, lp.upper[j]});
  }
  auto feasible = [&](const Vector& x) {
    for (int j = 0; j < n; ++j)
      if (x[j] < lp.lower[j] - 1e-7 || x[j] > lp.upper[j] + 1e-7) return false;
    for (const Row& r : lp.rows) {
      double v = r.activity(std::span<const double>(x.data(), n));
      if (r.sense == Sense::le && v > r.rhs + 1e-7) return false;
      if (r.sense == Sense::ge && v < r.rhs - 1e-7) return false;
      if (r.sense == Sense::eq && std::abs(v - r.rhs) > 1e-7) return false;
    }
    return true;
  };
  std::optional<double> best;
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == n) {
      for (int e : must)
        if (std::find(pick.begin(), pick.end(), e) == pick.end()) return;
      Matrix a(n, n);
      Vector b(n);
      for (int k = 0; k < n; ++k) {
        a.row(k) = cons[pick[k]].a;
        b[k] = cons[pick[k]].b;
      }
      Eigen::FullPivLU<Matrix> lu(a);
      if (!lu.isInvertible()) return;
      Vector x = lu.solve(b);
      if (!feasible(x)) return;
      double v = lp.cost.dot(x);
      if (lp.maximize) v = -v;
      if (!best || v < *best) best = v;
      return;
    }
    for (int k = start; k < static_cast<int>(cons.size()); ++k) {
      pick.push_back(k);
      rec(k + 1);
      pick.pop_back();
    }
  };
  rec(0);
  if (best && lp.maximize) best = -*best;
  return best;
}

inline LinearProgram random_lp(std::mt19937& rng, int n, int m) {
  std::uniform_real_distribution<double> u(-5, 5);
  std::uniform_int_distribution<int> sense(0, 9);
  LinearProgram lp;
  lp.maximize = sense(rng) < 3;
  lp.cost.resize(n);
  lp.lower.resize(n);
  lp.upper.resize(n);
  for (int j = 0; j < n; ++j) {
    lp.cost[j] = std::round(u(rng));
    lp.lower[j] = std::round(u(rng) / 2) - 1;
    lp.upper[j] = lp.lower[j] + std::round(std::abs(u(rng))) + (sense(rng) < 2 ? 0 : 1);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<double> c(n);
    for (double& v : c) v = sense(rng) < 3 ? 0.0 : std::round(u(rng));
    int s = sense(rng);
    lp.rows.push_back(make_row(c, s < 5 ? Sense::le : (s < 9 ? Sense::ge : Sense::eq), std::round(u(rng))));
  }
  return lp;
}

inline std::vector<double> bits_of(int bits, int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = (bits >> k) & 1;
  return x;
}

inline std::vector<char> mask_of(int bits, int n) {
  std::vector<char> x(n);
  for (int k = 0; k < n; ++k) x[k] = (bits >> k) & 1;
  return x;
}

// diagonal model satisfying mu >= omega sigma
inline CapacityModel random_cv_model(std::mt19937& rng, int n, double omega) {
  std::uniform_real_distribution<double> u(0, 1);
  Vector mu(n);
  Vector var(n);
  for (int i = 0; i < n; ++i) {
    mu[i] = 5 + 95 * u(rng);
    double sigma = u(rng) * mu[i] / omega;
    var[i] = sigma * sigma;
  }
  double d = mu.sum() * (0.2 + 0.5 * u(rng));
  return CapacityModel(mu, var.asDiagonal().toDenseMatrix(), omega, d);
}

inline CapacityModel random_correlated_model(std::mt19937& rng, int n, double omega, bool cv) {
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = g(rng);
  Matrix cov = a * a.transpose() / n * 4.0;
  Vector mu(n);
  for (int i = 0; i < n; ++i) {
    double s = std::sqrt(cov(i, i));
    mu[i] = cv ? omega * s * (1 + u(rng)) : 2 * omega * s * u(rng);
  }
  double d = mu.sum() * (0.2 + 0.4 * u(rng));
  return CapacityModel(mu, cov, omega, d);
}

inline std::vector<double> random_point(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng) < 0.3 ? std::round(u(rng)) : u(rng);
  return x;
}

// cheapest design by brute force over all arc subsets, cut capacities summed directly
inline double brute_force_cost(const NetworkInstance& net, double omega) {
  const int m = net.arc_count();
  const int n = net.node_count();
  std::vector<std::vector<int>> cuts;
  std::vector<int> inner;
  for (int v = 0; v < n; ++v)
    if (v != net.source() && v != net.sink()) inner.push_back(v);
  for (int mask = 0; mask < (1 << inner.size()); ++mask) {
    std::vector<char> side(n, 0);
    side[net.source()] = 1;
    for (size_t k = 0; k < inner.size(); ++k) side[inner[k]] = (mask >> k) & 1;
    std::vector<int> arcs;
    for (int a = 0; a < m; ++a)
      if (side[net.arc(a).tail] && !side[net.arc(a).head]) arcs.push_back(a);
    cuts.push_back(arcs);
  }
  double best = INFINITY;
  for (long x = 0; x < (1L << m); ++x) {
    double cost = 0;
    for (int a = 0; a < m; ++a)
      if ((x >> a) & 1) cost += net.arc(a).cost;
    if (cost >= best) continue;
    bool ok = true;
    for (const auto& c : cuts) {
      double mean = 0, var = 0;
      for (int a : c) {
        if (!((x >> a) & 1)) continue;
        mean += net.mu()[a];
        for (int b : c)
          if ((x >> b) & 1) var += net.cov()(a, b);
      }
      if (mean - omega * std::sqrt(std::max(0.0, var)) < net.demand() - 1e-6) {
        ok = false;
        break;
      }
    }
    if (ok) best = cost;
  }
  return best;
}

}  // namespace pnd::oracle
