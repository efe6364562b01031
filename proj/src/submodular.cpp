#include "pnd/submodular.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pnd {

namespace {

std::vector<char> mask_of(unsigned long long bits, int n) {
  std::vector<char> in(n);
  for (int i = 0; i < n; ++i) in[i] = static_cast<char>((bits >> i) & 1ull);
  return in;
}

}  // namespace

SetFunction::SetFunction(int n, Eval eval) : n_(n), eval_(std::move(eval)) {
  std::vector<char> none(n_, 0);
  empty_ = eval_(none);
}

double SetFunction::of_bits(unsigned long long bits) const { return eval_(mask_of(bits, n_)); }

SetFunction SetFunction::shifted() const {
  const double base = empty_;
  Eval inner = eval_;
  return SetFunction(n_, [inner, base](std::span<const char> in) { return inner(in) - base; });
}

double difference(const SetFunction& g, int i, std::span<const char> in) {
  if (in[i]) throw std::domain_error("difference: element already in the set");
  std::vector<char> with(in.begin(), in.end());
  with[i] = 1;
  return g(with) - g(in);
}

ModularityCertificate certify_modularity(const SetFunction& g, double tol) {
  const int n = g.size();
  if (n > kMaxCertifySize)
    throw std::length_error("certify_modularity: ground set larger than " +
                            std::to_string(kMaxCertifySize));
  const unsigned long long full = 1ull << n;
  std::vector<double> value(full);
  for (unsigned long long s = 0; s < full; ++s) value[s] = g.of_bits(s);
  double scale = 0.0;
  for (double v : value) scale = std::max(scale, std::abs(v));
  const double eps = tol * (1.0 + scale);

  ModularityCertificate cert;
  for (int i = 0; i < n && !(cert.not_submodular && cert.not_supermodular); ++i) {
    const unsigned long long bit = 1ull << i;
    const unsigned long long rest = (full - 1) & ~bit;
    // Every T subset of N \ i, then every S subset of T.
    for (unsigned long long t = rest;; t = (t - 1) & rest) {
      const double rho_t = value[t | bit] - value[t];
      for (unsigned long long s = t;; s = (s - 1) & t) {
        const double rho_s = value[s | bit] - value[s];
        if (!cert.not_submodular && rho_s < rho_t - eps)
          cert.not_submodular = ModularityCertificate::Witness{i, s, t, rho_s, rho_t};
        if (!cert.not_supermodular && rho_s > rho_t + eps)
          cert.not_supermodular = ModularityCertificate::Witness{i, s, t, rho_s, rho_t};
        if (s == 0) break;
      }
      if (t == 0) break;
    }
  }
  cert.submodular = !cert.not_submodular;
  cert.supermodular = !cert.not_supermodular;
  if (cert.submodular && cert.supermodular) cert.kind = Modularity::modular;
  else if (cert.submodular) cert.kind = Modularity::submodular;
  else if (cert.supermodular) cert.kind = Modularity::supermodular;
  else cert.kind = Modularity::neither;
  return cert;
}

PolymatroidVertex greedy_vertex(const SetFunction& g, std::span<const int> order) {
  const int n = g.size();
  if (static_cast<int>(order.size()) != n)
    throw std::invalid_argument("greedy_vertex: order must be a permutation of the ground set");
  if (std::abs(g.empty_value()) > 1e-9 * (1.0 + std::abs(g.empty_value())))
    throw std::domain_error("greedy_vertex: requires g(empty) = 0; use SetFunction::shifted()");
  PolymatroidVertex pv;
  pv.v = Vector::Zero(n);
  pv.order.assign(order.begin(), order.end());
  std::vector<char> in(n, 0);
  double prev = 0.0;
  for (int j : order) {
    in[j] = 1;
    double cur = g(in);
    pv.v[j] = cur - prev;
    prev = cur;
  }
  return pv;
}

bool PolymatroidVertex::consistent(const SetFunction& g, double tol) const {
  PolymatroidVertex again = greedy_vertex(g, order);
  return (again.v - v).cwiseAbs().maxCoeff() <= tol * (1.0 + v.cwiseAbs().maxCoeff());
}

PolymatroidSeparation separate_polymatroid(std::span<const double> xbar, const SetFunction& g,
                                           double rhs) {
  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return xbar[a] > xbar[b]; });
  PolymatroidSeparation sep;
  sep.vertex = greedy_vertex(g, order);
  sep.rhs = rhs;
  double lhs = 0.0;
  for (int i = 0; i < g.size(); ++i) lhs += xbar[i] * sep.vertex.v[i];
  sep.violation = lhs - rhs;
  return sep;
}

double NwInequality::evaluate(std::span<const double> z) const {
  double v = constant;
  for (int i = 0; i < coef.size(); ++i) v += coef[i] * z[i];
  return v;
}

NwInequality nw_inequality(const SetFunction& theta, std::span<const char> in, NwVariant variant) {
  const int n = theta.size();
  NwInequality ineq;
  ineq.coef = Vector::Zero(n);
  const double at_s = theta(in);
  ineq.constant = at_s;
  std::vector<char> work(in.begin(), in.end());
  std::vector<char> all(n, 1);
  const double at_all = theta(all);
  std::vector<char> none(n, 0);
  const double at_none = theta(none);
  for (int i = 0; i < n; ++i) {
    double rho;
    if (in[i]) {
      if (variant == NwVariant::submod1) {
        all[i] = 0;
        rho = at_all - theta(all);  // rho_i(A \ i)
        all[i] = 1;
      } else {
        work[i] = 0;
        rho = at_s - theta(work);  // rho_i(S \ i)
        work[i] = 1;
      }
      ineq.constant -= rho;
      ineq.coef[i] = rho;
    } else {
      if (variant == NwVariant::submod1) {
        work[i] = 1;
        rho = theta(work) - at_s;  // rho_i(S)
        work[i] = 0;
      } else {
        none[i] = 1;
        rho = theta(none) - at_none;  // rho_i(empty)
        none[i] = 0;
      }
      ineq.coef[i] = rho;
    }
  }
  return ineq;
}

}  // namespace pnd
