#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pnd/network.hpp"

namespace pnd {

/// Real-valued function on subsets of {0, ..., n-1}, given as a membership mask.
class SetFunction {
 public:
  using Eval = std::function<double(std::span<const char>)>;

  SetFunction(int n, Eval eval);

  int size() const { return n_; }
  double operator()(std::span<const char> in) const { return eval_(in); }
  double empty_value() const { return empty_; }
  double of_bits(unsigned long long bits) const;

  /// g(S) - g(empty); satisfies the g(empty) = 0 hypothesis of the greedy vertex.
  SetFunction shifted() const;

 private:
  int n_;
  Eval eval_;
  double empty_;
};

/// rho_i(S) = g(S + i) - g(S). Throws std::domain_error when i is in S.
double difference(const SetFunction& g, int i, std::span<const char> in);

enum class Modularity { modular, submodular, supermodular, neither };

struct ModularityCertificate {
  Modularity kind = Modularity::neither;
  bool submodular = false;
  bool supermodular = false;
  // Witnesses of failure: rho_i(S) vs rho_i(T) with S subset of T.
  struct Witness {
    int element;
    unsigned long long smaller;
    unsigned long long larger;
    double rho_smaller;
    double rho_larger;
  };
  std::optional<Witness> not_submodular;
  std::optional<Witness> not_supermodular;
};

inline constexpr int kMaxCertifySize = 12;

/// Exhaustive check of rho_i(S) against rho_i(T) over all S subset T subset N \ i.
ModularityCertificate certify_modularity(const SetFunction& g, double tol = 1e-9);

struct PolymatroidVertex {
  Vector v;
  std::vector<int> order;
  /// Recomputes v from the stored order and compares within tol.
  bool consistent(const SetFunction& g, double tol = 1e-9) const;
};

/// Edmonds' greedy vertex v_j = g(S_j) - g(S_{j-1}) along `order`. Requires g(empty) = 0.
PolymatroidVertex greedy_vertex(const SetFunction& g, std::span<const int> order);

struct PolymatroidSeparation {
  PolymatroidVertex vertex;
  double rhs = 0.0;        // the knapsack reads v'x <= rhs
  double violation = 0.0;  // xbar'v - rhs
};

/// Vertex maximizing xbar'v over the extended polymatroid: greedy on xbar sorted
/// non-increasing, ties broken by lower index.
PolymatroidSeparation separate_polymatroid(std::span<const double> xbar, const SetFunction& g,
                                           double rhs);

enum class NwVariant { submod1, submod2 };

/// Linear under-estimator w >= constant + coef'z of a supermodular function, exact at S.
struct NwInequality {
  double constant = 0.0;
  Vector coef;
  double evaluate(std::span<const double> z) const;
};

NwInequality nw_inequality(const SetFunction& theta, std::span<const char> in, NwVariant variant);

}  // namespace pnd
