#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pnd/capacity_model.hpp"
#include "pnd/submodular.hpp"

namespace pnd {

enum class CutKind {
  oa,
  pack,
  extended_pack,
  polymatroid,
  cover,
  lifted_cover,
  aggregated_cover,
  mccormick_link
};

std::string_view to_string(CutKind k);

enum class CutSense { ge, le };

/// coef'x (sense) rhs over the local index space of the originating model.
struct LinearCut {
  Vector coef;
  double rhs = 0.0;
  CutSense sense = CutSense::ge;
  CutKind kind = CutKind::oa;
  int origin = -1;

  /// Positive when x violates the cut.
  double violation(std::span<const double> x) const;
  bool holds(std::span<const double> x, double tol = 1e-7) const { return violation(x) <= tol; }
};

/// Supporting hyperplane of mu'x - omega sqrt(x'Sigma x) >= d at xbar.
LinearCut oa_gradient_cut(const CapacityModel& model, std::span<const double> xbar);

struct Pack {
  std::vector<char> in;  // local membership
  double value = 0.0;    // f(P)
  bool maximal = false;
};

/// Greedy maximal pack by non-increasing xbar. Needs a non-decreasing f (diagonal Sigma with CV).
std::optional<Pack> find_pack(const CapacityModel& model, std::span<const double> xbar);

/// x(N \ P) >= 1.
LinearCut pack_inequality(const Pack& pack);

inline constexpr int kMaxLiftOutside = 18;
inline constexpr int kMaxLiftInside = 16;

/// x(N \ P) >= 1 + sum_{i in P} alpha_i (1 - x_i), alpha by exact sequential lifting of the
/// pack variables in non-increasing xbar order. Falls back to the plain pack when too large.
LinearCut lift_pack(const CapacityModel& model, const Pack& pack, std::span<const double> xbar);

/// v'x <= rhs over binaries.
struct Knapsack {
  Vector v;
  double rhs = 0.0;
};

/// Extended polymatroid inequality of the submodular g (g(empty) = 0) at xbar: v'x <= rhs.
LinearCut polymatroid_cut(const SetFunction& g, double rhs, std::span<const double> xbar);

/// Polymatroid cut of q(x) <= 0 through g = q + d^2 (requires submodular q, i.e. CV).
LinearCut polymatroid_cut(const CapacityModel& model, std::span<const double> xbar);

Knapsack as_knapsack(const LinearCut& le_cut);

struct Cover {
  std::vector<int> members;          // sum |v| > adjusted rhs, complemented ones included
  std::vector<char> complemented;    // negative-coefficient indices
  double adjusted_rhs = 0.0;
};

/// Minimal cover of the knapsack after complementing negative coefficients.
std::optional<Cover> find_cover(const Knapsack& k, std::span<const double> xbar);

/// x(C) <= |C| - 1 with complemented members written as 1 - x.
LinearCut cover_inequality(const Knapsack& k, const Cover& c);

/// Superadditive lifting of the cover inequality over every non-cover variable, then an
/// exact re-lift of the largest-xbar lifted variable.
LinearCut lift_cover_superadditive(const Knapsack& k, const Cover& c, std::span<const double> xbar);

/// Lifting function of a cover with sorted weights a_1 >= ... >= a_r and capacity b.
class CoverLiftingFunction {
 public:
  CoverLiftingFunction(std::vector<double> weights, double capacity);
  double operator()(double z) const;

 private:
  std::vector<double> a_;
  std::vector<double> mu_;
  std::vector<double> rho_;
  double lambda_ = 0.0;
  double b_ = 0.0;
};

/// Unit-weight sum of the knapsacks, then cover and lifting.
std::optional<LinearCut> aggregate_and_cover(std::span<const Knapsack> cuts,
                                             std::span<const double> xbar);

/// q with the positive-beta products replaced by auxiliary z_ij (columns n, n+1, ...).
struct QTilde {
  int n = 0;
  std::vector<std::pair<int, int>> pairs;  // (i, j) with beta_ij > 0, i < j
  QuadraticForm q;                         // original form
  std::vector<LinearCut> links;            // McCormick rows over (x, z)

  int size() const { return n + static_cast<int>(pairs.size()); }
  /// g~ = q~ + d^2 on (x, z) memberships; submodular.
  double shifted_value(std::span<const char> in) const;
  SetFunction shifted_function() const;
  double gamma() const { return -q.constant; }
};

QTilde build_q_tilde(const CapacityModel& model);

}  // namespace pnd
