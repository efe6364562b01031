#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pnd/network.hpp"
#include "pnd/st_cut.hpp"

namespace pnd {

enum class SepStrategy { enumeration, qcqp, mc, bqc, nw };

SepStrategy parse_sep_strategy(std::string_view name);
std::string_view to_string(SepStrategy s);

/// Nonlinear min-cut for a candidate design xbar: minimize
///   Theta(z) = mu_x'z - omega sqrt(z' Sigma_x z),  mu_x = diag(xbar) mu, Sigma_x = diag(xbar) Sigma diag(xbar)
/// over s-t cuts z.
struct SeparationProblem {
  const NetworkInstance* net = nullptr;
  std::vector<double> xbar;
  double omega = 0.0;
  double demand = 0.0;
  std::vector<int> support;  // arcs with xbar above the support threshold
  Vector mu_x;               // per arc
  Matrix cov_x;              // per arc pair

  static SeparationProblem make(const NetworkInstance& net, std::span<const double> xbar, double omega,
                                double support_tol = 1e-9);
};

/// Theta of the cut given by node labels (w_s = 1, w_t = 0) and arc labels z over all arcs.
/// Throws std::domain_error when z is not the arc set leaving {w = 1}.
double eval_theta(const SeparationProblem& p, std::span<const char> z, std::span<const char> w);
double eval_theta(const SeparationProblem& p, const Cut& cut);

struct SeparationResult {
  enum class Status { violated, none, limit };
  Status status = Status::none;
  std::optional<Cut> cut;  // minimizer (or violated witness for bqc)
  double theta = 0.0;
  double violation = 0.0;  // d - theta
  bool linear_stage = false;
  long nodes = 0;
  double seconds = 0.0;
};

std::string_view to_string(SeparationResult::Status s);

struct SepOptions {
  long node_limit = 1000000;
  double time_limit = 600.0;
  bool exact_minimum = false;  // bqc: descend until Theta is minimal
  int enumeration_limit = kDefaultEnumerationLimit;
};

/// Exhaustive oracle over every cut; ties by smallest source-side mask.
SeparationResult separate_enumeration(const SeparationProblem& p, const SepOptions& opt = {});

/// Formulation-based separation on the internal branch-and-cut engine.
/// qcqp and nw need a diagonal covariance; std::invalid_argument otherwise.
SeparationResult separate_bnb(const SeparationProblem& p, SepStrategy strategy, const SepOptions& opt = {});

SeparationResult separate(const SeparationProblem& p, SepStrategy strategy, const SepOptions& opt = {});

inline constexpr double kViolationTol = 1e-7;
inline constexpr double kBqcEpsilon = 1e-6;

}  // namespace pnd
