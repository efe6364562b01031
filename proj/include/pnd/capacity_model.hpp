#pragma once

#include <span>
#include <vector>

#include "pnd/network.hpp"

namespace pnd {

/// Mean vector, covariance, safety factor and demand of one cut constraint
///   mu'x - omega * sqrt(x' Sigma x) >= d,
/// stored on the cut's support: local index k refers to global arc arcs()[k].
class CapacityModel {
 public:
  CapacityModel() = default;
  CapacityModel(Vector mu, Matrix cov, double omega, double demand, std::vector<int> arcs = {});

  /// Restriction of the instance to the listed arcs.
  static CapacityModel restrict(const NetworkInstance& inst, std::span<const int> arcs,
                                double omega);

  int size() const { return static_cast<int>(mu_.size()); }
  const Vector& mu() const { return mu_; }
  const Matrix& cov() const { return cov_; }
  double omega() const { return omega_; }
  double demand() const { return demand_; }
  const std::vector<int>& arcs() const { return arcs_; }
  bool is_diagonal() const;
  double sigma(int k) const;

  /// Variance term x' Sigma x (clamped at 0).
  double variance(std::span<const double> x) const;
  /// Set-function form over a 0/1 membership mask.
  double variance_of_set(std::span<const char> in) const;

 private:
  Vector mu_;
  Matrix cov_;
  double omega_ = 0.0;
  double demand_ = 0.0;
  std::vector<int> arcs_;
};

/// q(x) = alpha'x + 2 sum_{i<j} beta_ij x_i x_j + constant for binary x.
struct QuadraticForm {
  Vector alpha;
  Matrix beta;  // symmetric, zero diagonal; beta(i, j) used for i < j
  double constant = 0.0;

  int size() const { return static_cast<int>(alpha.size()); }
  double evaluate(std::span<const char> x) const;
};

/// mu'x - omega sqrt(x' Sigma x).
double eval_f(const CapacityModel& model, std::span<const double> x);
double eval_f_set(const CapacityModel& model, std::span<const char> in);

/// omega^2 x'Sigma x - (mu'x - d)^2 evaluated directly.
double eval_q_direct(const CapacityModel& model, std::span<const char> in);

/// alpha_i = omega^2 sigma_i^2 + 2 mu_i d - mu_i^2, beta_ij = omega^2 sigma_ij - mu_i mu_j,
/// constant = -d^2.
QuadraticForm q_coefficients(const CapacityModel& model);

/// Local indices k with mu_k < omega * sigma_k (coefficient-of-variation bound fails).
std::vector<int> check_cv(const CapacityModel& model);

}  // namespace pnd
