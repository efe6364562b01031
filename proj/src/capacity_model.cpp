#include "pnd/capacity_model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pnd {

CapacityModel::CapacityModel(Vector mu, Matrix cov, double omega, double demand,
                             std::vector<int> arcs)
    : mu_(std::move(mu)), cov_(std::move(cov)), omega_(omega), demand_(demand),
      arcs_(std::move(arcs)) {
  if (omega_ < 0.0) throw std::domain_error("CapacityModel: omega must be >= 0");
  if (cov_.rows() != mu_.size() || cov_.cols() != mu_.size())
    throw std::invalid_argument("CapacityModel: covariance shape mismatch");
  if (arcs_.empty()) {
    arcs_.resize(mu_.size());
    for (int k = 0; k < static_cast<int>(arcs_.size()); ++k) arcs_[k] = k;
  }
}

CapacityModel CapacityModel::restrict(const NetworkInstance& inst, std::span<const int> arcs,
                                      double omega) {
  const auto k = static_cast<Eigen::Index>(arcs.size());
  Vector mu(k);
  Matrix cov(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    mu[i] = inst.mu()[arcs[i]];
    for (Eigen::Index j = 0; j < k; ++j) cov(i, j) = inst.cov()(arcs[i], arcs[j]);
  }
  return CapacityModel(std::move(mu), std::move(cov), omega, inst.demand(),
                       std::vector<int>(arcs.begin(), arcs.end()));
}

bool CapacityModel::is_diagonal() const {
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j)
      if (i != j && cov_(i, j) != 0.0) return false;
  return true;
}

double CapacityModel::sigma(int k) const { return std::sqrt(std::max(0.0, cov_(k, k))); }

double CapacityModel::variance(std::span<const double> x) const {
  Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return std::max(0.0, xv.dot(cov_ * xv));
}

double CapacityModel::variance_of_set(std::span<const char> in) const {
  double v = 0.0;
  for (int i = 0; i < size(); ++i) {
    if (!in[i]) continue;
    v += cov_(i, i);
    for (int j = i + 1; j < size(); ++j)
      if (in[j]) v += 2.0 * cov_(i, j);
  }
  return std::max(0.0, v);
}

double eval_f(const CapacityModel& model, std::span<const double> x) {
  Eigen::Map<const Vector> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return model.mu().dot(xv) - model.omega() * std::sqrt(model.variance(x));
}

double eval_f_set(const CapacityModel& model, std::span<const char> in) {
  double mean = 0.0;
  for (int i = 0; i < model.size(); ++i)
    if (in[i]) mean += model.mu()[i];
  return mean - model.omega() * std::sqrt(model.variance_of_set(in));
}

double eval_q_direct(const CapacityModel& model, std::span<const char> in) {
  double mean = 0.0;
  for (int i = 0; i < model.size(); ++i)
    if (in[i]) mean += model.mu()[i];
  double gap = mean - model.demand();
  return model.omega() * model.omega() * model.variance_of_set(in) - gap * gap;
}

double QuadraticForm::evaluate(std::span<const char> x) const {
  double v = constant;
  for (int i = 0; i < size(); ++i) {
    if (!x[i]) continue;
    v += alpha[i];
    for (int j = i + 1; j < size(); ++j)
      if (x[j]) v += 2.0 * beta(i, j);
  }
  return v;
}

QuadraticForm q_coefficients(const CapacityModel& model) {
  const int n = model.size();
  const double om2 = model.omega() * model.omega();
  const double d = model.demand();
  QuadraticForm q;
  q.alpha.resize(n);
  q.beta = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double mi = model.mu()[i];
    q.alpha[i] = om2 * model.cov()(i, i) + 2.0 * mi * d - mi * mi;
    for (int j = i + 1; j < n; ++j) {
      q.beta(i, j) = om2 * model.cov()(i, j) - mi * model.mu()[j];
      q.beta(j, i) = q.beta(i, j);
    }
  }
  q.constant = -d * d;
  return q;
}

std::vector<int> check_cv(const CapacityModel& model) {
  std::vector<int> bad;
  for (int k = 0; k < model.size(); ++k) {
    const double need = model.omega() * model.sigma(k);
    if (model.mu()[k] < need - 1e-9 * (1.0 + need)) bad.push_back(k);
  }
  return bad;
}

}  // namespace pnd
