#include "pnd/omega.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pnd {

OmegaModel parse_omega_model(std::string_view name) {
  if (name == "normal") return OmegaModel::normal;
  if (name == "two-moment") return OmegaModel::two_moment;
  if (name == "symmetric-bounded") return OmegaModel::symmetric_bounded;
  throw std::invalid_argument("unknown omega model '" + std::string(name) +
                              "' (expected normal, two-moment, symmetric-bounded)");
}

std::string_view to_string(OmegaModel m) {
  switch (m) {
    case OmegaModel::normal: return "normal";
    case OmegaModel::two_moment: return "two-moment";
    case OmegaModel::symmetric_bounded: return "symmetric-bounded";
  }
  return "?";
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  // Acklam's rational approximation, then two Halley steps on erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p <= 1 - plow) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  } else {
    double q = std::sqrt(-2 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  }
  for (int it = 0; it < 2; ++it) {
    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
    x = x - u / (1 + x * u / 2);
  }
  return x;
}

double omega_from_epsilon(OmegaModel model, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 0.5))
    throw std::domain_error("epsilon must lie in (0, 0.5], got " + std::to_string(epsilon));
  switch (model) {
    case OmegaModel::normal: return epsilon == 0.5 ? 0.0 : normal_quantile(1.0 - epsilon);
    case OmegaModel::two_moment: return std::sqrt((1.0 - epsilon) / epsilon);
    case OmegaModel::symmetric_bounded: return std::sqrt(std::log(1.0 / epsilon));
  }
  throw std::logic_error("unreachable omega model");
}

}  // namespace pnd
