#pragma once

#include <string_view>

namespace pnd {

enum class OmegaModel { normal, two_moment, symmetric_bounded };

OmegaModel parse_omega_model(std::string_view name);
std::string_view to_string(OmegaModel m);

/// Safety factor for a chance constraint with violation probability epsilon.
/// normal: inverse standard normal c.d.f. at 1 - epsilon;
/// two-moment: sqrt((1 - epsilon) / epsilon); symmetric-bounded: sqrt(ln(1 / epsilon)).
/// Throws std::domain_error unless 0 < epsilon <= 0.5.
double omega_from_epsilon(OmegaModel model, double epsilon);

double normal_cdf(double x);
/// Inverse standard normal c.d.f. on (0, 1); absolute error below 1e-12.
double normal_quantile(double p);

}  // namespace pnd
