#pragma once

#include "pnd/network.hpp"

namespace pnd {

/// Lower-triangular L with L L' = A for a symmetric positive-semidefinite A.
///
/// Pivots in [-jitter, 0] are treated as zero (semidefinite directions);
/// anything more negative raises std::domain_error("indefinite ...").
Matrix cholesky(const Matrix& a, double jitter = 1e-7);

bool is_psd(const Matrix& a, double jitter = 1e-7);

}  // namespace pnd
