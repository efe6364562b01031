#pragma once

namespace pnd {

// Numeric tolerances shared by every module.
struct Tolerances {
  double feasibility = 1e-6;
  double integrality = 1e-6;
  double cut_violation = 1e-6;   // minimum violation for a cut to be added
  double separation = 1e-7;      // Theta < d - separation counts as violated
  double symmetry = 1e-9;
  double psd_jitter = 1e-7;
  double lp_pivot = 1e-9;
  double lp_feasibility = 1e-7;
};

inline constexpr Tolerances kTol{};

}  // namespace pnd
