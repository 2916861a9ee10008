#pragma once

#include <cstddef>

namespace pacwelfare {

/// ln I_nu(kappa), the log of the modified Bessel function of the first kind.
/// Power series for kappa <= 20, large-argument asymptotic expansion above
/// (with a series fallback when the expansion cannot reach double precision).
/// Returns -inf for kappa = 0 and nu > 0.
double log_bessel_i(double nu, double kappa);

/// ln of the normalised series sum  sum_k t_k,  t_0 = 1,
/// t_k = t_{k-1} (kappa/2)^2 / (k (k + nu)), so that
/// ln I_nu(kappa) = nu ln(kappa/2) - lgamma(nu + 1) + log_bessel_series_sum(nu, kappa).
/// Accurate for small kappa where the sum is close to one.
double log_bessel_series_sum(double nu, double kappa);

/// I_{nu+1}(kappa) / I_nu(kappa) by backward evaluation of the Gauss
/// continued fraction.
double bessel_i_ratio(double nu, double kappa);

/// Amos-type order constants for the vMF on S^{m-1}: nu = m/2 - 1,
/// c_low = nu + 1/2, c_up = nu + 3/2.
struct BesselOrderConstants {
  double nu = 0.0;
  double c_low = 0.0;
  double c_up = 0.0;

  static BesselOrderConstants for_dimension(std::size_t m);
};

}  // namespace pacwelfare
