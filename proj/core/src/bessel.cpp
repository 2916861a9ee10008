#include "pacwelfare/bessel.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

constexpr double kSeriesCutoff = 20.0;
constexpr double kRescaleAt = 1e280;

void check_args(double nu, double kappa) {
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw InputError("Bessel order must be finite and >= 0");
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) {
    throw InputError("Bessel argument must be finite and >= 0");
  }
}

// Large-argument expansion  I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k.
// Returns false when the terms stop shrinking before reaching double precision.
bool log_bessel_asymptotic(double nu, double x, double& out) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev_abs = 1.0;
  for (int k = 1; k < 500; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    const double a = std::abs(term);
    if (a > prev_abs) return false;
    sum += term;
    if (a <= 1e-17 * std::abs(sum)) {
      out = x - 0.5 * std::log(2.0 * std::numbers::pi * x) + std::log(sum);
      return true;
    }
    prev_abs = a;
  }
  return false;
}

}  // namespace

double log_bessel_series_sum(double nu, double kappa) {
  check_args(nu, kappa);
  if (kappa == 0.0) return 0.0;
  const double q = 0.25 * kappa * kappa;
  double term = 1.0;
  double tail = 0.0;  // sum_{k >= 1} t_k, relative to the current scale
  double log_scale = 0.0;
  double head = 1.0;  // t_0 relative to the current scale
  for (int k = 1; k < 10'000'000; ++k) {
    term *= q / (k * (k + nu));
    tail += term;
    if (term <= 1e-17 * (head + tail)) break;
    if (tail > kRescaleAt) {
      log_scale += std::log(tail);
      term /= tail;
      head /= tail;
      tail = 1.0;
    }
  }
  if (log_scale == 0.0) return std::log1p(tail);
  return log_scale + std::log(head + tail);
}

double log_bessel_i(double nu, double kappa) {
  check_args(nu, kappa);
  if (kappa == 0.0) return nu == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (kappa > kSeriesCutoff) {
    double out = 0.0;
    if (log_bessel_asymptotic(nu, kappa, out)) return out;
  }
  return nu * std::log(0.5 * kappa) - std::lgamma(nu + 1.0) + log_bessel_series_sum(nu, kappa);
}

double bessel_i_ratio(double nu, double kappa) {
  check_args(nu, kappa);
  if (kappa == 0.0) return 0.0;
  // I_{nu+1}/I_nu = 1 / (2(nu+1)/x + 1 / (2(nu+2)/x + ...)), evaluated from
  // depth `depth` back to the top; depth doubles until the value settles.
  auto evaluate = [&](long depth) {
    double r = 0.0;
    for (long k = depth; k >= 1; --k) r = 1.0 / (2.0 * (nu + static_cast<double>(k)) / kappa + r);
    return r;
  };
  long depth = 32 + static_cast<long>(kappa);
  double previous = evaluate(depth);
  for (int attempt = 0; attempt < 40; ++attempt) {
    depth *= 2;
    double current = evaluate(depth);
    if (std::abs(current - previous) <= 4.0 * std::numeric_limits<double>::epsilon() * current) {
      return current;
    }
    previous = current;
  }
  throw NumericError("Bessel ratio continued fraction did not converge");
}

BesselOrderConstants BesselOrderConstants::for_dimension(std::size_t m) {
  if (m < 2) throw InputError("vMF dimension must be >= 2");
  BesselOrderConstants c;
  c.nu = static_cast<double>(m) / 2.0 - 1.0;
  c.c_low = c.nu + 0.5;
  c.c_up = c.nu + 1.5;
  return c;
}

}  // namespace pacwelfare
