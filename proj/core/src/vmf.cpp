#include "pacwelfare/vmf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

void check_kappa(double kappa) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw InputError("kappa must be finite and >= 0");
}

// sqrt(k^2 + c^2) - k without cancellation.
double sqrt_minus_kappa(double kappa, double c) {
  return c * c / (std::sqrt(kappa * kappa + c * c) + kappa);
}

}  // namespace

void VmfParams::validate() const {
  if (mu.dim() < 2) throw InputError("vMF mean direction must have dimension >= 2");
  check_kappa(kappa);
}

double bessel_ratio(std::size_t m, double kappa) {
  check_kappa(kappa);
  const auto c = BesselOrderConstants::for_dimension(m);
  return bessel_i_ratio(c.nu, kappa);
}

double bessel_ratio_lower_bound(std::size_t m, double kappa) {
  check_kappa(kappa);
  const auto c = BesselOrderConstants::for_dimension(m);
  return kappa / (c.c_low + std::sqrt(kappa * kappa + c.c_up * c.c_up));
}

double bessel_ratio_upper_bound(std::size_t m, double kappa) {
  check_kappa(kappa);
  const auto c = BesselOrderConstants::for_dimension(m);
  return kappa / (c.c_low + std::sqrt(kappa * kappa + c.c_low * c.c_low));
}

double kl_to_uniform(std::size_t m, double kappa) {
  check_kappa(kappa);
  if (kappa == 0.0) return 0.0;
  const auto c = BesselOrderConstants::for_dimension(m);
  const double ratio_term = kappa * bessel_i_ratio(c.nu, kappa);
  double kl = 0.0;
  if (kappa <= 20.0) {
    // The nu ln(kappa/2) and lgamma terms cancel against the series prefactor.
    kl = ratio_term - log_bessel_series_sum(c.nu, kappa);
  } else {
    kl = c.nu * std::log(0.5 * kappa) - log_bessel_i(c.nu, kappa) - std::lgamma(c.nu + 1.0) +
         ratio_term;
  }
  return std::max(0.0, kl);
}

double kl_upper_bound(std::size_t m, double kappa) {
  check_kappa(kappa);
  const auto c = BesselOrderConstants::for_dimension(m);
  const double root_up = std::sqrt(kappa * kappa + c.c_up * c.c_up);
  const double root_low = std::sqrt(kappa * kappa + c.c_low * c.c_low);
  const double root_diff = (c.c_low * c.c_low - c.c_up * c.c_up) / (root_low + root_up);
  return c.c_low * std::log((c.c_low + root_up) / (c.c_low + c.c_up)) + root_diff + 1.0;
}

double circular_variance(std::size_t m, double kappa) { return 1.0 - bessel_ratio(m, kappa); }

double cv_upper_bound(std::size_t m, double kappa) {
  check_kappa(kappa);
  const auto c = BesselOrderConstants::for_dimension(m);
  const double denom = c.c_low + std::sqrt(kappa * kappa + c.c_up * c.c_up);
  return (c.c_low + sqrt_minus_kappa(kappa, c.c_up)) / denom;
}

VmfSampler::VmfSampler(const VmfParams& vmf)
    : mu_(vmf.mu.values().begin(), vmf.mu.values().end()), kappa_(vmf.kappa) {
  vmf.validate();
  const auto m = static_cast<double>(mu_.size());
  if (kappa_ > 0.0) {
    b_ = (m - 1.0) / (2.0 * kappa_ + std::sqrt(4.0 * kappa_ * kappa_ + (m - 1.0) * (m - 1.0)));
    x0_ = (1.0 - b_) / (1.0 + b_);
    const double one_minus_x0_sq = 4.0 * b_ / ((1.0 + b_) * (1.0 + b_));
    c_ = kappa_ * x0_ + (m - 1.0) * std::log(one_minus_x0_sq);
  }
  std::vector<double> u(mu_.size());
  u[0] = 1.0 - mu_[0];
  for (std::size_t k = 1; k < mu_.size(); ++k) u[k] = -mu_[k];
  double norm = 0.0;
  for (double x : u) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (double& x : u) x /= norm;
    householder_ = std::move(u);
  }
}

// Returns t = mu'beta. Wood's envelope with the stable forms of 1 - W and
// 1 - x0 W so that very large kappa keeps full precision.
double VmfSampler::draw_cosine(Engine& rng) const {
  const std::size_t m = mu_.size();
  const double dm1 = static_cast<double>(m) - 1.0;
  const double half = 0.5 * dm1;
  std::gamma_distribution<double> gamma(half, 1.0);
  for (;;) {
    double z = 0.0;
    if (m == 3) {
      z = uniform01(rng);
    } else if (m == 2) {
      z = 0.5 * (1.0 - std::cos(std::numbers::pi * uniform01(rng)));
    } else {
      const double g1 = gamma(rng);
      const double g2 = gamma(rng);
      z = g1 / (g1 + g2);
    }
    const double denom = 1.0 - (1.0 - b_) * z;
    const double w = (1.0 - (1.0 + b_) * z) / denom;
    const double one_minus_x0w = 2.0 * b_ / (1.0 + b_) + x0_ * 2.0 * b_ * z / denom;
    const double u = uniform_open01(rng);
    if (kappa_ * w + dm1 * std::log(one_minus_x0w) - c_ >= std::log(u)) return w;
  }
}

void VmfSampler::draw_tangent(Engine& rng, std::span<double> tangent) const {
  const std::size_t d = tangent.size();
  if (d == 1) {
    tangent[0] = uniform01(rng) < 0.5 ? -1.0 : 1.0;
    return;
  }
  if (d == 2) {
    const double a = 2.0 * std::numbers::pi * uniform01(rng);
    tangent[0] = std::cos(a);
    tangent[1] = std::sin(a);
    return;
  }
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& x : tangent) {
      x = standard_normal(rng);
      norm += x * x;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& x : tangent) x /= norm;
}

void VmfSampler::draw(Engine& rng, std::span<double> out) const {
  const std::size_t m = mu_.size();
  if (kappa_ == 0.0) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& x : out) {
        x = standard_normal(rng);
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& x : out) x /= norm;
    return;
  }
  const double w = draw_cosine(rng);
  const double radial = std::sqrt(std::max(0.0, (1.0 - w) * (1.0 + w)));
  out[0] = w;
  draw_tangent(rng, out.subspan(1, m - 1));
  for (std::size_t k = 1; k < m; ++k) out[k] *= radial;
  if (!householder_.empty()) {
    double proj = 0.0;
    for (std::size_t k = 0; k < m; ++k) proj += householder_[k] * out[k];
    for (std::size_t k = 0; k < m; ++k) out[k] -= 2.0 * proj * householder_[k];
  }
}

void VmfSampler::draw_many(Engine& rng, std::size_t count, std::vector<double>& out) const {
  const std::size_t m = mu_.size();
  out.resize(count * m);
  for (std::size_t j = 0; j < count; ++j) draw(rng, std::span<double>(out).subspan(j * m, m));
}

std::vector<PolicyVector> sample(const VmfParams& vmf, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw InputError("sample count must be >= 1");
  VmfSampler sampler(vmf);
  Engine rng = make_engine(seed);
  std::vector<double> flat;
  sampler.draw_many(rng, count, flat);
  const std::size_t m = vmf.dim();
  std::vector<PolicyVector> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back(normalize_to_sphere(std::span<const double>(flat).subspan(j * m, m)));
  }
  return out;
}

namespace {

// Fourier coefficients I_j(kappa)/I_0(kappa), j = 1..J, by downward recurrence.
std::vector<double> von_mises_coefficients(double kappa) {
  const auto top = static_cast<std::size_t>(kappa + 40.0 + 12.0 * std::sqrt(kappa));
  std::vector<double> ratio(top + 2, 0.0);
  for (std::size_t j = top; j >= 1; --j) {
    ratio[j] = 1.0 / (2.0 * static_cast<double>(j) / kappa + ratio[j + 1]);
  }
  std::vector<double> coef(top + 1, 0.0);
  double prod = 1.0;
  for (std::size_t j = 1; j <= top; ++j) {
    prod *= ratio[j];
    coef[j] = prod;
    if (prod < 1e-20) {
      coef.resize(j + 1);
      break;
    }
  }
  return coef;
}

double von_mises_cdf_with(const std::vector<double>& coef, double angle) {
  double s = (angle + std::numbers::pi) / (2.0 * std::numbers::pi);
  for (std::size_t j = 1; j < coef.size(); ++j) {
    s += coef[j] * std::sin(static_cast<double>(j) * angle) / (std::numbers::pi * static_cast<double>(j));
  }
  return std::clamp(s, 0.0, 1.0);
}

}  // namespace

double von_mises_cdf(double angle, double kappa) {
  check_kappa(kappa);
  angle = std::clamp(angle, -std::numbers::pi, std::numbers::pi);
  if (kappa == 0.0) return (angle + std::numbers::pi) / (2.0 * std::numbers::pi);
  return von_mises_cdf_with(von_mises_coefficients(kappa), angle);
}

std::vector<double> sample_circle_inversion(double mean_angle, double kappa, std::size_t count,
                                            std::uint64_t seed) {
  check_kappa(kappa);
  if (count == 0) throw InputError("sample count must be >= 1");
  const auto coef = kappa > 0.0 ? von_mises_coefficients(kappa) : std::vector<double>{0.0};
  Engine rng = make_engine(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform_open01(rng);
    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    for (int it = 0; it < 64; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (von_mises_cdf_with(coef, mid) < u) lo = mid; else hi = mid;
    }
    double a = mean_angle + 0.5 * (lo + hi);
    a = std::remainder(a, 2.0 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
    out.push_back(a);
  }
  return out;
}

VmfMoments moments(const VmfParams& vmf) {
  vmf.validate();
  const std::size_t m = vmf.dim();
  VmfMoments out;
  out.mean.assign(m, 0.0);
  out.covariance.assign(m * m, 0.0);
  if (vmf.kappa == 0.0) {
    for (std::size_t i = 0; i < m; ++i) out.covariance[i * m + i] = 1.0 / static_cast<double>(m);
    return out;
  }
  const double a = bessel_ratio(m, vmf.kappa);
  const double iso = a / vmf.kappa;
  const double rank_one = 1.0 - static_cast<double>(m) * iso - a * a;
  for (std::size_t i = 0; i < m; ++i) {
    out.mean[i] = a * vmf.mu[i];
    for (std::size_t j = 0; j < m; ++j) {
      out.covariance[i * m + j] = rank_one * vmf.mu[i] * vmf.mu[j] + (i == j ? iso : 0.0);
    }
  }
  return out;
}

}  // namespace pacwelfare
