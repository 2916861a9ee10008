#include "pacwelfare/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Radical inverse of `index` in the given prime base.
double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double f = inv_base;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv_base;
  }
  return r;
}

std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (std::uint64_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

std::vector<PolicyVector> circle_points(std::size_t count) {
  std::vector<PolicyVector> pts;
  pts.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
    std::vector<double> v{std::cos(t), std::sin(t)};
    pts.push_back(normalize_to_sphere(v));
  }
  return pts;
}

std::vector<PolicyVector> fibonacci_points(std::size_t count) {
  std::vector<PolicyVector> pts;
  pts.reserve(count);
  if (count == 2) {
    pts.push_back(PolicyVector::from_unit({0.0, 0.0, 1.0}));
    pts.push_back(PolicyVector::from_unit({0.0, 0.0, -1.0}));
    return pts;
  }
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const auto n = static_cast<double>(count);
  for (std::size_t i = 0; i < count; ++i) {
    double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / n;
    double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    double a = golden_angle * static_cast<double>(i);
    std::vector<double> v{r * std::cos(a), r * std::sin(a), z};
    pts.push_back(normalize_to_sphere(v));
  }
  return pts;
}

std::vector<PolicyVector> halton_gaussian_points(std::size_t m, std::size_t count) {
  const boost::math::normal_distribution<double> standard;
  const auto primes = first_primes(m);
  std::vector<PolicyVector> pts;
  pts.reserve(count);
  std::vector<double> v(m);
  for (std::uint64_t i = 1; pts.size() < count; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      double u = radical_inverse(i, primes[k]);
      u = std::clamp(u, 1e-12, 1.0 - 1e-12);
      v[k] = boost::math::quantile(standard, u);
    }
    if (euclidean_norm(v) > 1e-9) pts.push_back(normalize_to_sphere(v));
  }
  return pts;
}

// Nominal spacing: a generous multiple of the mean spacing sqrt(area / count).
double nominal_spacing_for(std::size_t m, std::size_t count) {
  const auto n = static_cast<double>(count);
  if (m == 2) return 2.0 * std::numbers::pi / n;
  if (m == 3) return count == 2 ? std::numbers::pi : 1.5 * std::sqrt(4.0 * std::numbers::pi / n);
  return 0.0;
}

}  // namespace

PolicyVector PolicyVector::from_unit(std::vector<double> beta) {
  if (beta.empty()) throw InputError("policy vector must be non-empty");
  double norm = euclidean_norm(beta);
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    throw InputError("policy vector is not unit-norm (norm = " + std::to_string(norm) + ")");
  }
  return PolicyVector(std::move(beta));
}

PolicyVector PolicyVector::operator-() const {
  std::vector<double> neg(beta_.size());
  std::transform(beta_.begin(), beta_.end(), neg.begin(), [](double x) { return -x; });
  return PolicyVector(std::move(neg));
}

PolicyVector normalize_to_sphere(std::span<const double> v) {
  double norm = euclidean_norm(v);
  if (v.empty() || !std::isfinite(norm) || norm == 0.0) {
    throw InputError("cannot normalise a zero or non-finite vector");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return PolicyVector(std::move(out));
}

bool les_assign(const PolicyVector& beta, std::span<const double> x_aug) {
  if (beta.dim() != x_aug.size()) {
    throw InputError("dimension mismatch: beta has " + std::to_string(beta.dim()) +
                     " entries, covariates have " + std::to_string(x_aug.size()));
  }
  return dot(x_aug, beta.values()) >= 0.0;
}

SphericalCoords to_spherical(const PolicyVector& beta) {
  if (beta.dim() != 3) throw InputError("spherical coordinates require m = 3");
  double phi = std::acos(std::clamp(beta[2], -1.0, 1.0)) * kDegPerRad;
  double theta = 0.0;
  if (std::hypot(beta[0], beta[1]) > 0.0) theta = std::atan2(beta[1], beta[0]) * kDegPerRad;
  if (theta >= 180.0) theta -= 360.0;
  return {theta, phi};
}

PolicyVector from_spherical(const SphericalCoords& c) {
  double theta = c.azimuth_deg / kDegPerRad;
  double phi = c.inclination_deg / kDegPerRad;
  std::vector<double> v{std::cos(theta) * std::sin(phi), std::sin(theta) * std::sin(phi),
                        std::cos(phi)};
  return normalize_to_sphere(v);
}

double great_circle_distance(const PolicyVector& a, const PolicyVector& b) {
  if (a.dim() != b.dim()) throw InputError("great-circle distance: dimension mismatch");
  if (a == b) return 0.0;
  return std::acos(std::clamp(dot(a.values(), b.values()), -1.0, 1.0));
}

bool canonical_less(const PolicyVector& a, const PolicyVector& b) {
  if (a.dim() == 3 && b.dim() == 3) {
    auto ca = to_spherical(a);
    auto cb = to_spherical(b);
    if (ca.azimuth_deg != cb.azimuth_deg) return ca.azimuth_deg < cb.azimuth_deg;
    if (ca.inclination_deg != cb.inclination_deg) return ca.inclination_deg < cb.inclination_deg;
  }
  auto va = a.values();
  auto vb = b.values();
  return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
}

double max_nearest_neighbour_distance(std::span<const PolicyVector> points) {
  if (points.size() < 2) return 0.0;
  double worst_cos = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best_cos = -1.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i == j) continue;
      best_cos = std::max(best_cos, dot(points[i].values(), points[j].values()));
    }
    worst_cos = std::min(worst_cos, best_cos);
  }
  return std::acos(std::clamp(worst_cos, -1.0, 1.0));
}

SphereGrid build_grid(std::size_t m, std::size_t count) {
  if (m < 2) throw InputError("sphere grid requires m >= 2");
  if (count < 2) throw InputError("sphere grid requires at least 2 points");
  SphereGrid grid;
  if (m == 2) {
    grid.points = circle_points(count);
  } else if (m == 3) {
    grid.points = fibonacci_points(count);
  } else {
    grid.points = halton_gaussian_points(m, count);
  }
  grid.nominal_spacing = nominal_spacing_for(m, count);
  if (m <= 3) {
    grid.realized_spacing = max_nearest_neighbour_distance(grid.points);
    if (m == 3) grid.area_per_point = 4.0 * std::numbers::pi / static_cast<double>(count);
    if (grid.realized_spacing > grid.nominal_spacing + 1e-12) {
      throw InputError("sphere grid spacing check failed");
    }
  } else {
    grid.realized_spacing = max_nearest_neighbour_distance(grid.points);
    grid.nominal_spacing = grid.realized_spacing;
  }
  return grid;
}

}  // namespace pacwelfare
