#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pacwelfare {

/// A Linear Eligibility Score rule: treat iff x_aug . beta >= 0, with beta a
/// unit vector over intercept-augmented covariates (1, x_1, ..., x_{m-1}).
class PolicyVector {
 public:
  static constexpr double kNormTolerance = 1e-12;

  PolicyVector() = default;

  /// Wraps an already-normalised vector. Throws InputError if the Euclidean
  /// norm differs from one by more than kNormTolerance.
  static PolicyVector from_unit(std::vector<double> beta);

  std::span<const double> values() const noexcept { return beta_; }
  std::size_t dim() const noexcept { return beta_.size(); }
  double operator[](std::size_t i) const noexcept { return beta_[i]; }

  PolicyVector operator-() const;
  bool operator==(const PolicyVector&) const = default;

 private:
  explicit PolicyVector(std::vector<double> beta) : beta_(std::move(beta)) {}
  friend PolicyVector normalize_to_sphere(std::span<const double> v);

  std::vector<double> beta_;
};

/// v / ||v||_2. Throws InputError for a zero or non-finite vector.
PolicyVector normalize_to_sphere(std::span<const double> v);

/// Left-to-right dot product. Every risk evaluator uses this exact summation
/// order so that tie decisions agree bit for bit.
inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

/// 1{x_aug . beta >= 0}; ties count as treated. Throws InputError on a
/// dimension mismatch.
bool les_assign(const PolicyVector& beta, std::span<const double> x_aug);

/// Azimuth theta in [-180, 180) and inclination phi in [0, 180], degrees, with
/// (b0, b1, b2) = (cos theta sin phi, sin theta sin phi, cos phi).
struct SphericalCoords {
  double azimuth_deg = 0.0;
  double inclination_deg = 0.0;
};

SphericalCoords to_spherical(const PolicyVector& beta);  // m = 3 only
PolicyVector from_spherical(const SphericalCoords& c);

/// Great-circle distance in radians, arccos of the clamped dot product.
double great_circle_distance(const PolicyVector& a, const PolicyVector& b);

/// Canonical lexicographic order used for tie-breaking: spherical coordinates
/// (azimuth, inclination) when m = 3, raw components otherwise.
bool canonical_less(const PolicyVector& a, const PolicyVector& b);

struct SphereGrid {
  std::vector<PolicyVector> points;
  /// Target upper bound on the nearest-neighbour great-circle distance.
  double nominal_spacing = 0.0;
  /// Realised maximum nearest-neighbour distance (computed for m <= 3).
  double realized_spacing = 0.0;
  /// Surface area of the sphere divided by the point count (m = 3 only).
  double area_per_point = 0.0;
};

/// Quasi-uniform directions on S^{m-1}: evenly spaced angles for m = 2, a
/// Fibonacci spiral lattice for m = 3, normalised Halton-Gaussian points for
/// m > 3. Throws InputError if count < 2 or m < 2.
SphereGrid build_grid(std::size_t m, std::size_t count);

/// Maximum over points of the great-circle distance to the nearest other point.
double max_nearest_neighbour_distance(std::span<const PolicyVector> points);

}  // namespace pacwelfare
