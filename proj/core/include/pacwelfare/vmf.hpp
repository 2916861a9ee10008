#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pacwelfare/bessel.hpp"
#include "pacwelfare/policy.hpp"
#include "pacwelfare/rng.hpp"

namespace pacwelfare {

/// von Mises-Fisher distribution on S^{m-1}. kappa = 0 is the uniform
/// distribution regardless of mu.
struct VmfParams {
  PolicyVector mu;
  double kappa = 0.0;

  std::size_t dim() const noexcept { return mu.dim(); }
  void validate() const;
};

/// Mean resultant length A_m(kappa) = I_{m/2}(kappa) / I_{m/2-1}(kappa).
double bessel_ratio(std::size_t m, double kappa);

/// Two-sided Amos bounds  kappa/(c_low + sqrt(kappa^2 + c_up^2)) <= A_m
/// <= kappa/(c_low + sqrt(kappa^2 + c_low^2)).
double bessel_ratio_lower_bound(std::size_t m, double kappa);
double bessel_ratio_upper_bound(std::size_t m, double kappa);

/// KL(vMF(mu, kappa) || uniform on S^{m-1}); independent of mu, zero at kappa = 0.
double kl_to_uniform(std::size_t m, double kappa);

/// Closed-form upper bound on kl_to_uniform that avoids Bessel functions.
double kl_upper_bound(std::size_t m, double kappa);

/// Circular variance 1 - A_m(kappa) and its Bessel-free upper bound.
double circular_variance(std::size_t m, double kappa);
double cv_upper_bound(std::size_t m, double kappa);

/// Draws `count` unit vectors with Wood's rejection sampler. Deterministic
/// given the seed.
std::vector<PolicyVector> sample(const VmfParams& vmf, std::size_t count, std::uint64_t seed);

/// Reusable sampler writing draws row-major into a flat buffer
/// (count x m). Precomputes the Wood envelope and the Householder reflector.
class VmfSampler {
 public:
  explicit VmfSampler(const VmfParams& vmf);

  void draw(Engine& rng, std::span<double> out) const;  // out.size() == m
  void draw_many(Engine& rng, std::size_t count, std::vector<double>& out) const;
  std::size_t dim() const noexcept { return mu_.size(); }

 private:
  double draw_cosine(Engine& rng) const;
  void draw_tangent(Engine& rng, std::span<double> tangent) const;

  std::vector<double> mu_;
  std::vector<double> householder_;  // unit u with H = I - 2uu', H e_0 = mu; empty if mu = e_0
  double kappa_;
  double b_ = 0.0;
  double x0_ = 0.0;
  double c_ = 0.0;
};

/// Circle (m = 2) draws by inverting the von Mises CDF. Returns angles in
/// radians, measured from the positive first axis, in (-pi, pi].
std::vector<double> sample_circle_inversion(double mean_angle, double kappa,
                                            std::size_t count, std::uint64_t seed);

/// CDF of the centred von Mises angle on (-pi, pi].
double von_mises_cdf(double angle, double kappa);

struct VmfMoments {
  std::vector<double> mean;        // A_m(kappa) mu
  std::vector<double> covariance;  // row-major m x m
};

/// First two moments; kappa = 0 gives zero mean and I/m.
VmfMoments moments(const VmfParams& vmf);

}  // namespace pacwelfare
