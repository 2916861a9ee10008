#pragma once

#include <cstddef>
#include <vector>

#include "pacwelfare/policy.hpp"

namespace pacwelfare {

struct BoundInputs {
  std::size_t n = 0;
  double epsilon = 0.05;

  /// Throws InputError unless n >= 8 and 0 < epsilon < 1.
  void validate() const;
};

/// Finite policy set with a prior and per-atom empirical risks. Atoms are
/// optional; the tilt only needs prior and risks.
struct DiscretePolicySet {
  std::vector<PolicyVector> atoms;
  std::vector<double> prior;
  std::vector<double> risks;

  void validate() const;
  std::size_t size() const noexcept { return prior.size(); }
};

struct DiscretePosterior {
  std::vector<double> weights;
  double chi = 0.0;
  double kl = 0.0;
  double posterior_risk = 0.0;
  double residual = 0.0;  // fixed-point residual; 0 for a plain tilt
};

/// sqrt((kl + ln(2 sqrt(n) / epsilon)) / (2n)).
double pac_penalty(double kl, const BoundInputs& bounds);

/// posterior_risk + pac_penalty(kl). Throws InputError if n < 8 or kl < 0.
double pac_bound(double posterior_risk, double kl, const BoundInputs& bounds);

/// Same formula as pac_bound; the quantity every fit minimises.
double objective_value(double posterior_risk, double kl, const BoundInputs& bounds);

/// w_i proportional to p_i exp(-chi r_i).
DiscretePosterior tilt(const DiscretePolicySet& set, double chi);

/// Solves chi = 4n sqrt((KL(chi) + ln(2 sqrt(n) / epsilon)) / (2n)) by
/// doubling an upper bracket from chi = 1 and bisecting.
DiscretePosterior solve_chi(const DiscretePolicySet& set, const BoundInputs& bounds);

/// 4n sqrt((kl + ln(2 sqrt(n)/epsilon)) / (2n)), the right-hand side of the
/// fixed-point equation.
double chi_target(double kl, const BoundInputs& bounds);

}  // namespace pacwelfare
