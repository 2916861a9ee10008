#include "pacwelfare/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {

void BoundInputs::validate() const {
  if (n < 8) throw InputError("the PAC-Bayes bound requires n >= 8");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("epsilon must lie in (0, 1)");
}

void DiscretePolicySet::validate() const {
  if (prior.empty()) throw InputError("policy set is empty");
  if (risks.size() != prior.size()) throw InputError("prior and risks differ in length");
  if (!atoms.empty() && atoms.size() != prior.size()) {
    throw InputError("atoms and prior differ in length");
  }
  double total = 0.0;
  for (double p : prior) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InputError("prior weights must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InputError("prior weights must sum to one");
  for (double r : risks) {
    if (!(r >= 0.0 && r <= 1.0)) throw InputError("risks must lie in [0, 1]");
  }
}

double pac_penalty(double kl, const BoundInputs& bounds) {
  bounds.validate();
  if (!(kl >= 0.0)) throw InputError("KL divergence must be >= 0");
  const double n = static_cast<double>(bounds.n);
  return std::sqrt((kl + std::log(2.0 * std::sqrt(n) / bounds.epsilon)) / (2.0 * n));
}

double pac_bound(double posterior_risk, double kl, const BoundInputs& bounds) {
  return posterior_risk + pac_penalty(kl, bounds);
}

double objective_value(double posterior_risk, double kl, const BoundInputs& bounds) {
  return pac_bound(posterior_risk, kl, bounds);
}

double chi_target(double kl, const BoundInputs& bounds) {
  return 4.0 * static_cast<double>(bounds.n) * pac_penalty(kl, bounds);
}

DiscretePosterior tilt(const DiscretePolicySet& set, double chi) {
  set.validate();
  if (!(chi >= 0.0) || !std::isfinite(chi)) throw InputError("chi must be finite and >= 0");

  double r_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.prior[i] > 0.0) r_min = std::min(r_min, set.risks[i]);
  }
  if (!std::isfinite(r_min)) throw InputError("prior places no mass on any atom");

  DiscretePosterior out;
  out.chi = chi;
  out.weights.assign(set.size(), 0.0);
  double z = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set.prior[i] > 0.0) {
      out.weights[i] = set.prior[i] * std::exp(-chi * (set.risks[i] - r_min));
      z += out.weights[i];
    }
  }
  double risk = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.weights[i] /= z;
    risk += out.weights[i] * set.risks[i];
  }
  out.posterior_risk = risk;
  // KL = sum w ln(w/p) = -chi (R - r_min) - ln z
  out.kl = std::max(0.0, -chi * (risk - r_min) - std::log(z));
  return out;
}

DiscretePosterior solve_chi(const DiscretePolicySet& set, const BoundInputs& bounds) {
  bounds.validate();
  auto gap = [&](const DiscretePosterior& p) { return p.chi - chi_target(p.kl, bounds); };

  double lo = 0.0;
  double hi = 1.0;
  DiscretePosterior hi_post = tilt(set, hi);
  while (gap(hi_post) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericError("chi bracket expansion diverged");
    hi_post = tilt(set, hi);
  }

  DiscretePosterior best = hi_post;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    DiscretePosterior p = tilt(set, mid);
    if (gap(p) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(p);
    }
  }
  DiscretePosterior lo_post = tilt(set, lo);
  if (std::abs(gap(lo_post)) < std::abs(gap(best))) best = std::move(lo_post);
  best.residual = std::abs(gap(best));
  if (best.residual >= 1e-9 * std::max(1.0, best.chi)) {
    throw NumericError("chi fixed point did not converge");
  }
  return best;
}

}  // namespace pacwelfare
