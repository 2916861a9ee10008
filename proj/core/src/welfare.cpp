#include "pacwelfare/welfare.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

constexpr double kOverlapSlack = 1e-12;

void require_nonempty(std::span<const WeightedObservation> ws) {
  if (ws.empty()) throw InputError("weighted sample is empty");
}

void require_dim(std::span<const WeightedObservation> ws, std::size_t m) {
  for (const auto& w : ws) {
    if (w.x_aug.size() != m) throw InputError("dimension mismatch between rule and covariates");
  }
}

}  // namespace

void DatasetMeta::validate() const {
  if (!(outcome_cap > 0.0) || !std::isfinite(outcome_cap)) {
    throw InputError("outcome cap M must be positive and finite");
  }
  if (!(psi > 0.0 && psi <= 0.5)) throw InputError("overlap bound psi must lie in (0, 1/2]");
  for (double c : covariate_maxima) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InputError("covariate maxima must be positive");
  }
  if (constant_propensity && !(*constant_propensity > 0.0 && *constant_propensity < 1.0)) {
    throw InputError("constant propensity must lie in (0, 1)");
  }
  if (!(cost >= 0.0)) throw InputError("treatment cost must be >= 0");
}

double default_psi(std::span<const double> propensities) {
  if (propensities.empty()) throw InputError("no propensities to derive psi from");
  auto [lo, hi] = std::minmax_element(propensities.begin(), propensities.end());
  double psi = std::min(*lo, 1.0 - *hi);
  psi = std::min(psi, 0.5 - 1e-9);
  if (!(psi > 0.0)) throw InputError("propensities violate strict overlap (psi <= 0)");
  return psi;
}

WeightingResult compute_weights(std::span<const RawObservation> rows, const DatasetMeta& meta) {
  meta.validate();
  if (meta.n != rows.size()) throw InputError("DatasetMeta.n does not match the row count");
  WeightingResult out;
  out.rows.reserve(rows.size());
  const std::size_t k = meta.covariate_maxima.size();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.treatment != 0 && r.treatment != 1) {
      throw InputError("row " + std::to_string(i) + ": treatment must be 0 or 1");
    }
    if (r.covariates.size() != k) {
      throw InputError("row " + std::to_string(i) + ": covariate count mismatch");
    }
    const std::optional<double> e_opt = r.propensity ? r.propensity : meta.constant_propensity;
    if (!e_opt) throw InputError("no propensity for row " + std::to_string(i));
    const double e = *e_opt;
    if (e < meta.psi - kOverlapSlack || e > 1.0 - meta.psi + kOverlapSlack) {
      throw InputError("row " + std::to_string(i) + ": propensity " + std::to_string(e) +
                       " violates strict overlap with psi = " + std::to_string(meta.psi));
    }
    double y = r.outcome;
    if (!std::isfinite(y)) throw InputError("row " + std::to_string(i) + ": non-finite outcome");
    if (y < 0.0) {
      y = 0.0;
      ++out.clamped;
    }
    if (y > meta.outcome_cap) {
      throw InputError("row " + std::to_string(i) + ": outcome exceeds the cap M");
    }
    const double denom = r.treatment == 1 ? e : 1.0 - e;
    WeightedObservation w;
    w.h = std::min(1.0, (y * meta.psi / meta.outcome_cap) / denom);
    w.d = r.treatment;
    w.x_aug.reserve(k + 1);
    w.x_aug.push_back(1.0);
    for (std::size_t c = 0; c < k; ++c) w.x_aug.push_back(r.covariates[c] / meta.covariate_maxima[c]);
    out.rows.push_back(std::move(w));
  }
  return out;
}

double mean_weight(std::span<const WeightedObservation> ws) {
  require_nonempty(ws);
  double s = 0.0;
  for (const auto& w : ws) s += w.h;
  return s / static_cast<double>(ws.size());
}

double empirical_welfare(std::span<const WeightedObservation> ws, const DatasetMeta& meta,
                         const PolicyVector& beta) {
  require_nonempty(ws);
  require_dim(ws, beta.dim());
  double s = 0.0;
  for (const auto& w : ws) {
    const int g = dot(w.x_aug, beta.values()) >= 0.0 ? 1 : 0;
    if (g == w.d) s += w.h;
  }
  return meta.currency_scale() * s / static_cast<double>(ws.size());
}

double empirical_risk_det(std::span<const WeightedObservation> ws, const PolicyVector& beta) {
  require_nonempty(ws);
  require_dim(ws, beta.dim());
  double s = 0.0;
  for (const auto& w : ws) {
    const int g = dot(w.x_aug, beta.values()) >= 0.0 ? 1 : 0;
    if (g != w.d) s += w.h;
  }
  return s / static_cast<double>(ws.size());
}

RiskEvaluator::RiskEvaluator(std::span<const WeightedObservation> ws) {
  require_nonempty(ws);
  n_ = ws.size();
  dim_ = ws.front().x_aug.size();
  if (dim_ == 0) throw InputError("covariate vectors must include the intercept");
  require_dim(ws, dim_);

  // Pick the sort column that leaves the fewest strata.
  auto count_strata = [&](std::size_t col, std::vector<std::size_t>& order) {
    order.resize(n_);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const auto& xa = ws[a].x_aug;
      const auto& xb = ws[b].x_aug;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (k == col) continue;
        if (xa[k] != xb[k]) return xa[k] < xb[k];
      }
      if (xa[col] != xb[col]) return xa[col] < xb[col];
      return a < b;
    });
    std::size_t count = 1;
    for (std::size_t i = 1; i < n_; ++i) {
      const auto& xa = ws[order[i - 1]].x_aug;
      const auto& xb = ws[order[i]].x_aug;
      for (std::size_t k = 0; k < dim_; ++k) {
        if (k != col && xa[k] != xb[k]) {
          ++count;
          break;
        }
      }
    }
    return count;
  };

  std::vector<std::size_t> best_order;
  std::size_t best_count = 0;
  const std::size_t first = dim_ > 1 ? 1 : 0;
  for (std::size_t col = first; col < dim_; ++col) {
    std::vector<std::size_t> order;
    const std::size_t c = count_strata(col, order);
    if (best_order.empty() || c < best_count) {
      best_count = c;
      best_order = std::move(order);
      sort_col_ = col;
    }
  }

  x_.reserve(n_ * dim_);
  for (std::size_t i : best_order) x_.insert(x_.end(), ws[i].x_aug.begin(), ws[i].x_aug.end());

  auto same_stratum = [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < dim_; ++k) {
      if (k != sort_col_ && x_[a * dim_ + k] != x_[b * dim_ + k]) return false;
    }
    return true;
  };
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= n_; ++i) {
    if (i == n_ || !same_stratum(i - 1, i)) {
      strata_.push_back({begin, i});
      begin = i;
    }
  }

  prefix_offset_.reserve(strata_.size());
  treated_.reserve(n_ + strata_.size());
  control_.reserve(n_ + strata_.size());
  for (const auto& s : strata_) {
    prefix_offset_.push_back(treated_.size());
    double t = 0.0;
    double c = 0.0;
    treated_.push_back(0.0);
    control_.push_back(0.0);
    for (std::size_t i = s.begin; i < s.end; ++i) {
      const auto& w = ws[best_order[i]];
      if (w.d == 1) t += w.h; else c += w.h;
      treated_.push_back(t);
      control_.push_back(c);
    }
  }
}

double RiskEvaluator::risk(std::span<const double> beta) const {
  if (beta.size() != dim_) throw InputError("dimension mismatch between rule and covariates");
  const bool ascending = !(beta[sort_col_] < 0.0);
  double total = 0.0;
  for (std::size_t s = 0; s < strata_.size(); ++s) {
    const auto& st = strata_[s];
    const std::size_t len = st.end - st.begin;
    auto treats = [&](std::size_t local) {
      return dot(std::span<const double>(x_).subspan((st.begin + local) * dim_, dim_), beta) >= 0.0;
    };
    // Number of leading rows for which the predicate `first_block` holds.
    std::size_t lo = 0;
    std::size_t hi = len;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const bool in_first = ascending ? !treats(mid) : treats(mid);
      if (in_first) lo = mid + 1; else hi = mid;
    }
    const double* t = treated_.data() + prefix_offset_[s];
    const double* c = control_.data() + prefix_offset_[s];
    if (ascending) {
      // untreated prefix [0, lo), treated suffix [lo, len)
      total += t[lo] + (c[len] - c[lo]);
    } else {
      // treated prefix [0, lo), untreated suffix
      total += c[lo] + (t[len] - t[lo]);
    }
  }
  return total / static_cast<double>(n_);
}

McRisk empirical_risk_posterior_mc(const RiskEvaluator& evaluator, const VmfParams& vmf,
                                   std::size_t draws, std::uint64_t seed) {
  if (draws == 0) throw InputError("draw count J must be >= 1");
  if (vmf.dim() != evaluator.dim()) throw InputError("vMF dimension does not match covariates");
  VmfSampler sampler(vmf);
  Engine rng = make_engine(seed);
  std::vector<double> beta(vmf.dim());
  std::vector<double> risks(draws);
  for (std::size_t j = 0; j < draws; ++j) {
    sampler.draw(rng, beta);
    risks[j] = evaluator.risk(beta);
  }
  McRisk out;
  double s = 0.0;
  for (double r : risks) s += r;
  out.risk = s / static_cast<double>(draws);
  if (draws > 1) {
    double v = 0.0;
    for (double r : risks) v += (r - out.risk) * (r - out.risk);
    v /= static_cast<double>(draws - 1);
    out.mcse = std::sqrt(v / static_cast<double>(draws));
  }
  return out;
}

McRisk empirical_risk_posterior_mc(std::span<const WeightedObservation> ws, const VmfParams& vmf,
                                   std::size_t draws, std::uint64_t seed) {
  return empirical_risk_posterior_mc(RiskEvaluator(ws), vmf, draws, seed);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw InputError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

PropensitySummary individual_propensities(std::span<const WeightedObservation> ws,
                                          const VmfParams& vmf, std::size_t draws,
                                          std::uint64_t seed) {
  require_nonempty(ws);
  if (draws == 0) throw InputError("draw count J must be >= 1");
  require_dim(ws, vmf.dim());
  VmfSampler sampler(vmf);
  Engine rng = make_engine(seed);
  std::vector<double> flat;
  sampler.draw_many(rng, draws, flat);
  const std::size_t m = vmf.dim();
  PropensitySummary out;
  out.per_row.resize(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < draws; ++j) {
      if (dot(ws[i].x_aug, std::span<const double>(flat).subspan(j * m, m)) >= 0.0) ++count;
    }
    out.per_row[i] = static_cast<double>(count) / static_cast<double>(draws);
  }
  out.min = *std::min_element(out.per_row.begin(), out.per_row.end());
  out.max = *std::max_element(out.per_row.begin(), out.per_row.end());
  out.q10 = quantile(out.per_row, 0.10);
  out.q90 = quantile(out.per_row, 0.90);
  out.mean = std::accumulate(out.per_row.begin(), out.per_row.end(), 0.0) /
             static_cast<double>(out.per_row.size());
  return out;
}

}  // namespace pacwelfare
