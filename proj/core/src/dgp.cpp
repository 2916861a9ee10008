#include "pacwelfare/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

const boost::math::normal_distribution<double> kStdNormal;

double phi(double z) { return boost::math::pdf(kStdNormal, z); }
double big_phi(double z) { return boost::math::cdf(kStdNormal, z); }

// Stream labels for derive_seed.
enum Stream : std::uint64_t { kCovariates = 1, kTreatment = 2, kNoise0 = 3, kNoise1 = 4, kRules = 5 };

std::array<double, 2> draw_fixture(const FixtureCovariates& f, Engine& rng) {
  double earn = 0.0;
  if (uniform01(rng) >= f.zero_share) {
    earn = std::exp(std::log(f.earnings_median) + f.earnings_log_sd * standard_normal(rng));
    earn = std::round(std::min(earn, f.earnings_cap));
  }
  const double total = std::accumulate(f.education_weights.begin(), f.education_weights.end(), 0.0);
  double u = uniform01(rng) * total;
  std::size_t k = 0;
  while (k + 1 < f.education_weights.size() && u >= f.education_weights[k]) {
    u -= f.education_weights[k];
    ++k;
  }
  return {earn, 7.0 + static_cast<double>(k)};
}

std::array<double, 2> draw_bivariate(const BivariateNormalCovariates& b, Engine& rng) {
  const double z1 = standard_normal(rng);
  const double z2 = standard_normal(rng);
  const double r = b.correlation;
  std::array<double, 2> raw{b.mean[0] + b.sd[0] * z1,
                            b.mean[1] + b.sd[1] * (r * z1 + std::sqrt(1.0 - r * r) * z2)};
  for (std::size_t c = 0; c < 2; ++c) raw[c] = std::clamp(raw[c], 0.0, b.scale[c]);
  if (b.discretize_education) {
    const double x = raw[1] / b.scale[1];
    const auto bin = std::min<std::size_t>(11, static_cast<std::size_t>(std::floor(12.0 * x)));
    raw[1] = b.scale[1] * static_cast<double>(bin + 1) / 12.0;
  }
  return raw;
}

std::array<double, 2> draw_covariates(const CovariateSource& src, Engine& rng) {
  if (const auto* f = std::get_if<FixtureCovariates>(&src)) return draw_fixture(*f, rng);
  if (const auto* b = std::get_if<BivariateNormalCovariates>(&src)) return draw_bivariate(*b, rng);
  const auto& e = std::get<EmpiricalCovariates>(src);
  const auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(e.pool.size()));
  return e.pool[std::min(i, e.pool.size() - 1)];
}

double affine(const std::array<double, 3>& coef, double x1, double x2) {
  return coef[0] + coef[1] * x1 + coef[2] * x2;
}

}  // namespace

double truncated_normal_mean(double sigma, double trunc_bound) {
  if (!(sigma > 0.0)) throw InputError("sigma must be > 0");
  if (!(trunc_bound > 0.0)) throw InputError("truncation bound must be > 0");
  const double t = trunc_bound / sigma;
  const double mass = big_phi(t) - 0.5;
  if (mass <= 1e-8) return 0.5 * trunc_bound;  // nearly flat density on a tiny interval
  return sigma * (phi(0.0) - phi(t)) / mass;
}

double truncated_normal_draw(double sigma, double trunc_bound, Engine& rng) {
  const double hi = big_phi(trunc_bound / sigma);
  for (;;) {
    const double u = 0.5 + uniform_open01(rng) * (hi - 0.5);
    const double x = sigma * boost::math::quantile(kStdNormal, u);
    if (x > 0.0 && x < trunc_bound) return x;
  }
}

std::vector<double> truncated_normal_sample(double sigma, double trunc_bound, std::size_t count,
                                            std::uint64_t seed) {
  if (!(sigma > 0.0)) throw InputError("sigma must be > 0");
  if (!(trunc_bound > 0.0)) throw InputError("truncation bound must be > 0");
  Engine rng = make_engine(seed);
  std::vector<double> out(count);
  for (double& x : out) x = truncated_normal_draw(sigma, trunc_bound, rng);
  return out;
}

void DgpConfig::validate() const {
  if (!(sigma0 > 0.0) || !(sigma1 > 0.0)) throw InputError("noise scales must be > 0");
  if (!(trunc_bound > 0.0)) throw InputError("truncation bound must be > 0");
  if (alpha[0] + alpha[1] + alpha[2] < 0.0 || lambda_t[0] + lambda_t[1] + lambda_t[2] < 0.0) {
    throw InputError("coefficient sums must be >= 0");
  }
  if (n == 0) throw InputError("sample size must be >= 1");
  if (!(assignment_prob > 0.0 && assignment_prob < 1.0)) {
    throw InputError("assignment probability must lie in (0, 1)");
  }
  if (const auto* e = std::get_if<EmpiricalCovariates>(&covariates)) {
    if (e->pool.empty()) throw InputError("empirical covariate pool is empty");
    if (!e->treatment.empty() && e->treatment.size() != e->pool.size()) {
      throw InputError("treatment column length differs from the covariate pool");
    }
  }
  if (const auto* b = std::get_if<BivariateNormalCovariates>(&covariates)) {
    if (!(b->sd[0] > 0.0 && b->sd[1] > 0.0)) throw InputError("bivariate sds must be > 0");
    if (!(std::abs(b->correlation) < 1.0)) throw InputError("correlation must lie in (-1, 1)");
    if (!(b->scale[0] > 0.0 && b->scale[1] > 0.0)) throw InputError("scales must be > 0");
  }
}

ExperimentPreset experiment_preset(int id) {
  if (id < 1 || id > 10) throw InputError("experiment id must lie in 1..10");
  constexpr double kSigma = 15914.0;
  ExperimentPreset p;
  p.id = id;
  DgpConfig& c = p.config;
  c.alpha = {-1086.0, 82458.0, 18804.0};
  c.lambda_t = {3040.0, 86446.0, 14008.0};
  p.reported_oracle = {0.552, 0.533, -0.641};
  if (id >= 4 && id <= 6) {
    c.alpha[0] = -489.0;
    c.lambda_t[0] = 2442.0;
    p.reported_oracle = {0.425, 0.579, -0.696};
  } else if (id >= 9) {
    c.alpha[0] = -668.0;
    c.lambda_t[0] = 1286.0;
    p.reported_oracle = {0.098, 0.636, -0.765};
  }
  double sigma = kSigma;
  if (id == 2 || id == 5) sigma *= 5.0;
  if (id == 3 || id == 6) sigma /= 5.0;
  c.sigma0 = c.sigma1 = sigma;
  c.trunc_bound = 5.0 * sigma;
  if (id >= 7) {
    BivariateNormalCovariates b;
    b.discretize_education = (id == 7 || id == 9);
    c.covariates = b;
  }
  static constexpr const char* kNames[] = {"baseline",         "high variance", "low variance",
                                           "shifted baseline", "shifted high variance",
                                           "shifted low variance", "discrete",
                                           "continuous",       "shifted discrete",
                                           "shifted continuous"};
  static constexpr std::array<double, 3> kMu[] = {
      {0.822, 0.565, 0.078},   {0.641, 0.703, -0.309},  {0.831, 0.547, 0.105},
      {0.932, 0.362, -0.035},  {-0.810, -0.526, -0.259}, {0.899, 0.425, 0.105},
      {0.794, 0.405, 0.454},   {0.801, 0.408, 0.438},   {-0.766, -0.470, -0.438},
      {-0.766, -0.470, -0.438}};
  static constexpr double kKappa[] = {1.85, 0.34, 1.97, 0.0, 0.39, 0.0, 3.09, 3.12, 0.77, 0.77};
  p.name = kNames[id - 1];
  p.reported_mu = kMu[id - 1];
  p.reported_kappa = kKappa[id - 1];
  return p;
}

PolicyVector oracle_rule(const DgpConfig& config) {
  config.validate();
  std::array<double, 3> diff{};
  for (std::size_t k = 0; k < 3; ++k) diff[k] = config.lambda_t[k] - config.alpha[k];
  if (config.sigma0 != config.sigma1) {
    diff[0] += truncated_normal_mean(config.sigma1, config.trunc_bound) -
               truncated_normal_mean(config.sigma0, config.trunc_bound);
  }
  if (diff[0] == 0.0 && diff[1] == 0.0 && diff[2] == 0.0) {
    throw InputError("treated and control coefficients coincide; the oracle rule is not unique");
  }
  return normalize_to_sphere(diff);
}

GeneratedData generate(const DgpConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t n = config.n;
  Engine cov_rng = make_engine(derive_seed(seed, {kCovariates}));
  Engine d_rng = make_engine(derive_seed(seed, {kTreatment}));
  Engine e0_rng = make_engine(derive_seed(seed, {kNoise0}));
  Engine e1_rng = make_engine(derive_seed(seed, {kNoise1}));

  std::vector<std::array<double, 2>> raw(n);
  std::vector<int> d(n);
  const auto* empirical = std::get_if<EmpiricalCovariates>(&config.covariates);
  const bool as_is = empirical && empirical->pool.size() == n;
  for (std::size_t i = 0; i < n; ++i) {
    raw[i] = as_is ? empirical->pool[i] : draw_covariates(config.covariates, cov_rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = (as_is && !empirical->treatment.empty())
               ? empirical->treatment[i]
               : (uniform01(d_rng) < config.assignment_prob ? 1 : 0);
  }

  GeneratedData out;
  DgpTruth& t = out.truth;
  t.config = config;
  t.alpha_tilde = config.alpha;
  t.lambda_tilde = config.lambda_t;
  t.alpha_tilde[0] += truncated_normal_mean(config.sigma0, config.trunc_bound);
  t.lambda_tilde[0] += truncated_normal_mean(config.sigma1, config.trunc_bound);
  t.oracle = oracle_rule(config);
  if (const auto* b = std::get_if<BivariateNormalCovariates>(&config.covariates)) {
    t.scale = b->scale;
  } else {
    for (std::size_t c = 0; c < 2; ++c) {
      double mx = 0.0;
      for (const auto& r : raw) mx = std::max(mx, r[c]);
      if (!(mx > 0.0)) throw InputError("covariate column has no positive value");
      t.scale[c] = mx;
    }
  }

  t.y0.resize(n);
  t.y1.resize(n);
  out.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = raw[i][0] / t.scale[0];
    const double x2 = raw[i][1] / t.scale[1];
    t.y0[i] = affine(config.alpha, x1, x2) + truncated_normal_draw(config.sigma0, config.trunc_bound, e0_rng);
    t.y1[i] = affine(config.lambda_t, x1, x2) + truncated_normal_draw(config.sigma1, config.trunc_bound, e1_rng);
    RawObservation& row = out.rows[i];
    row.treatment = d[i];
    row.outcome = d[i] == 1 ? t.y1[i] : t.y0[i];
    row.covariates = {raw[i][0], raw[i][1]};
  }
  return out;
}

RegretEstimate population_regret(const DgpTruth& truth, const CandidateRule& rule,
                                 const std::array<double, 2>& fit_maxima, std::size_t population,
                                 std::size_t eval_draws, std::uint64_t seed) {
  if (population < 2) throw InputError("population size must be >= 2");
  if (!(fit_maxima[0] > 0.0 && fit_maxima[1] > 0.0)) throw InputError("fit maxima must be > 0");

  std::vector<double> draws;  // row-major rule draws
  if (const auto* v = std::get_if<VmfParams>(&rule)) {
    v->validate();
    if (v->dim() != 3) throw InputError("candidate rule must have dimension 3");
    if (eval_draws == 0) throw InputError("eval_draws must be >= 1");
    Engine rule_rng = make_engine(derive_seed(seed, {kRules}));
    VmfSampler(*v).draw_many(rule_rng, eval_draws, draws);
  } else {
    const auto& b = std::get<PolicyVector>(rule);
    if (b.dim() != 3) throw InputError("candidate rule must have dimension 3");
    draws.assign(b.values().begin(), b.values().end());
  }
  const std::size_t rules = draws.size() / 3;

  std::array<double, 3> effect{};
  for (std::size_t k = 0; k < 3; ++k) effect[k] = truth.lambda_tilde[k] - truth.alpha_tilde[k];

  Engine cov_rng = make_engine(derive_seed(seed, {kCovariates}));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < population; ++i) {
    const auto raw = draw_covariates(truth.config.covariates, cov_rng);
    const double tau = affine(effect, raw[0] / truth.scale[0], raw[1] / truth.scale[1]);
    const std::array<double, 3> x{1.0, raw[0] / fit_maxima[0], raw[1] / fit_maxima[1]};
    std::size_t treated = 0;
    for (std::size_t j = 0; j < rules; ++j) {
      if (dot(x, std::span<const double>(draws).subspan(3 * j, 3)) >= 0.0) ++treated;
    }
    const double q = static_cast<double>(treated) / static_cast<double>(rules);
    const double loss = tau * ((tau >= 0.0 ? 1.0 : 0.0) - q);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double np = static_cast<double>(population);
  RegretEstimate out;
  out.regret = sum / np;
  const double var = std::max(0.0, (sum_sq - np * out.regret * out.regret) / (np - 1.0));
  out.mcse = std::sqrt(var / np);
  return out;
}

}  // namespace pacwelfare
