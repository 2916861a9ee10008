#include "pacwelfare_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "pacwelfare/dgp.hpp"
#include "pacwelfare/errors.hpp"
#include "pacwelfare/fit.hpp"
#include "pacwelfare/gibbs.hpp"
#include "pacwelfare/io.hpp"
#include "pacwelfare/welfare.hpp"
#include "report.hpp"

namespace pacwelfare::cli {
namespace fs = std::filesystem;

namespace {

struct DataOptions {
  std::string path;
  double cost = 0.0;
  std::optional<double> propensity;
  std::optional<double> psi;
};

struct SearchOptions {
  double epsilon = 0.05;
  std::size_t grid_points = 10116;
  double kappa_max = 5.0;
  double kappa_step = 0.01;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct RuleOptions {
  std::string mu;
  std::optional<double> kappa;
  std::string fit_report;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
  cmd->add_option("--data", d.path, "Input CSV (outcome, treatment, [propensity], covariates...)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--cost", d.cost, "Treatment cost subtracted from treated outcomes")
      ->capture_default_str();
  cmd->add_option("--propensity", d.propensity,
                  "Constant propensity when the file has no propensity column");
  cmd->add_option("--psi", d.psi, "Overlap bound; default min(min e, 1 - max e)");
}

void add_search_options(CLI::App* cmd, SearchOptions& s, bool grid) {
  cmd->add_option("--epsilon", s.epsilon, "Confidence level of the bound")->capture_default_str();
  cmd->add_option("--draws", s.draws, "Monte-Carlo draws per rule")->capture_default_str();
  cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads, 0 = auto; results do not depend on it")
      ->capture_default_str();
  cmd->add_option("--kappa-max", s.kappa_max, "Largest concentration")->capture_default_str();
  cmd->add_option("--kappa-step", s.kappa_step, "Concentration grid step")->capture_default_str();
  if (grid) {
    cmd->add_option("--grid-points", s.grid_points, "Sphere grid size")->capture_default_str();
  }
}

void add_rule_options(CLI::App* cmd, RuleOptions& r) {
  cmd->add_option("--mu", r.mu, "Mean direction, comma separated");
  cmd->add_option("--kappa", r.kappa, "Concentration");
  cmd->add_option("--fit", r.fit_report, "Take mu and kappa from a fit report")
      ->check(CLI::ExistingFile);
}

struct LoadedData {
  Dataset ds;
  std::vector<WeightedObservation> ws;
};

LoadedData load(const DataOptions& d, std::ostream& err) {
  IngestFlags flags;
  flags.cost = d.cost;
  flags.propensity = d.propensity;
  flags.psi = d.psi;
  LoadedData out{ingest(d.path, flags), {}};
  auto weighted = compute_weights(out.ds.rows, out.ds.meta);
  if (weighted.clamped > 0) {
    err << "warning: " << weighted.clamped
        << " outcome(s) negative after the cost adjustment were clamped to 0\n";
  }
  out.ws = std::move(weighted.rows);
  return out;
}

FitConfig make_config(const SearchOptions& s) {
  FitConfig c;
  c.sphere_count = s.grid_points;
  c.kappa_max = s.kappa_max;
  c.kappa_step = s.kappa_step;
  c.draws = s.draws;
  c.epsilon = s.epsilon;
  c.master_seed = s.seed;
  c.threads = s.threads;
  c.validate();
  return c;
}

Json search_json(const SearchOptions& s, bool grid) {
  Json j{{"epsilon", s.epsilon},   {"draws", s.draws},          {"seed", s.seed},
         {"kappa_max", s.kappa_max}, {"kappa_step", s.kappa_step}};
  if (grid) j["grid_points"] = s.grid_points;
  return j;
}

Json base_manifest(const std::string& command) {
  return Json{{"tool", "pacwelfare"}, {"version", kToolVersion}, {"command", command}};
}

VmfParams resolve_rule(const RuleOptions& r, std::size_t m) {
  if (!r.fit_report.empty()) {
    if (!r.mu.empty() || r.kappa) throw InputError("use either --fit or --mu/--kappa, not both");
    const Json j = Json::parse(read_file(r.fit_report), nullptr, false);
    if (j.is_discarded() || !j.contains("result")) throw InputError("not a fit report");
    const auto beta = j["result"]["mu"]["beta"].get<std::vector<double>>();
    VmfParams v{normalize_to_sphere(beta), j["result"]["kappa"].get<double>()};
    if (v.dim() != m) throw InputError("fit report dimension does not match the data");
    v.validate();
    return v;
  }
  if (r.mu.empty() || !r.kappa) throw InputError("supply --mu and --kappa, or --fit");
  VmfParams v{parse_direction(r.mu), *r.kappa};
  if (v.dim() != m) throw InputError("--mu dimension does not match the data");
  v.validate();
  return v;
}

std::vector<std::string> rule_header(std::size_t m) {
  if (m == 3) return {"theta_deg", "phi_deg"};
  std::vector<std::string> h;
  for (std::size_t k = 0; k < m; ++k) h.push_back("beta" + std::to_string(k));
  return h;
}

void append_rule(std::vector<std::string>& row, std::span<const double> beta) {
  if (beta.size() == 3) {
    const auto s = to_spherical(normalize_to_sphere(beta));
    row.push_back(format_double(s.azimuth_deg));
    row.push_back(format_double(s.inclination_deg));
  } else {
    for (double b : beta) row.push_back(format_double(b));
  }
}

std::string f(double x) { return format_double(x); }

// ---------------------------------------------------------------- commands

int cmd_fit(const DataOptions& d, const SearchOptions& s, const fs::path& out_dir, bool skip_trace,
            std::ostream& out, std::ostream& err) {
  const LoadedData data = load(d, err);
  const BoundInputs bounds{data.ws.size(), s.epsilon};
  FitConfig config = make_config(s);
  config.keep_trace = !skip_trace;
  const RiskEvaluator evaluator(data.ws);
  const SphereGrid grid = build_grid(evaluator.dim(), config.sphere_count);
  const FitResult r = fit(evaluator, grid.points, config, bounds);
  const double scale = data.ds.meta.currency_scale();
  const VmfParams best{r.mu_star, r.kappa_star};
  const PropensitySummary props =
      individual_propensities(data.ws, best, config.draws, point_seed(config.master_seed, best));
  const DeterministicBest ewm = best_deterministic(evaluator, grid.points);
  const double hbar = mean_weight(data.ws);

  Json manifest = base_manifest("fit");
  manifest["input"] = dataset_json(data.ds);
  manifest["search"] = search_json(s, true);

  Json result;
  result["mu"] = policy_json(r.mu_star);
  result["kappa"] = r.kappa_star;
  result["terms"] = terms_json(r.best, scale);
  result["bound"] = r.best.objective;
  result["currency_scale"] = scale;
  result["mean_weight"] = hbar;
  result["welfare_estimate"] = scale * (hbar - r.best.risk);
  result["propensity"] = Json{{"mean", props.mean}, {"min", props.min}, {"q10", props.q10},
                              {"q90", props.q90},   {"max", props.max}};
  result["grid"] = Json{{"points", grid.points.size()},
                        {"nominal_spacing_rad", grid.nominal_spacing},
                        {"realized_spacing_rad", grid.realized_spacing},
                        {"kappa_values", r.kappas.size()}};
  result["deterministic_baseline"] =
      Json{{"rule", policy_json(ewm.beta)},
           {"risk", ewm.risk},
           {"risk_currency", ewm.risk * scale},
           {"welfare_estimate", scale * (hbar - ewm.risk)}};

  Json report{{"manifest", manifest}, {"result", result}};
  write_json(out_dir / "fit.json", report);

  if (!skip_trace) {
    auto header = rule_header(evaluator.dim());
    for (const char* c : {"kappa", "objective", "risk", "mcse", "kl"}) header.emplace_back(c);
    CsvTable table(header);
    std::vector<std::vector<std::string>> rule_cells(grid.points.size());
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      append_rule(rule_cells[i], grid.points[i].values());
    }
    for (const auto& t : r.trace) {
      std::vector<std::string> row = rule_cells[t.mu_index];
      row.push_back(f(r.kappas[t.kappa_index]));
      row.push_back(f(t.objective));
      row.push_back(f(t.risk));
      row.push_back(f(t.mcse));
      row.push_back(f(t.kl));
      table.add(std::move(row));
    }
    write_text(out_dir / "trace.csv", table.render(manifest));
  }

  std::ostringstream mu;
  for (std::size_t k = 0; k < r.mu_star.dim(); ++k) mu << (k ? ", " : "") << r.mu_star[k];
  out << "mu* = (" << mu.str() << ")  kappa* = " << r.kappa_star
      << "  objective = " << r.best.objective << "  risk = " << r.best.risk
      << "  mean propensity = " << props.mean << "\n";
  return kExitOk;
}

int cmd_profile(const DataOptions& d, const SearchOptions& s, const RuleOptions& rule,
                const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(d, err);
  const BoundInputs bounds{data.ws.size(), s.epsilon};
  const FitConfig config = make_config(s);
  const RiskEvaluator evaluator(data.ws);
  RuleOptions r = rule;
  if (r.fit_report.empty() && !r.kappa) r.kappa = 0.0;  // kappa is irrelevant for a profile
  const VmfParams v = resolve_rule(r, evaluator.dim());
  const auto rows = kappa_profile(evaluator, v.mu, config, bounds);
  const double scale = data.ds.meta.currency_scale();

  Json manifest = base_manifest("profile");
  manifest["input"] = dataset_json(data.ds);
  manifest["search"] = search_json(s, false);
  manifest["mu"] = policy_json(v.mu);

  CsvTable table({"kappa", "objective", "risk", "mcse", "kl", "penalty", "objective_currency",
                  "risk_currency"});
  std::size_t argmin = 0;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& t = rows[k].terms;
    if (t.objective < rows[argmin].terms.objective) argmin = k;
    table.add({f(rows[k].kappa), f(t.objective), f(t.risk), f(t.mcse), f(t.kl), f(t.penalty),
               f(t.objective * scale), f(t.risk * scale)});
  }
  write_text(out_dir / "profile.csv", table.render(manifest));
  out << "profile: " << rows.size() << " rows, minimum at kappa = " << rows[argmin].kappa
      << " (objective " << rows[argmin].terms.objective << ")\n";
  return kExitOk;
}

int cmd_heatmap(const DataOptions& d, const SearchOptions& s, const std::string& mode_name,
                double kappa, const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(d, err);
  const FitConfig config = make_config(s);
  const RiskEvaluator evaluator(data.ws);
  if (evaluator.dim() != 3) throw InputError("heatmaps need exactly two covariates (m = 3)");
  const HeatmapMode mode =
      mode_name == "deterministic" ? HeatmapMode::deterministic : HeatmapMode::posterior;
  const SphereGrid grid = build_grid(3, config.sphere_count);
  const auto cells = risk_heatmap(evaluator, grid.points, config, mode, kappa);
  const double scale = data.ds.meta.currency_scale();

  Json manifest = base_manifest("heatmap");
  manifest["input"] = dataset_json(data.ds);
  manifest["search"] = search_json(s, true);
  manifest["mode"] = mode_name;
  if (mode == HeatmapMode::posterior) manifest["kappa"] = kappa;

  CsvTable table({"theta_deg", "phi_deg", "risk", "mcse", "risk_currency"});
  for (const auto& c : cells) {
    table.add({f(c.coords.azimuth_deg), f(c.coords.inclination_deg), f(c.risk), f(c.mcse),
               f(c.risk * scale)});
  }
  const std::string name = "heatmap_" + mode_name + ".csv";
  write_text(out_dir / name, table.render(manifest));
  out << "heatmap: " << cells.size() << " cells written to " << (out_dir / name).string() << "\n";
  return kExitOk;
}

int cmd_bound_rule(const DataOptions& d, const SearchOptions& s, const RuleOptions& rule,
                   const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const LoadedData data = load(d, err);
  const BoundInputs bounds{data.ws.size(), s.epsilon};
  const RiskEvaluator evaluator(data.ws);
  const VmfParams v = resolve_rule(rule, evaluator.dim());
  const ObjectiveTerms t =
      evaluate_objective(evaluator, v, bounds, s.draws, point_seed(s.seed, v));
  const double scale = data.ds.meta.currency_scale();

  Json manifest = base_manifest("bound");
  manifest["input"] = dataset_json(data.ds);
  manifest["search"] = Json{{"epsilon", s.epsilon}, {"draws", s.draws}, {"seed", s.seed}};
  Json result{{"mu", policy_json(v.mu)}, {"kappa", v.kappa}, {"terms", terms_json(t, scale)},
              {"bound", pac_bound(t.risk, t.kl, bounds)}};
  write_json(out_dir / "bound.json", Json{{"manifest", manifest}, {"result", result}});
  out << "risk = " << t.risk << " (mcse " << t.mcse << ")  penalty = " << t.penalty
      << "  bound = " << t.objective << "\n";
  return kExitOk;
}

// Discrete set CSV: prior,risk[,beta0,...]
DiscretePolicySet read_policy_set(const std::string& path) {
  DiscretePolicySet set;
  std::istringstream in(read_file(path));
  std::string line;
  bool header = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      if (line.rfind("prior,risk", 0) != 0) throw InputError("policy set header must start with prior,risk");
      header = false;
      continue;
    }
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("policy set line " + std::to_string(line_no) + ": bad number");
      }
    }
    if (cells.size() < 2) throw InputError("policy set line " + std::to_string(line_no) + ": too few fields");
    set.prior.push_back(cells[0]);
    set.risks.push_back(cells[1]);
    if (cells.size() > 2) set.atoms.push_back(normalize_to_sphere(std::span(cells).subspan(2)));
  }
  if (!set.atoms.empty() && set.atoms.size() != set.prior.size()) {
    throw InputError("either every atom or none carries a direction");
  }
  set.validate();
  return set;
}

int cmd_bound_set(const std::string& path, std::size_t n, double epsilon, const fs::path& out_dir,
                  std::ostream& out) {
  const DiscretePolicySet set = read_policy_set(path);
  const BoundInputs bounds{n, epsilon};
  const DiscretePosterior post = solve_chi(set, bounds);
  Json manifest = base_manifest("bound");
  manifest["policy_set_sha256"] = sha256_hex(read_file(path));
  manifest["n"] = n;
  manifest["epsilon"] = epsilon;
  Json atoms = Json::array();
  for (const auto& a : set.atoms) atoms.push_back(policy_json(a));
  Json result{{"atoms", atoms},
              {"prior", set.prior},
              {"risks", set.risks},
              {"weights", post.weights},
              {"chi", post.chi},
              {"kl", post.kl},
              {"posterior_risk", post.posterior_risk},
              {"residual", post.residual},
              {"bound", pac_bound(post.posterior_risk, post.kl, bounds)}};
  write_json(out_dir / "bound.json", Json{{"manifest", manifest}, {"result", result}});
  out << "chi = " << post.chi << "  kl = " << post.kl << "  risk = " << post.posterior_risk
      << "  bound = " << pac_bound(post.posterior_risk, post.kl, bounds) << "\n";
  return kExitOk;
}

int cmd_assign(const DataOptions& d, const SearchOptions& s, const RuleOptions& rule,
               const std::string& mode, const fs::path& out_dir, std::ostream& out,
               std::ostream& err) {
  const LoadedData data = load(d, err);
  const std::size_t m = data.ws.front().x_aug.size();
  const VmfParams v = resolve_rule(rule, m);
  const PropensitySummary props =
      individual_propensities(data.ws, v, s.draws, point_seed(s.seed, v));
  const VmfSampler sampler(v);
  Engine rng = make_engine(derive_seed(s.seed, {0x61737369676eULL}));
  std::vector<double> beta(m);
  if (mode == "shared") sampler.draw(rng, beta);

  Json manifest = base_manifest("assign");
  manifest["input"] = dataset_json(data.ds);
  manifest["mode"] = mode;
  manifest["seed"] = s.seed;
  manifest["draws"] = s.draws;
  manifest["mu"] = policy_json(v.mu);
  manifest["kappa"] = v.kappa;

  auto header = std::vector<std::string>{"row"};
  for (auto& h : rule_header(m)) header.push_back(h);
  header.emplace_back("treated");
  header.emplace_back("propensity");
  CsvTable table(header);
  std::size_t treated = 0;
  for (std::size_t i = 0; i < data.ws.size(); ++i) {
    if (mode == "per-individual") sampler.draw(rng, beta);
    const bool t = dot(data.ws[i].x_aug, beta) >= 0.0;
    treated += t;
    std::vector<std::string> row{std::to_string(i)};
    append_rule(row, beta);
    row.push_back(t ? "1" : "0");
    row.push_back(f(props.per_row[i]));
    table.add(std::move(row));
  }
  write_text(out_dir / "assignments.csv", table.render(manifest));
  out << "assigned " << treated << " of " << data.ws.size() << " to treatment (mean propensity "
      << props.mean << ")\n";
  return kExitOk;
}

DgpConfig preset_config(int preset, std::optional<std::size_t> n, const std::string& covariates) {
  DgpConfig c = experiment_preset(preset).config;
  if (n) c.n = *n;
  if (!covariates.empty()) {
    if (preset >= 7) throw InputError("presets 7-10 simulate their covariates");
    EmpiricalCovariates e;
    const std::string text = read_file(covariates);
    // Accept either the dataset schema or a bare two-column covariate file.
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (header) {
        header = false;
        continue;
      }
      std::stringstream ss(line);
      std::string a, b;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) {
        throw InputError("covariate file needs two columns");
      }
      try {
        e.pool.push_back({std::stod(a), std::stod(b)});
      } catch (const std::exception&) {
        throw InputError("covariate file: bad number");
      }
    }
    if (!n) c.n = e.pool.size();
    c.covariates = std::move(e);
  }
  return c;
}

Dataset as_dataset(const GeneratedData& g, double assignment_prob) {
  std::ostringstream csv;
  std::vector<RawObservation> rows = g.rows;
  for (auto& r : rows) r.propensity = assignment_prob;
  write_dataset(csv, rows, {"earnings", "education"});
  return parse_dataset(csv.str(), IngestFlags{});
}

int cmd_generate(int preset, std::optional<std::size_t> n, const std::string& covariates,
                 std::uint64_t seed, const fs::path& output, std::ostream& out) {
  const DgpConfig c = preset_config(preset, n, covariates);
  GeneratedData g = generate(c, derive_seed(seed, {1}));
  for (auto& r : g.rows) r.propensity = c.assignment_prob;
  std::ostringstream csv;
  Json manifest = base_manifest("generate");
  manifest["preset"] = preset;
  manifest["n"] = c.n;
  manifest["seed"] = seed;
  csv << manifest_comment(manifest);
  write_dataset(csv, g.rows, {"earnings", "education"});
  write_text(output, csv.str());
  out << "wrote " << g.rows.size() << " rows to " << output.string() << "\n";
  return kExitOk;
}

int cmd_simulate(int preset, std::optional<std::size_t> n, const std::string& covariates,
                 const SearchOptions& s, std::size_t population, std::size_t eval_draws,
                 const fs::path& out_dir, std::ostream& out) {
  const ExperimentPreset info = experiment_preset(preset);
  const DgpConfig c = preset_config(preset, n, covariates);
  const GeneratedData g = generate(c, derive_seed(s.seed, {1}));
  const Dataset ds = as_dataset(g, c.assignment_prob);
  const auto ws = compute_weights(ds.rows, ds.meta).rows;
  const BoundInputs bounds{ws.size(), s.epsilon};
  FitConfig config = make_config(s);
  config.master_seed = derive_seed(s.seed, {2});
  config.keep_trace = false;
  const RiskEvaluator evaluator(ws);
  const SphereGrid grid = build_grid(3, config.sphere_count);
  const FitResult r = fit(evaluator, grid.points, config, bounds);
  const std::array<double, 2> maxima{ds.meta.covariate_maxima[0], ds.meta.covariate_maxima[1]};
  const RegretEstimate regret =
      population_regret(g.truth, VmfParams{r.mu_star, r.kappa_star}, maxima, population,
                        eval_draws, derive_seed(s.seed, {3}));
  const PolicyVector reported_mu = normalize_to_sphere(info.reported_mu);
  const double angle = great_circle_distance(r.mu_star, reported_mu) * 180.0 / std::numbers::pi;

  Json manifest = base_manifest("simulate");
  manifest["preset"] = preset;
  manifest["n"] = c.n;
  manifest["search"] = search_json(s, true);
  manifest["population"] = population;
  manifest["eval_draws"] = eval_draws;
  Json result{{"preset", preset},
              {"name", info.name},
              {"mu", policy_json(r.mu_star)},
              {"kappa", r.kappa_star},
              {"terms", terms_json(r.best, ds.meta.currency_scale())},
              {"regret", regret.regret},
              {"regret_mcse", regret.mcse},
              {"oracle", policy_json(g.truth.oracle)},
              {"reported_mu", info.reported_mu},
              {"reported_kappa", info.reported_kappa},
              {"angle_to_reported_deg", angle}};
  write_json(out_dir / ("simulate_" + std::to_string(preset) + ".json"),
             Json{{"manifest", manifest}, {"result", result}});

  CsvTable table({"preset", "mu0", "mu1", "mu2", "kappa", "objective", "regret", "regret_mcse"});
  table.add({std::to_string(preset), f(r.mu_star[0]), f(r.mu_star[1]), f(r.mu_star[2]),
             f(r.kappa_star), f(r.best.objective), f(regret.regret), f(regret.mcse)});
  write_text(out_dir / ("simulate_" + std::to_string(preset) + ".csv"), table.render(manifest));
  out << "preset " << preset << " (" << info.name << "): mu* = (" << r.mu_star[0] << ", "
      << r.mu_star[1] << ", " << r.mu_star[2] << ")  kappa* = " << r.kappa_star
      << "  objective = " << r.best.objective << "  regret = " << regret.regret << "\n";
  return kExitOk;
}

int cmd_grid(std::size_t m, std::size_t count, const fs::path& output, std::ostream& out) {
  const SphereGrid grid = build_grid(m, count);
  Json manifest = base_manifest("grid");
  manifest["dim"] = m;
  manifest["points"] = count;
  manifest["nominal_spacing_rad"] = grid.nominal_spacing;
  manifest["realized_spacing_rad"] = grid.realized_spacing;
  std::vector<std::string> header;
  for (std::size_t k = 0; k < m; ++k) header.push_back("beta" + std::to_string(k));
  if (m == 3) {
    header.emplace_back("theta_deg");
    header.emplace_back("phi_deg");
  }
  CsvTable table(header);
  for (const auto& p : grid.points) {
    std::vector<std::string> row;
    for (double b : p.values()) row.push_back(f(b));
    if (m == 3) {
      const auto sc = to_spherical(p);
      row.push_back(f(sc.azimuth_deg));
      row.push_back(f(sc.inclination_deg));
    }
    table.add(std::move(row));
  }
  write_text(output, table.render(manifest));
  out << "grid: " << count << " points, max nearest-neighbour spacing "
      << grid.realized_spacing << " rad\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn randomised treatment rules by minimising a PAC-Bayes welfare-risk bound"};
  app.name(args.empty() ? "pacwelfare" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string out_dir = ".";

  DataOptions fit_data;
  SearchOptions fit_search;
  bool skip_trace = false;
  auto* fit_cmd = app.add_subcommand("fit", "Grid-search the vMF rule minimising the bound");
  add_data_options(fit_cmd, fit_data);
  add_search_options(fit_cmd, fit_search, true);
  fit_cmd->add_flag("--skip-trace", skip_trace, "Do not write the grid trace CSV");
  fit_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  DataOptions prof_data;
  SearchOptions prof_search;
  RuleOptions prof_rule;
  auto* prof_cmd = app.add_subcommand("profile", "Objective along the kappa grid at fixed mu");
  add_data_options(prof_cmd, prof_data);
  add_search_options(prof_cmd, prof_search, false);
  add_rule_options(prof_cmd, prof_rule);
  prof_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  DataOptions heat_data;
  SearchOptions heat_search;
  std::string heat_mode = "deterministic";
  double heat_kappa = 0.0;
  auto* heat_cmd = app.add_subcommand("heatmap", "Risk over the sphere in spherical coordinates");
  add_data_options(heat_cmd, heat_data);
  add_search_options(heat_cmd, heat_search, true);
  heat_cmd->add_option("--mode", heat_mode, "deterministic or posterior")
      ->check(CLI::IsMember({"deterministic", "posterior"}))
      ->capture_default_str();
  heat_cmd->add_option("--kappa", heat_kappa, "Concentration for posterior mode")
      ->capture_default_str();
  heat_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  DataOptions bound_data;
  SearchOptions bound_search;
  RuleOptions bound_rule;
  std::string bound_set;
  std::size_t bound_n = 0;
  auto* bound_cmd = app.add_subcommand("bound", "PAC-Bayes bound for a vMF rule or a finite set");
  bound_cmd->add_option("--data", bound_data.path, "Input CSV")->check(CLI::ExistingFile);
  bound_cmd->add_option("--cost", bound_data.cost, "Treatment cost")->capture_default_str();
  bound_cmd->add_option("--propensity", bound_data.propensity, "Constant propensity");
  bound_cmd->add_option("--psi", bound_data.psi, "Overlap bound");
  add_search_options(bound_cmd, bound_search, false);
  add_rule_options(bound_cmd, bound_rule);
  bound_cmd->add_option("--set", bound_set, "Finite policy set CSV: prior,risk[,beta...]")
      ->check(CLI::ExistingFile);
  bound_cmd->add_option("--n", bound_n, "Sample size for --set");
  bound_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  DataOptions assign_data;
  SearchOptions assign_search;
  RuleOptions assign_rule;
  std::string assign_mode = "per-individual";
  auto* assign_cmd = app.add_subcommand("assign", "Draw treatment assignments from a vMF rule");
  add_data_options(assign_cmd, assign_data);
  add_search_options(assign_cmd, assign_search, false);
  add_rule_options(assign_cmd, assign_rule);
  assign_cmd->add_option("--mode", assign_mode, "per-individual or shared")
      ->check(CLI::IsMember({"per-individual", "shared"}))
      ->capture_default_str();
  assign_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  int sim_preset = 1;
  std::optional<std::size_t> sim_n;
  std::string sim_covariates;
  SearchOptions sim_search;
  sim_search.grid_points = 2000;
  sim_search.kappa_step = 0.05;
  std::size_t sim_population = 20000;
  std::size_t sim_eval_draws = 1000;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate, fit and score a synthetic experiment");
  sim_cmd->add_option("--preset", sim_preset, "Experiment 1-10")->check(CLI::Range(1, 10))
      ->capture_default_str();
  sim_cmd->add_option("--n", sim_n, "Sample size override");
  sim_cmd->add_option("--covariates", sim_covariates,
                      "Two-column covariate CSV (earnings, education) for presets 1-6")
      ->check(CLI::ExistingFile);
  add_search_options(sim_cmd, sim_search, true);
  sim_cmd->add_option("--population", sim_population, "Fresh individuals for the regret")
      ->capture_default_str();
  sim_cmd->add_option("--eval-draws", sim_eval_draws, "Rule draws for the regret")
      ->capture_default_str();
  sim_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  int gen_preset = 1;
  std::optional<std::size_t> gen_n;
  std::string gen_covariates;
  std::uint64_t gen_seed = 0;
  std::string gen_output = "dataset.csv";
  auto* gen_cmd = app.add_subcommand("generate", "Write a synthetic dataset in the input schema");
  gen_cmd->add_option("--preset", gen_preset, "Experiment 1-10")->check(CLI::Range(1, 10))
      ->capture_default_str();
  gen_cmd->add_option("--n", gen_n, "Sample size override");
  gen_cmd->add_option("--covariates", gen_covariates, "Two-column covariate CSV")
      ->check(CLI::ExistingFile);
  gen_cmd->add_option("--seed", gen_seed, "Seed")->capture_default_str();
  gen_cmd->add_option("--output", gen_output, "Output CSV")->capture_default_str();

  std::size_t grid_dim = 3;
  std::size_t grid_points = 10116;
  std::string grid_output = "grid.csv";
  auto* grid_cmd = app.add_subcommand("grid", "Write a quasi-uniform sphere grid");
  grid_cmd->add_option("--dim", grid_dim, "Dimension m")->capture_default_str();
  grid_cmd->add_option("--grid-points", grid_points, "Point count")->capture_default_str();
  grid_cmd->add_option("--output", grid_output, "Output CSV")->capture_default_str();

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_data, fit_search, out_dir, skip_trace, out, err);
    if (*prof_cmd) return cmd_profile(prof_data, prof_search, prof_rule, out_dir, out, err);
    if (*heat_cmd) {
      return cmd_heatmap(heat_data, heat_search, heat_mode, heat_kappa, out_dir, out, err);
    }
    if (*bound_cmd) {
      if (!bound_set.empty()) {
        if (!bound_data.path.empty()) throw InputError("use either --data or --set");
        if (bound_n == 0) throw InputError("--set needs --n");
        return cmd_bound_set(bound_set, bound_n, bound_search.epsilon, out_dir, out);
      }
      if (bound_data.path.empty()) throw InputError("bound needs --data or --set");
      return cmd_bound_rule(bound_data, bound_search, bound_rule, out_dir, out, err);
    }
    if (*assign_cmd) {
      return cmd_assign(assign_data, assign_search, assign_rule, assign_mode, out_dir, out, err);
    }
    if (*sim_cmd) {
      return cmd_simulate(sim_preset, sim_n, sim_covariates, sim_search, sim_population,
                          sim_eval_draws, out_dir, out);
    }
    if (*gen_cmd) return cmd_generate(gen_preset, gen_n, gen_covariates, gen_seed, gen_output, out);
    if (*grid_cmd) return cmd_grid(grid_dim, grid_points, grid_output, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace pacwelfare::cli
