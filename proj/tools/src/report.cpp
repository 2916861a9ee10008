#include "report.hpp"

#include <fstream>
#include <sstream>

#include "pacwelfare/errors.hpp"

namespace pacwelfare::cli {

Json policy_json(const PolicyVector& beta) {
  Json j;
  j["beta"] = std::vector<double>(beta.values().begin(), beta.values().end());
  if (beta.dim() == 3) {
    const auto s = to_spherical(beta);
    j["azimuth_deg"] = s.azimuth_deg;
    j["inclination_deg"] = s.inclination_deg;
  }
  return j;
}

Json terms_json(const ObjectiveTerms& t, double currency_scale) {
  return Json{{"objective", t.objective},
              {"risk", t.risk},
              {"mcse", t.mcse},
              {"kl", t.kl},
              {"penalty", t.penalty},
              {"objective_currency", t.objective * currency_scale},
              {"risk_currency", t.risk * currency_scale}};
}

Json dataset_json(const Dataset& ds) {
  Json j;
  j["sha256"] = ds.digest;
  j["rows"] = ds.meta.n;
  j["covariates"] = ds.covariate_names;
  j["covariate_maxima"] = ds.meta.covariate_maxima;
  j["outcome_cap"] = ds.meta.outcome_cap;
  j["psi"] = ds.meta.psi;
  j["cost"] = ds.meta.cost;
  if (ds.meta.constant_propensity) {
    j["propensity"] = *ds.meta.constant_propensity;
  } else {
    j["propensity"] = "per-row";
  }
  j["clamped_outcomes"] = ds.negative_after_cost;
  return j;
}

PolicyVector parse_direction(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw InputError("");
    } catch (const std::exception&) {
      throw InputError("cannot parse direction '" + text + "'");
    }
  }
  if (v.size() < 2) throw InputError("direction needs at least two components");
  return normalize_to_sphere(v);
}

std::string manifest_comment(const Json& manifest) { return "# manifest " + manifest.dump() + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed for " + path.string());
}

void write_json(const std::filesystem::path& path, const Json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string CsvTable::render(const Json& manifest) const {
  std::string s = manifest_comment(manifest);
  for (std::size_t c = 0; c < header_.size(); ++c) s += (c ? "," : "") + header_[c];
  s += '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) s += (c ? "," : "") + row[c];
    s += '\n';
  }
  return s;
}

}  // namespace pacwelfare::cli
