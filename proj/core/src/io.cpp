#include "pacwelfare/io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <openssl/evp.h>

#include "pacwelfare/errors.hpp"

namespace pacwelfare {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_number(std::string_view field, std::size_t line_no, std::string_view column) {
  const std::string s(field);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw InputError("line " + std::to_string(line_no) + ": column '" + std::string(column) +
                     "' is not a finite number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset parse_dataset(std::string_view text, const IngestFlags& flags) {
  if (!(flags.cost >= 0.0) || !std::isfinite(flags.cost)) throw InputError("cost must be >= 0");
  if (flags.propensity && !(*flags.propensity > 0.0 && *flags.propensity < 1.0)) {
    throw InputError("--propensity must lie in (0, 1)");
  }

  Dataset ds;
  ds.digest = sha256_hex(text);

  std::vector<std::string_view> header;
  long outcome_col = -1;
  long treatment_col = -1;
  long propensity_col = -1;
  std::vector<std::size_t> covariate_cols;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);

    if (header.empty()) {
      header = fields;
      for (std::size_t c = 0; c < header.size(); ++c) {
        const std::string_view name = header[c];
        if (name == "outcome") {
          outcome_col = static_cast<long>(c);
        } else if (name == "treatment") {
          treatment_col = static_cast<long>(c);
        } else if (name == "propensity") {
          propensity_col = static_cast<long>(c);
        } else {
          covariate_cols.push_back(c);
          ds.covariate_names.emplace_back(name);
        }
      }
      if (outcome_col < 0 || treatment_col < 0) {
        throw InputError("CSV header must contain 'outcome' and 'treatment' columns");
      }
      continue;
    }

    if (fields.size() != header.size()) {
      throw InputError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    RawObservation row;
    row.outcome = parse_number(fields[outcome_col], line_no, "outcome");
    if (row.outcome < 0.0) {
      throw InputError("line " + std::to_string(line_no) + ": outcome must be >= 0");
    }
    const double t = parse_number(fields[treatment_col], line_no, "treatment");
    if (t != 0.0 && t != 1.0) {
      throw InputError("line " + std::to_string(line_no) + ": treatment must be 0 or 1");
    }
    row.treatment = static_cast<int>(t);
    if (propensity_col >= 0) {
      const double e = parse_number(fields[propensity_col], line_no, "propensity");
      if (!(e > 0.0 && e < 1.0)) {
        throw InputError("line " + std::to_string(line_no) + ": propensity must lie in (0, 1)");
      }
      row.propensity = e;
    }
    row.covariates.reserve(covariate_cols.size());
    for (std::size_t c : covariate_cols) {
      row.covariates.push_back(parse_number(fields[c], line_no, header[c]));
    }
    if (row.treatment == 1) row.outcome -= flags.cost;
    if (row.outcome < 0.0) ++ds.negative_after_cost;
    ds.rows.push_back(std::move(row));
  }
  if (header.empty()) throw InputError("input is empty");
  if (ds.rows.empty()) throw InputError("input has a header but no data rows");

  DatasetMeta& meta = ds.meta;
  meta.n = ds.rows.size();
  meta.cost = flags.cost;
  meta.outcome_cap = 0.0;
  for (const auto& r : ds.rows) meta.outcome_cap = std::max(meta.outcome_cap, r.outcome);
  if (!(meta.outcome_cap > 0.0)) throw InputError("largest (cost-adjusted) outcome must be > 0");

  meta.covariate_maxima.assign(covariate_cols.size(), 0.0);
  for (const auto& r : ds.rows) {
    for (std::size_t c = 0; c < covariate_cols.size(); ++c) {
      meta.covariate_maxima[c] = std::max(meta.covariate_maxima[c], r.covariates[c]);
    }
  }
  for (std::size_t c = 0; c < covariate_cols.size(); ++c) {
    if (!(meta.covariate_maxima[c] > 0.0)) {
      throw InputError("covariate '" + ds.covariate_names[c] + "' has no positive value");
    }
  }

  std::vector<double> es;
  if (propensity_col >= 0) {
    for (const auto& r : ds.rows) es.push_back(*r.propensity);
  } else {
    if (!flags.propensity) {
      throw InputError("no propensity column; supply a constant with --propensity");
    }
    meta.constant_propensity = flags.propensity;
    es.push_back(*flags.propensity);
  }
  meta.psi = flags.psi ? *flags.psi : default_psi(es);
  meta.validate();
  return ds;
}

Dataset ingest(const std::filesystem::path& path, const IngestFlags& flags) {
  return parse_dataset(read_file(path), flags);
}

void write_dataset(std::ostream& out, const std::vector<RawObservation>& rows,
                   const std::vector<std::string>& covariate_names) {
  const bool with_e = !rows.empty() && rows.front().propensity.has_value();
  out << "outcome,treatment";
  if (with_e) out << ",propensity";
  for (const auto& name : covariate_names) out << ',' << name;
  out << '\n';
  for (const auto& r : rows) {
    if (r.covariates.size() != covariate_names.size()) {
      throw InputError("row covariate count differs from the header");
    }
    out << format_double(r.outcome) << ',' << r.treatment;
    if (with_e) out << ',' << format_double(r.propensity.value_or(0.0));
    for (double x : r.covariates) out << ',' << format_double(x);
    out << '\n';
  }
}

}  // namespace pacwelfare
