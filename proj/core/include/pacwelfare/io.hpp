#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pacwelfare/welfare.hpp"

namespace pacwelfare {

struct IngestFlags {
  double cost = 0.0;                 // subtracted from treated outcomes
  std::optional<double> propensity;  // used when the file has no propensity column
  std::optional<double> psi;         // overrides the largest valid overlap bound
};

struct Dataset {
  std::vector<RawObservation> rows;  // outcomes already cost-adjusted
  DatasetMeta meta;
  std::vector<std::string> covariate_names;
  std::size_t negative_after_cost = 0;  // rows that compute_weights will clamp to zero
  std::string digest;                   // SHA-256 of the input bytes, hex
};

/// Parses the CSV schema: columns `outcome` and `treatment` are required,
/// `propensity` is optional, every other column is a covariate in header
/// order. Blank lines and lines starting with '#' are skipped.
Dataset parse_dataset(std::string_view text, const IngestFlags& flags);
Dataset ingest(const std::filesystem::path& path, const IngestFlags& flags);

/// Writes rows in the same schema (17 significant digits).
void write_dataset(std::ostream& out, const std::vector<RawObservation>& rows,
                   const std::vector<std::string>& covariate_names);

std::string read_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Shortest-safe round-trip formatting: %.17g.
std::string format_double(double x);

}  // namespace pacwelfare
