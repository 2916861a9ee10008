#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pacwelfare/fit.hpp"
#include "pacwelfare/io.hpp"
#include "pacwelfare/policy.hpp"

namespace pacwelfare::cli {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

Json policy_json(const PolicyVector& beta);
Json terms_json(const ObjectiveTerms& t, double currency_scale);
Json dataset_json(const Dataset& ds);

/// Parses "a,b,c" into a unit vector (normalised if needed).
PolicyVector parse_direction(const std::string& text);

/// Text written ahead of CSV bodies so each file carries its manifest.
std::string manifest_comment(const Json& manifest);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const Json& j);

/// CSV with a manifest comment line and a header row; cells are preformatted.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string render(const Json& manifest) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pacwelfare::cli
