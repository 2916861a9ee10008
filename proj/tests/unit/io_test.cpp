#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pacwelfare/dgp.hpp"
#include "pacwelfare/errors.hpp"
#include "pacwelfare/io.hpp"

namespace pacwelfare {
namespace {

constexpr const char* kSmall =
    "# comment line\n"
    "outcome,treatment,earnings,education\n"
    "1000,1,0,12\n"
    "\n"
    "400,0,2000,10\n"
    "2000,1,4000,16\n"
    "0,0,1000,8\n";

TEST(Parse, ConstantPropensity) {
  const auto ds = parse_dataset(kSmall, {.cost = 0.0, .propensity = 2.0 / 3.0, .psi = {}});
  ASSERT_EQ(ds.rows.size(), 4u);
  EXPECT_EQ(ds.covariate_names, (std::vector<std::string>{"earnings", "education"}));
  EXPECT_EQ(ds.meta.outcome_cap, 2000.0);
  EXPECT_EQ(ds.meta.covariate_maxima, (std::vector<double>{4000.0, 16.0}));
  EXPECT_NEAR(ds.meta.psi, 1.0 / 3.0, 1e-12);
  EXPECT_EQ(ds.digest, sha256_hex(kSmall));
  EXPECT_EQ(ds.digest.size(), 64u);

  const auto w = compute_weights(ds.rows, ds.meta);
  EXPECT_NEAR(w.rows[0].h, 1000.0 * (1.0 / 3.0) / 2000.0 / (2.0 / 3.0), 1e-15);
  EXPECT_NEAR(w.rows[1].h, 400.0 * (1.0 / 3.0) / 2000.0 / (1.0 / 3.0), 1e-15);
  EXPECT_EQ(w.rows[2].x_aug, (std::vector<double>{1.0, 1.0, 1.0}));
}

TEST(Parse, PerRowPropensityAndPsiOverride) {
  const std::string text =
      "treatment,outcome,x,propensity\n"
      "1,10,1,0.4\n"
      "0,5,2,0.7\n";
  const auto ds = parse_dataset(text, {});
  ASSERT_TRUE(ds.rows[0].propensity.has_value());
  EXPECT_EQ(*ds.rows[1].propensity, 0.7);
  EXPECT_NEAR(ds.meta.psi, 0.3, 1e-12);
  EXPECT_EQ(ds.covariate_names, (std::vector<std::string>{"x"}));
  const auto w = compute_weights(ds.rows, ds.meta);
  EXPECT_NEAR(w.rows[0].h, 10.0 * 0.3 / 10.0 / 0.4, 1e-15);
  EXPECT_NEAR(w.rows[1].h, 5.0 * 0.3 / 10.0 / 0.3, 1e-15);

  const auto tighter = parse_dataset(text, {.cost = 0.0, .propensity = {}, .psi = 0.2});
  EXPECT_EQ(tighter.meta.psi, 0.2);
}

TEST(Parse, CostAdjustment) {
  const std::string text =
      "outcome,treatment,x\n"
      "774,1,1\n"
      "500,1,1\n"
      "3000,1,2\n"
      "100,0,1\n";
  const auto ds = parse_dataset(text, {.cost = 774.0, .propensity = 2.0 / 3.0, .psi = {}});
  EXPECT_EQ(ds.rows[0].outcome, 0.0);
  EXPECT_EQ(ds.rows[1].outcome, -274.0);
  EXPECT_EQ(ds.rows[3].outcome, 100.0);
  EXPECT_EQ(ds.meta.outcome_cap, 3000.0 - 774.0);
  EXPECT_EQ(ds.negative_after_cost, 1u);
  const auto w = compute_weights(ds.rows, ds.meta);
  EXPECT_EQ(w.rows[0].h, 0.0);
  EXPECT_EQ(w.rows[1].h, 0.0);
  EXPECT_EQ(w.clamped, 1u);
}

TEST(Parse, Rejections) {
  const IngestFlags flags{.cost = 0.0, .propensity = 0.5, .psi = {}};
  EXPECT_THROW(parse_dataset("", flags), InputError);
  EXPECT_THROW(parse_dataset("# only\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,x\n1,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n1,2,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n-1,1,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\nabc,1,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n1,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n1,1,0\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n0,1,1\n", flags), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x\n1,1,1\n", {}), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x,propensity\n1,1,1,1.0\n", {}), InputError);
  EXPECT_THROW(parse_dataset("outcome,treatment,x,propensity\n1,1,1,0\n", {}), InputError);
  EXPECT_THROW(parse_dataset(kSmall, {.cost = -1.0, .propensity = 0.5, .psi = {}}), InputError);
  EXPECT_THROW(parse_dataset(kSmall, {.cost = 0.0, .propensity = 1.5, .psi = {}}), InputError);
  EXPECT_THROW(ingest("/nonexistent/file.csv", flags), InputError);
}

TEST(Parse, OverlapViolationSurfacesInWeighting) {
  const auto ds = parse_dataset(kSmall, {.cost = 0.0, .propensity = 2.0 / 3.0, .psi = 0.4});
  EXPECT_THROW(compute_weights(ds.rows, ds.meta), InputError);
}

TEST(RoundTrip, GeneratedDataGivesIdenticalWeights) {
  auto c = experiment_preset(1).config;
  c.n = 400;
  auto g = generate(c, 21);
  for (auto& r : g.rows) r.propensity = 2.0 / 3.0;
  std::ostringstream out;
  write_dataset(out, g.rows, {"earnings", "education"});
  const auto ds = parse_dataset(out.str(), {});
  ASSERT_EQ(ds.rows.size(), g.rows.size());
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    EXPECT_EQ(ds.rows[i].outcome, g.rows[i].outcome);
    EXPECT_EQ(ds.rows[i].covariates, g.rows[i].covariates);
    EXPECT_EQ(ds.rows[i].treatment, g.rows[i].treatment);
  }

  const auto again = parse_dataset(out.str(), {});
  const auto w1 = compute_weights(ds.rows, ds.meta);
  const auto w2 = compute_weights(again.rows, again.meta);
  for (std::size_t i = 0; i < w1.rows.size(); ++i) {
    EXPECT_EQ(w1.rows[i].h, w2.rows[i].h);
    EXPECT_EQ(w1.rows[i].x_aug, w2.rows[i].x_aug);
  }

  const auto path = std::filesystem::temp_directory_path() / "pacwelfare_io_roundtrip.csv";
  {
    std::ofstream f(path, std::ios::binary);
    f << out.str();
  }
  const auto from_file = ingest(path, {});
  EXPECT_EQ(from_file.digest, ds.digest);
  EXPECT_EQ(read_file(path), out.str());
  std::filesystem::remove(path);
}

TEST(Format, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 12697.583, -0.0}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

}  // namespace
}  // namespace pacwelfare
