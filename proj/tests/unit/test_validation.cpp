#include <map>
#include <string>

#include <gtest/gtest.h>

#include "ornithopter/config.hpp"
#include "ornithopter/validation.hpp"

namespace ornithopter::test {

TEST(Validation, QuickSuitePassesOnTheShippedConfig) {
  const RunConfig c =
      load_config(std::string(ORNITHOPTER_SOURCE_DIR) + "/configs/dragonfly_hover.cfg").config;
  const ValidationReport r = run_all(c, ValidationOptions::quick());
  EXPECT_TRUE(r.passed()) << r.text();
  std::map<std::string, int> seen;
  for (const auto& check : r.checks) ++seen[check.id];
  for (const auto& [id, n] : seen) EXPECT_EQ(n, 1) << id;
  for (const char* id : {"mass_ratio", "energy", "free_fall", "momentum", "mass_matrix",
                         "kinematics", "quadrature", "reduced_full", "closure", "force_ordering",
                         "ga", "hover"}) {
    EXPECT_EQ(seen.count(id), 1u) << id;
  }
  EXPECT_NE(r.csv().find("mass_ratio"), std::string::npos);
}

TEST(Validation, MassRatioOfTheDragonfly) {
  const CheckResult r = check_mass_ratio(default_dragonfly());
  EXPECT_EQ(r.status, CheckStatus::Pass);
  EXPECT_NEAR(r.measured, 3.5, 5e-3);
}

}  // namespace ornithopter::test
