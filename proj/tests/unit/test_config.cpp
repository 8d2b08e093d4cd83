#include <filesystem>
#include <numbers>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "ornithopter/config.hpp"
#include "ornithopter/errors.hpp"
#include "test_support.hpp"

namespace ornithopter::test {

namespace {

const std::string kShipped = std::string(ORNITHOPTER_SOURCE_DIR) + "/configs/dragonfly_hover.cfg";

std::string shipped_text() {
  std::ifstream in(kShipped);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  if (pos != std::string::npos) text.replace(pos, from.size(), to);
  return text;
}

}  // namespace

TEST(Config, ShippedConfigLoadsWithoutWarnings) {
  const LoadedConfig c = load_config(kShipped);
  EXPECT_TRUE(c.warnings.empty()) << c.warnings.front();
  EXPECT_EQ(c.config.inertia_mode, InertiaMode::Rescaled);
  EXPECT_NEAR(c.config.kinematics.frequency(), 35.6476, 1e-12);
  EXPECT_NEAR(c.config.kinematics.wings[0].phi_m, 58.42 * std::numbers::pi / 180.0, 1e-14);
  EXPECT_EQ(c.config.initial_state.position, Vec3(0, 0, 2));
}

TEST(Config, ShippedMorphologyMatchesTheBuiltInDataset) {
  const Morphology& m = load_config(kShipped).config.morphology;
  EXPECT_NEAR(m.total_mass(), 6.2922e-5, 1e-9);
  EXPECT_LT((m.wings[1].joint_offset - 1e-3 * Vec3(2.71, -3.8, 0.0)).norm(), 1e-18);
  EXPECT_LT((m.wings[0].joint_offset - 1e-3 * Vec3(2.71, 3.8, 0.0)).norm(), 1e-18);
  EXPECT_EQ(m.gravity, 9.81);
}

TEST(Config, FlapAmplitudeOutOfRangeWarns) {
  const std::string text =
      replace_once(shipped_text(), "\"phi_m\": 58.42", "\"phi_m\": 90.0");
  const LoadedConfig c = parse_config(text);
  ASSERT_EQ(c.warnings.size(), 2u);  // both fore wings share the column
  EXPECT_NE(c.warnings[0].find("phi_m"), std::string::npos);
  EXPECT_NE(c.warnings[0].find("exceeds"), std::string::npos);
}

TEST(Config, StrictBoundsTurnsWarningsIntoErrors) {
  std::string text = replace_once(shipped_text(), "\"phi_m\": 58.42", "\"phi_m\": 90.0");
  text = replace_once(text, "\"strict_bounds\": false", "\"strict_bounds\": true");
  EXPECT_THROW(parse_config(text), BoundsError);
}

TEST(Config, EmptyTextIsAParseError) { EXPECT_THROW(parse_config(""), ParseError); }

TEST(Config, MalformedJsonIsAParseError) {
  EXPECT_THROW(parse_config("{ \"schema_version\": 1, "), ParseError);
}

TEST(Config, UnknownKeyIsASchemaError) {
  const std::string text =
      replace_once(shipped_text(), "\"schema_version\": 1,", "\"schema_version\": 1, \"bogus\": 3,");
  EXPECT_THROW(parse_config(text), SchemaError);
}

TEST(Config, WrongTypeIsASchemaError) {
  const std::string text = replace_once(shipped_text(), "\"rho\": 1.2", "\"rho\": \"dense\"");
  EXPECT_THROW(parse_config(text), SchemaError);
}

TEST(Config, MissingFileIsAConfigError) {
  EXPECT_THROW(load_config("/nonexistent/dir/none.cfg"), ConfigError);
}

TEST(Config, SerializeRoundTrip) {
  const RunConfig a = load_config(kShipped).config;
  const RunConfig b = parse_config(serialize_config(a)).config;
  EXPECT_TRUE(equivalent(a, b));
}

TEST(Config, RoundTripDetectsChanges) {
  const RunConfig a = load_config(kShipped).config;
  RunConfig b = a;
  b.kinematics.wings[3].theta_C *= 1.0 + 1e-9;
  EXPECT_FALSE(equivalent(a, b));
}

TEST(Config, LiteralInertiaWarnsOncePerWing) {
  const std::string text =
      replace_once(shipped_text(), "\"inertia_mode\": \"rescaled\"", "\"inertia_mode\": \"paper_literal\"");
  const LoadedConfig c = parse_config(text);
  EXPECT_EQ(c.config.inertia_mode, InertiaMode::PaperLiteral);
  ASSERT_EQ(c.warnings.size(), kWingCount);
  for (std::size_t i = 0; i < kWingCount; ++i) {
    EXPECT_NE(c.warnings[i].find(std::to_string(i + 1)), std::string::npos) << c.warnings[i];
  }
}

TEST(Config, NonPositiveTimeStepIsRejected) {
  const std::string text = replace_once(shipped_text(), "\"dt\": 1e-5,                 // s",
                                        "\"dt\": 0.0,");
  EXPECT_THROW(parse_config(text), SchemaError);
}

}  // namespace ornithopter::test
