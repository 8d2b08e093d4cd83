#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "ornithopter/cli.hpp"
#include "ornithopter/io.hpp"

namespace ornithopter::test {

namespace fs = std::filesystem;

namespace {

const std::string kShipped = std::string(ORNITHOPTER_SOURCE_DIR) + "/configs/dragonfly_hover.cfg";

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("ornithopter_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args, const std::string& sub = "") {
    std::vector<std::string> full{"ornithopter"};
    full.insert(full.end(), args.begin(), args.end());
    full.push_back("-o");
    full.push_back((dir_ / sub).string());
    return run_cli(full);
  }

  fs::path dir_;
};

}  // namespace

TEST(Io, Sha256KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Io, NumbersSurviveATextRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -6.2922e-5, 1e300, 0.0}) {
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(Io, CsvRejectsRowsOfTheWrongWidth) {
  CsvTable t({"t [s]", "x [m]"});
  t.add_row({0.0, 1.0});
  EXPECT_THROW(t.add_row({1.0}), std::invalid_argument);
  EXPECT_EQ(t.rows(), 1u);
  EXPECT_EQ(t.str().substr(0, t.str().find('\n')), "t [s],x [m]");
}

TEST(Io, AtomicWriteReplacesTheFile) {
  const fs::path p = fs::temp_directory_path() / "ornithopter_atomic.txt";
  write_file_atomic(p, "first");
  write_file_atomic(p, "second");
  EXPECT_EQ(read(p), "second");
  fs::remove(p);
}

TEST_F(CliTest, MissingConfigExitsWithConfigError) {
  EXPECT_EQ(run({"simulate-reduced", "/nonexistent/none.cfg"}), kExitConfig);
}

TEST_F(CliTest, UnknownSubcommandIsAUsageError) {
  EXPECT_EQ(run_cli({"ornithopter", "fly-away"}), kExitConfig);
}

TEST_F(CliTest, BadInertiaModeIsAUsageError) {
  EXPECT_EQ(run({"simulate-full", kShipped, "--inertia-mode", "bogus"}), kExitConfig);
}

TEST_F(CliTest, HugeTimeStepIsANumericalFailure) {
  EXPECT_EQ(run({"simulate-full", kShipped, "--dt", "1", "--duration", "5"}), kExitNumerical);
}

TEST_F(CliTest, SimulateReducedIsDeterministic) {
  const std::vector<std::string> args{"simulate-reduced", kShipped, "--duration", "0.002"};
  ASSERT_EQ(run(args, "a"), kExitOk);
  ASSERT_EQ(run(args, "b"), kExitOk);
  EXPECT_EQ(read(dir_ / "a" / "trajectory.csv"), read(dir_ / "b" / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "manifest.json"));
  const std::string header = first_line(dir_ / "a" / "trajectory.csv");
  EXPECT_EQ(header.rfind("t [s],", 0), 0u) << header;
}

TEST_F(CliTest, SimulateFullWritesTrajectoryAndDiagnostics) {
  ASSERT_EQ(run({"simulate-full", kShipped, "--duration", "0.0005"}), kExitOk);
  const std::string header = first_line(dir_ / "trajectory.csv");
  EXPECT_NE(header.find("phi_1 [deg]"), std::string::npos) << header;
  EXPECT_NE(first_line(dir_ / "diagnostics.csv").find("E [J]"), std::string::npos);
}

TEST_F(CliTest, EveryColumnHeaderCarriesAUnit) {
  ASSERT_EQ(run({"decompose-forces", kShipped, "--duration", "0.0005"}), kExitOk);
  ASSERT_EQ(run({"wing-forces", kShipped, "--samples", "4"}), kExitOk);
  for (const char* f : {"decomposition.csv", "station_loads.csv", "wing_loads.csv"}) {
    std::stringstream header(first_line(dir_ / f));
    std::string column;
    while (std::getline(header, column, ',')) {
      EXPECT_NE(column.find('['), std::string::npos) << f << ": " << column;
    }
  }
}

TEST_F(CliTest, ManifestRecordsTheConfigHash) {
  ASSERT_EQ(run({"wing-forces", kShipped, "--mode", "alpha", "--samples", "10"}), kExitOk);
  const std::string manifest = read(dir_ / "manifest.json");
  EXPECT_NE(manifest.find(sha256_hex(read(kShipped))), std::string::npos);
}

}  // namespace ornithopter::test
