#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "wshift/cli.hpp"

namespace wshift {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wshift_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  std::string example(int k) const {
    const CliRun r = run({"gen-example", "--k", std::to_string(k)});
    EXPECT_EQ(r.code, 0) << r.err;
    return write("k" + std::to_string(k) + ".json", r.out);
  }

  fs::path dir_;
};

constexpr const char* kTrivial = R"({
  "dim": 2,
  "S": {"kind": "windowed", "lo": -2, "weights": [
    [[[2, 0], [1, 0]], [[0, 0], [3, 0]]],
    [[[1, 1], [0, 0]], [[0, 0], [2, 0]]],
    [[[4, 0], [0, 0]], [[1, 0], [1, 0]]]]},
  "T": {"kind": "windowed", "lo": -2, "weights": [
    [[[2, 0], [1, 0]], [[0, 0], [3, 0]]],
    [[[1, 1], [0, 0]], [[0, 0], [2, 0]]],
    [[[4, 0], [0, 0]], [[1, 0], [1, 0]]]]},
  "params": {"N": 6, "n_max": 2}
})";

TEST_F(CliTest, VerifyEqualShiftsWithTrivialColumnPasses) {
  const CliRun r = run({"verify", write("c.json", kTrivial)});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("span: pass"), std::string::npos);
}

TEST_F(CliTest, CheckDiagonalOnKDiagonalExampleFails) {
  const CliRun r = run({"check-diagonal", example(2), "--p-range", "6"});
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.out.find("diagonal_form_equivalence: fail"), std::string::npos);
}

TEST_F(CliTest, CheckDiagonalFindsTrivialEquivalence) {
  const CliRun r = run({"check-diagonal", write("c.json", kTrivial), "--p-range", "2"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("offset: 0"), std::string::npos);
}

TEST_F(CliTest, TwoDimOnBranchShiftPair) {
  const CliRun gen = run({"gen-example", "--family", "branch-shift", "--tau", "2", "-1", "--seed", "3"});
  ASSERT_EQ(gen.code, 0) << gen.err;
  const std::string cfg = write("bs.json", gen.out);
  const std::string report = path("report.json");
  const CliRun r = run({"two-dim", cfg, "--json", report});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto doc = nlohmann::json::parse(read(report));
  EXPECT_LE(doc["diagonal_support"].size(), 2u);
  EXPECT_EQ(doc["tau"], nlohmann::json::array({2, -1}));
  EXPECT_EQ(doc["exit_code"], 0);
}

TEST_F(CliTest, BuildReportsKDiagonals) {
  const std::string report = path("build.json");
  const CliRun r = run({"build", example(3), "--json", report});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto doc = nlohmann::json::parse(read(report));
  EXPECT_EQ(doc["diagonal_support"], nlohmann::json::array({1, 2, 3}));
}

TEST_F(CliTest, CertifyMinSupport) {
  const CliRun r = run({"certify-min-support", example(3)});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("min_support: 3"), std::string::npos);
  const CliRun bad = run({"certify-min-support", write("c.json", kTrivial)});
  EXPECT_EQ(bad.code, 2) << bad.err;
}

TEST_F(CliTest, DescribeAndPolar) {
  const std::string cfg = example(2);
  const CliRun d = run({"describe", cfg, "--N", "9"});
  EXPECT_EQ(d.code, 0) << d.err;
  EXPECT_NE(d.out.find("band: [1]"), std::string::npos);
  EXPECT_NE(d.out.find("truncation_dimension: 38"), std::string::npos);
  const CliRun p = run({"polar", cfg});
  EXPECT_EQ(p.code, 0) << p.err;
  EXPECT_NE(p.out.find("factor_unitary: pass"), std::string::npos);
}

TEST_F(CliTest, VerdictFailureExitsTwo) {
  std::string text = kTrivial;
  // T_0 differs from S_0; with U0 at row 0 only the backward products see index 0
  const auto pos = text.rfind("[[[4, 0]");
  text.replace(pos, 8, "[[[5, 0]");
  const CliRun r = run({"verify", write("c.json", text)});
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("moduli_backward: fail"), std::string::npos) << r.out;
}

TEST_F(CliTest, IsometryViolationIsAVerdict) {
  std::string text = kTrivial;
  text.insert(text.rfind("\"params\""), R"("u0": [{"row": 0, "block": [[[0.5, 0], [0, 0]], [[0, 0], [1, 0]]]}],)");
  const CliRun r = run({"verify", write("c.json", text)});
  EXPECT_EQ(r.code, 2) << r.out << r.err;
  EXPECT_NE(r.out.find("isometry: fail"), std::string::npos);
}

TEST_F(CliTest, UsageAndParseErrorsExitOne) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"verify"}).code, 1);
  EXPECT_EQ(run({"verify", path("missing.json")}).code, 1);
  const CliRun bad_json = run({"verify", write("bad.json", "{")});
  EXPECT_EQ(bad_json.code, 1);
  EXPECT_NE(bad_json.err.find("ParseError"), std::string::npos);
  const CliRun singular = run({"describe", write("s.json", R"({"dim": 1, "S": {"kind": "periodic", "weights": [[[[0, 0]]]]}})")});
  EXPECT_EQ(singular.code, 1);
  EXPECT_NE(singular.err.find("InvariantError"), std::string::npos);
  const CliRun no_t = run({"verify", write("s2.json", R"({"dim": 1, "S": {"kind": "periodic", "weights": [[[[2, 0]]]]}})")});
  EXPECT_EQ(no_t.code, 1);
  EXPECT_EQ(run({"verify", write("c.json", kTrivial), "--N", "abc"}).code, 1);
  EXPECT_EQ(run({"gen-example", "--k", "1"}).code, 1);
  EXPECT_EQ(run({"gen-example", "--family", "other"}).code, 1);
  EXPECT_EQ(run({"two-dim", example(3)}).code, 1);
}

TEST_F(CliTest, HelpExitsZero) { EXPECT_EQ(run({"--help"}).code, 0); }

TEST_F(CliTest, JsonReportsAreDeterministic) {
  const std::string cfg = example(2);
  for (const char* cmd : {"describe", "polar", "verify", "build", "check-diagonal", "two-dim", "certify-min-support"}) {
    const CliRun a = run({cmd, cfg, "--json", path("a.json")});
    const CliRun b = run({cmd, cfg, "--json", path("b.json")});
    EXPECT_EQ(a.code, b.code) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_EQ(read(path("a.json")), read(path("b.json"))) << cmd;
  }
}

TEST_F(CliTest, ExitCodeMatchesVerdicts) {
  const std::string cfg = example(2);
  for (const char* cmd : {"describe", "polar", "verify", "build", "check-diagonal", "two-dim", "certify-min-support"}) {
    const CliRun r = run({cmd, cfg, "--json", path("r.json")});
    const auto doc = nlohmann::json::parse(read(path("r.json")));
    bool all_pass = true;
    for (const auto& [name, v] : doc["verdicts"].items()) all_pass = all_pass && v == "pass";
    EXPECT_EQ(r.code, all_pass ? 0 : 2) << cmd;
    EXPECT_EQ(doc["exit_code"], r.code) << cmd;
  }
}

TEST_F(CliTest, TextReportPrintsSeventeenDigits) {
  const CliRun r = run({"describe", example(2)});
  // 14.2 is not exact in binary; 17 significant digits expose the rounding
  EXPECT_NE(r.out.find("14.200000000000001"), std::string::npos) << r.out;
}

TEST_F(CliTest, GenExampleRoundTrips) {
  const CliRun r = run({"gen-example", "--k", "2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(serialize_config(parse_config(r.out)), r.out);
  const CliRun again = run({"gen-example", "--k", "2", "--json", path("fixture.json")});
  EXPECT_EQ(again.out, r.out);
  EXPECT_EQ(read(path("fixture.json")), r.out);
}

TEST_F(CliTest, FlagsOverrideConfigParams) {
  const std::string report = path("v.json");
  run({"verify", write("c.json", kTrivial), "--N", "7", "--n-max", "3", "--margin", "2", "--tol", "1e-6", "--json", report});
  const auto doc = nlohmann::json::parse(read(report));
  EXPECT_EQ(doc["report"]["N"], 7);
  EXPECT_EQ(doc["report"]["n_max"], 3);
  EXPECT_EQ(doc["report"]["margin"], 2);
  EXPECT_EQ(doc["report"]["tol"], 1e-6);
}

#ifdef WSHIFT_CLI_PATH
TEST_F(CliTest, BinaryExitCodes) {
  const std::string bin = WSHIFT_CLI_PATH;
  const std::string cfg = example(2);
  const auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(bin + " verify " + cfg), 0);
  EXPECT_EQ(status(bin + " check-diagonal " + cfg), 2);
  EXPECT_EQ(status(bin + " verify " + path("none.json")), 1);
}
#endif

}  // namespace
}  // namespace wshift
