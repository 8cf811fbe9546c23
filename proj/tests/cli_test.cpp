#include "cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using ripgf::Rational;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ripgf");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ripgf::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string metric(const std::string& csv, const std::string& name) {
  for (const auto& line : lines(csv))
    if (line.rfind(name + ",", 0) == 0) return line.substr(name.size() + 1);
  return {};
}

TEST(CliPmf, PinnedTable) {
  const auto r = run({"pmf", "--n", "2", "--m", "2", "--p", "1/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(r.out);
  ASSERT_GE(ls.size(), 5U);
  EXPECT_EQ(ls[0], "a,b,prob_rational,prob_decimal");
  EXPECT_EQ(ls[1], "0,0,7/16,0.4375");
  EXPECT_EQ(ls[2], "0,1,1/8,0.125");
  EXPECT_EQ(ls[3], "1,0,1/8,0.125");
  EXPECT_EQ(ls[4], "1,1,5/16,0.3125");
  EXPECT_NE(r.out.find("active,0,9/16,0.5625"), std::string::npos);
  EXPECT_NE(r.out.find("passive,1,7/16,0.4375"), std::string::npos);
}

TEST(CliPmf, TrivialCases) {
  auto r = run({"pmf", "--n", "1", "--m", "1", "--p", "3/4"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(lines(r.out)[1], "0,0,1,1");
  EXPECT_EQ(lines(r.out)[2], "");

  r = run({"pmf", "--n", "2", "--m", "2", "--p", "0"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  EXPECT_EQ(ls[1], "0,0,1,1");
  for (int i = 2; i <= 4; ++i) EXPECT_EQ(ls[i].substr(4), "0,0");
}

TEST(CliPmf, JsonRoundTripSumsToOne) {
  const auto r = run({"pmf", "--n", "4", "--m", "3", "--p", "0.35", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["mode"], "exact");
  EXPECT_EQ(doc["params"]["p"]["num"], "7");
  EXPECT_EQ(doc["params"]["p"]["den"], "20");
  Rational total(0);
  for (const auto& row : doc["result"]["joint"])
    total += Rational(ripgf::BigInt(row["prob"]["num"].get<std::string>()),
                      ripgf::BigInt(row["prob"]["den"].get<std::string>()));
  EXPECT_EQ(total, Rational(1));
  EXPECT_EQ(doc["result"]["active_marginal"].size(), 4U);
  EXPECT_EQ(doc["result"]["passive_marginal"].size(), 3U);
}

TEST(CliPmf, RefusesFloatAndOversize) {
  EXPECT_EQ(run({"pmf", "--mode", "float"}).code, 2);
  EXPECT_EQ(run({"pmf", "--n", "41", "--m", "2"}).code, 3);
  ::setenv(ripgf::cli::kCapEnv, "3", 1);
  EXPECT_EQ(run({"pmf", "--n", "4", "--m", "2"}).code, 3);
  EXPECT_EQ(run({"pmf", "--n", "3", "--m", "3"}).code, 0);
  ::setenv(ripgf::cli::kCapEnv, "zero", 1);
  EXPECT_EQ(run({"pmf"}).code, 2);
  ::unsetenv(ripgf::cli::kCapEnv);
}

TEST(CliErrors, InvalidInputsExitTwoWithOneLine) {
  for (const auto& args : std::vector<std::vector<std::string>>{{"pmf", "--p", "1.5"},
                                                               {"pmf", "--n", "0"},
                                                               {"pmf", "--p", "1/x"},
                                                               {"moments", "--m", "-3"},
                                                               {"bogus"},
                                                               {"simulate", "--trials", "0"},
                                                               {"scan", "--p-grid", "0:1"},
                                                               {"scan", "--p-grid", "0:2:1"},
                                                               {"scan", "--p-grid", "0:1:0"},
                                                               {"pmf", "--format", "xml"}}) {
    const auto r = run(args);
    EXPECT_EQ(r.code, 2) << args[0];
    EXPECT_TRUE(r.out.empty()) << args[0];
    EXPECT_EQ(lines(r.err).size(), 1U) << r.err;
  }
}

TEST(CliMoments, Examples) {
  auto r = run({"moments", "--n", "2", "--m", "2", "--p", "1/2"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("cov,31/256,0.12109375"), std::string::npos) << r.out;

  r = run({"moments", "--n", "5", "--m", "5", "--p", "0"});
  ASSERT_EQ(r.code, 0);
  for (const char* f : {"mean_x", "mean_y", "var_x", "var_y", "cov"}) EXPECT_EQ(metric(r.out, f), "0,0");
  EXPECT_EQ(metric(r.out, "corr"), ",undefined");

  r = run({"moments", "--n", "3", "--m", "4", "--p", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(metric(r.out, "var_x"), "0,0");
  EXPECT_EQ(metric(r.out, "var_y"), "0,0");
  EXPECT_EQ(metric(r.out, "corr"), ",undefined");

  r = run({"moments", "--n", "300", "--m", "200", "--p", "0.01", "--mode", "float", "--format", "json"});
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_NEAR(doc["result"]["mean_x"].get<double>(), 299.0 * (1 - std::pow(1 - 1e-4, 200)), 1e-9);
}

TEST(CliPgf, EvaluatesBothForms) {
  auto r = run({"pgf", "--n", "2", "--m", "2", "--p", "1/2", "--x", "0", "--y", "0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(metric(r.out, "joint"), "7/16,0.4375");
  EXPECT_EQ(metric(r.out, "factorization_gap"), "31/256,0.12109375");
  r = run({"pgf", "--n", "2", "--m", "2", "--p", "1/2", "--x", "2", "--mode", "float"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(metric(r.out, "joint"), ",1.4375");
}

TEST(CliSimulate, DeterministicAndAccurate) {
  const std::vector<std::string> args{"simulate", "--n", "2", "--m", "2", "--p", "1/2", "--trials", "100000", "--seed", "42"};
  const auto first = run(args);
  ASSERT_EQ(first.code, 0);
  EXPECT_EQ(run(args).out, first.out);
  auto threaded = args;
  threaded.insert(threaded.end(), {"--workers", "4"});
  EXPECT_EQ(run(threaded).out, first.out);
  EXPECT_LT(std::stod(metric(first.out, "tv_distance")), 0.01);
  EXPECT_LT(std::stod(metric(first.out, "chi_square")), std::stod(metric(first.out, "chi_square_critical_999")));

  const auto zero = run({"simulate", "--p", "0", "--trials", "10"});
  ASSERT_EQ(zero.code, 0);
  EXPECT_EQ(lines(zero.out)[1], "0,0,10");
  EXPECT_EQ(lines(zero.out)[2], "0,1,0");

  EXPECT_EQ(run({"simulate", "--mode", "float"}).code, 2);
}

TEST(CliVerify, PassesAndCaps) {
  auto r = run({"verify", "--n", "2", "--m", "2", "--p", "1/2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  EXPECT_EQ(lines(r.out).size(), 6U);
  r = run({"verify", "--n", "3", "--m", "3", "--p", "2/3", "--format", "json"});
  EXPECT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_TRUE(doc["result"]["passed"].get<bool>());
  for (const auto& c : doc["checks"]) EXPECT_EQ(c["status"], "PASS");
  EXPECT_EQ(run({"verify", "--n", "5", "--m", "5", "--p", "1/2"}).code, 3);
  EXPECT_EQ(run({"verify", "--mode", "float"}).code, 2);
}

TEST(CliScan, GridRows) {
  const auto r = run({"scan", "--n", "2", "--m", "2", "--p-grid", "0:1:0.25"});
  ASSERT_EQ(r.code, 0);
  const auto ls = lines(r.out);
  ASSERT_EQ(ls.size(), 6U);
  EXPECT_EQ(ls[0], "p,mean_x,mean_y,cov,corr");
  EXPECT_EQ(ls[1], "0,0,0,0,undefined");
  EXPECT_EQ(ls[3], "0.5,0.4375,0.4375,0.12109375,0.49206349206349204");
  EXPECT_EQ(ls[5], "1,1,1,0,undefined");

  for (const char* nm : {"2", "5", "10"}) {
    const auto s = run({"scan", "--n", nm, "--m", nm, "--p-grid", "0.05:0.95:0.05", "--mode", "float"});
    ASSERT_EQ(s.code, 0);
    const auto rows = lines(s.out);
    EXPECT_EQ(rows.size(), 20U);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      std::istringstream in(rows[i]);
      std::string p, mx, my, cov;
      std::getline(in, p, ',');
      std::getline(in, mx, ',');
      std::getline(in, my, ',');
      std::getline(in, cov, ',');
      EXPECT_GE(std::stod(cov), 0.0) << rows[i];
    }
  }
}

TEST(CliOutput, WritesFile) {
  const auto path = std::filesystem::temp_directory_path() / "ripgf_cli_test.csv";
  const auto r = run({"pmf", "--output", path.string()});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  EXPECT_EQ(content.str(), run({"pmf"}).out);
  std::filesystem::remove(path);
}

#ifdef RIPGF_CLI_PATH
TEST(CliBinary, SimulateByteIdenticalAcrossProcesses) {
  auto capture = [](const std::string& cmd) {
    std::string out;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (pipe == nullptr) return out;
    char buf[4096];
    for (std::size_t got; (got = std::fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, got);
    EXPECT_EQ(::pclose(pipe), 0);
    return out;
  };
  const std::string base = std::string(RIPGF_CLI_PATH) + " simulate --n 4 --m 3 --p 1/3 --trials 20000 --seed 7";
  const auto a = capture(base);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(capture(base), a);
  EXPECT_EQ(capture(base + " --workers 3"), a);
}
#endif

}  // namespace
