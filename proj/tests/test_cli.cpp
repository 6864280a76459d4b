#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#ifndef CYCLEWEIGHTS_CLI
#error "CYCLEWEIGHTS_CLI must name the command-line binary"
#endif

namespace {

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + CYCLEWEIGHTS_CLI + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

}  // namespace

TEST(Cli, NormalizeUniform) {
  const auto r = run("normalize --family uniform --n-grid 1,2,3,4,5");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "n,log_h\n1,0\n2,0\n3,0\n4,0\n5,0\n");
}

TEST(Cli, NormalizeEwens) {
  const auto r = run("normalize --family ewens --theta 2 --n-grid 2 --format json");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["rows"][0]["log_h"].get<double>(), std::log(3.0), 1e-15);
}

TEST(Cli, ConfigErrors) {
  EXPECT_EQ(run("normalize --family uniform").code, 2);
  EXPECT_EQ(run("normalize --family ewens --theta -1 --n-grid 3").code, 2);
  EXPECT_EQ(run("dist --family uniform --n 30", "CYCLEWEIGHTS_MAX_N=20").code, 2);
  EXPECT_EQ(run("dist --family uniform --n 5 --format xml").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("dist --family algebraic --gamma 1 --n 5 --statistic LargestCycles").code, 2);
}

TEST(Cli, NumericFailure) {
  // ln theta_20 = 20^300 is not representable.
  EXPECT_EQ(run("normalize --family superexp_growth --gamma 300 --n-grid 20").code, 3);
}

TEST(Cli, DistUniformL1) {
  const auto r = run("dist --family uniform --statistic L1 --n 5");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_NE(r.out.find("3,0.20000000000000001,"), std::string::npos);
}

TEST(Cli, DistEwensK) {
  const auto r = run("dist --family ewens --theta 2 --statistic K --n 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "k,probability,log_probability\n1,0.33333333333333337,-1.0986122886681096\n"
                   "2,0.66666666666666674,-0.40546510810816427\n");
}

TEST(Cli, DistRjWithJFlag) {
  const auto a = run("dist --family uniform --statistic R --j 2 --n 6");
  const auto b = run("dist --family uniform --statistic R_2 --n 6");
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  const std::string path = testing::TempDir() + "cw_config.json";
  std::ofstream(path) << R"({"family": {"family": "ewens", "theta": 3}, "n": 4, "format": "json"})";
  const auto j = nlohmann::json::parse(run("dist --statistic K --config " + path + " --theta 2 --n 2").out);
  EXPECT_NEAR(j["rows"][0]["probability"].get<double>(), 1.0 / 3.0, 1e-15);
  std::ofstream(path) << R"({"family": {"family": "ewens"}, "bogus": 1})";
  EXPECT_EQ(run("dist --config " + path + " --n 2").code, 2);
}

TEST(Cli, SampleIsDeterministic) {
  const auto a = run("sample --family algebraic --gamma 1 --n 200 --samples 500 --seed 9 --format json");
  const auto b = run("sample --family algebraic --gamma 1 --n 200 --samples 500 --seed 9 --format json");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto c = run("sample --family uniform --n 10 --samples 3 --seed 1");
  EXPECT_EQ(c.out.substr(0, c.out.find('\n')), "sample_index,K,L1,sorted_lengths");
  EXPECT_EQ(std::count(c.out.begin(), c.out.end(), '\n'), 4);
}

TEST(Cli, SaddleAlgebraic) {
  const auto r = run("saddle --family algebraic --gamma 1 --n-grid 3,10000");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "n,r_n,I_m1,I_0,I_1,log_h_asymptotic,log_h_exact,delta");
  EXPECT_NE(r.out.find("\n3,0.5,"), std::string::npos);
}

TEST(Cli, VerifyRows) {
  const auto alg = run("verify --family algebraic --gamma 1 --n 5000 --format json");
  EXPECT_EQ(alg.code, 0);
  const auto j = nlohmann::json::parse(alg.out);
  EXPECT_EQ(j["rows"][0]["status"], "pass");
  EXPECT_EQ(j["rows"][0]["statistic"], "L1");

  const auto ew = run("verify --family ewens --theta 2 --n 2000 --samples 2000");
  EXPECT_EQ(ew.code, 0);
  EXPECT_NE(ew.out.find("Beta(1, 2)"), std::string::npos);

  const auto sub = run("verify --family subexp_growth --gamma 0.5 --n 500 --format json");
  const auto rows = nlohmann::json::parse(sub.out)["rows"];
  bool saw_unsupported = false;
  for (const auto& r : rows) saw_unsupported |= r["status"] == "unsupported";
  EXPECT_TRUE(saw_unsupported);
}

TEST(Cli, WeightsAndMoments) {
  const auto w = run("weights --family superexp_growth --gamma 1.5 --n 4");
  EXPECT_EQ(w.out, "n,log_theta\n1,1\n2,2.8284271247461903\n3,5.196152422706632\n4,8\n");
  const auto m = run("moments --family uniform --n 3 --j-max 1");
  EXPECT_NE(m.out.find("E[K],1.8333333333333333"), std::string::npos);
  EXPECT_NE(m.out.find("E[R_1],1\n"), std::string::npos);
}
