#include "graphdep/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using graphdep::run_cli;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return std::string(::testing::TempDir()) + name;
}

}  // namespace

TEST(Cli, InfoPrintsFixedOrderTable) {
  const auto r = run({"info", "--pair", "gaussian rho=0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const char* keys[] = {"kl_pq=",      "kl_qp=",         "chi2=", "hellinger2=",
                        "var_llr_p=",  "chernoff_info=", "corr="};
  std::size_t pos = 0;
  for (const char* key : keys) {
    const auto found = r.out.find(key, pos);
    ASSERT_NE(found, std::string::npos) << key;
    pos = found;
  }
  EXPECT_NE(r.out.find("kl_pq=0.143841036226"), std::string::npos);
  EXPECT_NE(r.out.find("corr=0.5"), std::string::npos);
}

TEST(Cli, InfoCauchyCorrIsNan) {
  const auto r = run({"info", "--pair", "cauchy rho=0.4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("corr=nan"), std::string::npos);
}

TEST(Cli, SpectrumPrintsEigenvaluesAndChi2) {
  const auto r = run({"spectrum", "--pair", "bernoulli p=0.5 tau=0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("1 0.333333333333\n", 0), 0u);
  EXPECT_NE(r.out.find("chi2_from_spectrum=0.111111111111"), std::string::npos);
}

TEST(Cli, GenerateDetectRoundTrip) {
  const std::string path = temp_path("pair_roundtrip.txt");
  const auto gen = run({"generate", "--pair", "gaussian rho=0.8", "--n", "6",
                        "--hypothesis", "planted", "--seed", "5", "--out", path,
                        "--emit-pi"});
  ASSERT_EQ(gen.code, 0) << gen.err;
  std::ifstream check(path);
  std::string header;
  std::getline(check, header);
  EXPECT_EQ(header, "n=6 hypothesis=planted seed=5");

  const auto det = run({"detect", "--pair", "gaussian rho=0.8", "--test", "lr",
                        "--threshold", "0", "--in", path});
  ASSERT_EQ(det.code, 0) << det.err;
  EXPECT_EQ(det.out.rfind("decision=", 0), 0u);
  EXPECT_NE(det.out.find("statistic="), std::string::npos);
  EXPECT_NE(det.out.find("threshold=0"), std::string::npos);
  std::remove(path.c_str());
}

TEST(Cli, DetectComparisonAutoThreshold) {
  const std::string path = temp_path("pair_comp.txt");
  ASSERT_EQ(run({"generate", "--pair", "gaussian rho=0.6", "--n", "20", "--seed",
                 "3", "--out", path})
                .code,
            0);
  const auto det = run({"detect", "--pair", "gaussian rho=0.6", "--test", "comp",
                        "--threshold", "auto", "--in", path});
  ASSERT_EQ(det.code, 0) << det.err;
  EXPECT_EQ(det.out.rfind("decision=", 0), 0u);
  std::remove(path.c_str());
}

TEST(Cli, RiskSingleCell) {
  const auto r = run({"risk", "--pair", "gaussian rho=0.9", "--n", "5", "--test",
                      "glrt", "--threshold", "0", "--trials", "50", "--seed",
                      "2", "--workers", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("type1="), std::string::npos);
  EXPECT_NE(r.out.find("risk="), std::string::npos);
}

TEST(Cli, SweepFromConfigFile) {
  const std::string cfg_path = temp_path("sweep.cfg");
  const std::string out_path = temp_path("sweep.csv");
  {
    std::ofstream cfg(cfg_path);
    cfg << "pair = gaussian rho=0.5\n"
        << "n = 4\n"
        << "test = lr\n"
        << "threshold = 0\n"
        << "trials = 20\n"
        << "seed = 9\n"
        << "sweep = rho: 0.4, 0.8\n"
        << "output = " << out_path << "\n";
  }
  const auto r = run({"sweep", "--config", cfg_path});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream out_file(out_path);
  std::stringstream content;
  content << out_file.rdbuf();
  EXPECT_NE(content.str().find("# seed = 9"), std::string::npos);
  EXPECT_NE(content.str().find("axis,n,test,threshold,trials"),
            std::string::npos);
  std::remove(cfg_path.c_str());
  std::remove(out_path.c_str());
}

TEST(Cli, SecondMomentReport) {
  const auto r = run({"second-moment", "--pair", "bernoulli p=0.5 tau=0.5",
                      "--n", "3", "--oracle"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("n=3 formula=", 0), 0u);
  EXPECT_NE(r.out.find("oracle="), std::string::npos);
  EXPECT_NE(r.out.find("cycle_type=2+1"), std::string::npos);
  EXPECT_NE(r.out.find("cycle_type=1+1+1"), std::string::npos);
}

TEST(Cli, LdpBoundAndExact) {
  const auto bound_only = run({"ldp", "--pair", "gaussian rho=0.01", "--D", "10"});
  ASSERT_EQ(bound_only.code, 0) << bound_only.err;
  EXPECT_NE(bound_only.out.find("bound=3.00416602395"), std::string::npos);

  const auto with_exact = run({"ldp", "--pair", "gaussian rho=0.01", "--D", "2",
                               "--exact-n", "2"});
  ASSERT_EQ(with_exact.code, 0) << with_exact.err;
  EXPECT_NE(with_exact.out.find("exact=1.0001"), std::string::npos);  // 1+rho^2

  // the exact norm enumeration is capped at degree 4
  const auto guarded = run({"ldp", "--pair", "gaussian rho=0.01", "--D", "10",
                            "--exact-n", "2"});
  EXPECT_NE(guarded.code, 0);
}

TEST(Cli, ErrorsGoToStderrWithNonzeroExit) {
  const auto r = run({"info", "--pair", "gaussian rho=7"});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  const auto unknown = run({"frobnicate"});
  EXPECT_NE(unknown.code, 0);
}
