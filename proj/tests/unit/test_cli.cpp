#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bskm/csv.hpp"
#include "cli/commands.hpp"

using namespace bskm;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bskm");
  std::ostringstream out;
  std::ostringstream err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::filesystem::path fresh(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove(p);
  return p;
}

}  // namespace

TEST(CliSolve, SmallGaussianConverges) {
  const auto csv = fresh("bskm_cli_solve.csv");
  const auto o = run_cli({"solve", "--random", "100", "10", "--method", "bskm1", "--beta", "10",
                          "--out", csv.string()});
  EXPECT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.out.find("termination=converged"), std::string::npos);
  const auto records = read_csv(csv);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].method, "bskm1");
  EXPECT_EQ(records[0].m, 100);
  EXPECT_EQ(records[0].beta, 10);
  EXPECT_EQ(records[0].termination, "converged");
  EXPECT_LT(records[0].final_res, 1e-6);
}

TEST(CliSolve, UsageErrors) {
  EXPECT_EQ(run_cli({"solve", "--random", "50", "5", "--method", "bskm2", "--beta", "10"}).code,
            1);
  EXPECT_EQ(run_cli({"solve", "--random", "50", "5", "--method", "skm", "--beta", "4", "--eta",
                     "2"})
                .code,
            1);
  EXPECT_EQ(run_cli({"solve", "--random", "50", "5", "--method", "skm"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--random", "50", "5", "--method", "skm", "--beta", "60"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--random", "50", "5", "--method", "cg"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--method", "rk"}).code, 1);
  EXPECT_EQ(run_cli({"solve", "--random", "50", "--method", "rk"}).code, 1);
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(CliSolve, RuntimeFailureExitCode) {
  const auto o = run_cli({"solve", "--matrix", "/nonexistent.mtx", "--method", "rk"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("nonexistent"), std::string::npos);
}

TEST(CliSolve, ProtocolDefaultsWhenFlagsOmitted) {
  const auto csv = fresh("bskm_cli_defaults.csv");
  const auto o = run_cli({"solve", "--random", "40", "40", "--method", "rk", "--seed", "1",
                          "--out", csv.string()});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = read_csv(csv).at(0);
  EXPECT_TRUE(r.termination == "converged" ? r.final_res < 1e-6 : r.iterations == 200'000);
}

TEST(CliSolve, BskmTwoDerivesSubsampleSize) {
  const auto csv = fresh("bskm_cli_bskm2.csv");
  ASSERT_EQ(run_cli({"solve", "--random", "200", "20", "--method", "bskm2", "--beta", "10",
                     "--eta", "5", "--out", csv.string()})
                .code,
            0);
  const auto r = read_csv(csv).at(0);
  EXPECT_EQ(r.eta, 5);
  EXPECT_EQ(r.beta_j, 2);
}

TEST(CliSolve, HistoryFile) {
  const auto hist = fresh("bskm_cli_hist.csv");
  ASSERT_EQ(run_cli({"solve", "--random", "80", "8", "--method", "skm", "--beta", "4",
                     "--history", hist.string(), "--history-stride", "5"})
                .code,
            0);
  std::ifstream in(hist);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "iteration,res");
}

TEST(CliSweep, RowCountAndDeterminism) {
  const auto a = fresh("bskm_sweep_a.csv");
  const auto b = fresh("bskm_sweep_b.csv");
  const std::vector<std::string> base{"sweep",   "--axis",   "beta",   "--values", "10,100",
                                      "--m",     "400",      "--n",    "40",       "--methods",
                                      "skm,bskm1,bskm2",     "--trials", "3",     "--quiet"};
  auto args = base;
  args.insert(args.end(), {"--out", a.string()});
  ASSERT_EQ(run_cli(args).code, 0);
  args = base;
  args.insert(args.end(), {"--out", b.string(), "--jobs", "2"});
  ASSERT_EQ(run_cli(args).code, 0);
  const auto ra = read_csv(a);
  const auto rb = read_csv(b);
  ASSERT_EQ(ra.size(), 18u);
  ASSERT_EQ(rb.size(), 18u);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].method, rb[i].method);
    EXPECT_EQ(ra[i].beta, rb[i].beta);
    EXPECT_EQ(ra[i].trial, rb[i].trial);
    EXPECT_EQ(ra[i].iterations, rb[i].iterations);
  }
  EXPECT_EQ(ra[0].beta, 10);
  EXPECT_EQ(ra[0].trial, 0);
  EXPECT_EQ(ra[0].method, "skm");
  EXPECT_EQ(ra[2].method, "bskm2");
  EXPECT_EQ(ra[2].eta, 10);
  EXPECT_EQ(ra[17].beta, 100);
  EXPECT_EQ(ra[17].trial, 2);
}

TEST(CliSweep, MAxisUsesFreshSystems) {
  const auto csv = fresh("bskm_sweep_m.csv");
  const auto o = run_cli({"sweep", "--axis", "m", "--values", "100,200", "--n", "10", "--beta",
                          "20", "--methods", "skm", "--trials", "2", "--out", csv.string(),
                          "--quiet"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto r = read_csv(csv);
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0].m, 100);
  EXPECT_EQ(r[3].m, 200);
  EXPECT_EQ(r[3].beta, 20);
}

TEST(CliSweep, PlanValidation) {
  EXPECT_EQ(run_cli({"sweep", "--values", "100,10", "--m", "200", "--n", "10", "--out",
                     fresh("x.csv").string()})
                .code,
            1);
  EXPECT_EQ(run_cli({"sweep", "--axis", "m", "--values", "100", "--n", "10", "--out",
                     fresh("x.csv").string()})
                .code,
            1);
  EXPECT_EQ(run_cli({"sweep", "--values", "500", "--m", "200", "--n", "10", "--out",
                     fresh("x.csv").string()})
                .code,
            1);
}

TEST(CliSweep, Summary) {
  std::vector<RunRecord> records;
  for (int t = 0; t < 3; ++t) {
    RunRecord r;
    r.method = "skm";
    r.beta = 10;
    r.iterations = 10 * (t + 1);
    r.cpu_time_s = t;
    records.push_back(r);
  }
  const auto rows = cli::summarize(records, cli::SweepAxis::beta);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].median_iterations, 20.0);
  EXPECT_EQ(rows[0].median_cpu_time_s, 1.0);
  EXPECT_EQ(rows[0].runs, 3);
}

TEST(CliVerifyBounds, TheoremTwoPasses) {
  const auto o = run_cli({"verify-bounds", "--m", "8", "--n", "3", "--beta", "2", "--seeds", "20"});
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("PASS theorem2-per-sample"), std::string::npos);
  EXPECT_EQ(o.out.find("FAIL"), std::string::npos);
}

TEST(CliVerifyBounds, TheoremThreePasses) {
  const auto o = run_cli(
      {"verify-bounds", "--m", "6", "--n", "3", "--eta", "2", "--beta-j", "2", "--seeds", "20"});
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("PASS theorem3-per-sample"), std::string::npos);
}

TEST(CliVerifyBounds, GuardRefusal) {
  const auto o = run_cli({"verify-bounds", "--m", "40", "--beta", "10"});
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.err.find("smaller"), std::string::npos);
}
