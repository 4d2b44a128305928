#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include "test_support.hpp"

using namespace lftc;
using lftc::testing::read_file;
using lftc::testing::TempDir;
using lftc::testing::write_file;

namespace {

const std::filesystem::path kCli = LFTC_CLI_PATH;
const std::filesystem::path kData = LFTC_SYNTHETIC_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  TempDir dir;
  const auto out = dir / "stdout";
  const auto err = dir / "stderr";
  const std::string cmd = "'" + kCli.string() + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

std::string split_args() {
  return "--train '" + (kData / "train.csv").string() + "' --test '" + (kData / "test.csv").string() + "'";
}

}  // namespace

TEST(Cli, EvalPrintsReportToStdout) {
  const auto r = run("eval " + split_args());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = report_from_string(r.out);
  EXPECT_EQ(report.dataset, "synthetic");
  EXPECT_EQ(report.samples, 200u);
  EXPECT_GE(report.accuracy, 0.95);
  EXPECT_NE(r.err.find("accuracy"), std::string::npos);
}

TEST(Cli, EvalWritesRequestedFiles) {
  TempDir dir;
  const auto r = run("eval " + split_args() + " --k 3 --threads 2 --out '" + (dir / "r.json").string() +
                     "' --summary '" + (dir / "s.csv").string() + "' --audit '" + (dir / "a.jsonl").string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto report = report_from_string(read_file(dir / "r.json"));
  EXPECT_EQ(report.config.k, 3u);
  EXPECT_EQ(report.config.threads, 2u);
  EXPECT_EQ(csv::parse(read_file(dir / "s.csv")).size(), 2u);
  const auto audit = read_file(dir / "a.jsonl");
  EXPECT_EQ(std::count(audit.begin(), audit.end(), '\n'), 200);
}

TEST(Cli, InvalidArgumentsExitWithTwo) {
  EXPECT_EQ(run("eval " + split_args() + " --k 0").code, 2);
  EXPECT_EQ(run("eval " + split_args() + " --no-such-flag").code, 2);
  EXPECT_EQ(run("eval " + split_args() + " --variant bert").code, 2);
  EXPECT_EQ(run("eval " + split_args() + " --backend deflate").code, 2);
  EXPECT_EQ(run("eval --test x.csv").code, 2);
  EXPECT_EQ(run("eval --train /nonexistent/a.csv --test /nonexistent/b.csv").code, 2);
  EXPECT_EQ(run("sweep " + split_args()).code, 2);
  EXPECT_EQ(run("").code, 2);
}

TEST(Cli, RuntimeFailureExitsWithThree) {
  TempDir dir;
  write_file(dir / "file", "x");
  const auto r = run("synth --out-dir '" + (dir / "file" / "sub").string() + "'");
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("failure"), std::string::npos);
}

TEST(Cli, SynthReproducesBundledCorpus) {
  TempDir dir;
  const auto r = run("synth --out-dir '" + dir.path().string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(dir / "train.csv"), read_file(kData / "train.csv"));
  EXPECT_EQ(read_file(dir / "test.csv"), read_file(kData / "test.csv"));
}

TEST(Cli, FewShotCompareAndSweep) {
  const auto fs = run("fewshot " + split_args() + " --shots 2 --trials 3 --seed 5");
  ASSERT_EQ(fs.code, 0) << fs.err;
  const auto report = report_from_string(fs.out);
  EXPECT_EQ(report.trials.size(), 3u);
  EXPECT_TRUE(report.ci95.has_value());

  const auto cmp = run("compare " + split_args());
  ASSERT_EQ(cmp.code, 0) << cmp.err;
  const auto j = nlohmann::json::parse(cmp.out);
  EXPECT_EQ(j["baseline"]["counts"]["ncd_calls"], 200 * 120);
  EXPECT_GT(j["speed_ratio"].get<double>(), 0.0);

  const auto sw = run("sweep " + split_args() + " --caps 1,2 --levels 1,3");
  ASSERT_EQ(sw.code, 0) << sw.err;
  EXPECT_EQ(csv::parse(sw.out).size(), 5u);
}

TEST(Cli, VersionAndHelp) {
  EXPECT_EQ(run("--version").code, 0);
  const auto h = run("eval --help");
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("--step-size"), std::string::npos);
}
