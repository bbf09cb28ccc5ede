#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = simmatch::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("simmatch_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(CliOffline, SquaredOutputExample) {
  const auto r = run({"offline", "--kind", "squared", "--spectrum", "6,5,4", "--alpha", "1", "--k", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "2.25 1.25 0.25 (rank 3)\n");
}

TEST(CliOffline, ZeroAlphaEchoesTopK) {
  const auto r = run({"offline", "--kind", "scale-dependent", "--spectrum", "1,7,3", "--alpha", "0", "--k", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "7 3 (rank 2)\n");
}

TEST(CliOffline, UsageErrors) {
  auto r = run({"offline", "--kind", "squared", "--spectrum", "6,five,4", "--alpha", "1", "--k", "3"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("five"), std::string::npos);
  EXPECT_EQ(run({"offline", "--kind", "squared", "--alpha", "1", "--k", "3"}).code, 2);
  EXPECT_EQ(run({"offline", "--kind", "nope", "--spectrum", "1", "--alpha", "1", "--k", "1"}).code, 2);
  EXPECT_EQ(run({"offline", "--kind", "sd", "--spectrum", "1", "--alpha", "-1", "--k", "1"}).code, 2);
  EXPECT_EQ(run({"offline", "--kind", "sd", "--spectrum", "1", "--alpha", "1", "--k", "zero"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
}

TEST(Cli, HelpExitsZero) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("offline"), std::string::npos);
  EXPECT_EQ(run({"phase", "--help"}).code, 0);
}

TEST(CliStream, DeterministicPerSeed) {
  const auto a = run({"stream", "--scenario", "nonstationary", "--iterations", "20", "--seed", "3"});
  const auto b = run({"stream", "--scenario", "nonstationary", "--iterations", "20", "--seed", "3"});
  const auto c = run({"stream", "--scenario", "nonstationary", "--iterations", "20", "--seed", "4"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 21);
}

TEST(CliPhase, CoarseGridIsFastAndReportsInf) {
  const fs::path dir = scratch("phase");
  const auto start = std::chrono::steady_clock::now();
  const auto r = run({"phase", "--step", "0.5", "--out-dir", dir.string(), "--svg"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_LT(secs, 1.0);
  const std::string diagram = slurp(dir / "phase_diagram.csv");
  EXPECT_EQ(diagram.substr(0, diagram.find('\n')), "kind,ratio,alpha_low,alpha_high");
  EXPECT_NE(diagram.find("squared-output,0.5,1,inf"), std::string::npos);
  EXPECT_NE(diagram.find("input-output,0.5,0.333333333333,0.666666666667"), std::string::npos);
  const std::string curves = slurp(dir / "fraction_curves.csv");
  EXPECT_EQ(curves.substr(0, curves.find('\n')), "kind,alpha,signal_fraction,noise_fraction,separates");
  EXPECT_TRUE(fs::exists(dir / "input-output.svg"));
}

TEST(CliPhase, KindFilterAndValidation) {
  const fs::path dir = scratch("phase_kind");
  const auto r = run({"phase", "--kind", "io", "--step", "0.25", "--out-dir", dir.string()});
  EXPECT_EQ(r.code, 0);
  const std::string curves = slurp(dir / "fraction_curves.csv");
  EXPECT_EQ(curves.find("scale-dependent"), std::string::npos);
  EXPECT_EQ(run({"phase", "--step", "0", "--out-dir", dir.string()}).code, 2);
  EXPECT_EQ(run({"phase", "--n1", "0", "--out-dir", dir.string()}).code, 2);
}

TEST(CliExperiment, ByteIdenticalAcrossRuns) {
  const fs::path a = scratch("exp_a"), b = scratch("exp_b");
  for (const auto& dir : {a, b}) {
    const auto r = run({"experiment", "--scenario", "stationary", "--iterations", "400", "--seed", "2", "--out-dir",
                        dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"scale-dependent.csv", "input-output.csv", "squared-output.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
}

TEST(CliExperiment, ConfigFileAndReplay) {
  const fs::path dir = scratch("exp_cfg");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << R"({"stream": {"dim": 5, "head": [2, 1], "tail": {"count": 3, "low": 0, "high": 0.1}, "seed": 1,
               "iterations": 200},
               "networks": [{"kind": "io", "threshold": 0.5, "k": 3}],
               "metrics": {"window": 100, "snapshot_period": 100},
               "output_dir": ")" << (dir / "out").string() << R"("})";
  }
  auto r = run({"stream", "--config", (dir / "cfg.json").string(), "--out-dir", (dir / "s").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"experiment", "--config", (dir / "cfg.json").string(), "--replay", (dir / "s" / "stream.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "out" / "input-output.csv"));
  EXPECT_EQ(run({"experiment", "--config", (dir / "missing.json").string()}).code, 2);
  EXPECT_EQ(run({"experiment", "--scenario", "weekly"}).code, 2);
}
