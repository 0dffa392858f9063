#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "extremal/commands.hpp"
#include "extremal/density.hpp"
#include "json.hpp"

using namespace extremal;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("extremal_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const TempDir& dir, const std::string& name, const std::string& text) {
  const auto p = dir / name;
  std::ofstream(p) << text;
  return p;
}

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

/// Data rows of a CSV: no comments, no header.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

const std::string kFlat = R"(
name = "flat"
seed = 7

[domain]
dim = 1
lower = [0.0]
upper = [1.0]
cells = 100

[lambda]
kind = "constant"
value = 1.0

[g]
kind = "constant"
value = 0.0
)";

const std::string kSmallVerify = R"(
name = "d1"
seed = 7

[verify]
suite = "definition1"
replicates = 1000
construction_n = 10000
pairs = 2000
)";

}  // namespace

TEST(Cli, SampleWritesOneRowPerReplicate) {
  TempDir dir;
  const auto cfg = write_config(dir, "flat.toml", kFlat + "\n[sample]\nk = 1\nreplicates = 10\n");
  const auto run = cli({"sample", "--config", cfg.string(), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  const auto data = rows(dir / "flat_argmins.csv");
  ASSERT_EQ(data.size(), 10u);
  for (std::size_t i = 0; i < data.size(); ++i) {
    EXPECT_EQ(data[i][0], std::to_string(i));
    EXPECT_EQ(data[i][1], "1");
    const double x = std::stod(data[i][2]);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    EXPECT_GT(std::stod(data[i][3]), 0.0);
  }
  const auto text = slurp(dir / "flat_argmins.csv");
  EXPECT_EQ(text.rfind("# ", 0), 0u);
  EXPECT_NE(text.find("replicate,rank,x,value"), std::string::npos);
}

TEST(Cli, ConfigErrorsExitWithTwo) {
  TempDir dir;
  const auto no_lambda = write_config(dir, "a.toml", R"(
[domain]
dim = 1
[g]
kind = "constant"
value = 0.0
)");
  auto run = cli({"sample", "--config", no_lambda.string(), "--out", dir.path().string()});
  EXPECT_EQ(run.code, 2);
  EXPECT_NE(run.err.find("lambda"), std::string::npos) << run.err;

  const auto unknown = write_config(dir, "b.toml", kFlat + "\nbogus = 3\n");
  EXPECT_EQ(cli({"sample", "--config", unknown.string(), "--out", dir.path().string()}).code, 2);

  const auto bad_toml = write_config(dir, "c.toml", "name = \n");
  EXPECT_EQ(cli({"sample", "--config", bad_toml.string()}).code, 2);

  EXPECT_EQ(cli({"sample", "--config", (dir / "missing.toml").string()}).code, 2);
  EXPECT_EQ(cli({"sample"}).code, 2);
  EXPECT_EQ(cli({"frobnicate", "--config", "x"}).code, 2);
  EXPECT_EQ(cli({"sample", "--config", unknown.string(), "--threads", "0"}).code, 2);

  const auto bad_rate = write_config(dir, "d.toml", R"(
[domain]
dim = 1
[lambda]
kind = "poly"
coeffs = [-1.0, 1.0]
[g]
kind = "constant"
value = 0.0
)");
  EXPECT_EQ(cli({"density", "--config", bad_rate.string(), "--out", dir.path().string()}).code, 2);
}

TEST(Cli, SampleIsByteIdenticalAcrossRerunsAndThreads) {
  TempDir a, b, c;
  const std::string text = kFlat + R"(
[sample]
mode = "construction_a"
n = 500
k = 2
replicates = 40
export_points = true
)";
  const auto cfg = write_config(a, "flat.toml", text);
  ASSERT_EQ(cli({"sample", "--config", cfg.string(), "--out", a.path().string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(cli({"sample", "--config", cfg.string(), "--out", b.path().string(), "--threads", "1"}).code, 0);
  ASSERT_EQ(cli({"sample", "--config", cfg.string(), "--out", c.path().string(), "--threads", "4"}).code, 0);
  for (const auto* file : {"flat_argmins.csv", "flat_points.csv"}) {
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
    EXPECT_EQ(slurp(a / file), slurp(c / file)) << file;
  }
  TempDir d;
  ASSERT_EQ(cli({"sample", "--config", cfg.string(), "--out", d.path().string(), "--seed", "8"}).code, 0);
  EXPECT_NE(slurp(a / "flat_argmins.csv"), slurp(d / "flat_argmins.csv"));
}

TEST(Cli, FnModeSamples) {
  TempDir dir;
  const auto cfg = write_config(dir, "fn.toml", kFlat + R"(
[rho]
kind = "poly"
coeffs = [1.0, 1.0]

[noise]
family = "uniform"

[sample]
mode = "fn"
n = 1000
k = 3
replicates = 5
)");
  const auto run = cli({"sample", "--config", cfg.string(), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  EXPECT_EQ(rows(dir / "flat_argmins.csv").size(), 15u);
}

TEST(Cli, VerifyExitCodesAndDeterminism) {
  TempDir a, b, c;
  const auto cfg = write_config(a, "d1.toml", kSmallVerify);
  auto run = cli({"verify", "--config", cfg.string(), "--out", a.path().string()});
  ASSERT_EQ(run.code, 0) << run.err << run.out;
  ASSERT_EQ(cli({"verify", "--config", cfg.string(), "--out", b.path().string(), "--threads", "3"}).code, 0);
  EXPECT_EQ(slurp(a / "d1_reports.jsonl"), slurp(b / "d1_reports.jsonl"));
  EXPECT_EQ(slurp(a / "d1_summary.csv"), slurp(b / "d1_summary.csv"));

  std::istringstream lines(slurp(a / "d1_reports.jsonl"));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j["pass"].get<bool>());
    ++count;
  }
  EXPECT_EQ(count, 4);

  const auto wrong = write_config(c, "wrong.toml", kSmallVerify + "rate_factor = 3.0\n");
  EXPECT_EQ(cli({"verify", "--config", wrong.string(), "--out", c.path().string()}).code, 1);

  const auto unknown = write_config(c, "u.toml", "[verify]\nsuite = \"nope\"\n");
  EXPECT_EQ(cli({"verify", "--config", unknown.string(), "--out", c.path().string()}).code, 2);
}

TEST(Cli, DensityFlatAndJoint) {
  TempDir dir;
  const auto flat = write_config(dir, "lin.toml", R"(
name = "lin"
[domain]
dim = 1
cells = 40
[lambda]
kind = "poly"
coeffs = [1.0, 2.0]
[g]
kind = "constant"
value = 0.0
)");
  ASSERT_EQ(cli({"density", "--config", flat.string(), "--out", dir.path().string()}).code, 0);
  const auto data = rows(dir / "lin_density.csv");
  ASSERT_EQ(data.size(), 40u);
  for (const auto& r : data) EXPECT_NEAR(std::stod(r[1]), (1.0 + 2.0 * std::stod(r[0])) / 2.0, 1e-12);
  EXPECT_TRUE(fs::exists(dir / "lin_density.svg"));

  const auto joint = write_config(dir, "joint.toml", kFlat + "\n[density]\nkind = \"joint\"\nk = 2\n");
  const auto cfg_text = slurp(joint);
  const auto small = write_config(dir, "joint.toml",
                                  cfg_text.substr(0, cfg_text.find("cells = 100")) + "cells = 12" +
                                      cfg_text.substr(cfg_text.find("cells = 100") + 11));
  ASSERT_EQ(cli({"density", "--config", small.string(), "--out", dir.path().string()}).code, 0);
  const auto jd = rows(dir / "flat_density.csv");
  ASSERT_EQ(jd.size(), 144u);
  for (const auto& r : jd) EXPECT_NEAR(std::stod(r[2]), 1.0, 1e-6);

  const auto k4 = write_config(dir, "k4.toml", kFlat + "\n[density]\nkind = \"joint\"\nk = 4\n");
  const auto run = cli({"density", "--config", k4.string(), "--out", dir.path().string()});
  EXPECT_EQ(run.code, 2);
  EXPECT_NE(run.err.find("Monte Carlo"), std::string::npos) << run.err;
}

TEST(Cli, QuadraticDensityMatchesClosedForm) {
  TempDir dir;
  const auto cfg = write_config(dir, "q.toml", R"(
name = "q"
delta = 1.0
[domain]
dim = 1
cells = 4000
[lambda]
kind = "constant"
value = 1.0
[g]
kind = "poly"
coeffs = [0.0, 0.0, 1.0]
)");
  ASSERT_EQ(cli({"density", "--config", cfg.string(), "--out", dir.path().string()}).code, 0);
  double worst = 0.0;
  for (const auto& r : rows(dir / "q_density.csv")) {
    worst = std::max(worst, std::abs(std::stod(r[1]) - closed_form_rho_delta(1.0, std::stod(r[0]))));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Cli, ExampleSec4WritesAllArtifacts) {
  TempDir dir, printed;
  const auto cfg = write_config(dir, "s.toml", R"(
name = "fig"
[example_sec4]
deltas = [0.01, 0.1, 1.0, 10.0]
samples = 20000
cells = 500
)");
  const auto run = cli({"example-sec4", "--config", cfg.string(), "--out", dir.path().string()});
  ASSERT_EQ(run.code, 0) << run.err;
  for (const auto* f : {"fig_sec4_curves.csv", "fig_sec4_histograms.csv", "fig_sec4_terms.csv",
                        "fig_sec4_figure.svg"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto terms = rows(dir / "fig_sec4_terms.csv");
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_EQ(std::stod(terms[3][0]), 10.0);
  EXPECT_NEAR(std::stod(terms[3][3]), 1.0, 1e-8);
  EXPECT_GT(std::abs(std::stod(terms[3][4]) - 1.0), 0.1);
  for (const auto& t : terms) EXPECT_LE(std::stod(t[5]), std::stod(t[6])) << t[0];
  const auto svg = slurp(dir / "fig_sec4_figure.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);

  ASSERT_EQ(cli({"example-sec4", "--config", cfg.string(), "--out", printed.path().string(),
                 "--paper-printed-term"}).code, 0);
  EXPECT_NE(slurp(dir / "fig_sec4_curves.csv"), slurp(printed / "fig_sec4_curves.csv"));
  EXPECT_EQ(rows(dir / "fig_sec4_histograms.csv"), rows(printed / "fig_sec4_histograms.csv"));
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  TempDir cfg_dir, env_dir, flag_dir;
  const auto cfg = write_config(cfg_dir, "flat.toml", kFlat);
  ::setenv(kOutDirEnv, env_dir.path().c_str(), 1);
  EXPECT_EQ(cli({"sample", "--config", cfg.string()}).code, 0);
  EXPECT_TRUE(fs::exists(env_dir / "flat_argmins.csv"));
  EXPECT_EQ(cli({"sample", "--config", cfg.string(), "--out", flag_dir.path().string()}).code, 0);
  EXPECT_TRUE(fs::exists(flag_dir / "flat_argmins.csv"));
  ::unsetenv(kOutDirEnv);
  EXPECT_FALSE(fs::exists(env_dir / "flat_argmins.csv.tmp"));
}
