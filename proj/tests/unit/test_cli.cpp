#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "herdselect/cli.hpp"
#include "herdselect/dataset.hpp"

using namespace herdselect;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("herdselect_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(cli({"demo-data", "--samples", "40", "--informative", "3", "--noise", "12", "--seed", "3",
                   "--out", (dir_ / "demo").string()})
                  .code,
              0);
    data_ = (dir_ / "demo" / "data.csv").string();
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::vector<std::string> select_args(const std::string& out) const {
    return {"select", "--data", data_, "--top-m", "8", "--horses", "6", "--iters", "3", "--repeats", "2",
            "--folds", "3", "--classifier", "knn", "--seed", "7", "--quiet", "--out", out};
  }

  fs::path dir_;
  std::string data_;
};

}  // namespace

TEST_F(CliTest, DemoDataIsValidAndReproducible) {
  const auto d = load_csv(data_);
  EXPECT_EQ(d.n_genes(), 15u);
  const auto truth = nlohmann::json::parse(slurp(dir_ / "demo" / "ground_truth.json"));
  EXPECT_EQ(truth["mask"].get<std::string>().size(), d.n_genes());
  EXPECT_EQ(truth["informative_indices"].size(), 3u);
  ASSERT_EQ(cli({"demo-data", "--samples", "40", "--informative", "3", "--noise", "12", "--seed", "3",
                 "--out", (dir_ / "again").string()})
                .code,
            0);
  EXPECT_EQ(slurp(data_), slurp(dir_ / "again" / "data.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "demo" / "run-manifest.json"));
}

TEST_F(CliTest, FilterWritesRankingDeterministically) {
  const auto a = (dir_ / "fa").string(), b = (dir_ / "fb").string();
  ASSERT_EQ(cli({"filter", "--data", data_, "--top-m", "5", "--out", a}).code, 0);
  ASSERT_EQ(cli({"filter", "--data", data_, "--top-m", "5", "--out", b}).code, 0);
  const auto text = slurp(fs::path(a) / "ranking.csv");
  EXPECT_EQ(text, slurp(fs::path(b) / "ranking.csv"));
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6);
  EXPECT_EQ(text.substr(0, text.find('\n')), "rank,gene_index,gene_name,score");
}

TEST_F(CliTest, UsageErrors) {
  auto r = cli({"filter", "--data", data_, "--top-m", "0"});
  EXPECT_EQ(r.code, kExitUsage);
  r = cli({"select", "--data", data_, "--tf", "q"});
  EXPECT_EQ(r.code, kExitUsage);
  for (const char* tag : {"s1", "s4", "v1", "v4", "x"}) EXPECT_NE(r.err.find(tag), std::string::npos) << r.err;
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"bogus"}).code, kExitUsage);
  EXPECT_EQ(cli({"filter"}).code, kExitUsage);
  EXPECT_EQ(cli({"filter", "--help"}).code, kExitOk);
}

TEST_F(CliTest, RuntimeErrors) {
  EXPECT_EQ(cli({"filter", "--data", (dir_ / "none.csv").string(), "--out", (dir_ / "x").string()}).code,
            kExitRuntime);
  EXPECT_EQ(cli({"filter", "--data", data_, "--top-m", "99", "--out", (dir_ / "x").string()}).code,
            kExitRuntime);
}

TEST_F(CliTest, CvWritesMetrics) {
  const auto out = dir_ / "cv";
  ASSERT_EQ(cli({"cv", "--data", data_, "--classifier", "gnb", "--folds", "4", "--out", out.string()}).code, 0);
  const auto j = nlohmann::json::parse(slurp(out / "metrics.json"));
  EXPECT_EQ(j["per_fold"].size(), 4u);
  EXPECT_GE(j["mean"]["accuracy"].get<double>(), 0.5);
}

TEST_F(CliTest, SelectIsByteIdenticalAndThreadFree) {
  const auto a = (dir_ / "sa").string(), b = (dir_ / "sb").string(), c = (dir_ / "sc").string();
  ASSERT_EQ(cli(select_args(a)).code, 0);
  ASSERT_EQ(cli(select_args(b)).code, 0);
  auto threaded = select_args(c);
  threaded.insert(threaded.end(), {"--threads", "4"});
  ASSERT_EQ(cli(threaded).code, 0);
  const auto ra = slurp(fs::path(a) / "result.json");
  EXPECT_EQ(ra, slurp(fs::path(b) / "result.json"));
  EXPECT_EQ(ra, slurp(fs::path(c) / "result.json"));
  EXPECT_EQ(slurp(fs::path(a) / "trace.csv"), slurp(fs::path(c) / "trace.csv"));
  const auto j = nlohmann::json::parse(ra);
  EXPECT_EQ(j["per_repeat"].size(), 2u);
  const auto manifest = nlohmann::json::parse(slurp(fs::path(a) / "run-manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["config"]["tf"], "x");
  EXPECT_EQ(manifest["derived_seeds"]["repeats"].size(), 2u);
  EXPECT_TRUE(fs::exists(fs::path(a) / "summary.csv"));
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  const auto cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"data": ")" << data_ << R"(", "top-m": 6, "horses": 5, "iters": 2,
    "repeats": 3, "folds": 3, "classifier": "knn", "tf": "v2", "quiet": true})";
  const auto out = dir_ / "cfg_out";
  ASSERT_EQ(cli({"select", "--config", cfg.string(), "--repeats", "1", "--out", out.string()}).code, 0);
  const auto j = nlohmann::json::parse(slurp(out / "result.json"));
  EXPECT_EQ(j["per_repeat"].size(), 1u);
  EXPECT_EQ(j["tf"], "v2");
  EXPECT_EQ(j["filtered_genes"].size(), 6u);

  // The manifest's resolved config reproduces the run.
  const auto manifest = nlohmann::json::parse(slurp(out / "run-manifest.json"));
  std::ofstream(dir_ / "replay.json") << manifest["config"].dump();
  const auto replay = dir_ / "replay_out";
  ASSERT_EQ(cli({"select", "--config", (dir_ / "replay.json").string(), "--out", replay.string()}).code, 0);
  EXPECT_EQ(slurp(out / "result.json"), slurp(replay / "result.json"));

  std::ofstream(dir_ / "bad.json") << R"({"no-such-flag": 1})";
  EXPECT_EQ(cli({"select", "--config", (dir_ / "bad.json").string()}).code, kExitUsage);
}

TEST_F(CliTest, TfBenchTable) {
  const auto out = dir_ / "bench";
  ASSERT_EQ(cli({"tf-bench", "--data", data_, "--tfs", "s1,v1,x", "--top-m", "6", "--horses", "5", "--iters",
                 "2", "--repeats", "1", "--folds", "3", "--classifier", "knn", "--quiet", "--out", out.string()})
                .code,
            0);
  const auto table = slurp(out / "tf-comparison.csv");
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 4);
  std::istringstream traces(slurp(out / "traces.csv"));
  std::string line;
  std::getline(traces, line);
  EXPECT_EQ(line, "tf,repeat,iteration,best_fitness");
  std::string prev_key;
  double prev = -1;
  while (std::getline(traces, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    const std::string key = cells[0] + "/" + cells[1];
    const double v = std::stod(cells[3]);
    if (key == prev_key) EXPECT_GE(v, prev);
    prev_key = key;
    prev = v;
  }
}

TEST_F(CliTest, StatsFromFiles) {
  const auto ranks = dir_ / "ranks.csv";
  std::ofstream(ranks) << "PSO,GA,Firefly,GWO,ACO,WOA,Proposed\n3.9,5.8,6,4.6,2.5,4.2,1\n";
  const auto out = dir_ / "stats";
  ASSERT_EQ(cli({"stats", "--input", ranks.string(), "--pre-ranked", "--datasets", "10", "--control", "Proposed",
                 "--out", out.string()})
                .code,
            0);
  const auto j = nlohmann::json::parse(slurp(out / "stats.json"));
  EXPECT_NEAR(j["friedman"]["chi_square"].get<double>(), 40.5, 1e-9);
  EXPECT_EQ(j["pairwise"].size(), 6u);

  const auto bad_sum = dir_ / "bad_sum.csv";
  std::ofstream(bad_sum) << "a,b,c\n1,1,1\n";
  EXPECT_EQ(cli({"stats", "--input", bad_sum.string(), "--pre-ranked", "--datasets", "3", "--out", out.string()}).code,
            kExitRuntime);

  const auto malformed = dir_ / "malformed.csv";
  std::ofstream(malformed) << "dataset,a,b\nd1,0.9,0.8\nd2,0.7,oops\n";
  const auto r = cli({"stats", "--input", malformed.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("row 3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column 3"), std::string::npos) << r.err;

  const auto raw = dir_ / "raw.csv";
  std::ofstream(raw) << "dataset,a,b,c\nd1,0.9,0.8,0.7\nd2,0.95,0.85,0.75\nd3,0.5,0.6,0.4\n";
  ASSERT_EQ(cli({"stats", "--input", raw.string(), "--out", out.string()}).code, 0);
  const auto k = nlohmann::json::parse(slurp(out / "stats.json"));
  EXPECT_EQ(k["pairwise"].size(), 3u);
  EXPECT_NEAR(k["avg_ranks"][0].get<double>(), 4.0 / 3.0, 1e-12);
}
