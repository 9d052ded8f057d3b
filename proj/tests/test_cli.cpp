#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "platoon/cli/app.hpp"
#include "platoon/io/checkpoint.hpp"
#include "platoon/io/config.hpp"
#include "platoon/io/csv.hpp"
#include "platoon/io/manifest.hpp"

namespace fs = std::filesystem;
using namespace platoon;

namespace {

struct Result {
  int code;
  std::string log;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "platoon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), log);
  return {code, log.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("platoon_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
            std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    std::ofstream(path("tiny.ini")) << "[ars]\niterations = 3\ndirections = 4\ntop_directions = 2\n"
                                       "eval_interval = 3\neval_episodes = 1\n"
                                       "[eval]\nepisodes = 2\n"
                                       "[experiment]\nagents_per_mode = 1\nepisodes_per_agent = 1\n"
                                       "sizes = 1,2\nsize_episodes = 1\nweight_ratios = 1/6,6/1\n";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& rel) const { return (dir_ / rel).string(); }
  std::string slurp(const std::string& rel) const { return io::read_file(path(rel)); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TrainWritesArtifacts) {
  const auto r = run_cli({"train", "--config", path("tiny.ini"), "--out", path("t"), "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.log;
  for (const char* f : {"t/policy.ckpt", "t/policy.ckpt.json", "t/training_curve.csv", "t/manifest.json",
                        "t/config.ini"})
    EXPECT_TRUE(fs::exists(path(f))) << f;
  const auto manifest = nlohmann::json::parse(slurp("t/manifest.json"));
  EXPECT_EQ(manifest["command"], "train");
  EXPECT_EQ(manifest["seeds"][0], 7);
  EXPECT_EQ(manifest["config_hash"], io::git_blob_hash(slurp("t/config.ini")));
  const auto side = nlohmann::json::parse(slurp("t/policy.ckpt.json"));
  EXPECT_EQ(side["p"], 20);
  EXPECT_EQ(side["n"], 3);
}

TEST_F(Cli, ZeroIterationsGivesZeroPolicy) {
  ASSERT_EQ(run_cli({"train", "--out", path("z"), "--iterations", "0"}).code, 0);
  const auto ck = io::load_checkpoint(path("z/policy.ckpt"));
  EXPECT_EQ(ck.policy.theta, std::vector<double>(20, 0.0));
  EXPECT_EQ(ck.policy.obs_count(), 0u);
}

TEST_F(Cli, TrainingIsDeterministic) {
  ASSERT_EQ(run_cli({"train", "--config", path("tiny.ini"), "--out", path("a"), "--seed", "7"}).code, 0);
  ASSERT_EQ(run_cli({"train", "--config", path("tiny.ini"), "--out", path("b"), "--seed", "7", "--jobs", "2"}).code, 0);
  EXPECT_EQ(slurp("a/training_curve.csv"), slurp("b/training_curve.csv"));
  EXPECT_EQ(slurp("a/policy.ckpt"), slurp("b/policy.ckpt"));
}

TEST_F(Cli, FlagsBeatSetBeatFile) {
  ASSERT_EQ(run_cli({"train", "--config", path("tiny.ini"), "--out", path("p"), "--set", "reward.omega1=2",
                 "--set", "reward.omega2=3", "--omega2", "4", "--iterations", "1"})
                .code,
            0);
  const auto sc = io::load_scenario(path("p/config.ini"));
  EXPECT_DOUBLE_EQ(sc.reward.omega1, 2.0);
  EXPECT_DOUBLE_EQ(sc.reward.omega2, 4.0);
  EXPECT_EQ(sc.ars.iterations, 1);
  EXPECT_EQ(sc.ars.directions, 4);  // from the file
  EXPECT_NE(slurp("p/manifest.json").find("omega2 = 4"), std::string::npos);
}

TEST_F(Cli, ValidationErrorsExitOne) {
  EXPECT_EQ(run_cli({"train"}).code, 1);  // --out missing
  EXPECT_EQ(run_cli({"bogus"}).code, 1);
  EXPECT_EQ(run_cli({"train", "--out", path("x"), "--set", "world.nope=1"}).code, 1);
  EXPECT_EQ(run_cli({"train", "--out", path("x"), "--set", "world.lane_length_m=abc"}).code, 1);
  EXPECT_EQ(run_cli({"train", "--out", path("x"), "--config", path("missing.ini")}).code, 1);
  EXPECT_EQ(run_cli({"eval", "--out", path("x"), "--controller", "nope"}).code, 1);
  EXPECT_EQ(run_cli({"eval", "--out", path("x"), "--controller", "ars"}).code, 1);  // no checkpoint
}

TEST_F(Cli, HelpExitsZero) { EXPECT_EQ(run_cli({"--help"}).code, 0); }

TEST_F(Cli, CheckpointDimensionMismatch) {
  ASSERT_EQ(run_cli({"train", "--out", path("t"), "--iterations", "0"}).code, 0);
  const auto r = run_cli({"eval", "--out", path("e"), "--controller", "ars", "--checkpoint", path("t/policy.ckpt"),
                      "--platoon-size", "5", "--episodes", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.log.find("expected p=24 but found p=20"), std::string::npos) << r.log;
}

TEST_F(Cli, CorruptCheckpointIsValidationError) {
  io::write_file(path("bad.ckpt"), "garbage");
  EXPECT_EQ(run_cli({"eval", "--out", path("e"), "--controller", "ars", "--checkpoint", path("bad.ckpt")}).code, 1);
}

TEST_F(Cli, EvalWritesMetricsAndTrajectories) {
  const auto r = run_cli({"eval", "--config", path("tiny.ini"), "--out", path("e"), "--controller", "idm", "--seed",
                      "1000", "--export-trajectories"});
  ASSERT_EQ(r.code, 0) << r.log;
  EXPECT_EQ(slurp("e/metrics.csv").substr(0, 10), "controller");
  EXPECT_TRUE(fs::exists(path("e/episodes.csv")));
  std::ifstream traj(path("e/trajectories/seed_1000.csv"));
  ASSERT_TRUE(traj.good());
  const auto rows = io::read_trajectory_csv(traj);
  EXPECT_FALSE(rows.empty());
  EXPECT_TRUE(fs::exists(path("e/trajectories/seed_1001.csv")));
}

TEST_F(Cli, EvalTrainedPolicy) {
  ASSERT_EQ(run_cli({"train", "--config", path("tiny.ini"), "--out", path("t")}).code, 0);
  const auto r = run_cli({"eval", "--config", path("tiny.ini"), "--out", path("e"), "--controller", "ars",
                      "--checkpoint", path("t/policy.ckpt")});
  EXPECT_EQ(r.code, 0) << r.log;
  EXPECT_NE(slurp("e/metrics.csv").find("\nars,2,"), std::string::npos) << slurp("e/metrics.csv");
}

TEST_F(Cli, ExperimentsAndPlots) {
  for (const char* kind : {"er-vs-dr", "weight-sweep", "size-sweep"}) {
    const auto out = std::string("x_") + kind;
    const auto r = run_cli({"experiment", kind, "--config", path("tiny.ini"), "--out", path(out), "--iterations", "1"});
    ASSERT_EQ(r.code, 0) << kind << ": " << r.log;
    EXPECT_TRUE(fs::exists(path(out + "/manifest.json")));
  }
  EXPECT_TRUE(fs::exists(path("x_er-vs-dr/er_vs_dr.csv")));
  const auto ws = slurp("x_weight-sweep/weight_sweep.csv");
  EXPECT_EQ(std::count(ws.begin(), ws.end(), '\n'), 4);  // header, idm, two ratios
  EXPECT_TRUE(fs::exists(path("x_size-sweep/size_sweep.csv")));

  const auto r = run_cli({"export-plots", "--in", path("x_size-sweep"), "--out", path("plots")});
  ASSERT_EQ(r.code, 0) << r.log;
  int svgs = 0;
  for (const auto& e : fs::recursive_directory_iterator(path("plots"))) svgs += e.path().extension() == ".svg";
  EXPECT_GE(svgs, 6);  // sizes {1,2} x {ars, idm, glosa}
}

TEST_F(Cli, ExportPlotsMissingInput) {
  EXPECT_NE(run_cli({"export-plots", "--in", path("none"), "--out", path("plots")}).code, 0);
}
