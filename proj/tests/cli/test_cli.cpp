// End-to-end checks of the installed CLI binary: exit codes, emitted files,
// and determinism. The binary path comes from the build system.

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult runCli(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "scorecf_cli_out.txt";
  const std::string command =
      std::string(SCORECF_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
  const int raw = std::system(command.c_str());
  std::ifstream in(out);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return {WEXITSTATUS(raw), buffer.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("scorecf_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
    piece_ = dir_ / "piece.json";
    std::ofstream(piece_) << R"([
      {"id":"t","onset":"2","duration":"1","midi_pitch":71},
      {"id":"p1","onset":"2","duration":"1","midi_pitch":66},
      {"id":"lead","onset":"0","duration":"2","midi_pitch":64}
    ])";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
  fs::path piece_;
};

TEST_F(CliTest, BuildReportsCounts) {
  const fs::path out = dir_ / "graph.json";
  const RunResult r =
      runCli("build --input " + piece_.string() + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("notes: 3"), std::string::npos);
  EXPECT_NE(r.output.find("onset: 2"), std::string::npos);
  ASSERT_TRUE(fs::exists(out));
  const json dump = json::parse(std::ifstream(out));
  EXPECT_EQ(dump.at("notes").size(), 3u);
}

TEST_F(CliTest, BuildWithHierarchy) {
  const RunResult r = runCli("build --input " + piece_.string() +
                             " --beat-length 1 --measure-length 4");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("note_to_beat: 3"), std::string::npos);
}

TEST_F(CliTest, BuildFailsOnMissingAndMalformedInput) {
  EXPECT_EQ(runCli("build --input " + (dir_ / "none.json").string()).exit_code, 2);
  const fs::path bad = dir_ / "bad.json";
  std::ofstream(bad) << "{broken";
  EXPECT_EQ(runCli("build --input " + bad.string()).exit_code, 2);
}

TEST_F(CliTest, ExplainWritesReportAndStepFiles) {
  const fs::path out = dir_ / "run";
  const RunResult r = runCli("explain --input " + piece_.string() +
                             " --model rule:onset_peer:0 --target-node t --target-label PAC"
                             " --n 2 --t 3 --mode greedy --seed 5 --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  ASSERT_TRUE(fs::exists(out / "report.json"));
  EXPECT_TRUE(fs::exists(out / "run_manifest.json"));
  EXPECT_TRUE(fs::exists(out / "step_000.musicxml"));
  EXPECT_TRUE(fs::exists(out / "step_002.musicxml"));
  EXPECT_TRUE(fs::exists(out / "step_002.graph.json"));

  const json report = json::parse(std::ifstream(out / "report.json"));
  EXPECT_EQ(report.at("steps").size(), 2u);
  EXPECT_EQ(report.at("summary").at("first_valid_step"), 1);
}

TEST_F(CliTest, ExplainConfigFileMirrorsFlags) {
  const fs::path config = dir_ / "run.json";
  std::ofstream(config) << json{{"input", piece_.string()},
                                {"model", "rule:onset_peer:0"},
                                {"target_node", "t"},
                                {"target_label", 1},
                                {"n", 2},
                                {"t", 3},
                                {"mode", "greedy"},
                                {"seed", 5},
                                {"out", (dir_ / "run_a").string()}}
                            .dump();
  const RunResult a = runCli("explain --config " + config.string());
  EXPECT_EQ(a.exit_code, 0) << a.output;

  // Flags override the config file; the effective manifest round-trips.
  const RunResult b = runCli("explain --config " + config.string() + " --out " +
                             (dir_ / "run_b").string());
  EXPECT_EQ(b.exit_code, 0) << b.output;

  const json ma = json::parse(std::ifstream(dir_ / "run_a" / "run_manifest.json"));
  const json mb = json::parse(std::ifstream(dir_ / "run_b" / "run_manifest.json"));
  EXPECT_EQ(ma.at("target_node"), mb.at("target_node"));
  EXPECT_EQ(mb.at("out"), (dir_ / "run_b").string());

  const json ra = json::parse(std::ifstream(dir_ / "run_a" / "report.json"));
  const json rb = json::parse(std::ifstream(dir_ / "run_b" / "report.json"));
  EXPECT_EQ(ra.at("steps"), rb.at("steps"));  // same run, different out dir
}

TEST_F(CliTest, ExplainUnknownTargetExitsTwo) {
  const RunResult r = runCli("explain --input " + piece_.string() +
                             " --model rule:cadence --target-node nope --target-label 1");
  EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, PrescribedOpPathHonored) {
  const fs::path out = dir_ / "path_run";
  const RunResult r = runCli("explain --input " + piece_.string() +
                             " --model rule:onset_peer:0 --target-node t --target-label 1"
                             " --n 2 --t 2 --op-path pitch,add --seed 1 --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  const json report = json::parse(std::ifstream(out / "report.json"));
  EXPECT_EQ(report.at("steps")[0].at("op").at("op"), "change_pitch");
  EXPECT_EQ(report.at("steps")[1].at("op").at("op"), "add_note");
}

TEST_F(CliTest, ExperimentEmitsTables) {
  const fs::path manifest = dir_ / "grid.json";
  std::ofstream(manifest) << json{
      {"pieces", {piece_.string()}},
      {"model", "rule:onset_peer:0"},
      {"grid",
       {{{"name", "g"},
         {"config",
          {{"target_label", 1}, {"n", 2}, {"t", 2}, {"mode", "greedy"},
           {"max_candidates", 100}}}}}},
      {"repeats", 2},
      {"seed", 1}}.dump();
  const fs::path out = dir_ / "exp";
  const RunResult r =
      runCli("experiment --manifest " + manifest.string() + " --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "table.json"));
  EXPECT_TRUE(fs::exists(out / "table.csv"));
  const json table = json::parse(std::ifstream(out / "table.json"));
  EXPECT_EQ(table.at("cells").size(), 1u);
}

TEST_F(CliTest, ExportRoundTripsReport) {
  const fs::path run = dir_ / "run";
  ASSERT_EQ(runCli("explain --input " + piece_.string() +
                   " --model rule:onset_peer:0 --target-node t --target-label 1"
                   " --n 2 --t 2 --seed 5 --out " + run.string())
                .exit_code,
            0);
  const fs::path out = dir_ / "exported";
  const RunResult r = runCli("export --report " + (run / "report.json").string() +
                             " --format musicxml --out " + out.string());
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "step_000.musicxml"));
  EXPECT_TRUE(fs::exists(out / "step_002.musicxml"));
  EXPECT_FALSE(fs::exists(out / "step_001.graph.json"));

  EXPECT_EQ(runCli("export --report " + (run / "report.json").string() +
                   " --format bogus --out " + out.string())
                .exit_code,
            2);
}

TEST_F(CliTest, OutDirEnvFallback) {
  const fs::path out = dir_ / "env_out";
  const std::string cmd = "SCORECF_OUT_DIR=" + out.string() + " " + SCORECF_CLI_PATH +
                          " explain --input " + piece_.string() +
                          " --model rule:onset_peer:0 --target-node t --target-label 1"
                          " --n 1 --t 1 --seed 2 > /dev/null 2>&1";
  ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
  EXPECT_TRUE(fs::exists(out / "report.json"));
}

TEST_F(CliTest, MissingSubcommandExitsTwo) {
  EXPECT_EQ(runCli("").exit_code, 2);
  EXPECT_EQ(runCli("bogus").exit_code, 2);
}

}  // namespace
