#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
};

// Runs the CLI through the shell; stderr is discarded unless merged.
CliRun cli(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(DEPTHCRAFT_CLI) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  std::size_t got;
  while ((got = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), got);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("depthcraft_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    CliRun g = cli("generate --df 5 --n 40 --seed 3");
    ASSERT_EQ(g.code, 0);
    write("train.csv", g.out);
  }
  void TearDown() override { fs::remove_all(dir); }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void write(const std::string& name, const std::string& body) const { std::ofstream(path(name)) << body; }

  fs::path dir;
};

}  // namespace

TEST_F(Cli, HelpAndVersion) {
  CliRun h = cli("--help");
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("train"), std::string::npos);
  CliRun v = cli("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("depthcraft"), std::string::npos);
}

TEST_F(Cli, UsageErrorsExitWithTwo) {
  EXPECT_EQ(cli("depth --in " + path("train.csv") + " --bogus").code, 2);
  EXPECT_EQ(cli("nosuchcommand").code, 2);
  EXPECT_EQ(cli("depth --in " + path("train.csv") + " --query " + path("train.csv") + " --notion deepest").code, 2);
  EXPECT_EQ(cli("cv --in " + path("train.csv") + " --numchunks 1").code, 2);
  EXPECT_EQ(cli("classify --model " + path("missing.json") + " --in " + path("train.csv")).code, 2);
}

TEST_F(Cli, ExactHalfspaceCapNamesTheApproximation) {
  CliRun g = cli("generate --df inf --n 60 --seed 1");
  std::istringstream in(g.out);
  std::ostringstream three;
  std::string line;
  std::getline(in, line);
  three << "x1,x2,x3\n";
  int k = 0;
  while (std::getline(in, line)) {
    auto a = line.find(','), b = line.find(',', a + 1);
    three << line.substr(0, b) << ',' << (k++ % 7) * 0.13 << '\n';
  }
  write("d3.csv", three.str());
  CliRun r = cli("depth --notion halfspace --exact --halfspace-cap 50 --in " + path("d3.csv") + " --query " + path("d3.csv"), true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("--approx"), std::string::npos);
  EXPECT_EQ(cli("depth --notion halfspace --approx --in " + path("d3.csv") + " --query " + path("d3.csv")).code, 0);
}

TEST_F(Cli, TrainClassifyRoundTrip) {
  ASSERT_EQ(cli("train --notion zonoid --in " + path("train.csv") + " --model " + path("m.json")).code, 0);
  CliRun a = cli("classify --model " + path("m.json") + " --in " + path("train.csv") + " --labeled");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "label,outsider");
  CliRun b = cli("classify --model " + path("m.json") + " --in " + path("train.csv") + " --labeled");
  EXPECT_EQ(a.out, b.out);

  CliRun stdout_model = cli("train --notion zonoid --in " + path("train.csv"));
  ASSERT_EQ(stdout_model.code, 0);
  std::ifstream saved(path("m.json"));
  std::stringstream ss;
  ss << saved.rdbuf();
  EXPECT_EQ(stdout_model.out, ss.str());
}

TEST_F(Cli, CorruptModelIsASchemaError) {
  write("bad.json", "{\"format_version\": 1}");
  CliRun r = cli("classify --model " + path("bad.json") + " --in " + path("train.csv"), true);
  EXPECT_EQ(r.code, 2);
  write("new.json", "{\"format_version\": 7}");
  CliRun n = cli("classify --model " + path("new.json") + " --in " + path("train.csv"), true);
  EXPECT_EQ(n.code, 2);
  EXPECT_NE(n.out.find("version 7"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithCommandLinePrecedence) {
  write("cfg.json", R"({"notion": "mahalanobis", "train": {"separator": "knn"}})");
  CliRun a = cli("train --config " + path("cfg.json") + " --in " + path("train.csv"));
  ASSERT_EQ(a.code, 0);
  auto ja = nlohmann::json::parse(a.out);
  EXPECT_EQ(ja["depth_spec"]["notion"], "mahalanobis");
  EXPECT_EQ(ja["separators"]["kind"], "knn");
  CliRun b = cli("train --config " + path("cfg.json") + " --separator maxdepth --in " + path("train.csv"));
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(nlohmann::json::parse(b.out)["separators"]["kind"], "maxdepth");
  write("broken.json", "{");
  EXPECT_EQ(cli("train --config " + path("broken.json") + " --in " + path("train.csv")).code, 2);
}

TEST_F(Cli, CrossValidationJson) {
  CliRun r = cli("cv --notion mahalanobis --in " + path("train.csv") + " --numchunks 5");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["numchunks"], 5);
  EXPECT_EQ(j["correct"].get<int>() + j["incorrect"].get<int>() + j["ignored"].get<int>(), 80);
}

TEST_F(Cli, ThreadsDoNotChangeOutput) {
  CliRun a = cli("depth --notion projection --num-directions 300 --in " + path("train.csv") + " --query " + path("train.csv") +
              " --threads 1");
  CliRun b = cli("--threads 3 depth --notion projection --num-directions 300 --in " + path("train.csv") + " --query " +
              path("train.csv"));
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}
