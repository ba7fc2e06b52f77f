// Copyright 2026 The Howlsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "howlsim/cli.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "howlsim/acoustic_core.h"
#include "howlsim/parallel.h"
#include "howlsim/wav.h"
#include "json.hpp"
#include "test_util.h"

namespace howlsim {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "howlsim");
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string ErrorKind(const Result& r) {
  // The structured error is the last line on stderr.
  std::string line = r.err;
  while (!line.empty() && line.back() == '\n') line.pop_back();
  line = line.substr(line.rfind('\n') + 1);
  return json::parse(line).at("error").at("kind");
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ASSERT_EQ(Invoke({"synth-corpus", "--out", (dir_ / "corpus").string(),
                      "--count", "8", "--min-seconds", "1.2",
                      "--max-seconds", "1.6", "--seed", "5"})
                  .code,
              kExitOk);
    std::ofstream(dir_ / "spec.json")
        << R"({"counts": {"train": 1, "val": 1, "test": 3}, "rir_sets": 3,
               "rt60": [0.0, 0.2], "speech_source": "corpus"})";
  }

  Result MakeSet(const std::string& name, const std::string& seed = "9") {
    return Invoke({"make-dataset", "--spec", (dir_ / "spec.json").string(),
                   "--out", (dir_ / name).string(), "--seed", seed,
                   "--threads", "2", "-q"});
  }

  testing::TempDir dir_{"cli"};
};

TEST_F(CliTest, SynthCorpusWritesFiles) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "corpus")) {
    const Waveform w = ReadMonoWav(e.path());
    EXPECT_GE(w.size(), 19200u);
    EXPECT_LE(w.size(), 25600u);
    ++n;
  }
  EXPECT_EQ(n, 8u);
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(Invoke({}).code, kExitUsage);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitUsage);
  const Result r = Invoke({"gen-rir", "--out", "x.rir"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(ErrorKind(r), "usage");
  EXPECT_EQ(Invoke({"gen-rir", "--rt60", "0.2", "--out",
                    (dir_ / "a.rir").string(), "--threads", "0"})
                .code,
            kExitUsage);
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
}

TEST_F(CliTest, ConfigErrorsExitTwoWithStructuredMessage) {
  // No seed anywhere.
  Result r = Invoke({"gen-rir", "--rt60", "0.2", "--out",
                     (dir_ / "a.rir").string()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(ErrorKind(r), "config");
  r = Invoke({"gen-rir", "--rt60", "0.9", "--out", (dir_ / "a.rir").string(),
              "--seed", "1"});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(ErrorKind(r), "config");
  EXPECT_NE(r.err.find("\"message\""), std::string::npos);
}

TEST_F(CliTest, IoErrorsExitOne) {
  const Result r = Invoke({"simulate", "--rirs", (dir_ / "none.rir").string(),
                           "--out", (dir_ / "sim").string(), "--seed", "1"});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_EQ(ErrorKind(r), "io");
  ASSERT_EQ(MakeSet("ds").code, kExitOk);
  const Result again = MakeSet("ds");
  EXPECT_EQ(again.code, kExitFailure);
  EXPECT_EQ(ErrorKind(again), "io");
}

TEST_F(CliTest, GenRirAnechoic) {
  const fs::path p = dir_ / "anechoic.rir";
  const Result r =
      Invoke({"gen-rir", "--rt60", "0", "--out", p.string(), "--seed", "3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out).at("paths"), 6);
  const RirSet set = ReadRirSet(p);
  for (const Waveform& h : set.h) {
    std::size_t nonzero = 0;
    for (double v : h) nonzero += v != 0.0;
    EXPECT_EQ(nonzero, 1u);
  }
}

TEST_F(CliTest, SeedMakesOutputReproducible) {
  ASSERT_EQ(MakeSet("a").code, kExitOk);
  ASSERT_EQ(Invoke({"make-dataset", "--spec", (dir_ / "spec.json").string(),
                    "--out", (dir_ / "b").string(), "--seed", "9",
                    "--threads", "1", "-q"})
                .code,
            kExitOk);
  ASSERT_EQ(MakeSet("c", "10").code, kExitOk);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_ / "a")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), dir_ / "a");
    EXPECT_EQ(Slurp(e.path()), Slurp(dir_ / "b" / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 2u + 5u * 13u);
  EXPECT_NE(Slurp(dir_ / "a" / "manifest.jsonl"),
            Slurp(dir_ / "c" / "manifest.jsonl"));
}

TEST_F(CliTest, ThreadsFromEnvironment) {
  setenv(kThreadsEnv, "nope", 1);
  const Result bad = MakeSet("env_bad");
  unsetenv(kThreadsEnv);
  // --threads on the command line wins over the environment.
  EXPECT_EQ(bad.code, kExitOk);
  setenv(kThreadsEnv, "nope", 1);
  const Result r = Invoke({"make-dataset", "--spec",
                           (dir_ / "spec.json").string(), "--out",
                           (dir_ / "env").string(), "--seed", "9"});
  unsetenv(kThreadsEnv);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_EQ(ErrorKind(r), "config");
}

TEST_F(CliTest, OracleBaselineScoresTheCap) {
  ASSERT_EQ(MakeSet("ds").code, kExitOk);
  const fs::path manifest = dir_ / "ds" / "manifest.jsonl";
  for (const std::string s : {"oracle", "passthrough"}) {
    const Result r =
        Invoke({"baseline-run", "--manifest", manifest.string(), "--out",
                (dir_ / s).string(), "--suppressor", s, "--threads", "2"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  const fs::path report = dir_ / "report.txt";
  Result r = Invoke({"evaluate", "--manifest", manifest.string(), "--enhanced",
                     (dir_ / "oracle").string(), "--report", report.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(Slurp(dir_ / "report.json"));
  ASSERT_EQ(j.at("buckets").size(), 3u);
  for (const json& b : j.at("buckets")) {
    EXPECT_EQ(b.at("count"), 1);
    EXPECT_DOUBLE_EQ(b.at("processed_si_sdr").get<double>(), 100.0);
  }
  EXPECT_NE(Slurp(report).find("Processed"), std::string::npos);

  r = Invoke({"evaluate", "--manifest", manifest.string(), "--enhanced",
              (dir_ / "passthrough").string(), "--report",
              (dir_ / "pt.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const json& b : json::parse(Slurp(dir_ / "pt.json")).at("buckets")) {
    EXPECT_NEAR(b.at("processed_si_sdr").get<double>(),
                b.at("unprocessed_si_sdr").get<double>(), 1e-3);
  }
  EXPECT_TRUE(fs::exists(dir_ / "pt.txt"));

  fs::remove(dir_ / "oracle" / "test_00001.wav");
  r = Invoke({"evaluate", "--manifest", manifest.string(), "--enhanced",
              (dir_ / "oracle").string(), "--report",
              (dir_ / "r2.txt").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("test_00001"), std::string::npos);
  EXPECT_EQ(json::parse(Slurp(dir_ / "r2.json")).at("missing"),
            json::array({"test_00001"}));
}

TEST_F(CliTest, FeaturesDumpWritesExchangeFiles) {
  ASSERT_EQ(MakeSet("ds").code, kExitOk);
  const Result r = Invoke(
      {"features-dump", "--manifest",
       (dir_ / "ds" / "manifest.jsonl").string(), "--out",
       (dir_ / "feat").string(), "--split", "train", "--layout", "y1,x,x21"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const fs::path d = dir_ / "feat" / "train_00000";
  for (const char* f :
       {"features.mat", "y1.spec", "x.spec", "x21.spec", "s1.spec"}) {
    EXPECT_TRUE(fs::exists(d / f)) << f;
  }
  EXPECT_EQ(Slurp(d / "features.mat").rfind("HOWLSIM-MAT", 0), 0u);
}

TEST_F(CliTest, SimulateWritesSceneAndGrowth) {
  const fs::path rir = dir_ / "room.rir";
  ASSERT_EQ(Invoke({"gen-rir", "--rt60", "0.2", "--out", rir.string(),
                    "--seed", "4"})
                .code,
            kExitOk);
  const Result r = Invoke({"simulate", "--rirs", rir.string(), "--out",
                           (dir_ / "sim").string(), "--seed", "4",
                           "--seconds", "2", "--suppressor", "nlms"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("suppressor"), "nlms");
  EXPECT_EQ(j.at("windows"), 20);
  for (const char* f : {"y1.wav", "s1.wav", "closed_y1.wav", "closed_out.wav",
                        "growth.json", "scene.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  }
  EXPECT_EQ(ReadMonoWav(dir_ / "sim" / "closed_y1.wav").size(), 32000u);
}

}  // namespace
}  // namespace howlsim
