// Copyright 2026 The qmemlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmem/cli.hpp"

namespace qmem::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "qmemlab");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("qmem_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

const std::vector<std::string> kFast{"--periods", "2", "--steps-per-period", "200"};

std::vector<std::string> with_fast(std::vector<std::string> a) {
  a.insert(a.end(), kFast.begin(), kFast.end());
  return a;
}

TEST_F(CliTest, HelpExitsZero) {
  const Outcome r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  for (const char* sub : {"simulate", "dataset", "stats", "train", "benchmark", "optimize", "compare", "plot-data"})
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
}

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--bogus"}).code, 2);
  EXPECT_EQ(run({"stats", "--data", at("missing.csv")}).code, 2);
  EXPECT_EQ(run({"simulate", "--lambda", "-1"}).code, 2);
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  const Outcome r = run({"simulate", "--trunc", "9", "--out", at("sim")});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  std::ofstream(at("bad.csv")) << "phi,lambda,form_factor\n1,2\n";
  EXPECT_EQ(run({"stats", "--data", at("bad.csv")}).code, 1);
}

TEST_F(CliTest, SimulateWritesOutputsAndManifest) {
  const Outcome r = run(with_fast({"simulate", "--coupled", "--c12", "1e-12", "--lambda", "2", "--phi", "1", "--out", at("sim")}));
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trajectory.csv", "formfactor_1.csv", "formfactor_2.csv", "concurrence.csv", "manifest.txt"})
    EXPECT_TRUE(fs::exists(dir_ / "sim" / f)) << f;
  const std::string manifest = slurp(dir_ / "sim" / "manifest.txt");
  EXPECT_EQ(manifest.rfind("# command:", 0), 0u);
  EXPECT_NE(manifest.find("periods = 2"), std::string::npos);
}

TEST_F(CliTest, ManifestIsReusableAsConfig) {
  ASSERT_EQ(run(with_fast({"simulate", "--lambda", "1", "--out", at("a")})).code, 0);
  ASSERT_EQ(run({"--config", at("a/manifest.txt"), "simulate", "--lambda", "1", "--out", at("b")}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / "trajectory.csv"), slurp(dir_ / "b" / "trajectory.csv"));
}

TEST_F(CliTest, DatasetIsReproducible) {
  ASSERT_EQ(run(with_fast({"dataset", "--n", "6", "--seed", "3", "--workers", "1", "--out", at("a.csv")})).code, 0);
  ASSERT_EQ(run(with_fast({"dataset", "--n", "6", "--seed", "3", "--workers", "2", "--out", at("b.csv")})).code, 0);
  ASSERT_EQ(run(with_fast({"dataset", "--n", "6", "--seed", "4", "--out", at("c.csv")})).code, 0);
  EXPECT_EQ(slurp(dir_ / "a.csv"), slurp(dir_ / "b.csv"));
  EXPECT_NE(slurp(dir_ / "a.csv"), slurp(dir_ / "c.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a.csv.manifest"));
}

TEST_F(CliTest, TrainBenchmarkOptimizeOnSmallData) {
  ASSERT_EQ(run(with_fast({"dataset", "--n", "30", "--seed", "1", "--out", at("d.csv")})).code, 0);
  EXPECT_EQ(run({"stats", "--data", at("d.csv")}).code, 0);
  EXPECT_EQ(run({"train", "--data", at("d.csv"), "--model", "random-forest", "--trees", "10", "--out", at("m.qml")}).code, 0);
  EXPECT_TRUE(fs::exists(dir_ / "m.qml"));
  const Outcome b = run({"benchmark", "--data", at("d.csv"), "--models", "knn", "decision-tree", "--out", at("bench")});
  EXPECT_EQ(b.code, 0) << b.err;
  const Outcome o = run(with_fast({"optimize", "--data", at("d.csv"), "--model-file", at("m.qml"), "--starts", "16",
                               "--out", at("opt")}));
  EXPECT_EQ(o.code, 0) << o.err;
}

TEST_F(CliTest, PlotWritesSvg) {
  std::ofstream(at("t.csv")) << "t,a,b\n0,1,2\n1,3,1\n2,2,0\n";
  ASSERT_EQ(run({"plot-data", "--csv", at("t.csv"), "--title", "demo", "--out", at("t.svg")}).code, 0);
  const std::string svg = slurp(dir_ / "t.svg");
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("demo"), std::string::npos);
}

}  // namespace
}  // namespace qmem::cli
