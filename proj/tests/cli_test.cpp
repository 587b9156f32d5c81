// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mtsa Authors

#include <gtest/gtest.h>
#include <unistd.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string command = std::string(MTSA_CLI_PATH) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kDims = "--embedding-dim 8 --gru-dim 6 --task-dim 5 --ntn-dim 3 --epochs 3 --lr 0.01";

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("mtsa_cli_test-" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    const auto r = cli("synth --kind sarcastic-negative --samples 60 --dim 8 --seed 5 --corpus " +
                       p("corpus.csv") + " --glove " + p("glove.txt"));
    ASSERT_EQ(r.code, 0) << r.out;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string p(const std::string& name) { return (dir_ / name).string(); }
  static std::string data() { return "--corpus " + p("corpus.csv") + " --glove " + p("glove.txt"); }

  static std::string train(const std::string& variant, const std::string& out) {
    const auto r = cli("train " + data() + " --out " + p(out) + " --variant " + variant + " " +
                       kDims + " 2>/dev/null");
    EXPECT_EQ(r.code, 0) << r.out;
    return p(out);
  }

  static fs::path dir_;
};

fs::path Cli::dir_;

TEST(CliUsage, HelpAndBadUsage) {
  auto r = cli("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("crossval"), std::string::npos);
  EXPECT_EQ(cli("").code, 64);
  EXPECT_EQ(cli("frobnicate").code, 64);
  EXPECT_EQ(cli("train --corpus x").code, 64);
  EXPECT_NE(cli("--version").out.find("1.0.0"), std::string::npos);
}

TEST_F(Cli, PrepareSummarisesCorpus) {
  const auto r = cli("prepare " + p("corpus.csv") + " " + p("prepared.csv"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("samples     60"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(p("prepared.csv")), slurp(p("corpus.csv")));
}

TEST_F(Cli, PrepareReportsMissingColumn) {
  std::ofstream(p("bad.csv")) << "id,text,sentiment\n1,hello there,1\n";
  const auto r = cli("prepare " + p("bad.csv") + " " + p("never.csv"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("sarcasm"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(p("never.csv")));
  EXPECT_EQ(cli("prepare " + p("absent.csv") + " " + p("never.csv")).code, 6);
}

TEST_F(Cli, TrainWritesCheckpointManifestAndTrace) {
  const auto r = cli("train " + data() + " --out " + p("m.ckpt") + " --trace " + p("trace.jsonl") +
                     " " + kDims);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(p("m.ckpt")));
  const auto manifest = slurp(p("m.ckpt.manifest.json"));
  EXPECT_NE(manifest.find("\"fnv1a64\""), std::string::npos);
  EXPECT_NE(manifest.find("\"started_at\""), std::string::npos);
  std::ifstream trace(p("trace.jsonl"));
  std::string line;
  int n = 0;
  while (std::getline(trace, line)) ++n;
  EXPECT_EQ(n, 3);
}

TEST_F(Cli, ConfigErrorsExitThree) {
  EXPECT_EQ(cli("train " + data() + " --out " + p("x.ckpt") + " --variant nope").code, 3);
  std::ofstream(p("cfg.json")) << R"({"train": {"epochz": 2}})";
  EXPECT_EQ(cli("train " + data() + " --out " + p("x.ckpt") + " --config " + p("cfg.json")).code,
            3);
  EXPECT_EQ(cli("train " + data() + " --out " + p("x.ckpt") + " --embedding-dim 9").code, 2);
}

TEST_F(Cli, PredictAndAttention) {
  const auto model = train("shared-attention", "sa.ckpt");
  auto r = cli("predict --checkpoint " + model + " --glove " + p("glove.txt") +
               " 'yeah love the traffic'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("sentiment"), std::string::npos);
  EXPECT_NE(r.out.find("sarcasm"), std::string::npos);

  r = cli("predict --json --checkpoint " + model + " --glove " + p("glove.txt") + " 'great day'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("\"probabilities\""), std::string::npos);

  EXPECT_EQ(cli("predict --checkpoint " + model + " --glove " + p("glove.txt") + " '  '").code, 5);

  r = cli("attention --checkpoint " + model + " --glove " + p("glove.txt") + " 'love the traffic'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("alpha_sen"), std::string::npos);
  EXPECT_NE(r.out.find("traffic"), std::string::npos);

  const auto plain = train("multitask-simple", "simple.ckpt");
  EXPECT_EQ(cli("attention --checkpoint " + plain + " --glove " + p("glove.txt") + " love").code,
            5);
}

TEST_F(Cli, PredictRejectsForeignEmbeddings) {
  const auto model = train("multitask-fusion", "mf.ckpt");
  ASSERT_EQ(cli("synth --samples 20 --dim 8 --seed 99 --corpus " + p("o.csv") + " --glove " +
                p("o.txt"))
                .code,
            0);
  const auto r = cli("predict --checkpoint " + model + " --glove " + p("o.txt") + " 'great day'");
  EXPECT_EQ(r.code, 5);
  EXPECT_NE(r.out.find("vocabulary mismatch"), std::string::npos) << r.out;
}

TEST_F(Cli, CoercedPrediction) {
  const auto sen = train("standalone-sentiment", "sen.ckpt");
  const auto sar = train("standalone-sarcasm", "sar.ckpt");
  auto r = cli("predict --checkpoint " + sen + " --coerce-with " + sar + " --glove " +
               p("glove.txt") + " 'love the traffic'");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("(coerced)"), std::string::npos);
  r = cli("predict --checkpoint " + sar + " --coerce-with " + sen + " --glove " + p("glove.txt") +
          " 'love the traffic'");
  EXPECT_EQ(r.code, 5);
}

TEST_F(Cli, CrossvalIsReproducible) {
  const std::string args = "crossval " + data() + " " + kDims + " --folds 3 --seed 4";
  auto a = cli(args + " --out-dir " + p("cv_a") + " --jobs 2");
  ASSERT_EQ(a.code, 0) << a.out;
  auto b = cli(args + " --out-dir " + p("cv_b") + " --no-checkpoints");
  ASSERT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(slurp(p("cv_a/report.json")), slurp(p("cv_b/report.json")));
  EXPECT_EQ(slurp(p("cv_a/report.txt")), slurp(p("cv_b/report.txt")));
  EXPECT_TRUE(fs::exists(p("cv_a/manifest.json")));
  EXPECT_TRUE(fs::exists(p("cv_a/checkpoints/fold-2.ckpt")));
  EXPECT_FALSE(fs::exists(p("cv_b/checkpoints")));
  EXPECT_NE(a.out.find("shared-attention |"), std::string::npos) << a.out;
}

TEST_F(Cli, StandaloneCrossvalHasOnlySentimentColumns) {
  const auto r = cli("crossval " + data() + " " + kDims +
                     " --folds 2 --variant standalone-sentiment --no-checkpoints --out-dir " +
                     p("cv_s"));
  ASSERT_EQ(r.code, 0) << r.out;
  const auto report = slurp(p("cv_s/report.json"));
  EXPECT_NE(report.find("\"sentiment\""), std::string::npos);
  EXPECT_EQ(report.find("\"sarcasm\""), std::string::npos);
  EXPECT_NE(slurp(p("cv_s/report.txt")).find("| -- | -- | -- | --"), std::string::npos);
}

}  // namespace
