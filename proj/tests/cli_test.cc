//
// Copyright 2026 The PWS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace {

struct Result {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::path(::testing::TempDir()) /
           ("pws_cli_" + std::string(::testing::UnitTest::GetInstance()
                                         ->current_test_info()
                                         ->name()));
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  void WriteFile(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name)) << text;
  }

  Result Run(const std::string& args) const {
    const std::string err = Path("stderr.txt");
    const std::string cmd = std::string(PWS_CLI_PATH) + " " + args + " 2>" + err;
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = Slurp(err);
    return r;
  }

  std::filesystem::path dir_;
};

TEST_F(CliTest, PiFirstRow) {
  const auto r = Run("pi --epsilon 0.1 --delta 0.01 --max-freq 3");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("i,q_i,pi_i,p_i\n1,1,0.01,0.01\n", 0), 0u);
}

TEST_F(CliTest, ExportedTablesPassTheDpCheck) {
  ASSERT_EQ(Run("pij --epsilon 0.1 --delta 0.01 --max-freq 80 -o " + Path("pij.csv"))
                .exit_code,
            0);
  ASSERT_EQ(Run("pdfs --epsilon 0.1 --delta 0.01 --scheme ppswor --tau 0.1 "
                "--max-freq 80 --table-out " + Path("pdf.csv") + " --atoms-out " +
                Path("atoms.csv") + " --tokens-out " + Path("tokens.csv") + " -o " +
                Path("segments.csv"))
                .exit_code,
            0);
  for (const char* name : {"pij.csv", "pdf.csv"}) {
    const auto r = Run("verify-dp --epsilon 0.1 --delta 0.01 -i " + Path(name));
    EXPECT_EQ(r.exit_code, 0) << name << ": " << r.err;
    EXPECT_EQ(r.out.rfind("dp,pass,rows,80,worst_divergence,", 0), 0u) << r.out;
  }
  EXPECT_EQ(Slurp(Path("atoms.csv")).rfind("i,atom0\n", 0), 0u);
  EXPECT_EQ(Slurp(Path("tokens.csv")).rfind("j,left,right\n", 0), 0u);

  ASSERT_EQ(Run("pi --epsilon 0.1 --delta 0.01 --max-freq 80 -o " + Path("pi.csv"))
                .exit_code,
            0);
  EXPECT_EQ(Run("verify-dp --format pi --epsilon 0.1 --delta 0.01 -i " + Path("pi.csv"))
                .exit_code,
            0);
}

TEST_F(CliTest, ViolatingTablesFailTheDpCheck) {
  ASSERT_EQ(Run("pdfs --epsilon 0.1 --delta 0.01 --max-freq 80 --as-printed-atom "
                "--table-out " + Path("literal.csv") + " -o " + Path("seg.csv"))
                .exit_code,
            0);
  auto r = Run("verify-dp --epsilon 0.1 --delta 0.01 -i " + Path("literal.csv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: data: dp violation", 0), 0u) << r.err;

  WriteFile("tampered.csv", "i,j,pi_ij\n1,0,0.9\n1,1,0.1\n");
  r = Run("verify-dp --epsilon 0.1 --delta 0.01 -i " + Path("tampered.csv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: data: dp violation", 0), 0u) << r.err;
}

TEST_F(CliTest, UsageAndDataErrors) {
  WriteFile("data.tsv", "a\t3\nb\t10\n");
  auto r = Run("sample --tau 0.1 -i " + Path("data.tsv"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("error: usage:", 0), 0u) << r.err;
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1) << r.err;

  r = Run("pi --epsilon -1 --delta 0.01 --max-freq 3");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("error: usage:", 0), 0u) << r.err;

  r = Run("frobnicate");
  EXPECT_EQ(r.exit_code, 2);

  r = Run("sample --seed 1 --tau 0.1 -i " + Path("missing.tsv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: data:", 0), 0u) << r.err;

  WriteFile("bad.tsv", "a\tthree\n");
  r = Run("sample --seed 1 --tau 0.1 -i " + Path("bad.tsv"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("bad.tsv:1"), std::string::npos) << r.err;
}

TEST_F(CliTest, SampleSanitizeEstimatePipeline) {
  std::string data;
  for (int k = 0; k < 3000; ++k) data += "key" + std::to_string(k) + "\t" + std::to_string(1 + k % 90) + "\n";
  WriteFile("data.tsv", data);
  const std::string scheme = " --scheme ppswor --tau 0.05";
  ASSERT_EQ(Run("sample --seed 7" + scheme + " -i " + Path("data.tsv") + " -o " +
                Path("sample.tsv"))
                .exit_code,
            0);
  const auto sanitize = "sanitize --mode freqs --epsilon 0.1 --delta 0.01 --max-freq 200 --seed 8" +
                        scheme + " -i " + Path("sample.tsv");
  const auto first = Run(sanitize);
  ASSERT_EQ(first.exit_code, 0) << first.err;
  EXPECT_FALSE(first.out.empty());
  EXPECT_EQ(Run(sanitize).out, first.out);
  WriteFile("tokens.tsv", first.out);

  const auto est = Run("estimate --epsilon 0.1 --delta 0.01 --max-freq 200" + scheme +
                       " -i " + Path("tokens.tsv"));
  ASSERT_EQ(est.exit_code, 0) << est.err;
  EXPECT_EQ(est.out.rfind("estimate\n", 0), 0u);

  const auto keys = Run("sanitize --mode keys --epsilon 0.1 --delta 0.01 --seed 8" + scheme +
                        " -i " + Path("sample.tsv"));
  ASSERT_EQ(keys.exit_code, 0) << keys.err;
  EXPECT_FALSE(keys.out.empty());

  WriteFile("empty.tsv", "");
  const auto none = Run("sanitize --mode freqs --epsilon 0.1 --delta 0.01 --seed 1 -i " +
                        Path("empty.tsv"));
  EXPECT_EQ(none.exit_code, 0) << none.err;
  EXPECT_EQ(none.out, "");
}

TEST_F(CliTest, BaselineIsDeterministicAndAboveThreshold) {
  std::string data;
  for (int k = 0; k < 500; ++k) data += "k" + std::to_string(k) + "\t60\n";
  WriteFile("data.tsv", data);
  const std::string cmd = "baseline sbh --epsilon 0.1 --delta 0.01 --seed 3 -i " + Path("data.tsv");
  const auto a = Run(cmd);
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(Run(cmd).out, a.out);
  std::istringstream in(a.out);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    const double w = std::stod(line.substr(line.find('\t') + 1));
    EXPECT_GE(w, 47.05);
    ++rows;
  }
  EXPECT_GT(rows, 300);
  const auto s = Run("baseline sampled-sbh --epsilon 0.1 --delta 0.01 --tau 0.01 --seed 3 -i " +
                     Path("data.tsv"));
  EXPECT_EQ(s.exit_code, 0) << s.err;
}

TEST_F(CliTest, AnalyzeOutputs) {
  auto r = Run("analyze sweep --epsilon 0.1 --delta 0.01 --dist zipf:2000,1,300");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("sweep_var,value,method,metric,result\n", 0), 0u);

  r = Run("analyze sweep --epsilon 0.1 --delta 0.001 --sweep tau --scheme ppswor "
          "--grid 1,0.1 --dist uniform:500,1,50 --threads 2");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find("tau,0.10000000000000001,sampled-sbh,reported_fraction,"),
            std::string::npos)
      << r.out;

  r = Run("analyze nrmse --epsilon 0.1 --delta 0.01 --grid 1,0.1 --dist uniform:500,1,40");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_NE(r.out.find(",pws-freq-mle,nrmse,"), std::string::npos);

  r = Run("analyze concordance --epsilon 0.1 --delta 0.01 --max-freq 4");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("i1,i2,concordance\n", 0), 0u);

  r = Run("analyze sweep --epsilon 0.1 --delta 0.01 --dist zipf:10,1");
  EXPECT_EQ(r.exit_code, 2) << r.err;
}

}  // namespace
