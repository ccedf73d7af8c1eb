// Copyright 2026 The gpqe Authors
// SPDX-License-Identifier: Apache-2.0
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

#include "gpqe/cli.hpp"

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

#include "gpqe/embedding.hpp"
#include "test_support.hpp"

namespace gpqe {
namespace {

using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_w2v(const std::string& path, const EmbeddingMatrix& m) {
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < m.rows(); ++i) vocab.push_back("w" + std::to_string(i));
  std::ofstream out(path, std::ios::binary);
  save_word2vec_text(out, EmbeddingMatrix(m.rows(), m.cols(),
                                          {m.values().begin(), m.values().end()}, vocab));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    input = dir.file("in.txt");
    write_w2v(input, testing::gaussian_mixture(40, 8, 4, 1));
  }
  testing::TempDir dir;
  std::string input;
};

TEST_F(CliTest, CompressInfoDecompressCompare) {
  const auto container = dir.file("q.gpqe");
  auto r = run({"compress", "-i", input, "--method", "gpq", "--scheme", "structured",
                "-g", "4", "-c", "3", "--seed", "5", "-o", container, "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = json::parse(r.out);
  EXPECT_EQ(report["total_clusters"], 12);
  EXPECT_EQ(report["size"]["int_params"], 160);
  EXPECT_EQ(report["size"]["float_params"], 2 * 3 * 8);

  r = run({"info", "-i", container, "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto info = json::parse(r.out);
  EXPECT_EQ(info["rows"], 40);
  EXPECT_EQ(info["cols"], 8);
  EXPECT_EQ(info["groups"], 4);
  EXPECT_EQ(info["clusters"], 3);
  EXPECT_EQ(info["flags"], 1);
  EXPECT_EQ(info["seed"], 5);
  EXPECT_EQ(info["header_bytes"], 35);
  EXPECT_EQ(info["size"], report["size"]);

  const auto recon = dir.file("recon.txt");
  r = run({"decompress", "-i", container, "-o", recon});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream rin(recon);
  const auto restored = load_word2vec_text(rin);
  EXPECT_EQ(restored.vocab()->front(), "w0");

  r = run({"compare", "--original", input, "--reconstructed", recon, "-k", "3",
           "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto fid = json::parse(r.out);
  EXPECT_GT(fid["rmse"].get<double>(), 0.0);
  EXPECT_LE(fid["nn_overlap_at_k"].get<double>(), 1.0);
}

TEST_F(CliTest, CompareIdentityIsZero) {
  auto r = run({"compare", "--original", input, "--reconstructed", input, "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["rmse"], 0.0);
}

TEST_F(CliTest, TextAndJsonCarrySameNumbers) {
  const auto container = dir.file("q.gpqe");
  auto j = run({"compress", "-i", input, "-g", "2", "-c", "4", "-o", container,
                "--report", "json"});
  auto t = run({"compress", "-i", input, "-g", "2", "-c", "4", "-o", container});
  ASSERT_EQ(j.code, 0);
  ASSERT_EQ(t.code, 0);
  const auto report = json::parse(j.out);
  const double ratio = report["size"]["compression_ratio"];
  EXPECT_NE(t.out.find("size.compression_ratio: " + json(ratio).dump()), std::string::npos)
      << t.out;
  EXPECT_NE(t.out.find("size.storable_mib: "), std::string::npos);
}

TEST_F(CliTest, SingleClusterRatioEqualsVocabulary) {
  auto r = run({"compress", "-i", input, "--method", "pq", "-g", "1", "-c", "1",
                "-o", dir.file("c1.gpqe"), "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["size"]["compression_ratio"], 40.0);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(run({"compress", "-i", input}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"compress", "-i", input, "-g", "3", "-c", "2", "-o", dir.file("x")}).code,
            cli::kExitData);
  EXPECT_EQ(run({"compress", "-i", dir.file("missing"), "-g", "1", "-c", "1", "-o",
                 dir.file("x")}).code, cli::kExitData);
  EXPECT_EQ(run({"compress", "-i", input, "--input-format", "raw", "-g", "1", "-c", "1",
                 "-o", dir.file("x")}).code, cli::kExitUsage);

  const auto container = dir.file("q.gpqe");
  ASSERT_EQ(run({"compress", "-i", input, "-g", "2", "-c", "2", "-o", container}).code, 0);
  auto bytes = slurp(container);
  bytes[40] ^= 0x10;
  std::ofstream(container, std::ios::binary) << bytes;
  const auto r = run({"info", "-i", container});
  EXPECT_EQ(r.code, cli::kExitFormat);
  EXPECT_EQ(r.err, "error: format: crc-mismatch: CRC mismatch\n");
}

TEST_F(CliTest, DecompressSampleAndRaw) {
  const auto container = dir.file("q.gpqe");
  ASSERT_EQ(run({"compress", "-i", input, "-g", "4", "-c", "3", "-o", container}).code, 0);
  const auto a = dir.file("a.raw");
  const auto b = dir.file("b.raw");
  ASSERT_EQ(run({"decompress", "-i", container, "--mode", "sample", "--seed", "3",
                 "--format", "raw", "-o", a}).code, 0);
  ASSERT_EQ(run({"decompress", "-i", container, "--mode", "sample", "--seed", "3",
                 "--format", "raw", "-o", b}).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_EQ(slurp(a).size(), 40u * 8 * 4);
  EXPECT_EQ(run({"decompress", "-i", container, "--mode", "sample", "-o", dir.file("c.raw"),
                 "--format", "raw"}).code, 0);
}

TEST_F(CliTest, DecompressSampleWithoutVariancesIsDataError) {
  const auto container = dir.file("q.gpqe");
  ASSERT_EQ(run({"compress", "-i", input, "--method", "pq", "-g", "4", "-c", "3", "-o",
                 container}).code, 0);
  EXPECT_EQ(run({"decompress", "-i", container, "--mode", "sample", "-o",
                 dir.file("x.txt")}).code, cli::kExitData);
}

TEST_F(CliTest, RweWithProjection) {
  const auto out = dir.file("rwe.raw");
  const auto w = dir.file("w.raw");
  auto r = run({"rwe", "--rows", "10", "--cols", "4", "--seed", "2", "--projection", "3",
                "--projection-output", w, "-o", out, "--format", "raw", "--report", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["size"]["float_params"], 2 + 4 * 3);
  EXPECT_EQ(slurp(out).size(), 10u * 4 * 4);
  EXPECT_EQ(slurp(w).size(), 4u * 3 * 4);
  EXPECT_EQ(run({"rwe", "--rows", "10", "--cols", "4", "--projection", "3", "-o", out}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, SweepOrderedAndParallelMatchesSequential) {
  const std::vector<std::string> base{"sweep", "-i", input, "--scheme", "unified",
                                      "--config", "2:2,4:4", "--config", "8:8",
                                      "--restarts", "4", "-k", "3"};
  auto seq = run(base);
  auto par_args = base;
  par_args.push_back("--parallel");
  auto par = run(par_args);
  ASSERT_EQ(seq.code, 0) << seq.err;
  ASSERT_EQ(par.code, 0) << par.err;
  EXPECT_EQ(seq.out, par.out);
  const auto arr = json::parse(seq.out);
  ASSERT_EQ(arr.size(), 3u);
  EXPECT_EQ(arr[0]["groups"], 2);
  EXPECT_EQ(arr[2]["clusters"], 8);
  EXPECT_TRUE(arr[1].contains("fidelity"));
  EXPECT_EQ(run({"sweep", "-i", input, "--config", "2-2"}).code, cli::kExitUsage);
}

TEST_F(CliTest, HelpSucceeds) {
  const auto r = run({"compress", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--clusters"), std::string::npos);
}

}  // namespace
}  // namespace gpqe
