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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"

#include "gpqe/codec.hpp"
#include "gpqe/embedding.hpp"
#include "gpqe/errors.hpp"
#include "gpqe/metrics.hpp"
#include "gpqe/quantizer.hpp"
#include "gpqe/random.hpp"
#include "gpqe/rwe.hpp"

namespace gpqe::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum class FileFormat { kWord2Vec, kRaw };
enum class Method { kPq, kGpq };
enum class ReportFormat { kText, kJson };

const std::map<std::string, FileFormat> kFileFormats{
    {"w2v", FileFormat::kWord2Vec}, {"raw", FileFormat::kRaw}};
const std::map<std::string, Method> kMethods{{"pq", Method::kPq},
                                             {"gpq", Method::kGpq}};
const std::map<std::string, PartitionKind> kSchemes{
    {"structured", PartitionKind::kStructured},
    {"unified", PartitionKind::kUnified}};
const std::map<std::string, ReconstructMode> kModes{
    {"mean", ReconstructMode::kMean}, {"sample", ReconstructMode::kSample}};
const std::map<std::string, ReportFormat> kReports{
    {"text", ReportFormat::kText}, {"json", ReportFormat::kJson}};

// CheckedTransformer lists mapped values too; show only the accepted names.
template <typename T>
CLI::Validator choice(const std::map<std::string, T>& table) {
  std::string names;
  for (const auto& [name, value] : table) names += (names.empty() ? "" : ",") + name;
  return CLI::CheckedTransformer(table, CLI::ignore_case).description("{" + names + "}");
}

// Where an embedding file comes from and how to parse it.
struct MatrixSource {
  std::string path;
  FileFormat format = FileFormat::kWord2Vec;
  std::size_t rows = 0;
  std::size_t cols = 0;

  void check(const std::string& what) const {
    if (format == FileFormat::kRaw && (rows == 0 || cols == 0)) {
      throw UsageError(what + ": raw input requires --rows and --cols");
    }
  }
};

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

std::string vocab_sidecar(const std::string& container) {
  return container + ".vocab";
}

std::vector<std::string> synthetic_vocab(std::size_t rows) {
  std::vector<std::string> vocab(rows);
  for (std::size_t i = 0; i < rows; ++i) vocab[i] = std::to_string(i);
  return vocab;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

EmbeddingMatrix load_matrix(const MatrixSource& src) {
  auto in = open_input(src.path);
  if (src.format == FileFormat::kRaw) return load_raw(in, src.rows, src.cols);
  return load_word2vec_text(in);
}

void save_matrix(const std::string& path, FileFormat format,
                 const EmbeddingMatrix& matrix) {
  auto out = open_output(path);
  if (format == FileFormat::kRaw) {
    save_raw(out, matrix);
  } else if (matrix.vocab()) {
    save_word2vec_text(out, matrix);
  } else {
    save_word2vec_text(out, EmbeddingMatrix(matrix.rows(), matrix.cols(),
                                            {matrix.values().begin(),
                                             matrix.values().end()},
                                            synthetic_vocab(matrix.rows())));
  }
  if (!out) throw DataError("write failed: " + path);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  auto in = open_input(path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

void write_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
  auto out = open_output(path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw DataError("write failed: " + path);
}

Json size_json(const SizeReport& r) {
  Json j;
  j["theoretical_bits"] = r.theoretical_bits;
  j["theoretical_bytes"] = r.theoretical_bits / 8.0;
  j["storable_bits"] = r.storable_bits;
  j["storable_bytes"] = r.storable_bits / 8;
  j["storable_mib"] = round2(to_mib(static_cast<double>(r.storable_bits / 8)));
  j["float_params"] = r.float_params;
  j["int_params"] = r.int_params;
  j["baseline_bits"] = r.baseline_bits;
  j["baseline_bytes"] = r.baseline_bits / 8;
  j["baseline_mib"] = round2(to_mib(static_cast<double>(r.baseline_bits / 8)));
  j["compression_ratio"] = r.compression_ratio;
  return j;
}

Json fidelity_json(const FidelityReport& r) {
  Json j;
  j["rmse"] = r.rmse;
  j["mean_cosine"] = r.mean_cosine;
  j["nn_overlap_at_k"] = r.nn_overlap_at_k;
  j["k"] = r.k;
  return j;
}

// Flattens a JSON object into "key: value" lines; nested objects prefix
// their keys. Numbers use the same shortest round-trip form as the JSON.
void print_text(std::ostream& out, const Json& j, const std::string& prefix = "") {
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      print_text(out, value, name);
    } else if (value.is_number_float()) {
      out << name << ": " << format_double(value.get<double>()) << '\n';
    } else if (value.is_string()) {
      out << name << ": " << value.get<std::string>() << '\n';
    } else {
      out << name << ": " << value.dump() << '\n';
    }
  }
}

void emit(std::ostream& out, ReportFormat format, const Json& j) {
  if (format == ReportFormat::kJson) {
    out << j.dump(2) << '\n';
  } else {
    print_text(out, j);
  }
}

std::string scheme_name(PartitionKind kind) {
  return kind == PartitionKind::kUnified ? "unified" : "structured";
}

QuantizedEmbedding run_compress(const EmbeddingMatrix& matrix, Method method,
                                 const PartitionScheme& scheme,
                                 std::size_t clusters,
                                 const CompressOptions& options) {
  return method == Method::kGpq ? gpq_compress(matrix, scheme, clusters, options)
                                : pq_compress(matrix, scheme, clusters, options);
}

void add_matrix_options(CLI::App* cmd, MatrixSource& src, const std::string& flag,
                        const std::string& description, bool with_shape = true) {
  cmd->add_option(flag, src.path, description)->required();
  cmd->add_option("--input-format", src.format, "w2v or raw")
      ->transform(choice(kFileFormats));
  if (with_shape) {
    cmd->add_option("--rows", src.rows, "row count for raw input");
    cmd->add_option("--cols", src.cols, "column count for raw input");
  }
}

struct SweepConfig {
  std::size_t groups;
  std::size_t clusters;
};

SweepConfig parse_sweep_config(const std::string& text) {
  const auto colon = text.find(':');
  SweepConfig cfg{};
  auto parse = [&](std::string_view s, std::size_t& v) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && ptr == s.data() + s.size() && v > 0;
  };
  if (colon == std::string::npos ||
      !parse(std::string_view(text).substr(0, colon), cfg.groups) ||
      !parse(std::string_view(text).substr(colon + 1), cfg.clusters)) {
    throw UsageError("sweep config must be <groups>:<clusters>, got '" + text + "'");
  }
  return cfg;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out) {
  CLI::App app{"Product and Gaussian product quantization of embedding tables",
               "gpqe"};
  app.require_subcommand(1);

  // compress
  MatrixSource compress_in;
  std::string compress_out;
  Method method = Method::kGpq;
  PartitionKind scheme_kind = PartitionKind::kUnified;
  std::size_t groups = 0;
  std::size_t clusters = 0;
  std::uint64_t seed = 0;
  std::size_t restarts = 1;
  KMeansOptions kmeans_opts;
  ReportFormat report = ReportFormat::kText;

  auto add_quantizer_options = [&](CLI::App* cmd) {
    cmd->add_option("--method", method, "pq or gpq")
        ->transform(choice(kMethods));
    cmd->add_option("--scheme", scheme_kind, "structured or unified")
        ->transform(choice(kSchemes));
    cmd->add_option("--seed", seed, "clustering seed");
    cmd->add_option("--restarts", restarts, "k-means restarts per clustering")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", kmeans_opts.max_iter, "Lloyd iteration cap")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tol", kmeans_opts.rel_tol,
                    "relative objective improvement to stop at")
        ->check(CLI::NonNegativeNumber);
  };
  auto add_report_option = [&](CLI::App* cmd) {
    cmd->add_option("--report", report, "text or json")
        ->transform(choice(kReports));
  };

  auto* compress_cmd = app.add_subcommand("compress", "quantize an embedding table");
  add_matrix_options(compress_cmd, compress_in, "-i,--input", "embedding file");
  add_quantizer_options(compress_cmd);
  compress_cmd->add_option("-g,--groups", groups, "number of column groups")
      ->required()->check(CLI::PositiveNumber);
  compress_cmd->add_option("-c,--clusters", clusters, "clusters per codebook")
      ->required()->check(CLI::PositiveNumber);
  compress_cmd->add_option("-o,--output", compress_out, "GPQE container")->required();
  add_report_option(compress_cmd);

  // decompress
  std::string container_path;
  std::string decompress_out;
  std::string vocab_path;
  ReconstructMode mode = ReconstructMode::kMean;
  std::optional<std::uint64_t> sample_seed;
  FileFormat out_format = FileFormat::kWord2Vec;
  auto* decompress_cmd =
      app.add_subcommand("decompress", "reconstruct an embedding table");
  decompress_cmd->add_option("-i,--input", container_path, "GPQE container")
      ->required();
  decompress_cmd->add_option("--mode", mode, "mean or sample")
      ->transform(choice(kModes));
  decompress_cmd->add_option("--seed", sample_seed,
                             "sampling seed (default: the container's seed)");
  decompress_cmd->add_option("-o,--output", decompress_out, "embedding file")
      ->required();
  decompress_cmd->add_option("--format", out_format, "w2v or raw")
      ->transform(choice(kFileFormats));
  decompress_cmd->add_option("--vocab", vocab_path,
                             "token list (default: <input>.vocab if present)");

  // info
  auto* info_cmd = app.add_subcommand("info", "describe a GPQE container");
  info_cmd->add_option("-i,--input", container_path, "GPQE container")->required();
  add_report_option(info_cmd);

  // rwe
  RweConfig rwe_cfg;
  std::optional<std::size_t> projection_dim;
  std::string rwe_out;
  std::string projection_out;
  auto* rwe_cmd = app.add_subcommand("rwe", "generate random word embeddings");
  rwe_cmd->add_option("--rows", rwe_cfg.rows, "vocabulary size")
      ->required()->check(CLI::PositiveNumber);
  rwe_cmd->add_option("--cols", rwe_cfg.cols, "embedding dimension")
      ->required()->check(CLI::PositiveNumber);
  rwe_cmd->add_option("--seed", rwe_cfg.seed, "generator seed");
  rwe_cmd->add_option("--projection", projection_dim,
                      "also emit an n x m projection matrix")
      ->check(CLI::PositiveNumber);
  rwe_cmd->add_option("--projection-output", projection_out,
                      "raw binary32 file for the projection matrix");
  rwe_cmd->add_option("-o,--output", rwe_out, "embedding file")->required();
  rwe_cmd->add_option("--format", out_format, "w2v or raw")
      ->transform(choice(kFileFormats));
  add_report_option(rwe_cmd);

  // compare
  MatrixSource original;
  MatrixSource reconstructed;
  std::size_t k = 10;
  auto* compare_cmd = app.add_subcommand("compare", "fidelity of a reconstruction");
  compare_cmd->add_option("--original", original.path, "reference embeddings")
      ->required();
  compare_cmd->add_option("--reconstructed", reconstructed.path,
                          "embeddings to evaluate")
      ->required();
  compare_cmd->add_option("--input-format", original.format, "w2v or raw")
      ->transform(choice(kFileFormats));
  compare_cmd->add_option("--rows", original.rows, "row count for raw input");
  compare_cmd->add_option("--cols", original.cols, "column count for raw input");
  compare_cmd->add_option("-k", k, "neighbours for the overlap metric")
      ->check(CLI::PositiveNumber);
  add_report_option(compare_cmd);

  // sweep
  MatrixSource sweep_in;
  std::vector<std::string> sweep_configs;
  bool parallel = false;
  std::string sweep_out;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "compress under several (groups, clusters)");
  add_matrix_options(sweep_cmd, sweep_in, "-i,--input", "embedding file");
  add_quantizer_options(sweep_cmd);
  sweep_cmd->add_option("--config", sweep_configs,
                        "<groups>:<clusters>, repeatable or comma-separated")
      ->required()->delimiter(',');
  sweep_cmd->add_option("-k", k, "neighbours for the overlap metric")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_flag("--parallel", parallel, "run configurations concurrently");
  sweep_cmd->add_option("-o,--output", sweep_out, "write JSON here instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto parsed = app.get_subcommands();
    out << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitOk;
  }

  if (compress_cmd->parsed()) {
    compress_in.check("compress");
    const auto matrix = load_matrix(compress_in);
    const PartitionScheme scheme{scheme_kind, groups};
    const auto q = run_compress(matrix, method, scheme, clusters,
                                CompressOptions{seed, restarts, kmeans_opts});
    const auto bytes = encode(q);
    write_bytes(compress_out, bytes);
    const std::string sidecar = vocab_sidecar(compress_out);
    if (matrix.vocab()) {
      auto vout = open_output(sidecar);
      for (const auto& token : *matrix.vocab()) vout << token << '\n';
    } else {
      std::filesystem::remove(sidecar);
    }
    Json j;
    j["method"] = method == Method::kGpq ? "gpq" : "pq";
    j["scheme"] = scheme_name(scheme_kind);
    j["rows"] = q.rows;
    j["cols"] = q.cols;
    j["groups"] = groups;
    j["clusters"] = clusters;
    j["total_clusters"] = q.total_clusters();
    j["file_bytes"] = bytes.size();
    j["size"] = size_json(size_report(q));
    emit(out, report, j);
    return kExitOk;
  }

  if (decompress_cmd->parsed()) {
    auto q = decode(read_bytes(container_path));
    std::string tokens_file = vocab_path;
    if (tokens_file.empty() && std::filesystem::exists(vocab_sidecar(container_path))) {
      tokens_file = vocab_sidecar(container_path);
    }
    if (!tokens_file.empty()) {
      auto vin = open_input(tokens_file);
      std::vector<std::string> vocab;
      std::string line;
      while (std::getline(vin, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) vocab.push_back(line);
      }
      if (vocab.size() != q.rows) {
        throw DataError("vocabulary has " + std::to_string(vocab.size()) +
                        " tokens, container has " + std::to_string(q.rows) +
                        " rows");
      }
      q.vocab = std::move(vocab);
    }
    const auto matrix = reconstruct(q, mode, sample_seed.value_or(q.seed));
    save_matrix(decompress_out, out_format, matrix);
    return kExitOk;
  }

  if (info_cmd->parsed()) {
    const auto bytes = read_bytes(container_path);
    const auto q = decode(bytes);
    const auto header = read_header(bytes);
    Json j;
    j["version"] = header.version;
    j["flags"] = header.flags;
    j["variances"] = header.has_variances();
    j["scheme"] = header.unified() ? "unified" : "structured";
    j["rows"] = header.rows;
    j["cols"] = header.cols;
    j["groups"] = header.groups;
    j["clusters"] = header.clusters;
    j["total_clusters"] = q.total_clusters();
    j["float_bits"] = header.float_bits;
    j["seed"] = header.seed;
    j["index_bits"] = index_bit_width(header.clusters);
    j["header_bytes"] = kHeaderBytes;
    j["payload_bytes"] = payload_bytes(header);
    j["crc_bytes"] = kCrcBytes;
    j["file_bytes"] = bytes.size();
    j["size"] = size_json(size_report(q));
    emit(out, report, j);
    return kExitOk;
  }

  if (rwe_cmd->parsed()) {
    if (!projection_out.empty() && !projection_dim) {
      throw UsageError("--projection-output requires --projection");
    }
    if (projection_dim && projection_out.empty()) {
      throw UsageError("--projection requires --projection-output");
    }
    rwe_cfg.projection_dim = projection_dim;
    const auto matrix = rwe_generate(rwe_cfg);
    save_matrix(rwe_out, out_format, matrix);
    if (projection_dim) {
      const auto w = projection_init(rwe_cfg.cols, *projection_dim,
                                     derive_seed(rwe_cfg.seed, 1));
      auto wout = open_output(projection_out);
      save_raw(wout, EmbeddingMatrix(rwe_cfg.cols, *projection_dim, w));
    }
    Json j;
    j["rows"] = rwe_cfg.rows;
    j["cols"] = rwe_cfg.cols;
    j["seed"] = rwe_cfg.seed;
    if (projection_dim) j["projection_dim"] = *projection_dim;
    j["size"] = size_json(rwe_size_report(rwe_cfg));
    emit(out, report, j);
    return kExitOk;
  }

  if (compare_cmd->parsed()) {
    reconstructed.format = original.format;
    reconstructed.rows = original.rows;
    reconstructed.cols = original.cols;
    original.check("compare");
    const auto a = load_matrix(original);
    const auto b = load_matrix(reconstructed);
    emit(out, report, fidelity_json(fidelity(a, b, k)));
    return kExitOk;
  }

  if (sweep_cmd->parsed()) {
    sweep_in.check("sweep");
    std::vector<SweepConfig> configs;
    for (const auto& text : sweep_configs) configs.push_back(parse_sweep_config(text));
    const auto matrix = load_matrix(sweep_in);
    const CompressOptions options{seed, restarts, kmeans_opts};

    auto run_one = [&](const SweepConfig& cfg) {
      const auto q = run_compress(matrix, method,
                                  PartitionScheme{scheme_kind, cfg.groups},
                                  cfg.clusters, options);
      auto fid = fidelity(matrix, reconstruct(q, ReconstructMode::kMean), k);
      Json j;
      j["groups"] = cfg.groups;
      j["clusters"] = cfg.clusters;
      j["size"] = size_json(size_report(q));
      j["fidelity"] = fidelity_json(fid);
      return j;
    };

    Json results = Json::array();
    if (parallel) {
      std::vector<std::future<Json>> futures;
      for (const auto& cfg : configs) {
        futures.push_back(std::async(std::launch::async, run_one, cfg));
      }
      for (auto& f : futures) results.push_back(f.get());
    } else {
      for (const auto& cfg : configs) results.push_back(run_one(cfg));
    }
    const std::string text = results.dump(2) + "\n";
    if (sweep_out.empty()) {
      out << text;
    } else {
      auto fout = open_output(sweep_out);
      fout << text;
    }
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    return dispatch(args, out);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: format: " << to_string(e.code()) << ": " << e.what() << '\n';
    return kExitFormat;
  } catch (const DataError& e) {
    err << "error: data: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: data: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace gpqe::cli
