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

#include <fstream>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gpqe/codec.hpp"
#include "gpqe/embedding.hpp"
#include "gpqe/errors.hpp"
#include "gpqe/kmeans.hpp"
#include "gpqe/metrics.hpp"
#include "gpqe/quantizer.hpp"
#include "gpqe/rwe.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> to_array(const std::vector<T>& values, std::size_t rows,
                        std::size_t cols) {
  py::array_t<T> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

template <typename T>
py::array_t<T> to_array(std::span<const T> values, std::size_t rows,
                        std::size_t cols) {
  py::array_t<T> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

std::vector<float> from_matrix(const FloatArray& a, std::size_t& rows,
                               std::size_t& cols) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  rows = static_cast<std::size_t>(a.shape(0));
  cols = static_cast<std::size_t>(a.shape(1));
  return std::vector<float>(a.data(), a.data() + a.size());
}

gpqe::EmbeddingMatrix make_matrix(const FloatArray& a,
                                  std::optional<std::vector<std::string>> vocab) {
  std::size_t rows = 0, cols = 0;
  auto values = from_matrix(a, rows, cols);
  return gpqe::EmbeddingMatrix(rows, cols, std::move(values), std::move(vocab));
}

gpqe::PartitionKind parse_kind(const std::string& name) {
  if (name == "structured") return gpqe::PartitionKind::kStructured;
  if (name == "unified") return gpqe::PartitionKind::kUnified;
  throw py::value_error("scheme must be 'structured' or 'unified'");
}

gpqe::ReconstructMode parse_mode(const std::string& name) {
  if (name == "mean") return gpqe::ReconstructMode::kMean;
  if (name == "sample") return gpqe::ReconstructMode::kSample;
  throw py::value_error("mode must be 'mean' or 'sample'");
}

gpqe::CompressOptions compress_options(std::uint64_t seed, std::size_t restarts,
                                       std::size_t max_iter, double rel_tol) {
  return gpqe::CompressOptions{seed, restarts, gpqe::KMeansOptions{max_iter, rel_tol}};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Product and Gaussian product quantization of embedding tables";

  static py::exception<gpqe::FormatError> format_error(m, "FormatError",
                                                        PyExc_ValueError);
  py::register_exception<gpqe::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const gpqe::FormatError& e) {
      const std::string msg = std::string(gpqe::to_string(e.code())) + ": " + e.what();
      PyErr_SetString(format_error.ptr(), msg.c_str());
    }
  });

  py::class_<gpqe::EmbeddingMatrix>(m, "EmbeddingMatrix")
      .def(py::init(&make_matrix), py::arg("values"), py::arg("vocab") = py::none())
      .def_property_readonly("rows", &gpqe::EmbeddingMatrix::rows)
      .def_property_readonly("cols", &gpqe::EmbeddingMatrix::cols)
      .def_property_readonly("vocab", &gpqe::EmbeddingMatrix::vocab)
      .def_property_readonly("values", [](const gpqe::EmbeddingMatrix& e) {
        return to_array(e.values(), e.rows(), e.cols());
      })
      .def("__eq__", [](const gpqe::EmbeddingMatrix& a,
                        const gpqe::EmbeddingMatrix& b) { return a == b; });

  m.def("load_word2vec_text", [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gpqe::DataError("cannot open " + path);
    return gpqe::load_word2vec_text(in);
  }, py::arg("path"));
  m.def("save_word2vec_text", [](const std::string& path,
                                 const gpqe::EmbeddingMatrix& e) {
    std::ofstream out(path, std::ios::binary);
    gpqe::save_word2vec_text(out, e);
  }, py::arg("path"), py::arg("matrix"));
  m.def("load_raw", [](const std::string& path, std::size_t rows, std::size_t cols) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gpqe::DataError("cannot open " + path);
    return gpqe::load_raw(in, rows, cols);
  }, py::arg("path"), py::arg("rows"), py::arg("cols"));
  m.def("save_raw", [](const std::string& path, const gpqe::EmbeddingMatrix& e) {
    std::ofstream out(path, std::ios::binary);
    gpqe::save_raw(out, e);
  }, py::arg("path"), py::arg("matrix"));

  py::class_<gpqe::ClusterResult>(m, "ClusterResult")
      .def_readonly("objective", &gpqe::ClusterResult::objective)
      .def_readonly("iterations", &gpqe::ClusterResult::iterations)
      .def_property_readonly("centroids", [](const gpqe::ClusterResult& r) {
        return to_array(r.centroids, r.clusters, r.dim);
      })
      .def_property_readonly("variances", [](const gpqe::ClusterResult& r) {
        return to_array(r.variances, r.clusters, r.dim);
      })
      .def_property_readonly("assignments", [](const gpqe::ClusterResult& r) {
        return py::array_t<std::uint32_t>(r.assignments.size(), r.assignments.data());
      });

  m.def("kmeans", [](const FloatArray& points, std::size_t clusters,
                     std::uint64_t seed, std::size_t restarts,
                     std::size_t max_iter, double rel_tol) {
    std::size_t rows = 0, cols = 0;
    const auto values = from_matrix(points, rows, cols);
    return gpqe::kmeans_best_of(values, cols, clusters, seed, restarts,
                                gpqe::KMeansOptions{max_iter, rel_tol});
  }, py::arg("points"), py::arg("clusters"), py::arg("seed") = 0,
     py::arg("restarts") = 1, py::arg("max_iter") = 100, py::arg("rel_tol") = 1e-6);

  py::class_<gpqe::SizeReport>(m, "SizeReport")
      .def_readonly("theoretical_bits", &gpqe::SizeReport::theoretical_bits)
      .def_readonly("storable_bits", &gpqe::SizeReport::storable_bits)
      .def_readonly("float_params", &gpqe::SizeReport::float_params)
      .def_readonly("int_params", &gpqe::SizeReport::int_params)
      .def_readonly("baseline_bits", &gpqe::SizeReport::baseline_bits)
      .def_readonly("compression_ratio", &gpqe::SizeReport::compression_ratio);

  py::class_<gpqe::QuantizedEmbedding>(m, "QuantizedEmbedding")
      .def_readonly("rows", &gpqe::QuantizedEmbedding::rows)
      .def_readonly("cols", &gpqe::QuantizedEmbedding::cols)
      .def_readonly("clusters", &gpqe::QuantizedEmbedding::clusters)
      .def_readonly("seed", &gpqe::QuantizedEmbedding::seed)
      .def_property_readonly("groups", [](const gpqe::QuantizedEmbedding& q) {
        return q.scheme.groups;
      })
      .def_property_readonly("scheme", [](const gpqe::QuantizedEmbedding& q) {
        return q.scheme.kind == gpqe::PartitionKind::kUnified ? "unified" : "structured";
      })
      .def_property_readonly("total_clusters", &gpqe::QuantizedEmbedding::total_clusters)
      .def_property_readonly("index_matrix", [](const gpqe::QuantizedEmbedding& q) {
        return to_array(q.index_matrix, q.rows, q.scheme.groups);
      })
      .def_property_readonly("codebook_means", [](const gpqe::QuantizedEmbedding& q) {
        return to_array(q.codebook_means, q.codebook_blocks() * q.clusters,
                        q.group_width());
      })
      .def_property_readonly("codebook_vars", [](const gpqe::QuantizedEmbedding& q)
                                                  -> py::object {
        if (!q.codebook_vars) return py::none();
        return to_array(*q.codebook_vars, q.codebook_blocks() * q.clusters,
                        q.group_width());
      })
      .def("__eq__", [](const gpqe::QuantizedEmbedding& a,
                        const gpqe::QuantizedEmbedding& b) { return a == b; });

  auto compress = [](bool gaussian) {
    return [gaussian](const gpqe::EmbeddingMatrix& e, const std::string& scheme,
                      std::size_t groups, std::size_t clusters, std::uint64_t seed,
                      std::size_t restarts, std::size_t max_iter, double rel_tol) {
      const gpqe::PartitionScheme ps{parse_kind(scheme), groups};
      const auto opts = compress_options(seed, restarts, max_iter, rel_tol);
      return gaussian ? gpqe::gpq_compress(e, ps, clusters, opts)
                      : gpqe::pq_compress(e, ps, clusters, opts);
    };
  };
  m.def("pq_compress", compress(false), py::arg("matrix"), py::arg("scheme"),
        py::arg("groups"), py::arg("clusters"), py::arg("seed") = 0,
        py::arg("restarts") = 1, py::arg("max_iter") = 100, py::arg("rel_tol") = 1e-6);
  m.def("gpq_compress", compress(true), py::arg("matrix"), py::arg("scheme"),
        py::arg("groups"), py::arg("clusters"), py::arg("seed") = 0,
        py::arg("restarts") = 1, py::arg("max_iter") = 100, py::arg("rel_tol") = 1e-6);

  m.def("reconstruct", [](const gpqe::QuantizedEmbedding& q, const std::string& mode,
                          std::uint64_t seed) {
    return gpqe::reconstruct(q, parse_mode(mode), seed);
  }, py::arg("q"), py::arg("mode") = "mean", py::arg("seed") = 0);

  m.def("size_report", py::overload_cast<const gpqe::QuantizedEmbedding&>(
                           &gpqe::size_report), py::arg("q"));
  m.def("size_report_for", [](std::size_t rows, std::size_t cols,
                              const std::string& scheme, std::size_t groups,
                              std::size_t clusters, bool gaussian) {
    return gpqe::size_report(gpqe::SizeConfig{
        rows, cols, gpqe::PartitionScheme{parse_kind(scheme), groups}, clusters,
        gaussian});
  }, py::arg("rows"), py::arg("cols"), py::arg("scheme"), py::arg("groups"),
     py::arg("clusters"), py::arg("gaussian"));

  m.def("encode", [](const gpqe::QuantizedEmbedding& q) {
    const auto bytes = gpqe::encode(q);
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }, py::arg("q"));
  m.def("decode", [](const py::bytes& data) {
    const std::string_view view = data;
    return gpqe::decode(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(view.data()), view.size()));
  }, py::arg("data"));

  m.def("rwe_generate", [](std::size_t rows, std::size_t cols, std::uint64_t seed) {
    return gpqe::rwe_generate(gpqe::RweConfig{rows, cols, seed, std::nullopt});
  }, py::arg("rows"), py::arg("cols"), py::arg("seed") = 0);
  m.def("projection_init", [](std::size_t n, std::size_t mdim, std::uint64_t seed) {
    return to_array(gpqe::projection_init(n, mdim, seed), n, mdim);
  }, py::arg("n"), py::arg("m"), py::arg("seed") = 0);

  py::class_<gpqe::FidelityReport>(m, "FidelityReport")
      .def_readonly("rmse", &gpqe::FidelityReport::rmse)
      .def_readonly("mean_cosine", &gpqe::FidelityReport::mean_cosine)
      .def_readonly("nn_overlap_at_k", &gpqe::FidelityReport::nn_overlap_at_k)
      .def_readonly("k", &gpqe::FidelityReport::k);
  m.def("fidelity", &gpqe::fidelity, py::arg("original"), py::arg("reconstructed"),
        py::arg("k"));
}
