# Copyright 2026 The gpqe Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Product and Gaussian product quantization of embedding tables."""

from ._core import (
    ClusterResult,
    DataError,
    EmbeddingMatrix,
    FidelityReport,
    FormatError,
    QuantizedEmbedding,
    SizeReport,
    decode,
    encode,
    fidelity,
    gpq_compress,
    kmeans,
    load_raw,
    load_word2vec_text,
    pq_compress,
    projection_init,
    reconstruct,
    rwe_generate,
    save_raw,
    save_word2vec_text,
    size_report,
    size_report_for,
)

__all__ = [
    "ClusterResult",
    "DataError",
    "EmbeddingMatrix",
    "FidelityReport",
    "FormatError",
    "QuantizedEmbedding",
    "SizeReport",
    "decode",
    "encode",
    "fidelity",
    "gpq_compress",
    "kmeans",
    "load_raw",
    "load_word2vec_text",
    "pq_compress",
    "projection_init",
    "reconstruct",
    "rwe_generate",
    "save_raw",
    "save_word2vec_text",
    "size_report",
    "size_report_for",
]
