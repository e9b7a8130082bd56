// nli/pipeline.hpp

// Copyright 2026  nli-ivector authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef NLI_PIPELINE_HPP_
#define NLI_PIPELINE_HPP_

#include <string>
#include <utility>
#include <vector>

#include "nli/backend.hpp"
#include "nli/frontend.hpp"
#include "nli/gmm.hpp"
#include "nli/ivector.hpp"

namespace nli {

enum class Split { kTrain, kDev, kTest };

Split ParseSplit(const std::string &name);
std::string SplitName(Split split);

struct ManifestEntry {
  std::string audio_path;
  std::string label;
  Split split = Split::kTrain;
};

/// CSV with header `path,label,split`; paths must be unique.
struct Manifest {
  std::vector<ManifestEntry> entries;

  std::vector<const ManifestEntry *> ForSplit(Split split) const;
  /// Labels in first-appearance order over the whole manifest.
  std::vector<std::string> Labels() const;
};

Manifest LoadManifest(const std::string &path);
void SaveManifest(const Manifest &manifest, const std::string &path);

struct PipelineConfig {
  FrontendConfig frontend;
  EmConfig ubm;
  int tv_rank = 50;
  int tv_iterations = 5;
  std::vector<TransformKind> chain = {TransformKind::kLda, TransformKind::kPca,
                                      TransformKind::kWccn};
  int lda_dim = 0;  // 0 = C-1
  int pca_dim = 0;  // 0 = keep all
  ScoreMode score_mode = ScoreMode::kPlda;
  bool length_norm = false;
  double relevance = 16.0;
  uint64_t seed = 0;

  /// Loads defaults overridden by a key=value file (see README for keys).
  static PipelineConfig FromFile(const std::string &path);
  static PipelineConfig FromText(const std::string &text);
  std::string ToText() const;
};

/// Everything a trained pipeline needs at inference time.
struct ModelBundle {
  static constexpr int kFormatVersion = 1;

  DiagonalGmm ubm;
  TotalVariabilityModel tv;
  std::vector<LinearTransform> transforms;
  ClassModels class_models;
  PldaModel plda;
  PipelineConfig config;
};

struct EvaluationReport {
  std::vector<std::string> labels;
  double accuracy = 0.0;
  Eigen::MatrixXi confusion;  // rows: true class, cols: predicted
  std::vector<double> per_class_recall;
  std::string config_echo;

  std::string ToText() const;
  std::string ToCsv() const;
};

struct GridCell {
  int n_components = 0;
  int tv_rank = 0;
  double accuracy = -1.0;  // negative when the cell failed
  std::string error;
};

/// features -> UBM -> stats -> T -> i-vectors -> transforms -> class means
/// -> PLDA, over the manifest's train split. Deterministic per
/// (manifest, config).
ModelBundle TrainPipeline(const Manifest &manifest,
                          const PipelineConfig &config);

EvaluationReport EvaluatePipeline(const ModelBundle &bundle,
                                  const Manifest &manifest, Split split);

/// Scores one WAV against every class model; scores follow bundle label
/// order.
std::pair<std::string, Vector> PredictOne(const ModelBundle &bundle,
                                          const std::string &wav_path);

/// One full train + dev-evaluate per (K, R) cell; failed cells are recorded
/// and the sweep continues.
std::vector<GridCell> GridSearch(const Manifest &manifest,
                                 const PipelineConfig &base_config,
                                 const std::vector<int> &k_values,
                                 const std::vector<int> &r_values);

std::string GridTableText(const std::vector<GridCell> &cells);
std::string GridTableCsv(const std::vector<GridCell> &cells);

/// Bundle directory: a `meta` key=value file (version, shapes, label order,
/// config snapshot, CRC-32 per tensor) plus one raw little-endian float64
/// tensor file per array. Round-trips bit-exactly.
void PersistBundle(const ModelBundle &bundle, const std::string &dir);
ModelBundle LoadBundle(const std::string &dir);

}  // namespace nli

#endif  // NLI_PIPELINE_HPP_
