// tests/acceptance.cpp

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

// Integration acceptance suite: one pass/fail line per criterion, exit code
// equals the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nli/synth.hpp"

using namespace nli;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void Criterion(const std::string &name, const std::function<void()> &body) {
  try {
    body();
    std::printf("PASS  %s\n", name.c_str());
  } catch (const std::exception &e) {
    std::printf("FAIL  %s: %s\n", name.c_str(), e.what());
    ++g_failures;
  }
  std::fflush(stdout);
}

void Require(bool cond, const std::string &msg) {
  if (!cond) throw std::runtime_error(msg);
}

double Seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string FreshDir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / "nli_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

std::vector<char> Slurp(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// ---- criterion bodies ----

void EndToEndAccuracy() {
  auto start = std::chrono::steady_clock::now();
  std::string dir = FreshDir("corpus11");
  SynthSpec spec;
  spec.n_classes = 11;
  spec.train_per_class = 10;
  spec.dev_per_class = 3;
  spec.duration_s = 3.0;
  spec.noise_level = 0.1;
  spec.seed = 20260824;
  Manifest manifest = GenerateCorpus(spec, dir);

  PipelineConfig config;  // defaults: MFCC, K=32, R=50
  config.seed = 1;
  Require(config.ubm.n_components == 32, "default K is not 32");
  Require(config.tv_rank == 50, "default R is not 50");

  ModelBundle mfcc = TrainPipeline(manifest, config);
  double acc_mfcc = EvaluatePipeline(mfcc, manifest, Split::kDev).accuracy;
  Require(acc_mfcc >= 0.90, "MFCC dev accuracy " + std::to_string(acc_mfcc) +
                                " below 0.90");

  PipelineConfig gfcc_config = config;
  gfcc_config.frontend.family = FilterbankFamily::kGammatone;
  ModelBundle gfcc = TrainPipeline(manifest, gfcc_config);
  double acc_gfcc = EvaluatePipeline(gfcc, manifest, Split::kDev).accuracy;
  Require(std::abs(acc_gfcc - acc_mfcc) <= 0.15,
          "GFCC accuracy " + std::to_string(acc_gfcc) +
              " deviates from MFCC " + std::to_string(acc_mfcc) +
              " by more than 0.15");

  double elapsed = Seconds(start);
  Require(elapsed <= 600.0,
          "runtime " + std::to_string(elapsed) + "s exceeds 10 minutes");
  std::printf("      (mfcc %.3f, gfcc %.3f, %.1fs)\n", acc_mfcc, acc_gfcc,
              elapsed);
}

void DefaultConfigFidelity() {
  FrontendConfig cfg;
  Require(cfg.n_bands == 26, "bands != 26");
  Require(cfg.fmin_hz == 20.0, "fmin != 20 Hz");
  Require(cfg.fmax_hz == 8000.0, "fmax != 8000 Hz");
  Require(cfg.n_ceps == 20, "cepstra != 20");
  Require(cfg.window_ms == 60.0, "window != 60 ms");
  Require(cfg.hop_ms == 10.0, "hop != 10 ms");
  Require(cfg.dct_type == 3, "DCT type != 3");
  Require(cfg.delta_width == 9, "delta width != 9");

  // snapshot: the serialized default config carries the same eight values
  std::string snapshot = PipelineConfig().ToText();
  for (const char *line :
       {"n_bands=26", "fmin=20", "fmax=8000", "n_ceps=20", "window_ms=60",
        "hop_ms=10", "dct_type=3", "delta_width=9"})
    Require(snapshot.find(line) != std::string::npos,
            std::string("snapshot missing ") + line);

  AudioBuffer audio;
  audio.sample_rate = 16000;
  audio.samples.resize(16000);
  Rng rng(3);
  for (double &v : audio.samples) v = 0.1 * rng.NextGaussian();
  FeatureMatrix f = ExtractFeatures(audio, cfg);
  Require(f.frames.cols() == 60, "feature column count != 60");
}

void EmMonotonicity() {
  auto start = std::chrono::steady_clock::now();
  const int ks[] = {2, 4, 8};
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + trial);
    Matrix frames(500, 4);
    for (int i = 0; i < 500; ++i)
      for (int j = 0; j < 4; ++j)
        frames(i, j) = 2.0 * rng.NextGaussian() + (i % 3);
    EmConfig cfg;
    cfg.n_components = ks[trial % 3];
    cfg.n_iterations = 8;
    cfg.seed = trial;
    std::vector<double> ll;
    EmTrain(InitializeGmm(frames, cfg), frames, cfg, &ll);
    for (size_t i = 1; i < ll.size(); ++i)
      Require(ll[i] >= ll[i - 1] - 1e-8 * std::abs(ll[i - 1]),
              "log-likelihood decreased at trial " + std::to_string(trial) +
                  " iteration " + std::to_string(i));
  }
  double elapsed = Seconds(start);
  Require(elapsed < 30.0, "EM runtime " + std::to_string(elapsed) + "s");
}

void IvectorCorrectness() {
  auto start = std::chrono::steady_clock::now();

  // exact scalar case
  TotalVariabilityModel tv;
  tv.ubm.weights = Vector::Ones(1);
  tv.ubm.means = Matrix::Zero(1, 1);
  tv.ubm.variances = Matrix::Ones(1, 1);
  tv.rank = 1;
  tv.t_matrix = Matrix::Ones(1, 1);
  BaumWelchStats scalar;
  scalar.n = Vector::Constant(1, 4.0);
  scalar.f = Matrix::Constant(1, 1, 2.0);
  Require(std::abs(ExtractIvector(tv, scalar)[0] - 0.4) < 1e-12,
          "scalar closed form != 0.4");
  tv.t_matrix.setZero();
  Require(ExtractIvector(tv, scalar).cwiseAbs().maxCoeff() == 0.0,
          "T=0 does not give w=0");

  Rng rng(555);
  int checked = 0;
  while (checked < 50) {
    int k = 1 + static_cast<int>(rng.NextBelow(5));
    int d = 1 + static_cast<int>(rng.NextBelow(4));
    int r = 1 + static_cast<int>(rng.NextBelow(3));
    if (k * d > 32) continue;
    TotalVariabilityModel m;
    m.ubm.weights = Vector::Constant(k, 1.0 / k);
    m.ubm.means = Matrix::Zero(k, d);
    m.ubm.variances.resize(k, d);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j)
        m.ubm.variances(i, j) = 0.5 + rng.NextDouble();
    m.rank = r;
    m.t_matrix.resize(k * d, r);
    for (int i = 0; i < k * d; ++i)
      for (int j = 0; j < r; ++j) m.t_matrix(i, j) = rng.NextGaussian();
    BaumWelchStats stats;
    stats.n.resize(k);
    stats.f.resize(k, d);
    for (int i = 0; i < k; ++i) {
      stats.n[i] = 10.0 * rng.NextDouble();
      for (int j = 0; j < d; ++j) stats.f(i, j) = rng.NextGaussian();
    }
    Vector closed = ExtractIvector(m, stats);
    Vector oracle = IvectorPosteriorOracle(m, stats);
    double rel = (closed - oracle).norm() / std::max(closed.norm(), 1e-12);
    Require(rel <= 1e-6, "oracle mismatch " + std::to_string(rel) +
                             " at instance " + std::to_string(checked));
    ++checked;
  }
  double elapsed = Seconds(start);
  Require(elapsed < 10.0, "oracle runtime " + std::to_string(elapsed) + "s");
}

void BackendProperties() {
  // WCCN defining property
  Rng rng(808);
  const int per = 25, classes = 4, d = 3;
  Matrix v(per * classes, d);
  std::vector<std::string> labels;
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per; ++i) {
      for (int j = 0; j < d; ++j)
        v(c * per + i, j) = 4.0 * c + rng.NextGaussian();
      labels.push_back("c" + std::to_string(c));
    }
  }
  LinearTransform wccn = FitWccn(v, labels);
  Matrix transformed(v.rows(), d);
  for (int i = 0; i < v.rows(); ++i)
    transformed.row(i) =
        ApplyTransform(wccn, v.row(i).transpose()).transpose();
  Matrix avg = Matrix::Zero(d, d);
  for (int c = 0; c < classes; ++c) {
    Matrix block = transformed.middleRows(c * per, per);
    Vector mean = block.colwise().mean();
    Matrix centered = block.rowwise() - mean.transpose();
    avg += centered.transpose() * centered / per;
  }
  avg /= classes;
  Require((avg - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-6,
          "WCCN post-transform covariance not identity");

  // PLDA symmetry and zero-between collapse
  PldaModel plda;
  plda.mu = Vector::Zero(2);
  plda.sigma_within = Matrix::Identity(2, 2) * 1.3;
  plda.sigma_between = Matrix::Identity(2, 2) * 0.7;
  for (int i = 0; i < 20; ++i) {
    Vector x(2), y(2);
    x << rng.NextGaussian(), rng.NextGaussian();
    y << rng.NextGaussian(), rng.NextGaussian();
    Require(std::abs(Score(plda, x, y, ScoreMode::kPlda) -
                     Score(plda, y, x, ScoreMode::kPlda)) <= 1e-10,
            "PLDA score asymmetric");
  }
  plda.sigma_between.setZero();
  for (int i = 0; i < 20; ++i) {
    Vector x(2), y(2);
    x << rng.NextGaussian(), rng.NextGaussian();
    y << rng.NextGaussian(), rng.NextGaussian();
    Require(std::abs(Score(plda, x, y, ScoreMode::kPlda)) <= 1e-10,
            "LLR not zero with zero between-class covariance");
  }

  // classify tie-break and monotone invariance
  Vector scores(3);
  scores << 0.9, 0.9, 0.1;
  Require(Classify(scores) == 0, "tie-break not lowest index");
  Vector shifted = scores.array() * 3.0 + 5.0;
  Require(Classify(shifted) == Classify(scores),
          "monotone transform changed the argmax");

  // LDA separating axis on the isotropic 2-class construction
  Matrix iso(8, 2);
  iso << -3, 1, -3, -1, -2, 0, -4, 0, 3, 1, 3, -1, 2, 0, 4, 0;
  std::vector<std::string> iso_labels = {"a", "a", "a", "a",
                                         "b", "b", "b", "b"};
  LinearTransform lda = FitLda(iso, iso_labels, 1);
  Vector dir = lda.matrix.row(0).normalized();
  double angular_error = std::abs(std::atan2(dir[1], std::abs(dir[0])));
  Require(angular_error <= 1e-6, "LDA axis angular error " +
                                     std::to_string(angular_error));
}

void DeterminismAndPersistence() {
  std::string dir = FreshDir("corpus4");
  SynthSpec spec;
  spec.n_classes = 4;
  spec.train_per_class = 4;
  spec.dev_per_class = 1;
  spec.duration_s = 1.0;
  spec.noise_level = 0.05;
  spec.seed = 99;
  Manifest manifest = GenerateCorpus(spec, dir);

  PipelineConfig config;
  config.ubm.n_components = 8;
  config.ubm.n_iterations = 4;
  config.tv_rank = 8;
  config.tv_iterations = 3;
  config.seed = 5;

  std::string b1 = FreshDir("bundle_a");
  std::string b2 = FreshDir("bundle_b");
  PersistBundle(TrainPipeline(manifest, config), b1);
  PersistBundle(TrainPipeline(manifest, config), b2);
  for (const auto &entry : fs::directory_iterator(b1)) {
    std::string name = entry.path().filename().string();
    Require(Slurp(b1 + "/" + name) == Slurp(b2 + "/" + name),
            "bundle file differs between identical runs: " + name);
  }

  ModelBundle loaded = LoadBundle(b1);
  ModelBundle original = TrainPipeline(manifest, config);
  Require((loaded.tv.t_matrix - original.tv.t_matrix).cwiseAbs().maxCoeff() ==
              0.0,
          "bundle round-trip not bit-exact");

  // corrupt one tensor byte
  {
    std::fstream f(b1 + "/ubm_means.f64",
                   std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(3);
    char byte = 0x7f;
    f.write(&byte, 1);
  }
  bool caught = false;
  try {
    LoadBundle(b1);
  } catch (const DataError &e) {
    caught = std::string(e.what()).find("checksum") != std::string::npos;
  }
  Require(caught, "corrupted tensor not detected by checksum");
}

void GridHarness() {
  std::string dir = FreshDir("corpus_grid");
  SynthSpec spec;
  spec.n_classes = 3;
  spec.train_per_class = 4;
  spec.dev_per_class = 2;
  spec.duration_s = 1.0;
  spec.noise_level = 0.05;
  spec.seed = 7;
  Manifest manifest = GenerateCorpus(spec, dir);

  PipelineConfig config;
  config.ubm.n_iterations = 3;
  config.tv_iterations = 2;
  config.seed = 3;
  std::vector<GridCell> cells = GridSearch(manifest, config, {8, 16}, {5, 10});
  Require(cells.size() == 4, "expected 4 grid cells");
  for (const auto &cell : cells) {
    Require(cell.error.empty(), "grid cell failed: " + cell.error);
    Require(cell.accuracy >= 0.0 && cell.accuracy <= 1.0,
            "accuracy outside [0,1]");
  }
  // table structure: header + one row per Gaussian count, R columns
  std::string table = GridTableText(cells);
  int lines = 0;
  std::istringstream ss(table);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty()) ++lines;
  Require(lines == 3, "table should have header plus 2 K-rows");
  Require(table.find("8") != std::string::npos &&
              table.find("16") != std::string::npos,
          "table missing Gaussian-count rows");
}

}  // namespace

int main() {
  Criterion("end-to-end synthetic accuracy (MFCC >= 0.90, GFCC within 0.15)",
            EndToEndAccuracy);
  Criterion("default front-end parameter fidelity and 60 feature columns",
            DefaultConfigFidelity);
  Criterion("EM log-likelihood monotonicity over 20 random datasets",
            EmMonotonicity);
  Criterion("closed-form i-vector matches the numeric posterior oracle",
            IvectorCorrectness);
  Criterion("backend properties (WCCN, PLDA, classify, LDA axis)",
            BackendProperties);
  Criterion("determinism, lossless persistence, checksum detection",
            DeterminismAndPersistence);
  Criterion("grid harness structure over {8,16} x {5,10}", GridHarness);
  return g_failures;
}
