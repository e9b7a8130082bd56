// tests/test_pipeline.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "nli/synth.hpp"

using namespace nli;
namespace fs = std::filesystem;

namespace {

std::string FreshDir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / "nli_pipeline_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

/// Small separable corpus + config shared by the pipeline tests.
struct Fixture {
  Manifest manifest;
  PipelineConfig config;

  Fixture() {
    static std::string dir;
    static Manifest cached;
    if (dir.empty()) {
      dir = FreshDir("corpus");
      SynthSpec spec;
      spec.n_classes = 3;
      spec.train_per_class = 4;
      spec.dev_per_class = 2;
      spec.duration_s = 1.0;
      spec.noise_level = 0.0;
      spec.seed = 42;
      cached = GenerateCorpus(spec, dir);
    }
    manifest = cached;
    config.ubm.n_components = 8;
    config.ubm.n_iterations = 4;
    config.tv_rank = 10;
    config.tv_iterations = 3;
    config.seed = 7;
  }
};

std::vector<char> Slurp(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("manifest parsing") {
  std::string dir = FreshDir("manifest");
  auto write = [&](const std::string &text) {
    std::ofstream f(dir + "/m.csv");
    f << text;
    return dir + "/m.csv";
  };
  SUBCASE("happy path") {
    Manifest m = LoadManifest(
        write("path,label,split\na.wav,ARA,train\nb.wav,CHI,dev\n"));
    REQUIRE(m.entries.size() == 2);
    CHECK(m.entries[0].label == "ARA");
    CHECK(m.entries[1].split == Split::kDev);
    CHECK(m.Labels() == std::vector<std::string>{"ARA", "CHI"});
  }
  SUBCASE("missing header") {
    CHECK_THROWS_AS(LoadManifest(write("a.wav,ARA,train\n")), DataError);
  }
  SUBCASE("path containing a comma is rejected") {
    CHECK_THROWS_AS(
        LoadManifest(write("path,label,split\na,b.wav,ARA,train\n")),
        DataError);
  }
  SUBCASE("duplicate paths are rejected") {
    CHECK_THROWS_AS(
        LoadManifest(
            write("path,label,split\na.wav,ARA,train\na.wav,CHI,dev\n")),
        DataError);
  }
  SUBCASE("unknown split is rejected") {
    CHECK_THROWS_AS(
        LoadManifest(write("path,label,split\na.wav,ARA,validation\n")),
        DataError);
  }
}

TEST_CASE("pipeline config round-trips through text") {
  PipelineConfig cfg;
  cfg.ubm.n_components = 17;
  cfg.tv_rank = 33;
  cfg.frontend.family = FilterbankFamily::kGammatone;
  cfg.length_norm = true;
  cfg.seed = 5;
  PipelineConfig back = PipelineConfig::FromText(cfg.ToText());
  CHECK(back.ToText() == cfg.ToText());
  CHECK(back.ubm.n_components == 17);
  CHECK(back.tv_rank == 33);
  CHECK(back.frontend.family == FilterbankFamily::kGammatone);
  CHECK(back.length_norm);

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(PipelineConfig::FromText("no_such_key=1\n"), ConfigError);
  }
}

TEST_CASE("synthetic corpus generation") {
  std::string dir = FreshDir("synth_det");
  SynthSpec spec;
  spec.n_classes = 2;
  spec.train_per_class = 2;
  spec.dev_per_class = 1;
  spec.duration_s = 0.5;
  spec.seed = 9;
  Manifest m = GenerateCorpus(spec, dir);
  CHECK(m.entries.size() == 6);
  CHECK(m.ForSplit(Split::kTrain).size() == 4);
  CHECK(m.ForSplit(Split::kDev).size() == 2);
  CHECK(fs::exists(dir + "/manifest.csv"));

  SUBCASE("same seed reproduces byte-identical WAVs") {
    std::string dir2 = FreshDir("synth_det2");
    Manifest m2 = GenerateCorpus(spec, dir2);
    for (size_t i = 0; i < m.entries.size(); ++i) {
      auto a = Slurp(m.entries[i].audio_path);
      auto b = Slurp(m2.entries[i].audio_path);
      CHECK(a == b);
    }
  }
}

TEST_CASE("train produces a consistent bundle") {
  Fixture fx;
  ModelBundle bundle = TrainPipeline(fx.manifest, fx.config);
  CHECK(bundle.class_models.labels.size() == 3);
  CHECK(bundle.class_models.model_vectors.cols() == 2);  // C-1 after LDA
  CHECK(bundle.ubm.NumComponents() == 8);
  CHECK(bundle.tv.t_matrix.rows() == 8 * 60);
  CHECK(bundle.tv.t_matrix.cols() == 10);
  REQUIRE(bundle.transforms.size() == 3);
  CHECK(bundle.transforms[0].kind == TransformKind::kLda);
  CHECK(bundle.transforms[1].kind == TransformKind::kPca);
  CHECK(bundle.transforms[2].kind == TransformKind::kWccn);

  SUBCASE("training split evaluates perfectly on separable data") {
    EvaluationReport report =
        EvaluatePipeline(bundle, fx.manifest, Split::kTrain);
    CHECK(report.accuracy == doctest::Approx(1.0));
  }
  SUBCASE("report accounting identities") {
    EvaluationReport report =
        EvaluatePipeline(bundle, fx.manifest, Split::kDev);
    int total = 0;
    for (int r = 0; r < report.confusion.rows(); ++r) {
      CHECK(report.confusion.row(r).sum() == 2);  // dev_per_class
      total += report.confusion.row(r).sum();
    }
    CHECK(report.accuracy ==
          doctest::Approx(static_cast<double>(report.confusion.trace()) /
                          total));
  }
  SUBCASE("empty split is an error") {
    CHECK_THROWS_WITH_AS(EvaluatePipeline(bundle, fx.manifest, Split::kTest),
                         doctest::Contains("no instances"), DataError);
  }
  SUBCASE("predict returns bundle-ordered scores") {
    auto [label, scores] =
        PredictOne(bundle, fx.manifest.entries[0].audio_path);
    CHECK(scores.size() == 3);
    CHECK(label == fx.manifest.entries[0].label);
    auto again = PredictOne(bundle, fx.manifest.entries[0].audio_path);
    CHECK(again.first == label);
    CHECK((again.second - scores).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unknown manifest label is an error") {
    Manifest bad = fx.manifest;
    bad.entries[0].label = "XXX";
    bad.entries[0].split = Split::kDev;
    CHECK_THROWS_AS(EvaluatePipeline(bundle, bad, Split::kDev), DataError);
  }
}

TEST_CASE("missing train data for a label names the label") {
  Fixture fx;
  Manifest crippled = fx.manifest;
  for (auto &e : crippled.entries)
    if (e.label == "FRE" && e.split == Split::kTrain) e.split = Split::kTest;
  CHECK_THROWS_WITH_AS(TrainPipeline(crippled, fx.config),
                       doctest::Contains("FRE"), DataError);
}

TEST_CASE("bundle persistence") {
  Fixture fx;
  ModelBundle bundle = TrainPipeline(fx.manifest, fx.config);
  std::string dir = FreshDir("bundle");
  PersistBundle(bundle, dir);

  SUBCASE("round-trip is lossless") {
    ModelBundle loaded = LoadBundle(dir);
    CHECK((loaded.ubm.means - bundle.ubm.means).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.tv.t_matrix - bundle.tv.t_matrix).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((loaded.plda.sigma_within - bundle.plda.sigma_within).cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(loaded.class_models.labels == bundle.class_models.labels);
    CHECK(loaded.config.ToText() == bundle.config.ToText());
    REQUIRE(loaded.transforms.size() == bundle.transforms.size());
    for (size_t i = 0; i < loaded.transforms.size(); ++i)
      CHECK((loaded.transforms[i].matrix - bundle.transforms[i].matrix)
                .cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("identical runs serialize byte-identically") {
    ModelBundle again = TrainPipeline(fx.manifest, fx.config);
    std::string dir2 = FreshDir("bundle2");
    PersistBundle(again, dir2);
    for (const auto &entry : fs::directory_iterator(dir)) {
      auto name = entry.path().filename().string();
      CHECK(Slurp(dir + "/" + name) == Slurp(dir2 + "/" + name));
    }
  }
  SUBCASE("corrupted tensor is caught by checksum") {
    std::fstream f(dir + "/t_matrix.f64",
                   std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(17);
    char byte = 0x5a;
    f.write(&byte, 1);
    f.close();
    CHECK_THROWS_WITH_AS(LoadBundle(dir), doctest::Contains("checksum"),
                         DataError);
  }
  SUBCASE("unknown format version is rejected") {
    std::string meta = dir + "/meta";
    auto bytes = Slurp(meta);
    std::string text(bytes.begin(), bytes.end());
    text.replace(text.find("version=1"), 9, "version=9");
    std::ofstream(meta) << text;
    CHECK_THROWS_WITH_AS(LoadBundle(dir), doctest::Contains("version"),
                         DataError);
  }
}

TEST_CASE("grid search emits one cell per combination") {
  Fixture fx;
  fx.config.ubm.n_iterations = 2;
  fx.config.tv_iterations = 2;
  std::vector<GridCell> cells =
      GridSearch(fx.manifest, fx.config, {4, 8}, {5});
  REQUIRE(cells.size() == 2);
  for (const auto &cell : cells) {
    CHECK(cell.error.empty());
    CHECK(cell.accuracy >= 0.0);
    CHECK(cell.accuracy <= 1.0);
  }
  CHECK(cells[0].n_components == 4);
  CHECK(cells[1].n_components == 8);

  SUBCASE("failed cells are recorded, sweep continues") {
    // rank larger than K*D for the small K makes that cell fail
    std::vector<GridCell> mixed =
        GridSearch(fx.manifest, fx.config, {4}, {5, 100000});
    REQUIRE(mixed.size() == 2);
    CHECK(mixed[0].error.empty());
    CHECK_FALSE(mixed[1].error.empty());
  }
  SUBCASE("empty grids are usage errors") {
    CHECK_THROWS_AS(GridSearch(fx.manifest, fx.config, {}, {5}), ConfigError);
  }
  SUBCASE("paper-scale grid values are accepted configuration") {
    PipelineConfig cfg;
    cfg.ubm.n_components = 512;
    cfg.tv_rank = 300;
    PipelineConfig parsed = PipelineConfig::FromText(cfg.ToText());
    CHECK(parsed.ubm.n_components == 512);
    CHECK(parsed.tv_rank == 300);
  }
}
