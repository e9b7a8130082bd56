// tools/nli_main.cpp

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

// Batch CLI over the C API. Exit codes: 0 success, 1 usage error,
// 2 data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nli/nli.h"

namespace {

char g_err[1024];

int Report(int rc) {
  if (rc != NLI_OK) std::cerr << "error: " << g_err << "\n";
  return rc;
}

void PrintFile(const std::string &path) {
  std::ifstream f(path);
  std::cout << f.rdbuf();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"i-vector native-language-identification pipeline"};
  app.require_subcommand(1);

  std::string manifest, config, bundle, split = "dev", out, wav;
  std::string k_grid = "8,16", r_grid = "5,10";
  int classes = 11, n_train = 10, n_dev = 3, n_test = 0, rate = 16000;
  double duration = 3.0, noise = 0.1;
  unsigned long long seed = 0;

  auto *train = app.add_subcommand("train", "train the full pipeline");
  train->add_option("--manifest", manifest, "manifest CSV")->required();
  train->add_option("--config", config, "key=value config file");
  train->add_option("--bundle", bundle, "output bundle directory")->required();

  auto *eval = app.add_subcommand("eval", "evaluate a manifest split");
  eval->add_option("--bundle", bundle, "trained bundle directory")->required();
  eval->add_option("--manifest", manifest, "manifest CSV")->required();
  eval->add_option("--split", split, "train|dev|test (default dev)");
  eval->add_option("--out", out, "report path prefix (.txt/.csv appended)");

  auto *predict = app.add_subcommand("predict", "classify one WAV");
  predict->add_option("--bundle", bundle, "trained bundle directory")
      ->required();
  predict->add_option("wav", wav, "input WAV file")->required();

  auto *grid = app.add_subcommand("grid", "K x R tuning sweep");
  grid->add_option("--manifest", manifest, "manifest CSV")->required();
  grid->add_option("--config", config, "key=value config file");
  grid->add_option("--k", k_grid, "comma-separated Gaussian counts");
  grid->add_option("--r", r_grid, "comma-separated subspace ranks");
  grid->add_option("--out", out, "table path prefix (.txt/.csv appended)");

  auto *synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--out", out, "output directory")->required();
  synth->add_option("--classes", classes, "number of classes");
  synth->add_option("--train", n_train, "train utterances per class");
  synth->add_option("--dev", n_dev, "dev utterances per class");
  synth->add_option("--test", n_test, "test utterances per class");
  synth->add_option("--duration", duration, "seconds per utterance");
  synth->add_option("--rate", rate, "sample rate in Hz");
  synth->add_option("--noise", noise, "additive noise level");
  synth->add_option("--seed", seed, "corpus seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : NLI_ERR_USAGE;
  }

  const char *cfg = config.empty() ? nullptr : config.c_str();

  if (*train) {
    int rc = nli_train(manifest.c_str(), cfg, bundle.c_str(), g_err,
                       sizeof(g_err));
    if (rc == NLI_OK) std::cout << "bundle written to " << bundle << "\n";
    return Report(rc);
  }

  if (*eval) {
    nli_bundle *handle = nullptr;
    int rc = nli_bundle_open(bundle.c_str(), &handle, g_err, sizeof(g_err));
    if (rc != NLI_OK) return Report(rc);
    std::string txt = out.empty() ? "" : out + ".txt";
    std::string csv = out.empty() ? "" : out + ".csv";
    double accuracy = 0.0;
    rc = nli_evaluate(handle, manifest.c_str(), split.c_str(),
                      txt.empty() ? nullptr : txt.c_str(),
                      csv.empty() ? nullptr : csv.c_str(), &accuracy, g_err,
                      sizeof(g_err));
    nli_bundle_close(handle);
    if (rc == NLI_OK) {
      if (!txt.empty()) PrintFile(txt);
      else std::printf("accuracy %.4f\n", accuracy);
    }
    return Report(rc);
  }

  if (*predict) {
    nli_bundle *handle = nullptr;
    int rc = nli_bundle_open(bundle.c_str(), &handle, g_err, sizeof(g_err));
    if (rc != NLI_OK) return Report(rc);
    int n = nli_bundle_num_classes(handle);
    std::vector<double> scores(n);
    char label[256];
    rc = nli_predict(handle, wav.c_str(), label, sizeof(label), scores.data(),
                     scores.size(), g_err, sizeof(g_err));
    if (rc == NLI_OK) {
      std::cout << label << "\n";
      for (int i = 0; i < n; ++i)
        std::printf("%-8s %.6f\n", nli_bundle_label(handle, i), scores[i]);
    }
    nli_bundle_close(handle);
    return Report(rc);
  }

  if (*grid) {
    std::string txt = out.empty() ? "grid.txt" : out + ".txt";
    std::string csv = out.empty() ? "grid.csv" : out + ".csv";
    int rc = nli_grid(manifest.c_str(), cfg, k_grid.c_str(), r_grid.c_str(),
                      txt.c_str(), csv.c_str(), g_err, sizeof(g_err));
    if (rc == NLI_OK) PrintFile(txt);
    return Report(rc);
  }

  if (*synth) {
    int rc = nli_synth(out.c_str(), classes, n_train, n_dev, n_test, duration,
                       rate, noise, seed, g_err, sizeof(g_err));
    if (rc == NLI_OK)
      std::cout << "corpus written to " << out << " (manifest.csv inside)\n";
    return Report(rc);
  }

  return NLI_ERR_USAGE;
}
