// src/capi.cpp

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

#include "nli/nli.h"

#include <cstring>
#include <fstream>

#include "nli/pipeline.hpp"
#include "nli/synth.hpp"

struct nli_bundle {
  nli::ModelBundle bundle;
};

namespace {

void SetError(char *err, size_t err_len, const char *msg) {
  if (!err || err_len == 0) return;
  std::strncpy(err, msg, err_len - 1);
  err[err_len - 1] = '\0';
}

template <typename Fn>
int Guard(char *err, size_t err_len, Fn &&fn) {
  try {
    fn();
    return NLI_OK;
  } catch (const nli::ConfigError &e) {
    SetError(err, err_len, e.what());
    return NLI_ERR_USAGE;
  } catch (const std::exception &e) {
    SetError(err, err_len, e.what());
    return NLI_ERR_DATA;
  }
}

void RequireArg(const void *p, const char *name) {
  if (!p) throw nli::ConfigError(std::string("null argument: ") + name);
}

void WriteTextFile(const std::string &path, const std::string &text) {
  std::ofstream f(path);
  if (!f) throw nli::DataError("cannot write " + path);
  f << text;
}

std::vector<int> ParseIntCsv(const char *csv, const char *name) {
  RequireArg(csv, name);
  std::vector<int> out;
  std::string cur;
  std::string s(csv);
  s += ',';
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) {
        try {
          out.push_back(std::stoi(cur));
        } catch (const std::exception &) {
          throw nli::ConfigError(std::string("bad integer in ") + name +
                                 ": '" + cur + "'");
        }
        cur.clear();
      }
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  return out;
}

nli::PipelineConfig LoadConfigOrDefault(const char *config_path) {
  return config_path ? nli::PipelineConfig::FromFile(config_path)
                     : nli::PipelineConfig();
}

}  // namespace

extern "C" {

int nli_synth(const char *out_dir, int n_classes, int n_train, int n_dev,
              int n_test, double duration_s, int sample_rate,
              double noise_level, unsigned long long seed, char *err,
              size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(out_dir, "out_dir");
    nli::SynthSpec spec;
    spec.n_classes = n_classes;
    spec.train_per_class = n_train;
    spec.dev_per_class = n_dev;
    spec.test_per_class = n_test;
    spec.duration_s = duration_s;
    spec.sample_rate = sample_rate;
    spec.noise_level = noise_level;
    spec.seed = seed;
    nli::GenerateCorpus(spec, out_dir);
  });
}

int nli_train(const char *manifest_path, const char *config_path,
              const char *bundle_dir, char *err, size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(manifest_path, "manifest_path");
    RequireArg(bundle_dir, "bundle_dir");
    nli::Manifest manifest = nli::LoadManifest(manifest_path);
    nli::PipelineConfig config = LoadConfigOrDefault(config_path);
    nli::ModelBundle bundle = nli::TrainPipeline(manifest, config);
    nli::PersistBundle(bundle, bundle_dir);
  });
}

int nli_bundle_open(const char *bundle_dir, nli_bundle **out, char *err,
                    size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(bundle_dir, "bundle_dir");
    RequireArg(out, "out");
    auto *handle = new nli_bundle{nli::LoadBundle(bundle_dir)};
    *out = handle;
  });
}

void nli_bundle_close(nli_bundle *bundle) { delete bundle; }

int nli_bundle_num_classes(const nli_bundle *bundle) {
  if (!bundle) return -1;
  return static_cast<int>(bundle->bundle.class_models.labels.size());
}

const char *nli_bundle_label(const nli_bundle *bundle, int idx) {
  if (!bundle || idx < 0 ||
      idx >= static_cast<int>(bundle->bundle.class_models.labels.size()))
    return nullptr;
  return bundle->bundle.class_models.labels[idx].c_str();
}

int nli_evaluate(const nli_bundle *bundle, const char *manifest_path,
                 const char *split, const char *report_txt_path,
                 const char *report_csv_path, double *accuracy, char *err,
                 size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(bundle, "bundle");
    RequireArg(manifest_path, "manifest_path");
    RequireArg(split, "split");
    nli::Manifest manifest = nli::LoadManifest(manifest_path);
    nli::EvaluationReport report = nli::EvaluatePipeline(
        bundle->bundle, manifest, nli::ParseSplit(split));
    if (report_txt_path) WriteTextFile(report_txt_path, report.ToText());
    if (report_csv_path) WriteTextFile(report_csv_path, report.ToCsv());
    if (accuracy) *accuracy = report.accuracy;
  });
}

int nli_predict(const nli_bundle *bundle, const char *wav_path,
                char *label_buf, size_t label_len, double *scores,
                size_t scores_len, char *err, size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(bundle, "bundle");
    RequireArg(wav_path, "wav_path");
    auto [label, score_vec] = nli::PredictOne(bundle->bundle, wav_path);
    if (scores) {
      if (scores_len < static_cast<size_t>(score_vec.size()))
        throw nli::ConfigError("scores buffer too small");
      for (int i = 0; i < score_vec.size(); ++i) scores[i] = score_vec[i];
    }
    if (label_buf) {
      if (label_len <= label.size())
        throw nli::ConfigError("label buffer too small");
      std::memcpy(label_buf, label.c_str(), label.size() + 1);
    }
  });
}

int nli_grid(const char *manifest_path, const char *config_path,
             const char *k_values_csv, const char *r_values_csv,
             const char *table_txt_path, const char *table_csv_path, char *err,
             size_t err_len) {
  return Guard(err, err_len, [&] {
    RequireArg(manifest_path, "manifest_path");
    nli::Manifest manifest = nli::LoadManifest(manifest_path);
    nli::PipelineConfig config = LoadConfigOrDefault(config_path);
    std::vector<int> ks = ParseIntCsv(k_values_csv, "k_values");
    std::vector<int> rs = ParseIntCsv(r_values_csv, "r_values");
    std::vector<nli::GridCell> cells =
        nli::GridSearch(manifest, config, ks, rs);
    if (table_txt_path)
      WriteTextFile(table_txt_path, nli::GridTableText(cells));
    if (table_csv_path)
      WriteTextFile(table_csv_path, nli::GridTableCsv(cells));
  });
}

}  // extern "C"
