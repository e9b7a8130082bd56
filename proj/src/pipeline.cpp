// src/pipeline.cpp

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

#include "nli/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "nli/audio.hpp"

namespace fs = std::filesystem;

namespace nli {

namespace {

std::string Trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitString(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string KindName(TransformKind kind) {
  switch (kind) {
    case TransformKind::kLda: return "lda";
    case TransformKind::kPca: return "pca";
    case TransformKind::kWccn: return "wccn";
  }
  throw ConfigError("unknown transform kind");
}

TransformKind ParseKind(const std::string &name) {
  if (name == "lda") return TransformKind::kLda;
  if (name == "pca") return TransformKind::kPca;
  if (name == "wccn") return TransformKind::kWccn;
  throw ConfigError("unknown transform kind: " + name);
}

Vector MaybeLengthNorm(const Vector &w, bool enabled) {
  if (!enabled) return w;
  double n = w.norm();
  return n > 0.0 ? Vector(w / n) : w;
}

/// features -> stats -> i-vector -> transform chain, shared by train-time
/// scoring and inference.
Vector UtteranceEmbedding(const ModelBundle &bundle,
                          const std::string &wav_path) {
  AudioBuffer audio = LoadWav(wav_path);
  FeatureMatrix feats = ExtractFeatures(audio, bundle.config.frontend);
  BaumWelchStats stats = AccumulateBwStats(bundle.ubm, feats.frames);
  Vector w = ExtractIvector(bundle.tv, stats);
  w = MaybeLengthNorm(w, bundle.config.length_norm);
  return ApplyChain(bundle.transforms, w);
}

Vector ScoreAgainstModels(const ModelBundle &bundle, const Vector &embedding) {
  const int C = static_cast<int>(bundle.class_models.labels.size());
  Vector scores(C);
  for (int c = 0; c < C; ++c)
    scores[c] = Score(bundle.plda, bundle.class_models.model_vectors.row(c),
                      embedding, bundle.config.score_mode);
  return scores;
}

// ---- bundle tensor serialization ----

void WriteTensor(const std::string &path, const Matrix &m, std::ostream &meta,
                 const std::string &name) {
  std::vector<double> buf;
  buf.reserve(m.rows() * m.cols());
  for (long r = 0; r < m.rows(); ++r)
    for (long c = 0; c < m.cols(); ++c) buf.push_back(m(r, c));
  static_assert(sizeof(double) == 8);
  // native little-endian assumed; format is defined as little-endian
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write tensor file: " + path);
  f.write(reinterpret_cast<const char *>(buf.data()),
          static_cast<std::streamsize>(buf.size() * 8));
  uint32_t crc = Crc32(buf.data(), buf.size() * 8);
  meta << "shape." << name << "=" << m.rows() << " " << m.cols() << "\n";
  meta << "crc." << name << "=" << crc << "\n";
}

Matrix ReadTensor(const std::string &dir,
                  const std::map<std::string, std::string> &meta,
                  const std::string &name) {
  auto shape_it = meta.find("shape." + name);
  auto crc_it = meta.find("crc." + name);
  if (shape_it == meta.end() || crc_it == meta.end())
    throw DataError("bundle meta missing tensor entry: " + name);
  std::istringstream ss(shape_it->second);
  long rows = 0, cols = 0;
  ss >> rows >> cols;
  if (rows < 0 || cols < 0) throw DataError("bad tensor shape for " + name);

  std::string path = dir + "/" + name + ".f64";
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("missing tensor file: " + path);
  std::vector<double> buf(static_cast<size_t>(rows) * cols);
  f.read(reinterpret_cast<char *>(buf.data()),
         static_cast<std::streamsize>(buf.size() * 8));
  if (static_cast<size_t>(f.gcount()) != buf.size() * 8 || f.peek() != EOF)
    throw DataError("truncated or oversized tensor file: " + path);
  uint32_t crc = Crc32(buf.data(), buf.size() * 8);
  if (std::to_string(crc) != crc_it->second)
    throw DataError("checksum mismatch for tensor " + name);

  Matrix m(rows, cols);
  size_t i = 0;
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = buf[i++];
  return m;
}

}  // namespace

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "dev") return Split::kDev;
  if (name == "test") return Split::kTest;
  throw DataError("unknown split: '" + name + "'");
}

std::string SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  throw DataError("bad split value");
}

std::vector<const ManifestEntry *> Manifest::ForSplit(Split split) const {
  std::vector<const ManifestEntry *> out;
  for (const auto &e : entries)
    if (e.split == split) out.push_back(&e);
  return out;
}

std::vector<std::string> Manifest::Labels() const {
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (const auto &e : entries)
    if (seen.insert(e.label).second) labels.push_back(e.label);
  return labels;
}

Manifest LoadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest: " + path);
  Manifest manifest;
  std::string line;
  int lineno = 0;
  std::set<std::string> paths;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = Trim(line);
    if (t.empty()) continue;
    if (lineno == 1) {
      if (t != "path,label,split")
        throw DataError("manifest must start with header 'path,label,split'");
      continue;
    }
    std::vector<std::string> cols = SplitString(t, ',');
    if (cols.size() != 3)
      throw DataError("manifest line " + std::to_string(lineno) +
                      ": expected 3 comma-separated fields (paths containing "
                      "commas are not supported)");
    ManifestEntry e;
    e.audio_path = Trim(cols[0]);
    e.label = Trim(cols[1]);
    e.split = ParseSplit(Trim(cols[2]));
    if (e.audio_path.empty() || e.label.empty())
      throw DataError("manifest line " + std::to_string(lineno) +
                      ": empty path or label");
    if (!paths.insert(e.audio_path).second)
      throw DataError("duplicate manifest path: " + e.audio_path);
    manifest.entries.push_back(std::move(e));
  }
  if (manifest.entries.empty()) throw DataError("empty manifest: " + path);
  return manifest;
}

void SaveManifest(const Manifest &manifest, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write manifest: " + path);
  out << "path,label,split\n";
  for (const auto &e : manifest.entries)
    out << e.audio_path << "," << e.label << "," << SplitName(e.split) << "\n";
}

PipelineConfig PipelineConfig::FromText(const std::string &text) {
  PipelineConfig cfg;
  std::map<std::string, std::string> kv = ParseKeyValueText(text);
  std::map<std::string, std::string> frontend_kv;
  for (auto it = kv.begin(); it != kv.end();) {
    const std::string &key = it->first;
    const std::string &val = it->second;
    bool taken = true;
    try {
      if (key == "ubm_components") cfg.ubm.n_components = std::stoi(val);
      else if (key == "ubm_iterations") cfg.ubm.n_iterations = std::stoi(val);
      else if (key == "ubm_init") {
        if (val == "kmeans") cfg.ubm.init = GmmInit::kKmeans;
        else if (val == "binary_split") cfg.ubm.init = GmmInit::kBinarySplit;
        else throw ConfigError("ubm_init must be kmeans or binary_split");
      } else if (key == "variance_floor_scale") {
        cfg.ubm.variance_floor_scale = std::stod(val);
      } else if (key == "tv_rank") cfg.tv_rank = std::stoi(val);
      else if (key == "tv_iterations") cfg.tv_iterations = std::stoi(val);
      else if (key == "backend_chain") {
        cfg.chain.clear();
        if (!val.empty())
          for (const auto &name : SplitString(val, ','))
            cfg.chain.push_back(ParseKind(Trim(name)));
      } else if (key == "lda_dim") cfg.lda_dim = std::stoi(val);
      else if (key == "pca_dim") cfg.pca_dim = std::stoi(val);
      else if (key == "score_mode") {
        if (val == "plda") cfg.score_mode = ScoreMode::kPlda;
        else if (val == "cosine") cfg.score_mode = ScoreMode::kCosine;
        else throw ConfigError("score_mode must be plda or cosine");
      } else if (key == "length_norm") {
        cfg.length_norm = (val == "1" || val == "true");
      } else if (key == "relevance") cfg.relevance = std::stod(val);
      else if (key == "seed") {
        cfg.seed = std::stoull(val);
        cfg.ubm.seed = cfg.seed;
      } else taken = false;
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &) {
      throw ConfigError("bad value for " + key + ": '" + val + "'");
    }
    if (taken) it = kv.erase(it);
    else ++it;
  }
  // remaining keys go to the front-end (unknown ones rejected there)
  cfg.frontend.ApplyOverrides(kv);
  return cfg;
}

PipelineConfig PipelineConfig::FromFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return FromText(ss.str());
}

std::string PipelineConfig::ToText() const {
  std::ostringstream os;
  os << frontend.ToText();
  os << "ubm_components=" << ubm.n_components << "\n"
     << "ubm_iterations=" << ubm.n_iterations << "\n"
     << "ubm_init="
     << (ubm.init == GmmInit::kKmeans ? "kmeans" : "binary_split") << "\n"
     << "variance_floor_scale=" << FormatDouble(ubm.variance_floor_scale)
     << "\n"
     << "tv_rank=" << tv_rank << "\n"
     << "tv_iterations=" << tv_iterations << "\n";
  os << "backend_chain=";
  for (size_t i = 0; i < chain.size(); ++i)
    os << (i ? "," : "") << KindName(chain[i]);
  os << "\n";
  os << "lda_dim=" << lda_dim << "\n"
     << "pca_dim=" << pca_dim << "\n"
     << "score_mode=" << (score_mode == ScoreMode::kPlda ? "plda" : "cosine")
     << "\n"
     << "length_norm=" << (length_norm ? 1 : 0) << "\n"
     << "relevance=" << FormatDouble(relevance) << "\n"
     << "seed=" << seed << "\n";
  return os.str();
}

ModelBundle TrainPipeline(const Manifest &manifest,
                          const PipelineConfig &config) {
  auto train = manifest.ForSplit(Split::kTrain);
  if (train.empty()) throw DataError("manifest has no train entries");
  std::vector<std::string> labels = manifest.Labels();
  {
    std::set<std::string> trained;
    for (const auto *e : train) trained.insert(e->label);
    for (const auto &l : labels)
      if (!trained.count(l))
        throw DataError("label '" + l + "' has no train data");
  }

  ModelBundle bundle;
  bundle.config = config;
  bundle.config.ubm.seed = config.seed;

  // per-utterance features, manifest order
  std::vector<Matrix> features;
  std::vector<std::string> utt_labels;
  long total_frames = 0;
  for (const auto *e : train) {
    try {
      AudioBuffer audio = LoadWav(e->audio_path);
      FeatureMatrix f = ExtractFeatures(audio, config.frontend);
      total_frames += f.frames.rows();
      features.push_back(std::move(f.frames));
      utt_labels.push_back(e->label);
    } catch (const std::exception &ex) {
      throw DataError("feature extraction failed for " + e->audio_path +
                      ": " + ex.what());
    }
  }

  Matrix pooled(total_frames, features[0].cols());
  long row = 0;
  for (const auto &f : features) {
    pooled.middleRows(row, f.rows()) = f;
    row += f.rows();
  }

  try {
    DiagonalGmm init = InitializeGmm(pooled, bundle.config.ubm);
    bundle.ubm = EmTrain(init, pooled, bundle.config.ubm);
  } catch (const std::exception &ex) {
    throw DataError(std::string("UBM training failed: ") + ex.what());
  }

  std::vector<BaumWelchStats> stats;
  stats.reserve(features.size());
  for (size_t i = 0; i < features.size(); ++i) {
    try {
      stats.push_back(AccumulateBwStats(bundle.ubm, features[i]));
    } catch (const std::exception &ex) {
      throw DataError("statistics failed for " + train[i]->audio_path + ": " +
                      ex.what());
    }
  }

  TvTrainConfig tv_cfg;
  tv_cfg.rank = config.tv_rank;
  tv_cfg.n_iterations = config.tv_iterations;
  tv_cfg.seed = config.seed;
  try {
    bundle.tv = TrainTotalVariability(stats, bundle.ubm, tv_cfg);
  } catch (const std::exception &ex) {
    throw DataError(std::string("subspace training failed: ") + ex.what());
  }

  Matrix ivectors(static_cast<long>(stats.size()), config.tv_rank);
  for (size_t i = 0; i < stats.size(); ++i) {
    Vector w = ExtractIvector(bundle.tv, stats[i]);
    ivectors.row(static_cast<long>(i)) =
        MaybeLengthNorm(w, config.length_norm).transpose();
  }

  const int C = static_cast<int>(std::set<std::string>(utt_labels.begin(),
                                                       utt_labels.end())
                                     .size());
  Matrix current = ivectors;
  for (TransformKind kind : config.chain) {
    LinearTransform t;
    try {
      switch (kind) {
        case TransformKind::kLda: {
          int out_dim = config.lda_dim > 0 ? config.lda_dim : C - 1;
          t = FitLda(current, utt_labels, out_dim);
          break;
        }
        case TransformKind::kPca: {
          int d = static_cast<int>(current.cols());
          int bound = std::min<int>(static_cast<int>(current.rows()) - 1, d);
          int out_dim = config.pca_dim > 0 ? std::min(config.pca_dim, bound)
                                           : std::min(d, bound);
          t = FitPca(current, out_dim);
          break;
        }
        case TransformKind::kWccn:
          t = FitWccn(current, utt_labels);
          break;
      }
    } catch (const std::exception &ex) {
      throw DataError("backend stage " + KindName(kind) + " failed: " +
                      ex.what());
    }
    Matrix next(current.rows(), t.matrix.rows());
    for (long i = 0; i < current.rows(); ++i)
      next.row(i) = ApplyTransform(t, current.row(i).transpose()).transpose();
    current = std::move(next);
    bundle.transforms.push_back(std::move(t));
  }

  bundle.class_models = ComputeClassModels(current, utt_labels);
  try {
    bundle.plda = FitPlda(current, utt_labels);
  } catch (const std::exception &ex) {
    throw DataError(std::string("PLDA fitting failed: ") + ex.what());
  }
  return bundle;
}

EvaluationReport EvaluatePipeline(const ModelBundle &bundle,
                                  const Manifest &manifest, Split split) {
  auto entries = manifest.ForSplit(split);
  if (entries.empty())
    throw DataError("no instances in split '" + SplitName(split) + "'");

  const auto &labels = bundle.class_models.labels;
  std::map<std::string, int> label_index;
  for (size_t i = 0; i < labels.size(); ++i)
    label_index[labels[i]] = static_cast<int>(i);
  const int C = static_cast<int>(labels.size());

  EvaluationReport report;
  report.labels = labels;
  report.confusion = Eigen::MatrixXi::Zero(C, C);
  report.config_echo = bundle.config.ToText();

  for (const auto *e : entries) {
    auto it = label_index.find(e->label);
    if (it == label_index.end())
      throw DataError("manifest label '" + e->label +
                      "' unknown to the trained bundle");
    Vector embedding = UtteranceEmbedding(bundle, e->audio_path);
    Vector scores = ScoreAgainstModels(bundle, embedding);
    int pred = Classify(scores);
    report.confusion(it->second, pred) += 1;
  }

  int total = static_cast<int>(entries.size());
  report.accuracy = static_cast<double>(report.confusion.trace()) / total;
  report.per_class_recall.resize(C);
  for (int c = 0; c < C; ++c) {
    int row_sum = report.confusion.row(c).sum();
    report.per_class_recall[c] =
        row_sum > 0 ? static_cast<double>(report.confusion(c, c)) / row_sum
                    : 0.0;
  }
  return report;
}

std::pair<std::string, Vector> PredictOne(const ModelBundle &bundle,
                                          const std::string &wav_path) {
  Vector embedding = UtteranceEmbedding(bundle, wav_path);
  Vector scores = ScoreAgainstModels(bundle, embedding);
  int pred = Classify(scores);
  return {bundle.class_models.labels[pred], scores};
}

std::vector<GridCell> GridSearch(const Manifest &manifest,
                                 const PipelineConfig &base_config,
                                 const std::vector<int> &k_values,
                                 const std::vector<int> &r_values) {
  if (k_values.empty()) throw ConfigError("empty Gaussian-count grid");
  if (r_values.empty()) throw ConfigError("empty subspace-rank grid");
  std::vector<int> ks = k_values, rs = r_values;
  std::sort(ks.begin(), ks.end());
  std::sort(rs.begin(), rs.end());

  std::vector<GridCell> cells;
  for (int k : ks) {
    for (int r : rs) {
      GridCell cell;
      cell.n_components = k;
      cell.tv_rank = r;
      try {
        PipelineConfig cfg = base_config;
        cfg.ubm.n_components = k;
        cfg.tv_rank = r;
        ModelBundle bundle = TrainPipeline(manifest, cfg);
        cell.accuracy =
            EvaluatePipeline(bundle, manifest, Split::kDev).accuracy;
      } catch (const std::exception &ex) {
        cell.error = ex.what();
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::string GridTableText(const std::vector<GridCell> &cells) {
  // K rows x R columns, mirroring the tuning-table layout
  std::vector<int> ks, rs;
  for (const auto &c : cells) {
    if (std::find(ks.begin(), ks.end(), c.n_components) == ks.end())
      ks.push_back(c.n_components);
    if (std::find(rs.begin(), rs.end(), c.tv_rank) == rs.end())
      rs.push_back(c.tv_rank);
  }
  std::ostringstream os;
  os << std::setw(12) << "gaussians\\T";
  for (int r : rs) os << std::setw(10) << r;
  os << "\n";
  for (int k : ks) {
    os << std::setw(12) << k;
    for (int r : rs) {
      auto it = std::find_if(cells.begin(), cells.end(), [&](const GridCell &c) {
        return c.n_components == k && c.tv_rank == r;
      });
      if (it == cells.end() || !it->error.empty())
        os << std::setw(10) << "FAILED";
      else
        os << std::setw(10) << std::fixed << std::setprecision(4)
           << it->accuracy;
    }
    os << "\n";
  }
  return os.str();
}

std::string GridTableCsv(const std::vector<GridCell> &cells) {
  std::ostringstream os;
  os << "gaussians,t_rank,accuracy,error\n";
  for (const auto &c : cells) {
    os << c.n_components << "," << c.tv_rank << ",";
    if (c.error.empty()) os << FormatDouble(c.accuracy);
    os << "," << c.error << "\n";
  }
  return os.str();
}

std::string EvaluationReport::ToText() const {
  std::ostringstream os;
  os << "accuracy " << std::fixed << std::setprecision(4) << accuracy << "\n";
  os << "label      recall\n";
  for (size_t c = 0; c < labels.size(); ++c)
    os << std::setw(8) << std::left << labels[c] << std::right << std::setw(9)
       << std::setprecision(4) << per_class_recall[c] << "\n";
  os << "confusion (rows true, cols predicted):\n";
  for (int r = 0; r < confusion.rows(); ++r) {
    for (int c = 0; c < confusion.cols(); ++c)
      os << std::setw(5) << confusion(r, c);
    os << "\n";
  }
  return os.str();
}

std::string EvaluationReport::ToCsv() const {
  std::ostringstream os;
  os << "metric,label,value\n";
  os << "accuracy,," << FormatDouble(accuracy) << "\n";
  for (size_t c = 0; c < labels.size(); ++c)
    os << "recall," << labels[c] << "," << FormatDouble(per_class_recall[c])
       << "\n";
  for (int r = 0; r < confusion.rows(); ++r)
    for (int c = 0; c < confusion.cols(); ++c)
      os << "confusion," << labels[r] << ">" << labels[c] << ","
         << confusion(r, c) << "\n";
  return os.str();
}

void PersistBundle(const ModelBundle &bundle, const std::string &dir) {
  fs::create_directories(dir);
  std::ostringstream meta;
  meta << "version=" << ModelBundle::kFormatVersion << "\n";
  meta << "labels=";
  for (size_t i = 0; i < bundle.class_models.labels.size(); ++i)
    meta << (i ? "," : "") << bundle.class_models.labels[i];
  meta << "\n";
  meta << "transforms=";
  for (size_t i = 0; i < bundle.transforms.size(); ++i)
    meta << (i ? "," : "") << KindName(bundle.transforms[i].kind);
  meta << "\n";

  WriteTensor(dir + "/ubm_weights.f64", bundle.ubm.weights, meta,
              "ubm_weights");
  WriteTensor(dir + "/ubm_means.f64", bundle.ubm.means, meta, "ubm_means");
  WriteTensor(dir + "/ubm_variances.f64", bundle.ubm.variances, meta,
              "ubm_variances");
  WriteTensor(dir + "/t_matrix.f64", bundle.tv.t_matrix, meta, "t_matrix");
  for (size_t i = 0; i < bundle.transforms.size(); ++i) {
    std::string base = "transform" + std::to_string(i);
    WriteTensor(dir + "/" + base + "_matrix.f64", bundle.transforms[i].matrix,
                meta, base + "_matrix");
    WriteTensor(dir + "/" + base + "_offset.f64",
                bundle.transforms[i].mean_offset, meta, base + "_offset");
  }
  WriteTensor(dir + "/class_models.f64", bundle.class_models.model_vectors,
              meta, "class_models");
  WriteTensor(dir + "/plda_mu.f64", bundle.plda.mu, meta, "plda_mu");
  WriteTensor(dir + "/plda_between.f64", bundle.plda.sigma_between, meta,
              "plda_between");
  WriteTensor(dir + "/plda_within.f64", bundle.plda.sigma_within, meta,
              "plda_within");

  // config snapshot, prefixed to keep the meta namespace flat
  for (const auto &line : SplitString(bundle.config.ToText(), '\n'))
    if (!line.empty()) meta << "config." << line << "\n";

  std::ofstream f(dir + "/meta");
  if (!f) throw DataError("cannot write bundle meta in " + dir);
  f << meta.str();
}

ModelBundle LoadBundle(const std::string &dir) {
  std::map<std::string, std::string> meta;
  {
    std::ifstream f(dir + "/meta");
    if (!f) throw DataError("missing bundle meta in " + dir);
    std::ostringstream ss;
    ss << f.rdbuf();
    meta = ParseKeyValueText(ss.str());
  }
  auto ver = meta.find("version");
  if (ver == meta.end() ||
      ver->second != std::to_string(ModelBundle::kFormatVersion))
    throw DataError("unrecognized bundle format version: " +
                    (ver == meta.end() ? "<missing>" : ver->second));

  ModelBundle bundle;
  std::string config_text;
  for (const auto &[key, val] : meta)
    if (key.rfind("config.", 0) == 0)
      config_text += key.substr(7) + "=" + val + "\n";
  bundle.config = PipelineConfig::FromText(config_text);

  bundle.ubm.weights = ReadTensor(dir, meta, "ubm_weights");
  bundle.ubm.means = ReadTensor(dir, meta, "ubm_means");
  bundle.ubm.variances = ReadTensor(dir, meta, "ubm_variances");
  bundle.ubm.Check();
  bundle.tv.t_matrix = ReadTensor(dir, meta, "t_matrix");
  bundle.tv.rank = static_cast<int>(bundle.tv.t_matrix.cols());
  bundle.tv.ubm = bundle.ubm;

  for (const auto &name : SplitString(meta.at("transforms"), ',')) {
    if (name.empty()) continue;
    size_t i = bundle.transforms.size();
    LinearTransform t;
    t.kind = ParseKind(name);
    std::string base = "transform" + std::to_string(i);
    t.matrix = ReadTensor(dir, meta, base + "_matrix");
    t.mean_offset = ReadTensor(dir, meta, base + "_offset");
    bundle.transforms.push_back(std::move(t));
  }

  bundle.class_models.model_vectors = ReadTensor(dir, meta, "class_models");
  bundle.class_models.labels = SplitString(meta.at("labels"), ',');
  if (bundle.class_models.labels.size() !=
      static_cast<size_t>(bundle.class_models.model_vectors.rows()))
    throw DataError("bundle label count does not match class model rows");
  bundle.plda.mu = ReadTensor(dir, meta, "plda_mu");
  bundle.plda.sigma_between = ReadTensor(dir, meta, "plda_between");
  bundle.plda.sigma_within = ReadTensor(dir, meta, "plda_within");
  return bundle;
}

}  // namespace nli
