// src/backend.cpp

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

#include "nli/backend.hpp"

#include <cmath>
#include <map>

namespace nli {

namespace {

/// Class index per sample, label order by first appearance.
std::vector<int> GroupLabels(const std::vector<std::string> &labels,
                             std::vector<std::string> *ordered) {
  std::map<std::string, int> seen;
  std::vector<int> idx(labels.size());
  ordered->clear();
  for (size_t i = 0; i < labels.size(); ++i) {
    auto it = seen.find(labels[i]);
    if (it == seen.end()) {
      int c = static_cast<int>(ordered->size());
      seen.emplace(labels[i], c);
      ordered->push_back(labels[i]);
      idx[i] = c;
    } else {
      idx[i] = it->second;
    }
  }
  return idx;
}

void CheckLabeled(const Matrix &vectors,
                  const std::vector<std::string> &labels) {
  if (static_cast<size_t>(vectors.rows()) != labels.size())
    throw DataError("label count does not match vector count");
  if (vectors.rows() == 0) throw DataError("no vectors");
}

Matrix Ridge(const Matrix &m) {
  const int d = static_cast<int>(m.rows());
  double scale = kRidgeEps * std::max(m.trace(), 1e-12) / d;
  return m + scale * Matrix::Identity(d, d);
}

/// Flips each row so its largest-magnitude entry is positive. Pins the
/// eigenvector sign ambiguity for deterministic serialization.
void SignNormalizeRows(Matrix *m) {
  for (int r = 0; r < m->rows(); ++r) {
    int imax = 0;
    m->row(r).cwiseAbs().maxCoeff(&imax);
    if ((*m)(r, imax) < 0.0) m->row(r) = -m->row(r);
  }
}


}  // namespace

LinearTransform FitLda(const Matrix &vectors,
                       const std::vector<std::string> &labels, int out_dim) {
  CheckLabeled(vectors, labels);
  const int d = static_cast<int>(vectors.cols());
  std::vector<std::string> ordered;
  std::vector<int> idx = GroupLabels(labels, &ordered);
  const int C = static_cast<int>(ordered.size());
  if (C < 2) throw DataError("LDA needs at least 2 classes");
  if (out_dim < 1 || out_dim > C - 1)
    throw ConfigError("LDA out_dim must be in [1, C-1] = [1, " +
                      std::to_string(C - 1) + "]");

  Vector counts = Vector::Zero(C);
  Matrix class_means = Matrix::Zero(C, d);
  for (size_t i = 0; i < idx.size(); ++i) {
    counts[idx[i]] += 1.0;
    class_means.row(idx[i]) += vectors.row(static_cast<int>(i));
  }
  for (int c = 0; c < C; ++c) {
    if (counts[c] < 2.0)
      throw DataError("LDA class '" + ordered[c] + "' has fewer than 2 samples");
    class_means.row(c) /= counts[c];
  }
  Vector global = vectors.colwise().mean();

  Matrix s_within = Matrix::Zero(d, d);
  for (size_t i = 0; i < idx.size(); ++i) {
    Vector diff = vectors.row(static_cast<int>(i)).transpose() -
                  class_means.row(idx[i]).transpose();
    s_within.noalias() += diff * diff.transpose();
  }
  s_within /= static_cast<double>(vectors.rows());
  Matrix s_between = Matrix::Zero(d, d);
  for (int c = 0; c < C; ++c) {
    Vector diff = class_means.row(c).transpose() - global;
    s_between.noalias() += counts[c] * diff * diff.transpose();
  }
  s_between /= static_cast<double>(vectors.rows());

  // Generalized eigenproblem via Cholesky whitening of S_within.
  Eigen::LLT<Matrix> llt(Ridge(s_within));
  if (llt.info() != Eigen::Success)
    throw DataError("within-class scatter not positive definite");
  Matrix l_inv = llt.matrixL().solve(Matrix::Identity(d, d));
  Matrix m = l_inv * s_between * l_inv.transpose();
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);

  LinearTransform t;
  t.kind = TransformKind::kLda;
  t.mean_offset = global;
  t.matrix.resize(out_dim, d);
  for (int r = 0; r < out_dim; ++r) {
    // eigenvalues ascending; take from the top
    Vector u = eig.eigenvectors().col(d - 1 - r);
    t.matrix.row(r) = (l_inv.transpose() * u).transpose();
  }
  SignNormalizeRows(&t.matrix);
  return t;
}

LinearTransform FitPca(const Matrix &vectors, int out_dim) {
  const int n = static_cast<int>(vectors.rows());
  const int d = static_cast<int>(vectors.cols());
  if (n < 2) throw DataError("PCA needs at least 2 samples");
  if (out_dim < 1 || out_dim > std::min(n - 1, d))
    throw ConfigError("PCA out_dim must be in [1, min(n-1, d)]");
  Vector mean = vectors.colwise().mean();
  Matrix centered = vectors.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * centered / n;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);

  LinearTransform t;
  t.kind = TransformKind::kPca;
  t.mean_offset = mean;
  t.matrix.resize(out_dim, d);
  for (int r = 0; r < out_dim; ++r)
    t.matrix.row(r) = eig.eigenvectors().col(d - 1 - r).transpose();
  SignNormalizeRows(&t.matrix);
  return t;
}

LinearTransform FitWccn(const Matrix &vectors,
                        const std::vector<std::string> &labels) {
  CheckLabeled(vectors, labels);
  const int d = static_cast<int>(vectors.cols());
  std::vector<std::string> ordered;
  std::vector<int> idx = GroupLabels(labels, &ordered);
  const int C = static_cast<int>(ordered.size());

  Vector counts = Vector::Zero(C);
  Matrix class_means = Matrix::Zero(C, d);
  for (size_t i = 0; i < idx.size(); ++i) {
    counts[idx[i]] += 1.0;
    class_means.row(idx[i]) += vectors.row(static_cast<int>(i));
  }
  for (int c = 0; c < C; ++c) {
    if (counts[c] < 2.0)
      throw DataError("WCCN class '" + ordered[c] +
                      "' has fewer than 2 samples");
    class_means.row(c) /= counts[c];
  }

  // W = unweighted mean of per-class covariances.
  Matrix w = Matrix::Zero(d, d);
  for (int c = 0; c < C; ++c) {
    Matrix cov = Matrix::Zero(d, d);
    for (size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] != c) continue;
      Vector diff = vectors.row(static_cast<int>(i)).transpose() -
                    class_means.row(c).transpose();
      cov.noalias() += diff * diff.transpose();
    }
    w += cov / counts[c];
  }
  w /= C;

  Eigen::LLT<Matrix> llt(Ridge(w));
  if (llt.info() != Eigen::Success)
    throw DataError("average within-class covariance is singular");

  LinearTransform t;
  t.kind = TransformKind::kWccn;
  t.mean_offset = Vector::Zero(d);
  // B B' = W^-1 with B = L^-T, so the applied map B' is L^-1.
  t.matrix = llt.matrixL().solve(Matrix::Identity(d, d));
  return t;
}

Vector ApplyTransform(const LinearTransform &t, const Vector &v) {
  if (v.size() != t.matrix.cols())
    throw DataError("transform input dimension mismatch: expected " +
                    std::to_string(t.matrix.cols()) + ", got " +
                    std::to_string(v.size()));
  return t.matrix * (v - t.mean_offset);
}

Vector ApplyChain(const std::vector<LinearTransform> &chain, const Vector &v) {
  Vector out = v;
  for (size_t i = 0; i < chain.size(); ++i) {
    try {
      out = ApplyTransform(chain[i], out);
    } catch (const DataError &e) {
      throw DataError("chain stage " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

ClassModels ComputeClassModels(const Matrix &vectors,
                               const std::vector<std::string> &labels) {
  CheckLabeled(vectors, labels);
  ClassModels models;
  std::vector<int> idx = GroupLabels(labels, &models.labels);
  const int C = static_cast<int>(models.labels.size());
  models.model_vectors = Matrix::Zero(C, vectors.cols());
  Vector counts = Vector::Zero(C);
  for (size_t i = 0; i < idx.size(); ++i) {
    models.model_vectors.row(idx[i]) += vectors.row(static_cast<int>(i));
    counts[idx[i]] += 1.0;
  }
  for (int c = 0; c < C; ++c) models.model_vectors.row(c) /= counts[c];
  return models;
}

PldaModel FitPlda(const Matrix &vectors,
                  const std::vector<std::string> &labels) {
  CheckLabeled(vectors, labels);
  const int d = static_cast<int>(vectors.cols());
  std::vector<std::string> ordered;
  std::vector<int> idx = GroupLabels(labels, &ordered);
  const int C = static_cast<int>(ordered.size());
  if (C < 2) throw DataError("PLDA needs at least 2 classes");

  Vector counts = Vector::Zero(C);
  Matrix class_means = Matrix::Zero(C, d);
  for (size_t i = 0; i < idx.size(); ++i) {
    counts[idx[i]] += 1.0;
    class_means.row(idx[i]) += vectors.row(static_cast<int>(i));
  }
  for (int c = 0; c < C; ++c) {
    if (counts[c] < 2.0)
      throw DataError("PLDA class '" + ordered[c] +
                      "' has fewer than 2 samples");
    class_means.row(c) /= counts[c];
  }

  PldaModel plda;
  plda.mu = vectors.colwise().mean();
  Matrix within = Matrix::Zero(d, d);
  for (size_t i = 0; i < idx.size(); ++i) {
    Vector diff = vectors.row(static_cast<int>(i)).transpose() -
                  class_means.row(idx[i]).transpose();
    within.noalias() += diff * diff.transpose();
  }
  within /= static_cast<double>(vectors.rows());
  Matrix between = Matrix::Zero(d, d);
  for (int c = 0; c < C; ++c) {
    Vector diff = class_means.row(c).transpose() - plda.mu;
    between.noalias() += diff * diff.transpose();
  }
  between /= static_cast<double>(C);

  plda.sigma_within = Ridge(0.5 * (within + within.transpose()));
  plda.sigma_between = Ridge(0.5 * (between + between.transpose()));
  return plda;
}

double Score(const PldaModel &plda, const Vector &model_vec,
             const Vector &test_vec, ScoreMode mode) {
  const int d = static_cast<int>(plda.mu.size());
  if (model_vec.size() != d || test_vec.size() != d)
    throw DataError("score vector dimension mismatch");
  if (mode == ScoreMode::kCosine) {
    double nx = model_vec.norm(), ny = test_vec.norm();
    if (nx == 0.0 || ny == 0.0) return 0.0;
    return model_vec.dot(test_vec) / (nx * ny);
  }
  // Whiten by the within covariance and diagonalize the between covariance;
  // the LLR is invariant under that map and each dimension then scores
  // analytically, which stays stable however disparate the two covariances.
  Eigen::LLT<Matrix> lw(plda.sigma_within);
  if (lw.info() != Eigen::Success)
    throw DataError("within covariance not positive definite in PLDA scoring");
  Matrix b_w = lw.matrixL().solve(plda.sigma_between);
  Matrix whitened_between =
      lw.matrixL().solve(b_w.transpose()).transpose();  // L^-1 Sb L^-T
  whitened_between = 0.5 * (whitened_between + whitened_between.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(whitened_between);
  Vector x = eig.eigenvectors().transpose() *
             lw.matrixL().solve(model_vec - plda.mu);
  Vector y = eig.eigenvectors().transpose() *
             lw.matrixL().solve(test_vec - plda.mu);
  double llr = 0.0;
  for (int i = 0; i < d; ++i) {
    double g = std::max(eig.eigenvalues()[i], 0.0);
    // per-dimension joint [[1+g, g], [g, 1+g]] against independent 1+g
    llr += -0.5 * (std::log1p(2.0 * g) - 2.0 * std::log1p(g) +
                   ((1.0 + g) * (x[i] * x[i] + y[i] * y[i]) -
                    2.0 * g * x[i] * y[i]) /
                       (1.0 + 2.0 * g) -
                   (x[i] * x[i] + y[i] * y[i]) / (1.0 + g));
  }
  return llr;
}

int Classify(const Vector &scores) {
  if (scores.size() == 0) throw DataError("empty score vector");
  int best = 0;
  for (int i = 0; i < scores.size(); ++i) {
    if (std::isnan(scores[i]))
      throw DataError("NaN score at index " + std::to_string(i));
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

}  // namespace nli
