// nli/backend.hpp

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

#ifndef NLI_BACKEND_HPP_
#define NLI_BACKEND_HPP_

#include <string>
#include <vector>

#include "nli/common.hpp"

namespace nli {

enum class TransformKind { kLda, kPca, kWccn };

/// y = M (x - offset). offset is zero for WCCN.
struct LinearTransform {
  Matrix matrix;  // out_dim x in_dim
  Vector mean_offset;
  TransformKind kind = TransformKind::kLda;
};

/// Per-class averaged, fully transformed i-vectors, label order fixed by
/// first appearance.
struct ClassModels {
  std::vector<std::string> labels;
  Matrix model_vectors;  // C x d
};

/// Two-covariance PLDA.
struct PldaModel {
  Vector mu;
  Matrix sigma_between;  // PSD
  Matrix sigma_within;   // PD
};

enum class ScoreMode { kPlda, kCosine };

/// Ridge added to every scatter/covariance estimate: eps * trace / d.
constexpr double kRidgeEps = 1e-8;

/// Top generalized eigenvectors of (S_between, S_within).
LinearTransform FitLda(const Matrix &vectors,
                       const std::vector<std::string> &labels, int out_dim);

/// Top eigenvectors of the sample covariance, sign-normalized.
LinearTransform FitPca(const Matrix &vectors, int out_dim);

/// Whitens the average within-class covariance.
LinearTransform FitWccn(const Matrix &vectors,
                        const std::vector<std::string> &labels);

Vector ApplyTransform(const LinearTransform &t, const Vector &v);
Vector ApplyChain(const std::vector<LinearTransform> &chain, const Vector &v);

ClassModels ComputeClassModels(const Matrix &vectors,
                               const std::vector<std::string> &labels);

/// Closed-form moment estimates: global mean, pooled within-class covariance,
/// covariance of class means.
PldaModel FitPlda(const Matrix &vectors,
                  const std::vector<std::string> &labels);

/// PLDA mode: same-class vs independent log-likelihood ratio under the
/// two-covariance model. Cosine mode: cosine similarity.
double Score(const PldaModel &plda, const Vector &model_vec,
             const Vector &test_vec, ScoreMode mode);

/// Argmax with ties broken by lowest index. NaN scores are rejected.
int Classify(const Vector &scores);

}  // namespace nli

#endif  // NLI_BACKEND_HPP_
