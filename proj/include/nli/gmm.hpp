// nli/gmm.hpp

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

#ifndef NLI_GMM_HPP_
#define NLI_GMM_HPP_

#include <vector>

#include "nli/common.hpp"

namespace nli {

/// Diagonal-covariance Gaussian mixture; doubles as the UBM.
struct DiagonalGmm {
  Vector weights;   // K, simplex
  Matrix means;     // K x D
  Matrix variances; // K x D, >= floor

  int NumComponents() const { return static_cast<int>(weights.size()); }
  int Dim() const { return static_cast<int>(means.cols()); }
  void Check() const;
};

enum class GmmInit { kKmeans, kBinarySplit };

struct EmConfig {
  int n_components = 32;
  int n_iterations = 10;
  uint64_t seed = 0;
  // Scale applied to the global per-dimension variance; the product is the
  // variance floor. Guards against component collapse on small data.
  double variance_floor_scale = 1e-4;
  GmmInit init = GmmInit::kKmeans;
};

/// Seeded k-means++ (or binary-split) initialization; deterministic per seed.
DiagonalGmm InitializeGmm(const Matrix &frames, const EmConfig &cfg);

/// Standard diagonal-GMM EM. Per-iteration total log-likelihood is appended
/// to *ll_history when provided; variances are floored after each M-step.
DiagonalGmm EmTrain(const DiagonalGmm &init, const Matrix &frames,
                    const EmConfig &cfg,
                    std::vector<double> *ll_history = nullptr);

/// Posterior responsibilities for one frame (log-sum-exp normalized).
Vector FramePosteriors(const DiagonalGmm &gmm, const Vector &frame);

/// T x K matrix of responsibilities for a whole utterance.
Matrix AllFramePosteriors(const DiagonalGmm &gmm, const Matrix &frames);

/// Total log-likelihood of the frame set under the mixture.
double LogLikelihood(const DiagonalGmm &gmm, const Matrix &frames);

/// Mean-only MAP adaptation with the given relevance factor; weights and
/// variances are copied from the UBM.
DiagonalGmm MapAdapt(const DiagonalGmm &ubm, const Matrix &frames,
                     double relevance);

}  // namespace nli

#endif  // NLI_GMM_HPP_
