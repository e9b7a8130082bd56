// nli/ivector.hpp

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

#ifndef NLI_IVECTOR_HPP_
#define NLI_IVECTOR_HPP_

#include <vector>

#include "nli/gmm.hpp"

namespace nli {

/// Zeroth- and centered first-order sufficient statistics of one utterance
/// under the UBM.
struct BaumWelchStats {
  Vector n;  // K soft counts
  Matrix f;  // K x D, sum_t gamma_tk (x_t - mu_k)
};

/// The low-rank subspace mapping a latent R-vector to supervector offsets,
/// together with the UBM it is anchored to.
struct TotalVariabilityModel {
  Matrix t_matrix;  // (K*D) x R
  DiagonalGmm ubm;
  int rank = 0;
};

struct TvTrainConfig {
  int rank = 50;
  int n_iterations = 5;
  uint64_t seed = 0;
};

BaumWelchStats AccumulateBwStats(const DiagonalGmm &ubm, const Matrix &frames);

/// EM training of the subspace. Gaussian init with scale 0.1, fixed seed.
/// When provided, *mean_wsq_history records the mean squared latent norm per
/// iteration (a convergence diagnostic).
TotalVariabilityModel TrainTotalVariability(
    const std::vector<BaumWelchStats> &stats_list, const DiagonalGmm &ubm,
    const TvTrainConfig &cfg, std::vector<double> *mean_wsq_history = nullptr);

/// Closed-form posterior mean of the latent variable:
///   w = (I + T' S^-1 N T)^-1 T' S^-1 f
/// with N the block-diagonal replication of the soft counts and S the UBM
/// diagonal covariances. Solved by Cholesky, never explicit inversion.
Vector ExtractIvector(const TotalVariabilityModel &tv,
                      const BaumWelchStats &stats);

}  // namespace nli

#endif  // NLI_IVECTOR_HPP_
