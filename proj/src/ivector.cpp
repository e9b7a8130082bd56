// src/ivector.cpp

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

#include "nli/ivector.hpp"

#include <cmath>

namespace nli {

namespace {

/// L = I + sum_k n_k T_k' S_k^-1 T_k and rhs = sum_k T_k' S_k^-1 f_k,
/// accumulated blockwise over components.
void BuildPosteriorSystem(const TotalVariabilityModel &tv,
                          const BaumWelchStats &stats, Matrix *L,
                          Vector *rhs) {
  const int K = tv.ubm.NumComponents();
  const int D = tv.ubm.Dim();
  const int R = tv.rank;
  *L = Matrix::Identity(R, R);
  *rhs = Vector::Zero(R);
  for (int k = 0; k < K; ++k) {
    auto t_block = tv.t_matrix.middleRows(k * D, D);  // D x R
    Vector inv_var = tv.ubm.variances.row(k).cwiseInverse();
    Matrix weighted = inv_var.asDiagonal() * t_block;  // S_k^-1 T_k
    L->noalias() += stats.n[k] * t_block.transpose() * weighted;
    rhs->noalias() += weighted.transpose() * stats.f.row(k).transpose();
  }
}

void CheckDims(const TotalVariabilityModel &tv, const BaumWelchStats &stats) {
  const int K = tv.ubm.NumComponents();
  const int D = tv.ubm.Dim();
  if (stats.n.size() != K || stats.f.rows() != K || stats.f.cols() != D)
    throw DataError("Baum-Welch stats do not match UBM dimensions");
  if (tv.t_matrix.rows() != static_cast<long>(K) * D ||
      tv.t_matrix.cols() != tv.rank)
    throw DataError("total-variability matrix shape mismatch");
}

}  // namespace

BaumWelchStats AccumulateBwStats(const DiagonalGmm &ubm,
                                 const Matrix &frames) {
  if (frames.rows() == 0) throw DataError("no frames for statistics");
  if (frames.cols() != ubm.Dim())
    throw DataError("frame dimension does not match UBM");
  Matrix gamma = AllFramePosteriors(ubm, frames);  // T x K
  BaumWelchStats stats;
  stats.n = gamma.colwise().sum();
  stats.f = gamma.transpose() * frames;  // K x D, uncentered
  for (int k = 0; k < ubm.NumComponents(); ++k)
    stats.f.row(k) -= stats.n[k] * ubm.means.row(k);
  return stats;
}

TotalVariabilityModel TrainTotalVariability(
    const std::vector<BaumWelchStats> &stats_list, const DiagonalGmm &ubm,
    const TvTrainConfig &cfg, std::vector<double> *mean_wsq_history) {
  const int K = ubm.NumComponents();
  const int D = ubm.Dim();
  const int R = cfg.rank;
  if (R < 1 || R > K * D)
    throw ConfigError("rank must satisfy 1 <= R <= K*D");
  if (stats_list.size() < 2)
    throw DataError("need at least 2 utterances to train the subspace");
  if (cfg.n_iterations < 1) throw ConfigError("n_iterations must be >= 1");

  TotalVariabilityModel tv;
  tv.ubm = ubm;
  tv.rank = R;
  tv.t_matrix.resize(static_cast<long>(K) * D, R);
  Rng rng(cfg.seed ^ 0x74765f696e6974ULL);
  for (long i = 0; i < tv.t_matrix.rows(); ++i)
    for (int j = 0; j < R; ++j)
      tv.t_matrix(i, j) = 0.1 * rng.NextGaussian();

  for (const auto &stats : stats_list) CheckDims(tv, stats);

  for (int iter = 0; iter < cfg.n_iterations; ++iter) {
    std::vector<Matrix> acc_ww(K, Matrix::Zero(R, R));   // sum n_k <w w'>
    std::vector<Matrix> acc_fw(K, Matrix::Zero(D, R));   // sum f_k w'
    Matrix global_ww = Matrix::Zero(R, R);               // sum <w w'>
    double wsq_sum = 0.0;

    for (size_t u = 0; u < stats_list.size(); ++u) {
      const BaumWelchStats &stats = stats_list[u];
      Matrix L;
      Vector rhs;
      BuildPosteriorSystem(tv, stats, &L, &rhs);
      Eigen::LLT<Matrix> llt(L);
      if (llt.info() != Eigen::Success)
        throw DataError("singular posterior precision for utterance " +
                        std::to_string(u));
      Vector w = llt.solve(rhs);
      Matrix cov = llt.solve(Matrix::Identity(R, R));
      Matrix second_moment = cov + w * w.transpose();
      global_ww += second_moment;
      wsq_sum += w.squaredNorm();
      for (int k = 0; k < K; ++k) {
        acc_ww[k].noalias() += stats.n[k] * second_moment;
        acc_fw[k].noalias() += stats.f.row(k).transpose() * w.transpose();
      }
    }
    if (mean_wsq_history)
      mean_wsq_history->push_back(wsq_sum / stats_list.size());

    for (int k = 0; k < K; ++k) {
      Eigen::LDLT<Matrix> ldlt(acc_ww[k]);
      if (ldlt.info() != Eigen::Success) continue;  // keep previous block
      tv.t_matrix.middleRows(k * D, D) =
          ldlt.solve(acc_fw[k].transpose()).transpose();
    }
    // Minimum-divergence step: fold the empirical latent covariance into T
    // so the prior stays N(0, I).  Without this the scale of T crawls.
    Matrix latent_cov = global_ww / static_cast<double>(stats_list.size());
    Eigen::LLT<Matrix> md(latent_cov);
    if (md.info() == Eigen::Success)
      tv.t_matrix = tv.t_matrix * Matrix(md.matrixL());

    if (!tv.t_matrix.allFinite())
      throw DataError("subspace update became non-finite at iteration " +
                      std::to_string(iter));
  }
  return tv;
}

Vector ExtractIvector(const TotalVariabilityModel &tv,
                      const BaumWelchStats &stats) {
  CheckDims(tv, stats);
  Matrix L;
  Vector rhs;
  BuildPosteriorSystem(tv, stats, &L, &rhs);
  Eigen::LLT<Matrix> llt(L);
  if (llt.info() != Eigen::Success)
    throw DataError("posterior precision not positive definite");
  Vector w = llt.solve(rhs);
  if (!w.allFinite()) {
    Eigen::JacobiSVD<Matrix> svd(L);
    double cond = svd.singularValues()(0) /
                  svd.singularValues()(svd.singularValues().size() - 1);
    throw DataError("non-finite i-vector; condition number of L = " +
                    std::to_string(cond));
  }
  return w;
}

}  // namespace nli
