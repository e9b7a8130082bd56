// src/gmm.cpp

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

#include "nli/gmm.hpp"

#include <cmath>
#include <limits>

namespace nli {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

/// Per-dimension variance floor: scale * global variance of the data.
Vector VarianceFloor(const Matrix &frames, double scale) {
  Vector mean = frames.colwise().mean();
  Vector var = (frames.rowwise() - mean.transpose())
                   .array()
                   .square()
                   .colwise()
                   .mean();
  Vector floor = scale * var;
  // all-constant dimensions still need a positive floor
  for (int d = 0; d < floor.size(); ++d)
    floor[d] = std::max(floor[d], 1e-12);
  return floor;
}

void FloorVariances(Matrix *variances, const Vector &floor) {
  for (int k = 0; k < variances->rows(); ++k)
    for (int d = 0; d < variances->cols(); ++d)
      (*variances)(k, d) = std::max((*variances)(k, d), floor[d]);
}

/// T x K matrix of per-frame, per-component Gaussian log densities
/// (weight included).
Matrix WeightedLogDensities(const DiagonalGmm &gmm, const Matrix &frames) {
  const int K = gmm.NumComponents();
  Matrix inv_var = gmm.variances.cwiseInverse();           // K x D
  Matrix mean_over_var = gmm.means.cwiseProduct(inv_var);  // K x D
  Vector comp_const(K);
  for (int k = 0; k < K; ++k) {
    comp_const[k] =
        std::log(std::max(gmm.weights[k],
                          std::numeric_limits<double>::min())) -
        0.5 * (gmm.variances.row(k).array().log().sum() +
               gmm.Dim() * kLog2Pi +
               gmm.means.row(k).cwiseProduct(mean_over_var.row(k)).sum());
  }
  Matrix ll = frames.array().square().matrix() * (-0.5 * inv_var.transpose());
  ll.noalias() += frames * mean_over_var.transpose();
  ll.rowwise() += comp_const.transpose();
  return ll;
}

/// In-place: log densities -> posteriors; returns total log-likelihood.
double NormalizeRows(Matrix *ll) {
  double total = 0.0;
  for (int t = 0; t < ll->rows(); ++t) {
    double mx = ll->row(t).maxCoeff();
    double sum = (ll->row(t).array() - mx).exp().sum();
    double lse = mx + std::log(sum);
    total += lse;
    ll->row(t) = (ll->row(t).array() - lse).exp();
  }
  return total;
}

DiagonalGmm KmeansInit(const Matrix &frames, const EmConfig &cfg,
                       const Vector &floor) {
  const int K = cfg.n_components;
  const int T = static_cast<int>(frames.rows());
  const int D = static_cast<int>(frames.cols());
  Rng rng(cfg.seed ^ 0x6b6d65616e73ULL);

  // k-means++ seeding
  Matrix centers(K, D);
  centers.row(0) = frames.row(static_cast<int>(rng.NextBelow(T)));
  Vector d2 = (frames.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      double r = rng.NextDouble() * total;
      double acc = 0.0;
      for (int t = 0; t < T; ++t) {
        acc += d2[t];
        if (acc >= r) { pick = t; break; }
      }
    } else {
      pick = static_cast<int>(rng.NextBelow(T));
    }
    centers.row(k) = frames.row(pick);
    d2 = d2.cwiseMin(
        (frames.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }

  // Lloyd iterations, ties to the lowest index
  std::vector<int> assign(T, 0);
  for (int iter = 0; iter < 15; ++iter) {
    bool changed = false;
    for (int t = 0; t < T; ++t) {
      int best = 0;
      double best_d = (frames.row(t) - centers.row(0)).squaredNorm();
      for (int k = 1; k < K; ++k) {
        double d = (frames.row(t) - centers.row(k)).squaredNorm();
        if (d < best_d) { best_d = d; best = k; }
      }
      if (assign[t] != best) { assign[t] = best; changed = true; }
    }
    Matrix sums = Matrix::Zero(K, D);
    Vector counts = Vector::Zero(K);
    for (int t = 0; t < T; ++t) {
      sums.row(assign[t]) += frames.row(t);
      counts[assign[t]] += 1.0;
    }
    for (int k = 0; k < K; ++k)
      if (counts[k] > 0.0) centers.row(k) = sums.row(k) / counts[k];
    if (!changed) break;
  }

  DiagonalGmm gmm;
  gmm.means = centers;
  gmm.weights.resize(K);
  gmm.variances.resize(K, D);
  Vector counts = Vector::Zero(K);
  Matrix sq_sums = Matrix::Zero(K, D);
  for (int t = 0; t < T; ++t) {
    counts[assign[t]] += 1.0;
    sq_sums.row(assign[t]) +=
        (frames.row(t) - centers.row(assign[t])).array().square().matrix();
  }
  for (int k = 0; k < K; ++k) {
    gmm.weights[k] = std::max(counts[k], 1.0) / T;
    if (counts[k] > 0.0)
      gmm.variances.row(k) = sq_sums.row(k) / counts[k];
    else
      gmm.variances.row(k).setZero();
  }
  gmm.weights /= gmm.weights.sum();
  FloorVariances(&gmm.variances, floor);
  return gmm;
}

DiagonalGmm BinarySplitInit(const Matrix &frames, const EmConfig &cfg,
                            const Vector &floor) {
  const int D = static_cast<int>(frames.cols());
  DiagonalGmm gmm;
  gmm.weights = Vector::Ones(1);
  gmm.means.resize(1, D);
  gmm.means.row(0) = frames.colwise().mean();
  Vector var = (frames.rowwise() - gmm.means.row(0))
                   .array()
                   .square()
                   .colwise()
                   .mean();
  gmm.variances.resize(1, D);
  gmm.variances.row(0) = var;
  FloorVariances(&gmm.variances, floor);

  while (gmm.NumComponents() < cfg.n_components) {
    int k_max = 0;
    gmm.weights.maxCoeff(&k_max);
    const int K = gmm.NumComponents();
    DiagonalGmm next;
    next.weights.resize(K + 1);
    next.means.resize(K + 1, D);
    next.variances.resize(K + 1, D);
    Vector sigma = gmm.variances.row(k_max).array().sqrt();
    for (int k = 0; k < K; ++k) {
      next.weights[k] = gmm.weights[k];
      next.means.row(k) = gmm.means.row(k);
      next.variances.row(k) = gmm.variances.row(k);
    }
    next.weights[k_max] = gmm.weights[k_max] / 2.0;
    next.weights[K] = gmm.weights[k_max] / 2.0;
    next.means.row(k_max) = gmm.means.row(k_max) + 0.2 * sigma.transpose();
    next.means.row(K) = gmm.means.row(k_max) - 0.2 * sigma.transpose();
    next.variances.row(K) = gmm.variances.row(k_max);
    gmm = std::move(next);
  }
  return gmm;
}

}  // namespace

void DiagonalGmm::Check() const {
  const int K = NumComponents();
  if (K < 1 || means.rows() != K || variances.rows() != K ||
      means.cols() != variances.cols())
    throw DataError("inconsistent GMM dimensions");
  if (std::abs(weights.sum() - 1.0) > 1e-12 || weights.minCoeff() < 0.0)
    throw DataError("GMM weights are not a simplex vector");
  if (!means.allFinite() || !variances.allFinite() ||
      variances.minCoeff() <= 0.0)
    throw DataError("non-finite or non-positive GMM parameters");
}

DiagonalGmm InitializeGmm(const Matrix &frames, const EmConfig &cfg) {
  if (cfg.n_components < 1) throw ConfigError("n_components must be >= 1");
  if (frames.rows() < cfg.n_components)
    throw DataError("fewer frames (" + std::to_string(frames.rows()) +
                    ") than components (" +
                    std::to_string(cfg.n_components) + ")");
  Vector floor = VarianceFloor(frames, cfg.variance_floor_scale);
  if (cfg.init == GmmInit::kKmeans) return KmeansInit(frames, cfg, floor);
  return BinarySplitInit(frames, cfg, floor);
}

DiagonalGmm EmTrain(const DiagonalGmm &init, const Matrix &frames,
                    const EmConfig &cfg, std::vector<double> *ll_history) {
  if (cfg.n_iterations < 1) throw ConfigError("n_iterations must be >= 1");
  if (frames.rows() == 0) throw DataError("no frames for EM training");
  init.Check();
  const int K = init.NumComponents();
  const int T = static_cast<int>(frames.rows());
  Vector floor = VarianceFloor(frames, cfg.variance_floor_scale);

  DiagonalGmm gmm = init;
  for (int iter = 0; iter < cfg.n_iterations; ++iter) {
    Matrix gamma = WeightedLogDensities(gmm, frames);
    double ll = NormalizeRows(&gamma);
    if (!std::isfinite(ll) || !gamma.allFinite())
      throw DataError("EM became non-finite at iteration " +
                      std::to_string(iter));
    if (ll_history) ll_history->push_back(ll);

    Vector n = gamma.colwise().sum();                        // K
    Matrix f = gamma.transpose() * frames;                   // K x D
    Matrix s = gamma.transpose() * frames.array().square().matrix();
    for (int k = 0; k < K; ++k) {
      if (n[k] < 1e-10) continue;  // starved component keeps old params
      gmm.means.row(k) = f.row(k) / n[k];
      gmm.variances.row(k) =
          s.row(k) / n[k] - gmm.means.row(k).array().square().matrix();
      gmm.weights[k] = n[k] / T;
    }
    gmm.weights /= gmm.weights.sum();
    FloorVariances(&gmm.variances, floor);
  }
  gmm.Check();
  return gmm;
}

Matrix AllFramePosteriors(const DiagonalGmm &gmm, const Matrix &frames) {
  if (frames.cols() != gmm.Dim())
    throw DataError("frame dimension does not match GMM");
  Matrix gamma = WeightedLogDensities(gmm, frames);
  NormalizeRows(&gamma);
  return gamma;
}

Vector FramePosteriors(const DiagonalGmm &gmm, const Vector &frame) {
  Matrix one = frame.transpose();
  return AllFramePosteriors(gmm, one).row(0);
}

double LogLikelihood(const DiagonalGmm &gmm, const Matrix &frames) {
  if (frames.cols() != gmm.Dim())
    throw DataError("frame dimension does not match GMM");
  Matrix ll = WeightedLogDensities(gmm, frames);
  return NormalizeRows(&ll);
}

DiagonalGmm MapAdapt(const DiagonalGmm &ubm, const Matrix &frames,
                     double relevance) {
  ubm.Check();
  if (relevance <= 0.0) throw ConfigError("relevance must be positive");
  DiagonalGmm adapted = ubm;
  if (frames.rows() == 0) return adapted;
  Matrix gamma = AllFramePosteriors(ubm, frames);
  Vector n = gamma.colwise().sum();
  Matrix f = gamma.transpose() * frames;
  for (int k = 0; k < ubm.NumComponents(); ++k) {
    if (n[k] <= 0.0) continue;
    double alpha = n[k] / (n[k] + relevance);
    adapted.means.row(k) =
        alpha * (f.row(k) / n[k]) + (1.0 - alpha) * ubm.means.row(k);
  }
  return adapted;
}

}  // namespace nli
