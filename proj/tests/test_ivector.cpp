// tests/test_ivector.cpp

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

#include <cmath>

#include "nli/synth.hpp"

using namespace nli;

namespace {

DiagonalGmm UnitUbm(int k, int d) {
  DiagonalGmm gmm;
  gmm.weights = Vector::Constant(k, 1.0 / k);
  gmm.means = Matrix::Zero(k, d);
  for (int i = 0; i < k; ++i) gmm.means.row(i).setConstant(2.0 * i);
  gmm.variances = Matrix::Ones(k, d);
  return gmm;
}

/// Random small instance for oracle cross-checks.
TotalVariabilityModel RandomTv(int k, int d, int r, Rng *rng) {
  TotalVariabilityModel tv;
  tv.ubm = UnitUbm(k, d);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j)
      tv.ubm.variances(i, j) = 0.5 + rng->NextDouble();
  tv.rank = r;
  tv.t_matrix.resize(k * d, r);
  for (int i = 0; i < k * d; ++i)
    for (int j = 0; j < r; ++j) tv.t_matrix(i, j) = rng->NextGaussian();
  return tv;
}

BaumWelchStats RandomStats(int k, int d, Rng *rng) {
  BaumWelchStats stats;
  stats.n.resize(k);
  stats.f.resize(k, d);
  for (int i = 0; i < k; ++i) {
    stats.n[i] = 10.0 * rng->NextDouble();
    for (int j = 0; j < d; ++j) stats.f(i, j) = rng->NextGaussian();
  }
  return stats;
}

}  // namespace

TEST_CASE("Baum-Welch statistics") {
  DiagonalGmm ubm = UnitUbm(1, 2);
  Matrix frames(3, 2);
  frames << 1, 2, 3, 4, 5, 6;

  SUBCASE("K=1 degenerates to simple sums") {
    BaumWelchStats stats = AccumulateBwStats(ubm, frames);
    CHECK(stats.n[0] == doctest::Approx(3.0));
    Vector expected = frames.colwise().sum().transpose() -
                      3.0 * ubm.means.row(0).transpose();
    CHECK((stats.f.row(0).transpose() - expected).cwiseAbs().maxCoeff() <
          1e-12);
  }
  SUBCASE("frames at a component mean center to zero") {
    Matrix at_mean = Matrix::Zero(5, 2);  // equals the single mean
    BaumWelchStats stats = AccumulateBwStats(ubm, at_mean);
    CHECK(stats.f.cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("soft counts sum to the frame count") {
    DiagonalGmm ubm4 = UnitUbm(4, 3);
    Rng rng(12);
    Matrix data(50, 3);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 3; ++j) data(i, j) = 3.0 * rng.NextGaussian();
    BaumWelchStats stats = AccumulateBwStats(ubm4, data);
    CHECK(std::abs(stats.n.sum() - 50.0) <= 1e-8);
  }
}

TEST_CASE("closed-form extraction: scalar case") {
  TotalVariabilityModel tv;
  tv.ubm.weights = Vector::Ones(1);
  tv.ubm.means = Matrix::Zero(1, 1);
  tv.ubm.variances = Matrix::Ones(1, 1);
  tv.rank = 1;
  tv.t_matrix = Matrix::Ones(1, 1);
  BaumWelchStats stats;
  stats.n = Vector::Constant(1, 4.0);
  stats.f = Matrix::Constant(1, 1, 2.0);
  Vector w = ExtractIvector(tv, stats);
  CHECK(w[0] == doctest::Approx(0.4).epsilon(1e-12));

  SUBCASE("oracle agrees on the scalar case") {
    Vector o = IvectorPosteriorOracle(tv, stats);
    CHECK(o[0] == doctest::Approx(0.4).epsilon(1e-6));
  }
  SUBCASE("zero subspace gives the prior mean") {
    tv.t_matrix.setZero();
    CHECK(ExtractIvector(tv, stats).cwiseAbs().maxCoeff() == 0.0);
    CHECK(IvectorPosteriorOracle(tv, stats).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("closed form matches the numeric posterior oracle") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 50) {
    int k = 1 + static_cast<int>(rng.NextBelow(5));
    int d = 1 + static_cast<int>(rng.NextBelow(4));
    int r = 1 + static_cast<int>(rng.NextBelow(3));
    if (k * d > 32) continue;
    TotalVariabilityModel tv = RandomTv(k, d, r, &rng);
    BaumWelchStats stats = RandomStats(k, d, &rng);
    Vector closed = ExtractIvector(tv, stats);
    Vector oracle = IvectorPosteriorOracle(tv, stats);
    double rel = (closed - oracle).norm() / std::max(closed.norm(), 1e-12);
    CHECK(rel <= 1e-6);
    ++checked;
  }
}

TEST_CASE("extraction is linear in the first-order stats") {
  Rng rng(5);
  TotalVariabilityModel tv = RandomTv(3, 2, 2, &rng);
  BaumWelchStats stats = RandomStats(3, 2, &rng);
  Vector w1 = ExtractIvector(tv, stats);
  BaumWelchStats scaled = stats;
  scaled.f *= 2.5;
  Vector w2 = ExtractIvector(tv, scaled);
  CHECK((w2 - 2.5 * w1).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("posterior precision is positive definite for n >= 0") {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    TotalVariabilityModel tv = RandomTv(2, 2, 2, &rng);
    BaumWelchStats stats = RandomStats(2, 2, &rng);
    // PD is asserted inside ExtractIvector via the Cholesky
    CHECK_NOTHROW(ExtractIvector(tv, stats));
  }
}

TEST_CASE("subspace training") {
  SUBCASE("centered stats keep the latent at zero") {
    DiagonalGmm ubm = UnitUbm(2, 2);
    std::vector<BaumWelchStats> stats_list;
    for (int u = 0; u < 4; ++u) {
      BaumWelchStats s;
      s.n = Vector::Constant(2, 5.0);
      s.f = Matrix::Zero(2, 2);
      stats_list.push_back(s);
    }
    TvTrainConfig cfg;
    cfg.rank = 2;
    cfg.n_iterations = 3;
    TotalVariabilityModel tv = TrainTotalVariability(stats_list, ubm, cfg);
    for (const auto &s : stats_list)
      CHECK(ExtractIvector(tv, s).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("scalar generative case recovers the subspace scale") {
    // f = n * t * w + sqrt(n * sigma^2) * noise, w ~ N(0,1)
    DiagonalGmm ubm = UnitUbm(1, 1);
    const double t_true = 2.0;
    const double n_frames = 100.0;
    Rng rng(314);
    std::vector<BaumWelchStats> stats_list;
    for (int u = 0; u < 400; ++u) {
      double w = rng.NextGaussian();
      BaumWelchStats s;
      s.n = Vector::Constant(1, n_frames);
      s.f = Matrix::Constant(
          1, 1, n_frames * t_true * w + std::sqrt(n_frames) *
                                            rng.NextGaussian());
      stats_list.push_back(s);
    }
    TvTrainConfig cfg;
    cfg.rank = 1;
    cfg.n_iterations = 20;
    cfg.seed = 7;
    TotalVariabilityModel tv = TrainTotalVariability(stats_list, ubm, cfg);
    // sign of t is unobservable
    CHECK(std::abs(std::abs(tv.t_matrix(0, 0)) - t_true) / t_true < 0.05);
  }

  SUBCASE("training is deterministic per seed") {
    DiagonalGmm ubm = UnitUbm(2, 2);
    Rng rng(99);
    std::vector<BaumWelchStats> stats_list;
    for (int u = 0; u < 6; ++u) stats_list.push_back(RandomStats(2, 2, &rng));
    TvTrainConfig cfg;
    cfg.rank = 2;
    cfg.n_iterations = 4;
    cfg.seed = 123;
    TotalVariabilityModel a = TrainTotalVariability(stats_list, ubm, cfg);
    TotalVariabilityModel b = TrainTotalVariability(stats_list, ubm, cfg);
    CHECK((a.t_matrix - b.t_matrix).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("mean squared latent norm moves monotonically early on") {
    DiagonalGmm ubm = UnitUbm(2, 2);
    const double n_frames = 60.0;
    Rng rng(2718);
    Matrix t_true(4, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 2; ++j) t_true(i, j) = rng.NextGaussian();
    std::vector<BaumWelchStats> stats_list;
    for (int u = 0; u < 100; ++u) {
      Vector w(2);
      w << rng.NextGaussian(), rng.NextGaussian();
      Vector offset = t_true * w;
      BaumWelchStats s;
      s.n = Vector::Constant(2, n_frames);
      s.f.resize(2, 2);
      for (int k = 0; k < 2; ++k)
        for (int d = 0; d < 2; ++d)
          s.f(k, d) = n_frames * offset[k * 2 + d] +
                      std::sqrt(n_frames) * rng.NextGaussian();
      stats_list.push_back(s);
    }
    TvTrainConfig cfg;
    cfg.rank = 2;
    cfg.n_iterations = 5;
    cfg.seed = 11;
    std::vector<double> history;
    TrainTotalVariability(stats_list, ubm, cfg, &history);
    REQUIRE(history.size() >= 3);
    bool increasing = history[1] >= history[0] && history[2] >= history[1];
    bool decreasing = history[1] <= history[0] && history[2] <= history[1];
    CHECK((increasing || decreasing));
  }

  SUBCASE("rank and utterance-count preconditions") {
    DiagonalGmm ubm = UnitUbm(1, 1);
    Rng rng(1);
    std::vector<BaumWelchStats> one = {RandomStats(1, 1, &rng)};
    TvTrainConfig cfg;
    cfg.rank = 1;
    CHECK_THROWS_AS(TrainTotalVariability(one, ubm, cfg), DataError);
    std::vector<BaumWelchStats> two = {RandomStats(1, 1, &rng),
                                       RandomStats(1, 1, &rng)};
    cfg.rank = 5;  // > K*D
    CHECK_THROWS_AS(TrainTotalVariability(two, ubm, cfg), ConfigError);
  }
}
