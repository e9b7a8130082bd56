// nli/synth.hpp

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

#ifndef NLI_SYNTH_HPP_
#define NLI_SYNTH_HPP_

#include <string>

#include "nli/ivector.hpp"
#include "nli/pipeline.hpp"

namespace nli {

/// Synthetic labeled corpus: per class, white noise shaped by two resonators
/// plus a spectral tilt, with additive white noise on top. Stands in for
/// real speech at desk scale.
struct SynthSpec {
  int n_classes = 11;
  int train_per_class = 10;
  int dev_per_class = 3;
  int test_per_class = 0;
  double duration_s = 3.0;
  int sample_rate = 16000;
  double noise_level = 0.1;
  uint64_t seed = 0;

  void Validate() const;
};

/// Writes one WAV per utterance plus manifest.csv into out_dir; returns the
/// manifest. Deterministic per seed, byte-identical WAVs across runs.
Manifest GenerateCorpus(const SynthSpec &spec, const std::string &out_dir);

/// Numerically maximizes the latent log-posterior by coordinate-wise
/// golden-section search. Deliberately shares no code with the closed-form
/// extractor it cross-checks. Small dimensions only (K*D <= 32, R <= 4).
Vector IvectorPosteriorOracle(const TotalVariabilityModel &tv,
                              const BaumWelchStats &stats);

}  // namespace nli

#endif  // NLI_SYNTH_HPP_
