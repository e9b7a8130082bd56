// nli/frontend.hpp

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

#ifndef NLI_FRONTEND_HPP_
#define NLI_FRONTEND_HPP_

#include <map>
#include <string>
#include <vector>

#include "nli/audio.hpp"
#include "nli/common.hpp"

namespace nli {

enum class FilterbankFamily { kMel, kGammatone };
enum class WindowFunction { kHamming, kRectangular };

/// Cepstral front-end configuration. Defaults: 26 bands over 20-8000 Hz,
/// 20 cepstra, 60 ms window / 10 ms hop, DCT type 3, delta width 9.
///
/// Note on dct_type: both the orthonormal DCT-II (the textbook cepstral
/// transform) and DCT-III are provided; the default is 3. Some toolkits index
/// their DCT variants differently, so the switch is exposed.
struct FrontendConfig {
  int n_bands = 26;
  double fmin_hz = 20.0;
  double fmax_hz = 8000.0;
  int n_ceps = 20;
  double window_ms = 60.0;
  double hop_ms = 10.0;
  int dct_type = 3;  // 2 or 3
  int delta_width = 9;
  FilterbankFamily family = FilterbankFamily::kMel;
  int fft_size = 0;  // 0 = smallest power of two >= window samples
  double log_floor = 1e-10;
  WindowFunction window = WindowFunction::kHamming;

  void Validate(int sample_rate) const;

  /// Applies key=value overrides (keys: n_bands, fmin, fmax, n_ceps,
  /// window_ms, hop_ms, dct_type, delta_width, filterbank_family, fft_size,
  /// log_floor, window_function). Unknown keys are rejected.
  void ApplyOverrides(const std::map<std::string, std::string> &kv);

  std::string ToText() const;

  int WindowSamples(int sample_rate) const;
  int HopSamples(int sample_rate) const;
  int FftSize(int sample_rate) const;
};

/// n_bands x (fft_size/2 + 1) non-negative weights.
struct FilterbankMatrix {
  Matrix weights;
  std::vector<double> center_freqs_hz;
};

/// T x 60 features (cepstra ++ deltas ++ delta-deltas) at 1000/hop_ms fps.
struct FeatureMatrix {
  Matrix frames;
  double frame_rate = 0.0;
};

double HzToMel(double hz);
double MelToHz(double mel);

/// Equivalent rectangular bandwidth at a given frequency (Glasberg-Moore).
double ErbAt(double hz);

/// ERB-number scale and its inverse, used to place gammatone centers.
double HzToErbScale(double hz);
double ErbScaleToHz(double erb);

/// Slices the signal into overlapping frames and applies the window.
/// Throws DataError("utterance too short ...") if fewer than one window fits.
Matrix FrameAndWindow(const AudioBuffer &audio, const FrontendConfig &cfg);

/// Per row: zero-pad to fft_size, one-sided |DFT|^2.
Matrix PowerSpectrum(const Matrix &frames, int fft_size);

/// Mel: triangular filters, centers uniform on the mel scale.
/// Gammatone: sampled squared magnitude of a 4th-order gammatone at
/// ERB-spaced centers, rows normalized to unit sum.
FilterbankMatrix BuildFilterbank(const FrontendConfig &cfg, int sample_rate);

/// fb * spectrum_row, then log(max(., log_floor)).
Matrix ApplyFilterbankLog(const Matrix &spectrum, const FilterbankMatrix &fb,
                          double log_floor);

/// Orthonormal DCT (type per cfg) of each row, keeping coefficients
/// 0..n_ceps-1.
Matrix CepstralTransform(const Matrix &log_energies, const FrontendConfig &cfg);

/// Orthonormal DCT matrix (type 2 or 3), size n x n.
Matrix DctMatrix(int n, int type);

/// Regression deltas with replication padding at the edges.
Matrix ComputeDeltas(const Matrix &ceps, int width);

/// Full front-end: cepstra, deltas, delta-deltas, column-concatenated.
FeatureMatrix ExtractFeatures(const AudioBuffer &audio,
                              const FrontendConfig &cfg);

}  // namespace nli

#endif  // NLI_FRONTEND_HPP_
