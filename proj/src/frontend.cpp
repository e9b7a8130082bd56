// src/frontend.cpp

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

#include "nli/frontend.hpp"

#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

namespace nli {

namespace {

int NextPow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT.
void Fft(std::vector<std::complex<double>> *a) {
  const size_t n = a->size();
  if (n <= 1) return;
  // bit reversal
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap((*a)[i], (*a)[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = (*a)[i + k];
        std::complex<double> v = (*a)[i + k + len / 2] * w;
        (*a)[i + k] = u + v;
        (*a)[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double ParseDouble(const std::string &key, const std::string &val) {
  try {
    size_t used = 0;
    double d = std::stod(val, &used);
    if (used != val.size()) throw std::invalid_argument(val);
    return d;
  } catch (const std::exception &) {
    throw ConfigError("bad numeric value for " + key + ": '" + val + "'");
  }
}

int ParseInt(const std::string &key, const std::string &val) {
  double d = ParseDouble(key, val);
  int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("expected integer for " + key + ": '" + val + "'");
  return i;
}

}  // namespace

void FrontendConfig::Validate(int sample_rate) const {
  if (n_bands < 1) throw ConfigError("n_bands must be >= 1");
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz))
    throw ConfigError("require 0 <= fmin < fmax");
  if (fmax_hz > sample_rate / 2.0)
    throw ConfigError("fmax " + std::to_string(fmax_hz) +
                      " Hz exceeds Nyquist for sample rate " +
                      std::to_string(sample_rate));
  if (n_ceps < 1 || n_ceps > n_bands)
    throw ConfigError("require 1 <= n_ceps <= n_bands");
  if (window_ms <= 0.0 || hop_ms <= 0.0)
    throw ConfigError("window_ms and hop_ms must be positive");
  if (dct_type != 2 && dct_type != 3)
    throw ConfigError("dct_type must be 2 or 3");
  if (delta_width < 3 || delta_width % 2 == 0)
    throw ConfigError("delta_width must be odd and >= 3");
  if (log_floor <= 0.0) throw ConfigError("log_floor must be positive");
  int win = WindowSamples(sample_rate);
  if (fft_size != 0) {
    if ((fft_size & (fft_size - 1)) != 0 || fft_size < win)
      throw ConfigError("fft_size must be a power of two >= window length");
  }
}

void FrontendConfig::ApplyOverrides(
    const std::map<std::string, std::string> &kv) {
  for (const auto &[key, val] : kv) {
    if (key == "n_bands") n_bands = ParseInt(key, val);
    else if (key == "fmin") fmin_hz = ParseDouble(key, val);
    else if (key == "fmax") fmax_hz = ParseDouble(key, val);
    else if (key == "n_ceps") n_ceps = ParseInt(key, val);
    else if (key == "window_ms") window_ms = ParseDouble(key, val);
    else if (key == "hop_ms") hop_ms = ParseDouble(key, val);
    else if (key == "dct_type") {
      dct_type = ParseInt(key, val);
      if (dct_type != 2 && dct_type != 3)
        throw ConfigError("dct_type must be 2 or 3");
    }
    else if (key == "delta_width") delta_width = ParseInt(key, val);
    else if (key == "fft_size") fft_size = ParseInt(key, val);
    else if (key == "log_floor") log_floor = ParseDouble(key, val);
    else if (key == "filterbank_family") {
      if (val == "mel") family = FilterbankFamily::kMel;
      else if (val == "gammatone") family = FilterbankFamily::kGammatone;
      else throw ConfigError("filterbank_family must be mel or gammatone");
    } else if (key == "window_function") {
      if (val == "hamming") window = WindowFunction::kHamming;
      else if (val == "rectangular") window = WindowFunction::kRectangular;
      else throw ConfigError("window_function must be hamming or rectangular");
    } else {
      throw ConfigError("unknown frontend config key: " + key);
    }
  }
}

std::string FrontendConfig::ToText() const {
  std::ostringstream os;
  os << "n_bands=" << n_bands << "\n"
     << "fmin=" << fmin_hz << "\n"
     << "fmax=" << fmax_hz << "\n"
     << "n_ceps=" << n_ceps << "\n"
     << "window_ms=" << window_ms << "\n"
     << "hop_ms=" << hop_ms << "\n"
     << "dct_type=" << dct_type << "\n"
     << "delta_width=" << delta_width << "\n"
     << "filterbank_family="
     << (family == FilterbankFamily::kMel ? "mel" : "gammatone") << "\n"
     << "fft_size=" << fft_size << "\n"
     << "log_floor=" << log_floor << "\n"
     << "window_function="
     << (window == WindowFunction::kHamming ? "hamming" : "rectangular")
     << "\n";
  return os.str();
}

int FrontendConfig::WindowSamples(int sample_rate) const {
  return static_cast<int>(std::lround(window_ms * sample_rate / 1000.0));
}

int FrontendConfig::HopSamples(int sample_rate) const {
  return static_cast<int>(std::lround(hop_ms * sample_rate / 1000.0));
}

int FrontendConfig::FftSize(int sample_rate) const {
  if (fft_size != 0) return fft_size;
  return NextPow2(WindowSamples(sample_rate));
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double ErbAt(double hz) { return 24.7 * (4.37 * hz / 1000.0 + 1.0); }

double HzToErbScale(double hz) {
  return 21.4 * std::log10(4.37 * hz / 1000.0 + 1.0);
}

double ErbScaleToHz(double erb) {
  return (std::pow(10.0, erb / 21.4) - 1.0) * 1000.0 / 4.37;
}

Matrix FrameAndWindow(const AudioBuffer &audio, const FrontendConfig &cfg) {
  if (audio.samples.empty()) throw DataError("empty audio buffer");
  const int win = cfg.WindowSamples(audio.sample_rate);
  const int hop = cfg.HopSamples(audio.sample_rate);
  const int len = static_cast<int>(audio.samples.size());
  if (len < win)
    throw DataError("utterance too short: " + std::to_string(len) +
                    " samples < window of " + std::to_string(win));
  const int n_frames = 1 + (len - win) / hop;

  Vector window(win);
  if (cfg.window == WindowFunction::kHamming) {
    for (int i = 0; i < win; ++i)
      window[i] = 0.54 - 0.46 * std::cos(2.0 * M_PI * i / (win - 1));
  } else {
    window.setOnes();
  }

  Matrix frames(n_frames, win);
  for (int t = 0; t < n_frames; ++t) {
    const int off = t * hop;
    for (int i = 0; i < win; ++i)
      frames(t, i) = audio.samples[off + i] * window[i];
  }
  return frames;
}

Matrix PowerSpectrum(const Matrix &frames, int fft_size) {
  const int n_frames = static_cast<int>(frames.rows());
  const int win = static_cast<int>(frames.cols());
  if (fft_size < win || (fft_size & (fft_size - 1)) != 0)
    throw ConfigError("fft_size must be a power of two >= frame length");
  const int n_bins = fft_size / 2 + 1;
  Matrix spectrum(n_frames, n_bins);
  std::vector<std::complex<double>> buf(fft_size);
  for (int t = 0; t < n_frames; ++t) {
    for (int i = 0; i < win; ++i) buf[i] = frames(t, i);
    for (int i = win; i < fft_size; ++i) buf[i] = 0.0;
    Fft(&buf);
    for (int b = 0; b < n_bins; ++b) spectrum(t, b) = std::norm(buf[b]);
  }
  return spectrum;
}

FilterbankMatrix BuildFilterbank(const FrontendConfig &cfg, int sample_rate) {
  cfg.Validate(sample_rate);
  const int fft_size = cfg.FftSize(sample_rate);
  const int n_bins = fft_size / 2 + 1;
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;

  FilterbankMatrix fb;
  fb.weights = Matrix::Zero(cfg.n_bands, n_bins);
  fb.center_freqs_hz.resize(cfg.n_bands);

  if (cfg.family == FilterbankFamily::kMel) {
    // n_bands + 2 mel-uniform edge points; triangle b spans edges b..b+2.
    const double mel_lo = HzToMel(cfg.fmin_hz);
    const double mel_hi = HzToMel(cfg.fmax_hz);
    std::vector<double> edges(cfg.n_bands + 2);
    for (int i = 0; i < cfg.n_bands + 2; ++i)
      edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_bands + 1));
    for (int b = 0; b < cfg.n_bands; ++b) {
      const double lo = edges[b], c = edges[b + 1], hi = edges[b + 2];
      fb.center_freqs_hz[b] = c;
      for (int k = 0; k < n_bins; ++k) {
        const double f = k * bin_hz;
        double w = 0.0;
        if (f > lo && f < c) w = (f - lo) / (c - lo);
        else if (f >= c && f < hi) w = (hi - f) / (hi - c);
        fb.weights(b, k) = w;
      }
    }
  } else {
    // 4th-order gammatone magnitude response, ERB-spaced centers,
    // bandwidth 1.019 * ERB(fc), rows normalized to unit sum.
    const double e_lo = HzToErbScale(cfg.fmin_hz);
    const double e_hi = HzToErbScale(cfg.fmax_hz);
    for (int b = 0; b < cfg.n_bands; ++b) {
      const double fc =
          ErbScaleToHz(e_lo + (e_hi - e_lo) * (b + 1) / (cfg.n_bands + 1));
      fb.center_freqs_hz[b] = fc;
      const double bw = 1.019 * ErbAt(fc);
      double row_sum = 0.0;
      for (int k = 0; k < n_bins; ++k) {
        const double f = k * bin_hz;
        const double u = (f - fc) / bw;
        const double w = std::pow(1.0 + u * u, -4.0);
        fb.weights(b, k) = w;
        row_sum += w;
      }
      fb.weights.row(b) /= row_sum;
    }
  }

  for (int b = 0; b < cfg.n_bands; ++b) {
    if (fb.weights.row(b).maxCoeff() <= 0.0)
      throw ConfigError("filterbank row " + std::to_string(b) +
                        " has no positive weight; increase fft_size");
  }
  return fb;
}

Matrix ApplyFilterbankLog(const Matrix &spectrum, const FilterbankMatrix &fb,
                          double log_floor) {
  if (spectrum.cols() != fb.weights.cols())
    throw DataError("spectrum/filterbank bin count mismatch");
  Matrix energies = spectrum * fb.weights.transpose();
  return energies.unaryExpr(
      [log_floor](double v) { return std::log(std::max(v, log_floor)); });
}

Matrix DctMatrix(int n, int type) {
  Matrix dct(n, n);
  const double s0 = std::sqrt(1.0 / n);
  const double s = std::sqrt(2.0 / n);
  if (type == 2) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        dct(k, j) = (k == 0 ? s0 : s) *
                    std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
  } else if (type == 3) {
    // orthonormal DCT-III = transpose (inverse) of orthonormal DCT-II
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        dct(k, j) = (j == 0 ? s0 : s) *
                    std::cos(M_PI * (2.0 * k + 1.0) * j / (2.0 * n));
  } else {
    throw ConfigError("dct_type must be 2 or 3");
  }
  return dct;
}

Matrix CepstralTransform(const Matrix &log_energies,
                         const FrontendConfig &cfg) {
  const int n = static_cast<int>(log_energies.cols());
  if (cfg.n_ceps > n) throw ConfigError("n_ceps exceeds band count");
  Matrix dct = DctMatrix(n, cfg.dct_type);
  return log_energies * dct.topRows(cfg.n_ceps).transpose();
}

Matrix ComputeDeltas(const Matrix &ceps, int width) {
  if (width < 3 || width % 2 == 0)
    throw ConfigError("delta width must be odd and >= 3");
  const int half = (width - 1) / 2;
  const int n_frames = static_cast<int>(ceps.rows());
  double denom = 0.0;
  for (int n = 1; n <= half; ++n) denom += 2.0 * n * n;
  Matrix deltas = Matrix::Zero(n_frames, ceps.cols());
  for (int t = 0; t < n_frames; ++t) {
    for (int n = 1; n <= half; ++n) {
      const int fwd = std::min(t + n, n_frames - 1);
      const int bwd = std::max(t - n, 0);
      deltas.row(t) += n * (ceps.row(fwd) - ceps.row(bwd));
    }
    deltas.row(t) /= denom;
  }
  return deltas;
}

FeatureMatrix ExtractFeatures(const AudioBuffer &audio,
                              const FrontendConfig &cfg) {
  cfg.Validate(audio.sample_rate);
  Matrix frames = FrameAndWindow(audio, cfg);
  Matrix spectrum = PowerSpectrum(frames, cfg.FftSize(audio.sample_rate));
  FilterbankMatrix fb = BuildFilterbank(cfg, audio.sample_rate);
  Matrix log_energies = ApplyFilterbankLog(spectrum, fb, cfg.log_floor);
  Matrix ceps = CepstralTransform(log_energies, cfg);
  Matrix d1 = ComputeDeltas(ceps, cfg.delta_width);
  Matrix d2 = ComputeDeltas(d1, cfg.delta_width);

  FeatureMatrix out;
  out.frames.resize(ceps.rows(), 3 * cfg.n_ceps);
  out.frames << ceps, d1, d2;
  out.frame_rate = 1000.0 / cfg.hop_ms;
  if (!out.frames.allFinite())
    throw DataError("non-finite value in extracted features");
  return out;
}

}  // namespace nli
