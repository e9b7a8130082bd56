// src/synth.cpp

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

#include "nli/synth.hpp"

#include <cmath>
#include <filesystem>

#include "nli/audio.hpp"

namespace fs = std::filesystem;

namespace nli {

namespace {

// L1 codes from the eleven-way task this corpus stands in for.
const char *kClassCodes[] = {"ARA", "CHI", "FRE", "GER", "HIN", "ITA",
                             "JAP", "KOR", "SPA", "TEL", "TUR"};

struct ClassSignature {
  double warp;  // multiplicative shift applied to every resonance target
  double tilt_db_per_octave;
};

/// All classes share one inventory of resonance-pair targets ("phonemes");
/// what identifies a class is a consistent spectral warp plus a tilt.  This
/// puts class identity into per-component mean offsets rather than into
/// component occupancy, which is the regime the downstream models assume.
struct PhonemeTarget {
  double f1_hz;
  double f2_hz;
};

constexpr int kNumPhonemes = 10;

std::vector<PhonemeTarget> PhonemeInventory(uint64_t seed) {
  Rng rng(seed ^ 0x70686f6e656d65ULL);
  std::vector<PhonemeTarget> inv(kNumPhonemes);
  for (int p = 0; p < kNumPhonemes; ++p) {
    // log-spaced with a little seed jitter; the second resonance is shuffled
    // so neighbours in f1 are not neighbours in f2
    double j1 = 0.9 + 0.2 * rng.NextDouble();
    double j2 = 0.9 + 0.2 * rng.NextDouble();
    int q = (3 * p + 1) % kNumPhonemes;
    inv[p].f1_hz = 320.0 * std::pow(2.0, p / 5.0) * j1;
    inv[p].f2_hz = 1300.0 * std::pow(2.0, q / 6.0) * j2;
  }
  return inv;
}

/// Stratified warp over [0.92, 1.08] band by band, tilt linearly spaced over
/// [-6, +6] dB/oct.  Seed jitter keeps corpora with different seeds distinct
/// without ever letting two classes collide.
ClassSignature SignatureFor(int class_idx, int n_classes, uint64_t seed) {
  Rng rng(seed ^ (0x636c617373ULL + static_cast<uint64_t>(class_idx)));
  const double lo = 0.90, hi = 1.10;
  double band = (hi - lo) / n_classes;
  ClassSignature sig;
  sig.warp = lo + band * (class_idx + 0.25 + 0.5 * rng.NextDouble());
  // golden-ratio shuffle so classes adjacent in warp are far apart in tilt
  double u = std::fmod((class_idx + 1) * 0.6180339887498949, 1.0);
  sig.tilt_db_per_octave = -6.0 + 12.0 * u;
  return sig;
}

/// Two-pole resonator at (freq, radius 0.97) applied in place.
void Resonate(std::vector<double> *x, double freq_hz, int sample_rate) {
  const double theta = 2.0 * M_PI * freq_hz / sample_rate;
  const double r = 0.97;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  double y1 = 0.0, y2 = 0.0;
  for (double &v : *x) {
    double y = v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

/// First-order tilt: differencing for a rising spectrum, a leaky integrator
/// for a falling one.
void ApplyTilt(std::vector<double> *x, double tilt_db_per_octave) {
  double a = std::min(std::abs(tilt_db_per_octave) / 6.0 * 0.8, 0.95);
  if (a <= 0.0) return;
  if (tilt_db_per_octave > 0.0) {
    double prev = 0.0;
    for (double &v : *x) {
      double cur = v;
      v = cur - a * prev;
      prev = cur;
    }
  } else {
    double y = 0.0;
    for (double &v : *x) {
      y = v + a * y;
      v = y;
    }
  }
}

void NormalizeRms(std::vector<double> *x, double target) {
  double ss = 0.0;
  for (double v : *x) ss += v * v;
  double rms = std::sqrt(ss / x->size());
  if (rms > 0.0)
    for (double &v : *x) v *= target / rms;
}

AudioBuffer SynthesizeUtterance(const SynthSpec &spec,
                                const std::vector<PhonemeTarget> &inventory,
                                const ClassSignature &sig, uint64_t utt_seed) {
  const int n = static_cast<int>(spec.duration_s * spec.sample_rate);
  Rng rng(utt_seed);
  // small per-utterance warp jitter stands in for speaker variability
  double warp = sig.warp * (1.0 + 0.003 * rng.NextGaussian());
  std::vector<double> x(n);
  int pos = 0;
  int prev = -1;
  while (pos < n) {
    // 80-120 ms segments walking the shared inventory
    int seg = static_cast<int>((0.08 + 0.04 * rng.NextDouble()) *
                               spec.sample_rate);
    seg = std::min(seg, n - pos);
    int p = static_cast<int>(rng.NextBelow(kNumPhonemes));
    if (p == prev) p = (p + 1) % kNumPhonemes;
    prev = p;
    std::vector<double> chunk(seg);
    for (double &v : chunk) v = rng.NextGaussian();
    Resonate(&chunk, warp * inventory[p].f1_hz, spec.sample_rate);
    Resonate(&chunk, warp * inventory[p].f2_hz, spec.sample_rate);
    for (int i = 0; i < seg; ++i) x[pos + i] = chunk[i];
    pos += seg;
  }
  ApplyTilt(&x, sig.tilt_db_per_octave);
  NormalizeRms(&x, 0.15);
  if (spec.noise_level > 0.0)
    for (double &v : x) v += spec.noise_level * 0.15 * rng.NextGaussian();
  // headroom so PCM16 quantization never clips
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.9)
    for (double &v : x) v *= 0.9 / peak;

  AudioBuffer audio;
  audio.sample_rate = spec.sample_rate;
  audio.samples = std::move(x);
  return audio;
}

}  // namespace

void SynthSpec::Validate() const {
  if (n_classes < 2) throw ConfigError("n_classes must be >= 2");
  if (train_per_class < 1) throw ConfigError("train_per_class must be >= 1");
  if (dev_per_class < 0 || test_per_class < 0)
    throw ConfigError("per-split counts must be non-negative");
  if (duration_s <= 0.0 || sample_rate < 1000)
    throw ConfigError("invalid duration or sample rate");
  if (noise_level < 0.0) throw ConfigError("noise_level must be >= 0");
}

Manifest GenerateCorpus(const SynthSpec &spec, const std::string &out_dir) {
  spec.Validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create output directory: " + out_dir);

  Manifest manifest;
  std::vector<PhonemeTarget> inventory = PhonemeInventory(spec.seed);
  for (int c = 0; c < spec.n_classes; ++c) {
    std::string label =
        c < 11 && spec.n_classes <= 11
            ? kClassCodes[c]
            : "C" + std::string(c < 10 ? "0" : "") + std::to_string(c);
    ClassSignature sig = SignatureFor(c, spec.n_classes, spec.seed);
    const struct { Split split; int count; } groups[] = {
        {Split::kTrain, spec.train_per_class},
        {Split::kDev, spec.dev_per_class},
        {Split::kTest, spec.test_per_class},
    };
    for (const auto &g : groups) {
      for (int u = 0; u < g.count; ++u) {
        uint64_t utt_seed = spec.seed ^
                            (static_cast<uint64_t>(c) << 40) ^
                            (static_cast<uint64_t>(g.split) << 32) ^
                            static_cast<uint64_t>(u + 1);
        AudioBuffer audio = SynthesizeUtterance(spec, inventory, sig, utt_seed);
        std::string name = label + "_" + SplitName(g.split) + "_" +
                           std::to_string(u) + ".wav";
        std::string path = out_dir + "/" + name;
        WriteWav(path, audio);
        manifest.entries.push_back({path, label, g.split});
      }
    }
  }
  SaveManifest(manifest, out_dir + "/manifest.csv");
  return manifest;
}

Vector IvectorPosteriorOracle(const TotalVariabilityModel &tv,
                              const BaumWelchStats &stats) {
  const int K = tv.ubm.NumComponents();
  const int D = tv.ubm.Dim();
  const int R = tv.rank;
  if (K * D > 32 || R > 4)
    throw ConfigError("oracle limited to K*D <= 32, R <= 4");

  // supervector-level arrays, built with plain loops
  const int KD = K * D;
  std::vector<double> inv_var(KD), n_rep(KD), f_stacked(KD);
  for (int k = 0; k < K; ++k) {
    for (int d = 0; d < D; ++d) {
      inv_var[k * D + d] = 1.0 / tv.ubm.variances(k, d);
      n_rep[k * D + d] = stats.n[k];
      f_stacked[k * D + d] = stats.f(k, d);
    }
  }

  // negative log posterior (up to a constant), evaluated directly
  auto objective = [&](const std::vector<double> &w) {
    std::vector<double> tw(KD, 0.0);
    for (int i = 0; i < KD; ++i)
      for (int j = 0; j < R; ++j) tw[i] += tv.t_matrix(i, j) * w[j];
    double quad = 0.0, lin = 0.0, prior = 0.0;
    for (int i = 0; i < KD; ++i) {
      quad += n_rep[i] * inv_var[i] * tw[i] * tw[i];
      lin += inv_var[i] * f_stacked[i] * tw[i];
    }
    for (int j = 0; j < R; ++j) prior += w[j] * w[j];
    return 0.5 * prior - lin + 0.5 * quad;
  };

  const double golden = 0.6180339887498949;
  std::vector<double> w(R, 0.0);
  double step = 10.0;
  for (int pass = 0; pass < 5000; ++pass) {
    double max_move = 0.0;
    for (int j = 0; j < R; ++j) {
      double lo = w[j] - step, hi = w[j] + step;
      double x1 = hi - golden * (hi - lo);
      double x2 = lo + golden * (hi - lo);
      auto eval = [&](double v) {
        std::vector<double> trial = w;
        trial[j] = v;
        return objective(trial);
      };
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
          hi = x2;
          x2 = x1;
          f2 = f1;
          x1 = hi - golden * (hi - lo);
          f1 = eval(x1);
        } else {
          lo = x1;
          x1 = x2;
          f1 = f2;
          x2 = lo + golden * (hi - lo);
          f2 = eval(x2);
        }
      }
      double next = 0.5 * (lo + hi);
      max_move = std::max(max_move, std::abs(next - w[j]));
      w[j] = next;
    }
    if (max_move < 1e-10 && pass > 2) break;
    step = std::max(4.0 * max_move, 1e-6);
  }

  Vector out(R);
  for (int j = 0; j < R; ++j) out[j] = w[j];
  return out;
}

}  // namespace nli
