// nli/audio.hpp

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

#ifndef NLI_AUDIO_HPP_
#define NLI_AUDIO_HPP_

#include <string>
#include <vector>

namespace nli {

/// Mono audio, samples in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 0;
};

/// Reads a RIFF/WAVE file. Only PCM 16-bit mono is accepted; anything else
/// gets a distinct diagnostic. int16 values are scaled by 1/32768.
AudioBuffer LoadWav(const std::string &path);

/// Writes PCM16 mono. Samples are clipped to [-1, 1] and scaled by 32767.
void WriteWav(const std::string &path, const AudioBuffer &audio);

}  // namespace nli

#endif  // NLI_AUDIO_HPP_
