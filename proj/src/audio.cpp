// src/audio.cpp

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

#include "nli/audio.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "nli/common.hpp"

namespace nli {

namespace {

uint32_t ReadU32(const uint8_t *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const uint8_t *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<uint8_t> *out, uint32_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
  out->push_back((v >> 16) & 0xff);
  out->push_back((v >> 24) & 0xff);
}

void PutU16(std::vector<uint8_t> *out, uint16_t v) {
  out->push_back(v & 0xff);
  out->push_back((v >> 8) & 0xff);
}

}  // namespace

AudioBuffer LoadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file: " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw DataError("not a RIFF/WAVE file: " + path);

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t sample_rate = 0;
  bool have_fmt = false;
  const uint8_t *data = nullptr;
  uint32_t data_len = 0;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    uint32_t chunk_len = ReadU32(&bytes[pos + 4]);
    const uint8_t *body = &bytes[pos + 8];
    if (pos + 8 + chunk_len > bytes.size())
      throw DataError("truncated WAV chunk in " + path);
    if (std::memcmp(&bytes[pos], "fmt ", 4) == 0) {
      if (chunk_len < 16) throw DataError("malformed fmt chunk in " + path);
      format = ReadU16(body);
      channels = ReadU16(body + 2);
      sample_rate = ReadU32(body + 4);
      bits = ReadU16(body + 14);
      have_fmt = true;
    } else if (std::memcmp(&bytes[pos], "data", 4) == 0) {
      data = body;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data == nullptr)
    throw DataError("WAV missing fmt or data chunk: " + path);
  if (format != 1)
    throw DataError("unsupported WAV encoding (non-PCM) in " + path);
  if (channels != 1)
    throw DataError("unsupported channel count (" + std::to_string(channels) +
                    ") in " + path + "; mono required");
  if (bits != 16)
    throw DataError("unsupported bit depth (" + std::to_string(bits) +
                    ") in " + path + "; 16-bit required");
  if (sample_rate == 0) throw DataError("zero sample rate in " + path);

  AudioBuffer audio;
  audio.sample_rate = static_cast<int>(sample_rate);
  size_t n = data_len / 2;
  audio.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    int16_t s = static_cast<int16_t>(
        static_cast<uint16_t>(data[2 * i] | (data[2 * i + 1] << 8)));
    audio.samples[i] = static_cast<double>(s) / 32768.0;
  }
  if (audio.samples.empty()) throw DataError("empty WAV data chunk: " + path);
  return audio;
}

void WriteWav(const std::string &path, const AudioBuffer &audio) {
  std::vector<uint8_t> out;
  uint32_t data_len = static_cast<uint32_t>(audio.samples.size() * 2);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, 1);  // PCM
  PutU16(&out, 1);  // mono
  PutU32(&out, static_cast<uint32_t>(audio.sample_rate));
  PutU32(&out, static_cast<uint32_t>(audio.sample_rate) * 2);
  PutU16(&out, 2);   // block align
  PutU16(&out, 16);  // bits
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_len);
  for (double s : audio.samples) {
    double c = std::clamp(s, -1.0, 1.0);
    int16_t v = static_cast<int16_t>(std::lround(c * 32767.0));
    PutU16(&out, static_cast<uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write WAV file: " + path);
  f.write(reinterpret_cast<const char *>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

}  // namespace nli
