// Copyright 2026  The distse Authors
//
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

#include "distse/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace distse {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t ReadU16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char> *out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void PutU16(std::vector<unsigned char> *out, uint16_t v) {
  out->push_back(static_cast<unsigned char>(v & 0xff));
  out->push_back(static_cast<unsigned char>(v >> 8));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open WAV file " + path);
  const std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  auto malformed = [&](const std::string &why) {
    return Error("malformed WAV " + path + ": " + why);
  };
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw malformed("missing RIFF/WAVE header");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  const unsigned char *payload = nullptr;
  size_t payload_len = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char *chunk = data.data() + pos;
    const uint32_t len = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    if (body + len > data.size()) {
      // Tolerate a truncated data chunk, as many writers leave it so.
      if (std::memcmp(chunk, "data", 4) != 0) throw malformed("truncated chunk");
    }
    const size_t avail = std::min<size_t>(len, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw malformed("short fmt chunk");
      format = ReadU16(data.data() + body);
      channels = ReadU16(data.data() + body + 2);
      rate = ReadU32(data.data() + body + 4);
      bits = ReadU16(data.data() + body + 14);
      if (format == kFormatExtensible && avail >= 26)
        format = ReadU16(data.data() + body + 24);
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = data.data() + body;
      payload_len = avail;
    }
    pos = body + avail + (avail & 1);
  }
  if (!have_fmt) throw malformed("no fmt chunk");
  if (payload == nullptr) throw malformed("no data chunk");
  if (rate == 0) throw malformed("zero sample rate");
  if (channels != 1)
    throw Error("unsupported WAV encoding in " + path + ": " +
                std::to_string(channels) + " channels (mono required)");

  Waveform wave;
  wave.sample_rate = static_cast<int>(rate);
  if (format == kFormatPcm && bits == 16) {
    const size_t n = payload_len / 2;
    wave.samples.resize(n);
    for (size_t i = 0; i < n; ++i)
      wave.samples[i] = static_cast<int16_t>(ReadU16(payload + 2 * i)) / 32768.0;
  } else if (format == kFormatFloat && bits == 32) {
    const size_t n = payload_len / 4;
    wave.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      const uint32_t u = ReadU32(payload + 4 * i);
      float f;
      std::memcpy(&f, &u, sizeof f);
      wave.samples[i] = f;
    }
  } else {
    throw Error("unsupported WAV encoding in " + path + ": format " +
                std::to_string(format) + ", " + std::to_string(bits) + " bits");
  }
  return wave;
}

WavWriteReport WriteWav(const std::string &path, const Waveform &wave) {
  wave.Validate();
  WavWriteReport report;
  const uint32_t data_len = static_cast<uint32_t>(wave.size() * 2);
  std::vector<unsigned char> out;
  out.reserve(44 + data_len);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  PutU32(&out, 36 + data_len);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&out, 16);
  PutU16(&out, kFormatPcm);
  PutU16(&out, 1);
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(&out, static_cast<uint32_t>(wave.sample_rate) * 2);
  PutU16(&out, 2);
  PutU16(&out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  PutU32(&out, data_len);
  for (double s : wave.samples) {
    if (s > 1.0 || s < -1.0) ++report.clipped_samples;
    const double q = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto v = static_cast<int16_t>(std::clamp(q, -32768.0, 32767.0));
    PutU16(&out, static_cast<uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write WAV file " + path);
  f.write(reinterpret_cast<const char *>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error("write failed for " + path);
  return report;
}

}  // namespace distse
