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

#ifndef DISTSE_WAV_IO_H_
#define DISTSE_WAV_IO_H_

#include <cstddef>
#include <string>

#include "distse/dsp.h"

namespace distse {

// Reads RIFF/WAVE mono files: PCM 16-bit or IEEE float 32-bit.
Waveform ReadWav(const std::string &path);

struct WavWriteReport {
  size_t clipped_samples = 0;  // samples outside [-1, 1] that were clamped
};

// Writes 16-bit little-endian PCM mono.
WavWriteReport WriteWav(const std::string &path, const Waveform &wave);

}  // namespace distse

#endif  // DISTSE_WAV_IO_H_
