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

#ifndef DISTSE_SPEECH_SYNTH_H_
#define DISTSE_SPEECH_SYNTH_H_

#include <cstdint>

#include "distse/dsp.h"

namespace distse {

struct SpeechSynthConfig {
  double duration_s = 3.0;
  int sample_rate = 16000;
  double target_rms = 0.05;
  // Background hiss under the whole utterance, relative to target_rms, so
  // pauses are never digital silence. Set to -inf to disable.
  double floor_db = -50.0;
};

// Speech-like test material: syllables of amplitude-modulated harmonic
// complexes with formant shaping, occasional fricative noise bursts, and
// pauses. Deterministic given the seed.
Waveform SynthesizeSpeechLike(const SpeechSynthConfig &cfg, uint64_t seed);

}  // namespace distse

#endif  // DISTSE_SPEECH_SYNTH_H_
