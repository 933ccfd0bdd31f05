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

#ifndef DISTSE_DSP_H_
#define DISTSE_DSP_H_

#include <span>
#include <utility>
#include <vector>

#include "distse/common.h"

namespace distse {

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 16000;

  size_t size() const { return samples.size(); }
  double Energy() const;
  // Throws unless sample_rate > 0 and every sample is finite.
  void Validate() const;
};

enum class WindowKind { kHann, kHamming };

struct StftConfig {
  int frame_len = 512;
  int hop_len = 256;
  int fft_len = 512;
  WindowKind window = WindowKind::kHann;

  int num_bins() const { return fft_len / 2 + 1; }
  void Validate() const;

  // 32 ms frames with a 16 ms shift; fft_len is the next power of two.
  static StftConfig ForSampleRate(int sample_rate);
};

struct Spectrogram {
  ComplexMatrix frames;  // num_frames x num_bins
  StftConfig config;
  int sample_rate = 16000;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_bins() const { return static_cast<int>(frames.cols()); }
};

struct LpsMatrix {
  Matrix values;  // num_frames x num_bins, natural log of power
  double floor_eps = 1e-12;
};

struct PhaseMatrix {
  Matrix values;  // radians in (-pi, pi]
};

// Periodic window of length frame_len.
std::vector<double> AnalysisWindow(const StftConfig &cfg);

// w[n] / sum_k w[n + k*hop]^2, the interior weighted-overlap-add dual of
// the analysis window.
std::vector<double> SynthesisWindow(const StftConfig &cfg);

int NumFrames(size_t num_samples, const StftConfig &cfg);
size_t IstftLength(int num_frames, const StftConfig &cfg);

Spectrogram Stft(const Waveform &wave, const StftConfig &cfg);
Waveform Istft(const Spectrogram &spec);

std::pair<LpsMatrix, PhaseMatrix> ToLpsPhase(const Spectrogram &spec,
                                             double floor_eps = 1e-12);
Spectrogram FromLpsPhase(const LpsMatrix &lps, const PhaseMatrix &phase,
                         const StftConfig &cfg, int sample_rate);

// Rational-factor polyphase resampler with a Kaiser-windowed sinc low-pass,
// numerically matching Octave's resample() defaults.
std::vector<double> ResamplePoly(std::span<const double> x, int up, int down);
Waveform Resample(const Waveform &wave, int target_rate);

}  // namespace distse

#endif  // DISTSE_DSP_H_
