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

#ifndef DISTSE_SCENE_H_
#define DISTSE_SCENE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "distse/dsp.h"

namespace distse {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double Distance(const Point &a, const Point &b);

struct MicGeometry {
  std::vector<Point> mics;
  Point speaker;

  int num_mics() const { return static_cast<int>(mics.size()); }
  double SpeakerDistance(int channel) const;
  void Validate() const;
};

// Seven microphones around a speaker at the origin: m1..m6 on a 0.5 m
// circle at angles k*pi/3, m7 behind m1 on the same ray at 1.0 m.
MicGeometry DefaultGeometry();

// Keep the listed microphones (1-based, in the given order).
MicGeometry SelectMics(const MicGeometry &geom, const std::vector<int> &mic_numbers);

enum class NoiseKind { kWhite, kPink, kBabble, kFile };
enum class AttenuationModel { kNone, kInverseDistance };
enum class DelayModel { kNone };

NoiseKind ParseNoiseKind(const std::string &name);
std::string NoiseKindName(NoiseKind kind);
AttenuationModel ParseAttenuation(const std::string &name);
std::string AttenuationName(AttenuationModel model);

// Distance at which inverse-distance attenuation has unit gain.
inline constexpr double kReferenceDistance = 0.5;

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kWhite;
  std::string file;  // kFile only: mono WAV at the scene sample rate
};

struct SceneConfig {
  MicGeometry geometry = DefaultGeometry();
  NoiseSpec noise;
  double snr_db = 0.0;
  uint64_t seed = 0;
  AttenuationModel attenuation = AttenuationModel::kInverseDistance;
  DelayModel delay = DelayModel::kNone;
  int reference_channel = 0;  // 0-based; the SNR is set at this channel
};

struct MultichannelRecording {
  std::vector<Waveform> channels;        // noisy, one per microphone
  std::vector<Waveform> clean_channels;  // clean speech as received per mic
  Waveform source;                       // the original clean utterance
  SceneConfig config;

  int num_channels() const { return static_cast<int>(channels.size()); }
};

Waveform Propagate(const Waveform &source, const MicGeometry &geom,
                   int channel_index, AttenuationModel model);

// Mutually independent, equal-power (unit RMS) noise channels.
std::vector<Waveform> GenerateDiffuseNoise(int num_channels, size_t length,
                                           int sample_rate,
                                           const NoiseSpec &noise,
                                           uint64_t seed);

// Gain applied to noise so that E_clean / (gain^2 * E_noise) hits snr_db.
double NoiseGainForSnr(const Waveform &clean, const Waveform &noise, double snr_db);
Waveform MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db);

// 10*log10(E_clean / E_noise) of a known decomposition.
double MeasuredSnrDb(const Waveform &clean, const Waveform &noise);

MultichannelRecording SynthesizeScene(const Waveform &source,
                                      const SceneConfig &cfg);

}  // namespace distse

#endif  // DISTSE_SCENE_H_
