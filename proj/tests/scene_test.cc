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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "distse/scene.h"
#include "distse/speech_synth.h"
#include "test_util.h"

namespace distse {
namespace {

using testing::RandomWave;

double Corr(const Waveform &a, const Waveform &b) {
  double ab = 0, aa = 0, bb = 0, ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) ma += a.samples[i], mb += b.samples[i];
  ma /= a.size();
  mb /= b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    ab += (a.samples[i] - ma) * (b.samples[i] - mb);
    aa += (a.samples[i] - ma) * (a.samples[i] - ma);
    bb += (b.samples[i] - mb) * (b.samples[i] - mb);
  }
  return ab / std::sqrt(aa * bb);
}

double Rms(const Waveform &w) { return std::sqrt(w.Energy() / w.size()); }

TEST(Geometry, DefaultLayout) {
  const MicGeometry g = DefaultGeometry();
  ASSERT_EQ(g.num_mics(), 7);
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(g.SpeakerDistance(k), 0.5, 1e-15);
  EXPECT_NEAR(g.SpeakerDistance(6), 1.0, 1e-15);
  for (int k = 0; k < 6; ++k) {
    const Point &a = g.mics[k], &b = g.mics[(k + 1) % 6];
    const double angle = std::acos((a.x * b.x + a.y * b.y) / (0.5 * 0.5));
    EXPECT_NEAR(angle, std::numbers::pi / 3, 1e-12);
  }
  EXPECT_THROW(g.SpeakerDistance(7), Error);
}

TEST(Geometry, SelectMics) {
  const MicGeometry g = SelectMics(DefaultGeometry(), {1, 4, 7});
  ASSERT_EQ(g.num_mics(), 3);
  EXPECT_NEAR(g.SpeakerDistance(2), 1.0, 1e-15);
  EXPECT_THROW(SelectMics(DefaultGeometry(), {0}), Error);
  EXPECT_THROW(SelectMics(DefaultGeometry(), {8}), Error);
  EXPECT_THROW(SelectMics(DefaultGeometry(), {}), Error);
}

TEST(Propagate, Attenuation) {
  const Waveform s = RandomWave(1000, 16000, 1);
  const MicGeometry g = DefaultGeometry();
  EXPECT_EQ(Propagate(s, g, 6, AttenuationModel::kNone).samples, s.samples);
  EXPECT_EQ(Propagate(s, g, 0, AttenuationModel::kInverseDistance).samples, s.samples);
  const Waveform far = Propagate(s, g, 6, AttenuationModel::kInverseDistance);
  EXPECT_NEAR(far.Energy() / s.Energy(), 0.25, 1e-12);
}

TEST(Noise, DeterministicPerSeed) {
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kBabble}) {
    NoiseSpec spec{k, ""};
    const auto a = GenerateDiffuseNoise(3, 8000, 8000, spec, 42);
    const auto b = GenerateDiffuseNoise(3, 8000, 8000, spec, 42);
    const auto c = GenerateDiffuseNoise(3, 8000, 8000, spec, 43);
    for (int p = 0; p < 3; ++p) {
      EXPECT_EQ(a[p].samples, b[p].samples);
      EXPECT_NE(a[p].samples, c[p].samples);
    }
  }
}

TEST(Noise, DecorrelatedEqualPower) {
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kPink, NoiseKind::kBabble}) {
    const auto n = GenerateDiffuseNoise(7, 16000, 16000, {k, ""}, 9);
    ASSERT_EQ(n.size(), 7u);
    for (int p = 0; p < 7; ++p) {
      EXPECT_NEAR(Rms(n[p]), Rms(n[0]), 0.01 * Rms(n[0])) << NoiseKindName(k);
      for (int q = 0; q < p; ++q) EXPECT_LT(std::fabs(Corr(n[p], n[q])), 0.1) << NoiseKindName(k);
    }
  }
  const auto w = GenerateDiffuseNoise(2, 16000, 16000, {NoiseKind::kWhite, ""}, 1);
  EXPECT_LT(std::fabs(Corr(w[0], w[1])), 0.1);
}

// Pink noise carries more power at low frequencies than white noise.
TEST(Noise, PinkTilt) {
  const auto n = GenerateDiffuseNoise(1, 32000, 16000, {NoiseKind::kPink, ""}, 3)[0];
  double lo = 0, hi = 0;
  for (size_t i = 1; i < n.size(); ++i) {
    const double d = n.samples[i] - n.samples[i - 1];
    const double s = n.samples[i] + n.samples[i - 1];
    hi += d * d;
    lo += s * s;
  }
  EXPECT_GT(lo, 3.0 * hi);
}

TEST(Noise, FileKindRequiresFile) {
  EXPECT_THROW(GenerateDiffuseNoise(2, 100, 8000, {NoiseKind::kFile, "/nonexistent.wav"}, 1), Error);
  EXPECT_THROW(ParseNoiseKind("siren"), Error);
}

TEST(Mix, EqualEnergyGivesUnitGain) {
  Waveform c = RandomWave(1000, 8000, 1);
  Waveform n = RandomWave(1000, 8000, 2);
  const double s = std::sqrt(c.Energy() / n.Energy());
  for (double &v : n.samples) v *= s;
  EXPECT_NEAR(NoiseGainForSnr(c, n, 0.0), 1.0, 1e-12);
}

TEST(Mix, MeasuredSnrMatchesRequested) {
  const Waveform c = RandomWave(4000, 8000, 1);
  const Waveform n = RandomWave(4000, 8000, 2, 0.7);
  for (double snr = -20; snr <= 40; snr += 2.5) {
    const Waveform y = MixAtSnr(c, n, snr);
    Waveform resid = y;
    for (size_t i = 0; i < y.size(); ++i) resid.samples[i] -= c.samples[i];
    EXPECT_NEAR(MeasuredSnrDb(c, resid), snr, 1e-9);
  }
}

TEST(Mix, HighSnrApproachesClean) {
  const Waveform c = RandomWave(4000, 8000, 1);
  const Waveform y = MixAtSnr(c, RandomWave(4000, 8000, 2), 60.0);
  double d = 0;
  for (size_t i = 0; i < c.size(); ++i) d += std::pow(y.samples[i] - c.samples[i], 2);
  EXPECT_LT(std::sqrt(d / c.Energy()), 1e-3);
}

TEST(Mix, Errors) {
  Waveform zero;
  zero.sample_rate = 8000;
  zero.samples.assign(100, 0.0);
  const Waveform x = RandomWave(100, 8000, 1);
  EXPECT_THROW(MixAtSnr(zero, x, 0.0), Error);
  EXPECT_THROW(MixAtSnr(x, zero, 0.0), Error);
  EXPECT_THROW(MixAtSnr(x, RandomWave(99, 8000, 1), 0.0), Error);
}

TEST(Scene, ReferenceChannelSnrAndShape) {
  SpeechSynthConfig sc;
  sc.duration_s = 1.0;
  const Waveform src = SynthesizeSpeechLike(sc, 5);
  SceneConfig cfg;
  cfg.snr_db = 4.0;
  cfg.seed = 11;
  cfg.noise.kind = NoiseKind::kPink;
  const MultichannelRecording rec = SynthesizeScene(src, cfg);
  ASSERT_EQ(rec.num_channels(), 7);
  ASSERT_EQ(rec.clean_channels.size(), 7u);
  for (int p = 0; p < 7; ++p) {
    EXPECT_EQ(rec.channels[p].size(), src.size());
    EXPECT_EQ(rec.clean_channels[p].size(), src.size());
  }
  Waveform noise = rec.channels[0];
  for (size_t i = 0; i < noise.size(); ++i) noise.samples[i] -= rec.clean_channels[0].samples[i];
  EXPECT_NEAR(MeasuredSnrDb(rec.clean_channels[0], noise), 4.0, 1e-9);
  // m7 is twice as far: 6 dB less speech against the same noise level.
  Waveform n7 = rec.channels[6];
  for (size_t i = 0; i < n7.size(); ++i) n7.samples[i] -= rec.clean_channels[6].samples[i];
  EXPECT_NEAR(MeasuredSnrDb(rec.clean_channels[6], n7), 4.0 - 20 * std::log10(2.0), 0.2);
}

TEST(Scene, NoAttenuationCopiesSource) {
  const Waveform src = RandomWave(2000, 8000, 3);
  SceneConfig cfg;
  cfg.attenuation = AttenuationModel::kNone;
  const MultichannelRecording rec = SynthesizeScene(src, cfg);
  for (const Waveform &c : rec.clean_channels) EXPECT_EQ(c.samples, src.samples);
}

TEST(Scene, Deterministic) {
  const Waveform src = RandomWave(2000, 8000, 3);
  SceneConfig cfg;
  cfg.seed = 77;
  const auto a = SynthesizeScene(src, cfg), b = SynthesizeScene(src, cfg);
  for (int p = 0; p < a.num_channels(); ++p) EXPECT_EQ(a.channels[p].samples, b.channels[p].samples);
}

TEST(SpeechSynth, LevelAndDeterminism) {
  SpeechSynthConfig sc;
  sc.duration_s = 2.0;
  sc.sample_rate = 8000;
  const Waveform a = SynthesizeSpeechLike(sc, 1), b = SynthesizeSpeechLike(sc, 1);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.size(), 16000u);
  EXPECT_NEAR(Rms(a), sc.target_rms, 1e-3 * sc.target_rms);
  EXPECT_NE(SynthesizeSpeechLike(sc, 2).samples, a.samples);
}

}  // namespace
}  // namespace distse
