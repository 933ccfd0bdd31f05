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

#include "distse/scene.h"

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "distse/speech_synth.h"
#include "distse/wav_io.h"

namespace distse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int kBabbleTalkers = 6;

std::vector<double> WhiteNoise(size_t length, std::mt19937_64 &rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(length);
  for (double &v : out) v = dist(rng);
  return out;
}

// Paul Kellet's refined pink filter (-3 dB/octave, within 0.05 dB above
// 9 Hz at 44.1 kHz; adequate at speech rates).
std::vector<double> PinkNoise(size_t length, std::mt19937_64 &rng) {
  std::vector<double> white = WhiteNoise(length, rng);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  std::vector<double> out(length);
  for (size_t n = 0; n < length; ++n) {
    const double w = white[n];
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    out[n] = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  return out;
}

std::vector<double> BabbleNoise(size_t length, int sample_rate, uint64_t seed) {
  SpeechSynthConfig sc;
  sc.sample_rate = sample_rate;
  sc.duration_s = static_cast<double>(length) / sample_rate;
  std::vector<double> out(length, 0.0);
  for (int k = 0; k < kBabbleTalkers; ++k) {
    Waveform talker = SynthesizeSpeechLike(sc, MixSeed(seed, k));
    // Circular shift so the talkers' pauses do not line up.
    const size_t shift = static_cast<size_t>(MixSeed(seed, 1000 + k) % length);
    for (size_t n = 0; n < length && n < talker.size(); ++n)
      out[(n + shift) % length] += talker.samples[n];
  }
  return out;
}

std::vector<double> FileNoise(size_t length, const Waveform &file,
                              std::mt19937_64 &rng) {
  if (file.size() == 0) throw Error("noise file is empty");
  std::uniform_int_distribution<size_t> pick(0, file.size() - 1);
  const size_t start = pick(rng);
  std::vector<double> out(length);
  for (size_t n = 0; n < length; ++n) out[n] = file.samples[(start + n) % file.size()];
  return out;
}

}  // namespace

double Distance(const Point &a, const Point &b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double MicGeometry::SpeakerDistance(int channel) const {
  if (channel < 0 || channel >= num_mics())
    throw Error("geometry: channel index " + std::to_string(channel) +
                " out of range [0, " + std::to_string(num_mics()) + ")");
  return Distance(mics[channel], speaker);
}

void MicGeometry::Validate() const {
  if (mics.empty()) throw Error("geometry: at least one microphone required");
  if (!std::isfinite(speaker.x) || !std::isfinite(speaker.y))
    throw Error("geometry: non-finite speaker position");
  for (size_t i = 0; i < mics.size(); ++i) {
    if (!std::isfinite(mics[i].x) || !std::isfinite(mics[i].y))
      throw Error("geometry: non-finite position for m" + std::to_string(i + 1));
    if (Distance(mics[i], speaker) <= 0.0)
      throw Error("geometry: m" + std::to_string(i + 1) + " coincides with the speaker");
  }
}

MicGeometry DefaultGeometry() {
  MicGeometry g;
  g.speaker = {0.0, 0.0};
  for (int k = 0; k < 6; ++k) {
    const double angle = k * kPi / 3.0;
    g.mics.push_back({0.5 * std::cos(angle), 0.5 * std::sin(angle)});
  }
  g.mics.push_back({1.0, 0.0});
  return g;
}

MicGeometry SelectMics(const MicGeometry &geom, const std::vector<int> &mic_numbers) {
  MicGeometry out;
  out.speaker = geom.speaker;
  for (int m : mic_numbers) {
    if (m < 1 || m > geom.num_mics())
      throw Error("geometry: no microphone m" + std::to_string(m));
    out.mics.push_back(geom.mics[m - 1]);
  }
  out.Validate();
  return out;
}

NoiseKind ParseNoiseKind(const std::string &name) {
  if (name == "white") return NoiseKind::kWhite;
  if (name == "pink") return NoiseKind::kPink;
  if (name == "babble") return NoiseKind::kBabble;
  if (name == "file") return NoiseKind::kFile;
  throw Error("unsupported noise kind '" + name + "'");
}

std::string NoiseKindName(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kPink: return "pink";
    case NoiseKind::kBabble: return "babble";
    case NoiseKind::kFile: return "file";
  }
  return "unknown";
}

AttenuationModel ParseAttenuation(const std::string &name) {
  if (name == "none") return AttenuationModel::kNone;
  if (name == "inverse-distance") return AttenuationModel::kInverseDistance;
  throw Error("unsupported attenuation model '" + name + "'");
}

std::string AttenuationName(AttenuationModel model) {
  return model == AttenuationModel::kNone ? "none" : "inverse-distance";
}

Waveform Propagate(const Waveform &source, const MicGeometry &geom,
                   int channel_index, AttenuationModel model) {
  const double r = geom.SpeakerDistance(channel_index);
  Waveform out = source;
  if (model == AttenuationModel::kInverseDistance) {
    const double gain = kReferenceDistance / r;
    for (double &s : out.samples) s *= gain;
  }
  return out;
}

std::vector<Waveform> GenerateDiffuseNoise(int num_channels, size_t length,
                                           int sample_rate,
                                           const NoiseSpec &noise,
                                           uint64_t seed) {
  if (num_channels < 1) throw Error("diffuse noise: need at least one channel");
  if (length == 0) throw Error("diffuse noise: length must be positive");
  Waveform file;
  if (noise.kind == NoiseKind::kFile) {
    file = ReadWav(noise.file);
    if (file.sample_rate != sample_rate)
      throw Error("noise file " + noise.file + " has rate " +
                  std::to_string(file.sample_rate) + ", scene needs " +
                  std::to_string(sample_rate));
  }
  std::vector<Waveform> out(num_channels);
  for (int p = 0; p < num_channels; ++p) {
    const uint64_t channel_seed = MixSeed(seed, p);
    std::mt19937_64 rng(channel_seed);
    Waveform &w = out[p];
    w.sample_rate = sample_rate;
    switch (noise.kind) {
      case NoiseKind::kWhite: w.samples = WhiteNoise(length, rng); break;
      case NoiseKind::kPink: w.samples = PinkNoise(length, rng); break;
      case NoiseKind::kBabble: w.samples = BabbleNoise(length, sample_rate, channel_seed); break;
      case NoiseKind::kFile: w.samples = FileNoise(length, file, rng); break;
    }
  }
  // Independent draws of low-pass noise still correlate by chance over short
  // spans; symmetric whitening removes the lag-0 correlation with the least
  // change to each channel.
  const Eigen::Index n = static_cast<Eigen::Index>(length);
  Matrix x(n, num_channels);
  for (int p = 0; p < num_channels; ++p) {
    x.col(p) = Eigen::Map<const Eigen::VectorXd>(out[p].samples.data(), n);
    x.col(p).array() -= x.col(p).mean();
  }
  if (num_channels > 1 && length > static_cast<size_t>(num_channels)) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(x.transpose() * x);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    if (!(lambda.minCoeff() > 1e-9 * lambda.maxCoeff()))
      throw Error("diffuse noise: channels are linearly dependent");
    x = x * (eig.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
             eig.eigenvectors().transpose());
  }
  for (int p = 0; p < num_channels; ++p) {
    const double rms = x.col(p).norm() / std::sqrt(static_cast<double>(length));
    if (!(rms > 0.0)) throw Error("diffuse noise: generated channel has zero energy");
    Eigen::Map<Eigen::VectorXd>(out[p].samples.data(), n) = x.col(p) / rms;
  }
  return out;
}

double NoiseGainForSnr(const Waveform &clean, const Waveform &noise, double snr_db) {
  if (clean.size() != noise.size() || clean.sample_rate != noise.sample_rate)
    throw Error("mix: clean and noise differ in length or sample rate");
  if (!std::isfinite(snr_db)) throw Error("mix: snr_db must be finite");
  const double ec = clean.Energy();
  const double en = noise.Energy();
  if (!(ec > 0.0)) throw Error("mix: clean signal has zero energy");
  if (!(en > 0.0)) throw Error("mix: noise signal has zero energy");
  return std::sqrt(ec / (en * std::pow(10.0, snr_db / 10.0)));
}

Waveform MixAtSnr(const Waveform &clean, const Waveform &noise, double snr_db) {
  const double alpha = NoiseGainForSnr(clean, noise, snr_db);
  Waveform out = clean;
  for (size_t n = 0; n < out.size(); ++n) out.samples[n] += alpha * noise.samples[n];
  return out;
}

double MeasuredSnrDb(const Waveform &clean, const Waveform &noise) {
  return 10.0 * std::log10(clean.Energy() / noise.Energy());
}

MultichannelRecording SynthesizeScene(const Waveform &source,
                                      const SceneConfig &cfg) {
  source.Validate();
  cfg.geometry.Validate();
  if (!(source.Energy() > 0.0)) throw Error("scene: source has zero energy");
  const int num_channels = cfg.geometry.num_mics();
  if (cfg.reference_channel < 0 || cfg.reference_channel >= num_channels)
    throw Error("scene: reference channel out of range");

  MultichannelRecording rec;
  rec.source = source;
  rec.config = cfg;
  for (int p = 0; p < num_channels; ++p)
    rec.clean_channels.push_back(Propagate(source, cfg.geometry, p, cfg.attenuation));

  const std::vector<Waveform> noise = GenerateDiffuseNoise(
      num_channels, source.size(), source.sample_rate, cfg.noise, cfg.seed);
  // One gain for all channels, fixed by the reference channel.
  const double alpha = NoiseGainForSnr(rec.clean_channels[cfg.reference_channel],
                                       noise[cfg.reference_channel], cfg.snr_db);
  for (int p = 0; p < num_channels; ++p) {
    Waveform noisy = rec.clean_channels[p];
    for (size_t n = 0; n < noisy.size(); ++n) noisy.samples[n] += alpha * noise[p].samples[n];
    rec.channels.push_back(std::move(noisy));
  }
  return rec;
}

}  // namespace distse
