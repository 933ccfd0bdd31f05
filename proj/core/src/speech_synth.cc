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

#include "distse/speech_synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace distse {

namespace {

constexpr double kPi = 3.14159265358979323846;

double Resonance(double f, double centre, double bandwidth) {
  const double d = (f - centre) / bandwidth;
  return 1.0 / (1.0 + d * d);
}

}  // namespace

Waveform SynthesizeSpeechLike(const SpeechSynthConfig &cfg, uint64_t seed) {
  if (cfg.duration_s <= 0.0 || cfg.sample_rate <= 0)
    throw Error("speech synth: duration and sample rate must be positive");
  std::mt19937_64 rng(MixSeed(seed, 0x5157));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double fs = cfg.sample_rate;
  const size_t length = static_cast<size_t>(std::lround(cfg.duration_s * fs));
  const double max_freq = std::min(4000.0, 0.45 * fs);
  const double speaker_f0 = uniform(100.0, 220.0);
  Waveform wave;
  wave.sample_rate = cfg.sample_rate;
  wave.samples.assign(length, 0.0);

  size_t cursor = static_cast<size_t>(uniform(0.05, 0.2) * fs);
  while (cursor < length) {
    const int syllables = 1 + static_cast<int>(unit(rng) * 3.0);
    for (int s = 0; s < syllables && cursor < length; ++s) {
      if (unit(rng) < 0.25) {
        // Fricative onset: differenced white noise.
        const size_t n_fric = static_cast<size_t>(uniform(0.04, 0.08) * fs);
        const double amp = uniform(0.1, 0.3);
        double prev = 0.0;
        for (size_t n = 0; n < n_fric && cursor + n < length; ++n) {
          const double w = gauss(rng);
          const double env = std::sin(kPi * (n + 0.5) / n_fric);
          wave.samples[cursor + n] += amp * env * (w - prev);
          prev = w;
        }
        cursor += n_fric;
      }
      const size_t n_syl = static_cast<size_t>(uniform(0.12, 0.30) * fs);
      const double f0_start = speaker_f0 * uniform(0.85, 1.2);
      const double f0_end = f0_start * uniform(0.85, 1.15);
      const double f1 = uniform(300.0, 900.0);
      const double f2 = uniform(900.0, 2500.0);
      const double am_rate = uniform(3.0, 6.0);
      const double level = uniform(0.5, 1.0);
      double phase = 0.0;
      for (size_t n = 0; n < n_syl && cursor + n < length; ++n) {
        const double frac = static_cast<double>(n) / n_syl;
        const double f0 = f0_start + (f0_end - f0_start) * frac;
        phase += 2.0 * kPi * f0 / fs;
        const double env = std::pow(std::sin(kPi * frac), 2.0) *
                           (0.75 + 0.25 * std::cos(2.0 * kPi * am_rate * n / fs));
        double v = 0.0;
        for (int k = 1; k * f0 < max_freq; ++k) {
          const double f = k * f0;
          const double gain = (Resonance(f, f1, 120.0) + 0.6 * Resonance(f, f2, 180.0) +
                               0.05) / std::sqrt(static_cast<double>(k));
          v += gain * std::sin(k * phase);
        }
        wave.samples[cursor + n] += level * env * v;
      }
      cursor += n_syl;
    }
    cursor += static_cast<size_t>(uniform(0.05, 0.30) * fs);
  }

  const double energy = wave.Energy();
  if (energy > 0.0) {
    const double scale = cfg.target_rms / std::sqrt(energy / static_cast<double>(length));
    for (double &v : wave.samples) v *= scale;
  }
  if (std::isfinite(cfg.floor_db)) {
    std::mt19937_64 hiss_rng(MixSeed(seed, 0x4155));
    const double sigma = cfg.target_rms * std::pow(10.0, cfg.floor_db / 20.0);
    for (double &v : wave.samples) v += sigma * gauss(hiss_rng);
  }
  return wave;
}

}  // namespace distse
