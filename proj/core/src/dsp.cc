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

#include "distse/dsp.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace distse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Below this overlap weight a sample has no usable analysis support.
constexpr double kMinOverlapWeight = 1e-10;

}  // namespace

double Waveform::Energy() const {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

void Waveform::Validate() const {
  if (sample_rate <= 0) throw Error("waveform: sample_rate must be positive");
  for (double s : samples)
    if (!std::isfinite(s)) throw Error("waveform: non-finite sample");
}

void StftConfig::Validate() const {
  if (hop_len <= 0 || hop_len > frame_len || frame_len > fft_len)
    throw Error("stft config: require 0 < hop_len <= frame_len <= fft_len");
  if (fft_len % 2 != 0) throw Error("stft config: fft_len must be even");
}

StftConfig StftConfig::ForSampleRate(int sample_rate) {
  if (sample_rate <= 0) throw Error("stft config: sample_rate must be positive");
  StftConfig cfg;
  cfg.frame_len = static_cast<int>(std::lround(0.032 * sample_rate));
  cfg.hop_len = static_cast<int>(std::lround(0.016 * sample_rate));
  cfg.fft_len = 1;
  while (cfg.fft_len < cfg.frame_len) cfg.fft_len *= 2;
  return cfg;
}

std::vector<double> AnalysisWindow(const StftConfig &cfg) {
  std::vector<double> w(cfg.frame_len);
  const double n = static_cast<double>(cfg.frame_len);
  for (int i = 0; i < cfg.frame_len; ++i) {
    double c = std::cos(2.0 * kPi * i / n);
    w[i] = cfg.window == WindowKind::kHann ? 0.5 - 0.5 * c : 0.54 - 0.46 * c;
  }
  return w;
}

std::vector<double> SynthesisWindow(const StftConfig &cfg) {
  cfg.Validate();
  std::vector<double> w = AnalysisWindow(cfg);
  // The squared-window overlap sum is periodic with period hop_len.
  std::vector<double> overlap(cfg.hop_len, 0.0);
  for (int i = 0; i < cfg.frame_len; ++i) overlap[i % cfg.hop_len] += w[i] * w[i];
  std::vector<double> ws(cfg.frame_len);
  for (int i = 0; i < cfg.frame_len; ++i) {
    double d = overlap[i % cfg.hop_len];
    ws[i] = d > kMinOverlapWeight ? w[i] / d : 0.0;
  }
  return ws;
}

int NumFrames(size_t num_samples, const StftConfig &cfg) {
  if (num_samples < static_cast<size_t>(cfg.frame_len)) return 0;
  return 1 + static_cast<int>((num_samples - cfg.frame_len) / cfg.hop_len);
}

size_t IstftLength(int num_frames, const StftConfig &cfg) {
  if (num_frames <= 0) return 0;
  return static_cast<size_t>(num_frames - 1) * cfg.hop_len + cfg.frame_len;
}

Spectrogram Stft(const Waveform &wave, const StftConfig &cfg) {
  cfg.Validate();
  wave.Validate();
  if (wave.size() < static_cast<size_t>(cfg.frame_len))
    throw Error("stft: signal too short");
  const int num_frames = NumFrames(wave.size(), cfg);
  const int num_bins = cfg.num_bins();
  const std::vector<double> window = AnalysisWindow(cfg);

  Spectrogram spec;
  spec.config = cfg;
  spec.sample_rate = wave.sample_rate;
  spec.frames.resize(num_frames, num_bins);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(cfg.fft_len, 0.0);
  std::vector<std::complex<double>> out;
  for (int t = 0; t < num_frames; ++t) {
    const double *seg = wave.samples.data() + static_cast<size_t>(t) * cfg.hop_len;
    for (int i = 0; i < cfg.frame_len; ++i) buf[i] = seg[i] * window[i];
    fft.fwd(out, buf);
    for (int k = 0; k < num_bins; ++k) spec.frames(t, k) = out[k];
  }
  return spec;
}

Waveform Istft(const Spectrogram &spec) {
  const StftConfig &cfg = spec.config;
  cfg.Validate();
  if (spec.num_bins() != cfg.num_bins())
    throw Error("istft: bin count " + std::to_string(spec.num_bins()) +
                " inconsistent with fft_len " + std::to_string(cfg.fft_len));
  const int num_frames = spec.num_frames();
  Waveform wave;
  wave.sample_rate = spec.sample_rate;
  wave.samples.assign(IstftLength(num_frames, cfg), 0.0);
  if (num_frames == 0) return wave;

  const std::vector<double> window = AnalysisWindow(cfg);
  // Least-squares overlap-add: accumulate w * frame and normalize by the
  // overlap sum of w^2 at every output sample. In the interior this is
  // exactly the SynthesisWindow dual.
  std::vector<double> weight(wave.size(), 0.0);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> bins(cfg.num_bins());
  std::vector<double> frame;
  for (int t = 0; t < num_frames; ++t) {
    for (int k = 0; k < cfg.num_bins(); ++k) bins[k] = spec.frames(t, k);
    fft.inv(frame, bins, cfg.fft_len);
    const size_t offset = static_cast<size_t>(t) * cfg.hop_len;
    for (int i = 0; i < cfg.frame_len; ++i) {
      wave.samples[offset + i] += window[i] * frame[i];
      weight[offset + i] += window[i] * window[i];
    }
  }
  for (size_t n = 0; n < wave.size(); ++n)
    wave.samples[n] = weight[n] > kMinOverlapWeight ? wave.samples[n] / weight[n] : 0.0;
  return wave;
}

std::pair<LpsMatrix, PhaseMatrix> ToLpsPhase(const Spectrogram &spec,
                                             double floor_eps) {
  if (!(floor_eps > 0.0)) throw Error("to_lps_phase: floor_eps must be positive");
  LpsMatrix lps;
  lps.floor_eps = floor_eps;
  PhaseMatrix phase;
  lps.values.resize(spec.num_frames(), spec.num_bins());
  phase.values.resize(spec.num_frames(), spec.num_bins());
  for (int t = 0; t < spec.num_frames(); ++t) {
    for (int k = 0; k < spec.num_bins(); ++k) {
      const std::complex<double> x = spec.frames(t, k);
      lps.values(t, k) = std::log(std::max(std::norm(x), floor_eps));
      phase.values(t, k) = std::arg(x);
    }
  }
  return {std::move(lps), std::move(phase)};
}

Spectrogram FromLpsPhase(const LpsMatrix &lps, const PhaseMatrix &phase,
                         const StftConfig &cfg, int sample_rate) {
  if (lps.values.rows() != phase.values.rows() ||
      lps.values.cols() != phase.values.cols())
    throw Error("from_lps_phase: lps is " + std::to_string(lps.values.rows()) +
                "x" + std::to_string(lps.values.cols()) + " but phase is " +
                std::to_string(phase.values.rows()) + "x" +
                std::to_string(phase.values.cols()));
  Spectrogram spec;
  spec.config = cfg;
  spec.sample_rate = sample_rate;
  spec.frames.resize(lps.values.rows(), lps.values.cols());
  for (Eigen::Index t = 0; t < lps.values.rows(); ++t)
    for (Eigen::Index k = 0; k < lps.values.cols(); ++k)
      spec.frames(t, k) =
          std::polar(std::exp(0.5 * lps.values(t, k)), phase.values(t, k));
  return spec;
}

std::vector<double> ResamplePoly(std::span<const double> x, int up, int down) {
  if (up <= 0 || down <= 0) throw Error("resample: factors must be positive");
  const int g = std::gcd(up, down);
  up /= g;
  down /= g;
  if (up == 1 && down == 1) return {x.begin(), x.end()};

  // Kaiser-windowed sinc, 60 dB rejection, roll-off a tenth of the cutoff.
  const double rejection_db = 60.0;
  const double cutoff = 1.0 / (2.0 * std::max(up, down));
  const double roll_off = cutoff / 10.0;
  const long half_len =
      static_cast<long>(std::ceil((rejection_db - 8.0) / (28.714 * roll_off)));
  const double beta = 0.1102 * (rejection_db - 8.7);
  const long taps = 2 * half_len + 1;
  std::vector<double> h(taps);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  double sum = 0.0;
  for (long i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i - half_len);
    const double arg = 2.0 * cutoff * t;
    const double sinc = arg == 0.0 ? 1.0 : std::sin(kPi * arg) / (kPi * arg);
    const double r = 2.0 * i / static_cast<double>(taps - 1) - 1.0;
    const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[i] = kaiser * 2.0 * up * cutoff * sinc;
    sum += h[i];
  }
  for (double &v : h) v = v / sum * up;

  const long n_in = static_cast<long>(x.size());
  const long n_out = (n_in * up) / down + ((n_in * up) % down != 0 ? 1 : 0);
  std::vector<double> y(n_out, 0.0);
  // y[k] = sum_i h[i] * xu[k*down + half_len - i], xu the zero-stuffed input.
  for (long k = 0; k < n_out; ++k) {
    const long m = k * down + half_len;
    double acc = 0.0;
    for (long i = m % up; i < taps; i += up) {
      const long j = (m - i) / up;
      if (j < 0) break;
      if (j < n_in) acc += h[i] * x[j];
    }
    y[k] = acc;
  }
  return y;
}

Waveform Resample(const Waveform &wave, int target_rate) {
  if (target_rate <= 0) throw Error("resample: target rate must be positive");
  Waveform out;
  out.sample_rate = target_rate;
  out.samples = ResamplePoly(wave.samples, target_rate, wave.sample_rate);
  return out;
}

}  // namespace distse
