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

#include "distse/metrics.h"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "distse/parallel.h"
#include "distse/text_format.h"
#include "distse/wav_io.h"

namespace distse {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// STOI reference constants.
constexpr int kStoiRate = 10000;
constexpr int kStoiFrame = 256;
constexpr int kStoiFft = 512;
constexpr int kStoiBands = 15;
constexpr double kStoiMinFreq = 150.0;
constexpr int kStoiSegment = 30;
constexpr double kStoiBeta = -15.0;
constexpr double kStoiDynRange = 40.0;

// Symmetric Hann without the zero endpoints (MATLAB hanning(n)).
std::vector<double> HanningInterior(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * (i + 1) / (n + 1));
  return w;
}

// Frame starts 0, hop, ... strictly below len - frame.
std::vector<size_t> FrameStarts(size_t len, int frame, int hop) {
  std::vector<size_t> starts;
  for (size_t i = 0; i + frame < len; i += hop) starts.push_back(i);
  return starts;
}

void RemoveSilentFrames(std::vector<double> *x, std::vector<double> *y) {
  const int frame = kStoiFrame, hop = kStoiFrame / 2;
  const std::vector<double> w = HanningInterior(frame);
  const std::vector<size_t> starts = FrameStarts(x->size(), frame, hop);
  std::vector<double> energy_db(starts.size());
  double max_db = -std::numeric_limits<double>::infinity();
  for (size_t f = 0; f < starts.size(); ++f) {
    double e = 0.0;
    for (int i = 0; i < frame; ++i) {
      const double v = w[i] * (*x)[starts[f] + i];
      e += v * v;
    }
    energy_db[f] = 20.0 * std::log10(std::sqrt(e) + kEps);
    max_db = std::max(max_db, energy_db[f]);
  }
  std::vector<size_t> keep;
  for (size_t f = 0; f < starts.size(); ++f)
    if (max_db - kStoiDynRange - energy_db[f] < 0.0) keep.push_back(starts[f]);
  const size_t out_len = keep.empty() ? 0 : (keep.size() - 1) * hop + frame;
  std::vector<double> xs(out_len, 0.0), ys(out_len, 0.0);
  for (size_t k = 0; k < keep.size(); ++k) {
    for (int i = 0; i < frame; ++i) {
      xs[k * hop + i] += w[i] * (*x)[keep[k] + i];
      ys[k * hop + i] += w[i] * (*y)[keep[k] + i];
    }
  }
  *x = std::move(xs);
  *y = std::move(ys);
}

// One-third-octave band magnitudes, bands x frames.
Matrix ThirdOctaveEnvelopes(const std::vector<double> &x) {
  const int bins = kStoiFft / 2 + 1;
  // Band edges snapped to the nearest FFT bin; band i spans [lo, hi).
  std::vector<int> lo(kStoiBands), hi(kStoiBands);
  auto nearest_bin = [&](double freq) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * kStoiRate / kStoiFft;
      const double d = (f - freq) * (f - freq);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  for (int b = 0; b < kStoiBands; ++b) {
    lo[b] = nearest_bin(kStoiMinFreq * std::pow(2.0, (2.0 * b - 1.0) / 6.0));
    hi[b] = nearest_bin(kStoiMinFreq * std::pow(2.0, (2.0 * b + 1.0) / 6.0));
  }

  const std::vector<double> w = HanningInterior(kStoiFrame);
  const std::vector<size_t> starts = FrameStarts(x.size(), kStoiFrame, kStoiFrame / 2);
  Matrix env(kStoiBands, static_cast<Eigen::Index>(starts.size()));
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buf(kStoiFft, 0.0);
  std::vector<std::complex<double>> spec;
  for (size_t f = 0; f < starts.size(); ++f) {
    for (int i = 0; i < kStoiFrame; ++i) buf[i] = w[i] * x[starts[f] + i];
    fft.fwd(spec, buf);
    for (int b = 0; b < kStoiBands; ++b) {
      double e = 0.0;
      for (int k = lo[b]; k < hi[b]; ++k) e += std::norm(spec[k]);
      env(b, static_cast<Eigen::Index>(f)) = std::sqrt(e);
    }
  }
  return env;
}

}  // namespace

double SegmentalSnr(const Waveform &clean, const Waveform &test, const SegSnrOptions &opts) {
  if (clean.size() != test.size())
    throw Error("segmental_snr: length mismatch (" + std::to_string(clean.size()) + " vs " +
                std::to_string(test.size()) + ")");
  if (opts.frame_len <= 0 || opts.hop_len <= 0) throw Error("segmental_snr: bad framing");
  double sum = 0.0;
  size_t counted = 0;
  for (size_t start = 0; start + opts.frame_len <= clean.size(); start += opts.hop_len) {
    double signal = 0.0, error = 0.0;
    for (int i = 0; i < opts.frame_len; ++i) {
      const double c = clean.samples[start + i];
      const double d = c - test.samples[start + i];
      signal += c * c;
      error += d * d;
    }
    if (signal == 0.0) continue;
    const double db = error == 0.0 ? opts.max_db : 10.0 * std::log10(signal / error);
    sum += std::clamp(db, opts.min_db, opts.max_db);
    ++counted;
  }
  if (counted == 0) throw Error("segmental_snr: clean signal is silent in every frame");
  return sum / static_cast<double>(counted);
}

double Ssnri(const Waveform &clean, const Waveform &noisy, const Waveform &enhanced,
             const SegSnrOptions &opts) {
  return SegmentalSnr(clean, enhanced, opts) - SegmentalSnr(clean, noisy, opts);
}

double Stoi(const Waveform &clean, const Waveform &test) {
  if (clean.size() != test.size())
    throw Error("stoi: length mismatch (" + std::to_string(clean.size()) + " vs " +
                std::to_string(test.size()) + ")");
  if (clean.sample_rate != test.sample_rate) throw Error("stoi: sample rate mismatch");
  std::vector<double> x = clean.samples, y = test.samples;
  if (clean.sample_rate != kStoiRate) {
    x = ResamplePoly(x, kStoiRate, clean.sample_rate);
    y = ResamplePoly(y, kStoiRate, clean.sample_rate);
  }
  const size_t min_len = static_cast<size_t>(kStoiSegment) * kStoiFrame / 2;  // 384 ms
  if (x.size() < min_len) throw Error("stoi: input shorter than one 384 ms analysis segment");
  bool silent = true;
  for (double v : x) silent = silent && v == 0.0;
  if (silent) throw Error("stoi: clean signal is silent");

  RemoveSilentFrames(&x, &y);
  const Matrix xe = ThirdOctaveEnvelopes(x);
  const Matrix ye = ThirdOctaveEnvelopes(y);
  const Eigen::Index frames = xe.cols();
  if (frames < kStoiSegment)
    throw Error("stoi: fewer than " + std::to_string(kStoiSegment) +
                " non-silent frames; input too short");

  const double clip = std::pow(10.0, -kStoiBeta / 20.0);
  double total = 0.0;
  Eigen::Index segments = 0;
  for (Eigen::Index m = kStoiSegment; m <= frames; ++m, ++segments) {
    for (int b = 0; b < kStoiBands; ++b) {
      Eigen::RowVectorXd xs = xe.block(b, m - kStoiSegment, 1, kStoiSegment);
      Eigen::RowVectorXd ys = ye.block(b, m - kStoiSegment, 1, kStoiSegment);
      const double scale = xs.norm() / (ys.norm() + kEps);
      Eigen::RowVectorXd yp = (ys * scale).cwiseMin(xs * (1.0 + clip));
      yp.array() -= yp.mean();
      xs.array() -= xs.mean();
      yp /= (yp.norm() + kEps);
      xs /= (xs.norm() + kEps);
      total += xs.dot(yp);
    }
  }
  const double d = total / (static_cast<double>(segments) * kStoiBands);
  return std::clamp(d, 0.0, 1.0);
}

namespace {

bool Matches(const EvalRow &r, const std::string &system, const std::string &channel) {
  return r.system == system && (channel.empty() || r.channel == channel);
}

template <typename Field>
double MeanOf(const std::vector<EvalRow> &rows, const std::string &system,
              const std::string &channel, Field field) {
  double sum = 0.0;
  size_t n = 0;
  for (const EvalRow &r : rows) {
    if (!Matches(r, system, channel)) continue;
    sum += field(r);
    ++n;
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

Waveform LoadForEval(const std::string &path) {
  if (!std::filesystem::exists(path)) throw Error("evaluation input missing: " + path);
  return ReadWav(path);
}

void Truncate(Waveform *w, size_t len) {
  if (w->size() < len)
    throw Error("evaluation reference shorter than the enhanced signal");
  w->samples.resize(len);
}

}  // namespace

double EvalReport::MeanStoi(const std::string &system, const std::string &channel) const {
  return MeanOf(rows, system, channel, [](const EvalRow &r) { return r.stoi; });
}

double EvalReport::MeanSsnri(const std::string &system, const std::string &channel) const {
  return MeanOf(rows, system, channel, [](const EvalRow &r) { return r.ssnri; });
}

std::vector<std::string> EvalReport::Systems() const {
  std::vector<std::string> out;
  for (const EvalRow &r : rows)
    if (std::find(out.begin(), out.end(), r.system) == out.end()) out.push_back(r.system);
  return out;
}

std::vector<std::string> EvalReport::Channels() const {
  std::vector<std::string> out;
  for (const EvalRow &r : rows)
    if (std::find(out.begin(), out.end(), r.channel) == out.end()) out.push_back(r.channel);
  return out;
}

std::vector<EvalEntry> ReadEvalManifest(const std::string &path) {
  const CsvTable t = ReadCsv(path);
  const int utt = t.Column("utt"), sys = t.Column("system"), ch = t.Column("channel"),
            noise = t.Column("noise"), snr = t.Column("snr_db"), clean = t.Column("clean"),
            noisy = t.Column("noisy"), enh = t.Column("enhanced");
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string &p) {
    const std::filesystem::path fp(p);
    return fp.is_absolute() ? p : (base / fp).string();
  };
  std::vector<EvalEntry> out;
  for (const auto &r : t.rows)
    out.push_back({r[utt], r[sys], r[ch], r[noise], std::stod(r[snr]), resolve(r[clean]),
                   resolve(r[noisy]), resolve(r[enh])});
  return out;
}

void WriteEvalManifest(const std::string &path, std::span<const EvalEntry> entries) {
  // Paths are stored relative to the manifest so a directory can be moved
  // as a unit.
  const std::filesystem::path base =
      std::filesystem::absolute(std::filesystem::path(path)).parent_path().lexically_normal();
  auto rel = [&](const std::string &p) {
    return std::filesystem::absolute(p).lexically_normal().lexically_relative(base).generic_string();
  };
  CsvTable t;
  t.header = {"utt", "system", "channel", "noise", "snr_db", "clean", "noisy", "enhanced"};
  for (const EvalEntry &e : entries)
    t.rows.push_back({e.utt, e.system, e.channel, e.noise, FormatDouble(e.snr_db, 1),
                      rel(e.clean_path), rel(e.noisy_path), rel(e.enhanced_path)});
  WriteCsv(path, t);
}

EvalRow EvaluateEntry(const EvalEntry &entry, const SegSnrOptions &opts) {
  Waveform clean = LoadForEval(entry.clean_path);
  Waveform noisy = LoadForEval(entry.noisy_path);
  const Waveform enhanced = LoadForEval(entry.enhanced_path);
  Truncate(&clean, enhanced.size());
  Truncate(&noisy, enhanced.size());
  EvalRow row{entry.utt, entry.system, entry.channel, entry.noise, entry.snr_db, 0, 0, 0};
  row.stoi = Stoi(clean, enhanced);
  row.segsnr = SegmentalSnr(clean, enhanced, opts);
  row.ssnri = row.segsnr - SegmentalSnr(clean, noisy, opts);
  return row;
}

EvalReport Evaluate(std::span<const EvalEntry> entries, const SegSnrOptions &opts, int jobs) {
  EvalReport report;
  report.rows.resize(entries.size());
  ParallelFor(static_cast<int>(entries.size()), jobs,
              [&](int i) { report.rows[i] = EvaluateEntry(entries[i], opts); });
  return report;
}

std::string ReportToCsv(const EvalReport &report) {
  std::ostringstream os;
  os << kReportHeader << "\n";
  for (const EvalRow &r : report.rows)
    os << r.utt << "," << r.system << "," << r.channel << "," << r.noise << ","
       << FormatDouble(r.snr_db, 1) << "," << FormatDouble(r.stoi, 6) << ","
       << FormatDouble(r.segsnr, 6) << "," << FormatDouble(r.ssnri, 6) << "\n";
  return os.str();
}

EvalReport ReportFromCsv(const std::string &path) {
  const CsvTable t = ReadCsv(path);
  EvalReport report;
  for (const auto &r : t.rows)
    report.rows.push_back({r[t.Column("utt")], r[t.Column("system")], r[t.Column("channel")],
                           r[t.Column("noise")], std::stod(r[t.Column("snr_db")]),
                           std::stod(r[t.Column("stoi")]), std::stod(r[t.Column("segsnr")]),
                           std::stod(r[t.Column("ssnri")])});
  return report;
}

std::string FormatSummary(const EvalReport &report) {
  const std::vector<std::string> systems = report.Systems();
  const std::vector<std::string> channels = report.Channels();
  std::ostringstream os;
  auto pad = [](const std::string &s, size_t w) {
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
  };
  auto per_channel = [&](const std::string &title, bool stoi) {
    os << title << "\n" << pad("", 10);
    for (const std::string &c : channels) os << pad(c, 9);
    os << "\n";
    for (const std::string &s : systems) {
      os << pad(s, 10);
      for (const std::string &c : channels) {
        const double v = stoi ? report.MeanStoi(s, c) : report.MeanSsnri(s, c);
        os << pad(std::isnan(v) ? "-" : FormatDouble(v, 3), 9);
      }
      os << "\n";
    }
    os << "\n";
  };
  per_channel("Average STOI per channel", true);
  per_channel("Average SSNRI (dB) per channel", false);

  os << "System comparison (mean over all conditions and channels)\n"
     << pad("system", 10) << pad("STOI", 9) << pad("SSNRI", 9) << "PESQ\n";
  for (const std::string &s : systems) {
    if (s == kNoisySystem) continue;
    os << pad(s, 10) << pad(FormatDouble(report.MeanStoi(s), 3), 9)
       << pad(FormatDouble(report.MeanSsnri(s), 3), 9) << "n/a\n";
  }
  return os.str();
}

}  // namespace distse
