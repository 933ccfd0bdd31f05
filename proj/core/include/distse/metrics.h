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

#ifndef DISTSE_METRICS_H_
#define DISTSE_METRICS_H_

#include <span>
#include <string>
#include <vector>

#include "distse/dsp.h"

namespace distse {

struct SegSnrOptions {
  int frame_len = 512;
  int hop_len = 256;
  double min_db = -10.0;
  double max_db = 35.0;
};

// Mean over frames of clamp(10 log10(sum clean^2 / sum (clean - test)^2)).
// Frames with zero clean energy are skipped.
double SegmentalSnr(const Waveform &clean, const Waveform &test,
                    const SegSnrOptions &opts = {});

// segSNR(clean, enhanced) - segSNR(clean, noisy).
double Ssnri(const Waveform &clean, const Waveform &noisy, const Waveform &enhanced,
             const SegSnrOptions &opts = {});

// Short-time objective intelligibility (Taal et al., 2011) with the
// reference constants: 10 kHz internal rate, 256-sample frames, 512-point
// FFT, 15 one-third-octave bands from 150 Hz, 30-frame segments, -15 dB
// lower SDR bound, 40 dB silence threshold. Result clamped to [0, 1].
double Stoi(const Waveform &clean, const Waveform &test);

struct EvalEntry {
  std::string utt;
  std::string system;
  std::string channel;
  std::string noise;
  double snr_db = 0.0;
  std::string clean_path;
  std::string noisy_path;
  std::string enhanced_path;
};

struct EvalRow {
  std::string utt;
  std::string system;
  std::string channel;
  std::string noise;
  double snr_db = 0.0;
  double stoi = 0.0;
  double segsnr = 0.0;
  double ssnri = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;

  // Arithmetic means over rows matching system (and channel, if non-empty).
  double MeanStoi(const std::string &system, const std::string &channel = "") const;
  double MeanSsnri(const std::string &system, const std::string &channel = "") const;
  std::vector<std::string> Systems() const;   // in first-appearance order
  std::vector<std::string> Channels() const;  // in first-appearance order
};

// Evaluation manifest CSV:
//   utt,system,channel,noise,snr_db,clean,noisy,enhanced
std::vector<EvalEntry> ReadEvalManifest(const std::string &path);
void WriteEvalManifest(const std::string &path, std::span<const EvalEntry> entries);

// References are truncated to the enhanced length (ISTFT drops the
// trailing partial frame). A missing file raises an error naming it.
EvalRow EvaluateEntry(const EvalEntry &entry, const SegSnrOptions &opts);
EvalReport Evaluate(std::span<const EvalEntry> entries, const SegSnrOptions &opts, int jobs = 1);

// System label of the unprocessed-input rows.
inline constexpr const char *kNoisySystem = "noisy";

inline constexpr const char *kReportHeader = "utt,system,channel,noise,snr_db,stoi,segsnr,ssnri";

std::string ReportToCsv(const EvalReport &report);
EvalReport ReportFromCsv(const std::string &path);

// Human-readable tables: per-channel STOI and SSNRI for the noisy input and
// DNN-S, and the per-system comparison (PESQ is reported as n/a).
std::string FormatSummary(const EvalReport &report);

}  // namespace distse

#endif  // DISTSE_METRICS_H_
