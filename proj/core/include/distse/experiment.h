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

#ifndef DISTSE_EXPERIMENT_H_
#define DISTSE_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "distse/metrics.h"
#include "distse/nn.h"
#include "distse/scene.h"
#include "distse/systems.h"

namespace distse {

// How training scenes cover the noise x SNR grid: every source at every
// (noise, snr) point, or each source at every noise with the SNR cycling
// through the grid.
enum class SnrAssignment { kFullGrid, kCycle };

struct ExperimentConfig {
  // [scene]
  int sample_rate = 8000;
  std::vector<int> mics = {1, 4, 7};  // 1-based indices into the default geometry
  int reference_channel = 1;          // 1-based position within `mics`
  AttenuationModel attenuation = AttenuationModel::kInverseDistance;
  std::vector<std::string> train_noises = {"white", "pink"};
  std::vector<double> train_snrs = {-5, -2, 1, 4, 7, 10};
  SnrAssignment train_assignment = SnrAssignment::kFullGrid;  // every (noise, snr) per utterance
  std::vector<std::string> test_noises = {"white", "pink"};
  std::vector<double> test_snrs = {-5, 0, 5};
  std::string noise_file;  // used by the "file" noise kind
  uint64_t seed = 1;

  // [sources]
  bool generate_sources = true;
  int train_utterances = 20;
  int test_utterances = 4;
  double duration_s = 3.0;
  std::string source_dir;  // when not generating: <dir>/<name>.wav
  std::vector<std::string> train_sources;
  std::vector<std::string> test_sources;

  // [features]
  StftConfig stft{128, 64, 128, WindowKind::kHann};
  int context = 3;
  double floor_eps = 1e-12;

  // [model] and [train]
  SystemTopology topology;
  TrainConfig train;

  // [run]
  int jobs = 1;

  FrontEndConfig front_end() const;
  MicGeometry geometry() const;
  void Validate() const;

  // Overrides the scene and training seeds.
  void SetSeed(uint64_t s);

  static ExperimentConfig Desk();
  static ExperimentConfig PaperScale();
  // INI-style file: [section] headers and key = value lines, lists
  // comma-separated. Unset keys keep the Desk() defaults.
  static ExperimentConfig Load(const std::string &path);
  std::string ToIni() const;
};

struct CorpusScene {
  std::string name;
  std::string split;  // "train" or "test"
  std::string source;
  std::string noise;
  double snr_db = 0.0;
  uint64_t seed = 0;
  int channels = 0;
};

// On-disk layout:
//   manifest.csv                       scene,split,source,noise,snr_db,seed,channels
//   sources/<source>_clean.wav         original clean utterances
//   <split>/<scene>/<scene>_ch<p>.wav        noisy channel p (1-based)
//   <split>/<scene>/<scene>_clean_ch<p>.wav  channel-dependent clean
struct Corpus {
  std::string root;
  std::vector<CorpusScene> scenes;

  std::vector<CorpusScene> Split(const std::string &split) const;
  std::string SourcePath(const std::string &source) const;
  std::string NoisyPath(const CorpusScene &s, int channel) const;  // channel 0-based
  std::string CleanChannelPath(const CorpusScene &s, int channel) const;
};

inline constexpr const char *kCorpusManifestHeader = "scene,split,source,noise,snr_db,seed,channels";

Corpus SynthesizeCorpus(const ExperimentConfig &cfg, const std::string &out_dir);
Corpus ReadCorpus(const std::string &dir);
MultichannelRecording LoadScene(const Corpus &corpus, const CorpusScene &scene);
std::vector<Waveform> LoadNoisyChannels(const Corpus &corpus, const CorpusScene &scene);

TrainedSystem TrainFromCorpus(const ExperimentConfig &cfg, const Corpus &corpus,
                              SystemKind kind, TrainingLog *log);
void TrainBundle(const ExperimentConfig &cfg, const std::string &corpus_dir, SystemKind kind,
                 const std::string &bundle_dir);

// Enhances every scene of a split, writing <out>/<scene>/<scene>_enh[_ch<p>].wav
// and <out>/eval_manifest.csv. Returns the evaluation entries written.
std::vector<EvalEntry> EnhanceCorpus(const TrainedSystem &sys, const Corpus &corpus,
                                     const std::string &split, const std::string &out_dir,
                                     int jobs = 1);

// Rows scoring the unprocessed channels against the clean source.
std::vector<EvalEntry> NoisyBaselineEntries(const Corpus &corpus, const std::string &split);

SegSnrOptions SegSnrFor(const ExperimentConfig &cfg);

struct ExperimentResult {
  EvalReport report;
  std::string report_csv;
  std::string summary;
};

struct ExperimentOptions {
  bool force = false;  // ignore completed-stage markers
  bool verbose = false;
};

// synth -> train (S, F, C) -> enhance -> eval. Each stage writes into a
// temporary directory that is renamed on success, followed by a
// .done marker; completed stages are skipped on rerun.
ExperimentResult RunExperiment(const ExperimentConfig &cfg, const std::string &out_dir,
                               const ExperimentOptions &opts = {});

}  // namespace distse

#endif  // DISTSE_EXPERIMENT_H_
