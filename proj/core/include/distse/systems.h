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

#ifndef DISTSE_SYSTEMS_H_
#define DISTSE_SYSTEMS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "distse/dsp.h"
#include "distse/features.h"
#include "distse/nn.h"
#include "distse/scene.h"

namespace distse {

// DNN-S: one network per channel.  DNN-F: one network on the concatenated
// channels.  DNN-C: per-channel distributed-processing (DP) networks, then a
// fusion-centre (FC) network on their concatenated outputs.
enum class SystemKind { kS, kF, kC };

SystemKind ParseSystemKind(const std::string &name);  // "s", "f" or "c"
std::string SystemKindTag(SystemKind kind);          // "s", "f", "c"
std::string SystemKindName(SystemKind kind);         // "DNN-S", ...

struct FrontEndConfig {
  StftConfig stft;
  int context = 3;
  double floor_eps = 1e-12;
  int sample_rate = 16000;

  int bins() const { return stft.num_bins(); }
  void Validate() const;
};

struct NetworkShape {
  int depth = 4;  // number of linear layers
  int width = 128;
};

struct SystemTopology {
  NetworkShape s{4, 128};
  NetworkShape f{4, 128};
  NetworkShape dp{3, 128};
  NetworkShape fc{3, 128};

  static SystemTopology Desk();
  static SystemTopology PaperScale();
};

struct NetworkModel {
  std::string name;
  MlpParams params;
  NormStats input_norm;
};

struct TrainedSystem {
  SystemKind kind = SystemKind::kS;
  int num_channels = 0;
  FrontEndConfig front_end;
  int reference_channel = 0;  // noisy-phase source for F and C
  // S: P channel models.  F: one model.  C: P DP models followed by FC.
  std::vector<NetworkModel> models;

  // Checks model count and that every input/output dim matches its role.
  void Validate() const;
};

// Every network's input dim for its role, given P, bins and context.
struct RoleDims {
  int channel_input;  // DNN-S_p and DNN-DP_p
  int fusion_input;   // DNN-F
  int fc_input;       // DNN-FC
  int output;
};
RoleDims ComputeRoleDims(const FrontEndConfig &fe, int num_channels);

struct ChannelFeatures {
  std::vector<LpsMatrix> noisy;
  std::vector<PhaseMatrix> phase;
  std::vector<LpsMatrix> clean_channels;  // empty when not available
  LpsMatrix source;                       // empty when not available
};

ChannelFeatures AnalyzeNoisy(std::span<const Waveform> channels, const FrontEndConfig &fe);
ChannelFeatures AnalyzeRecording(const MultichannelRecording &rec, const FrontEndConfig &fe);

struct ModelLog {
  std::string name;
  int phase = 1;  // 2 for the FC stage of DNN-C
  std::vector<double> loss_history;
  uint64_t checksum = 0;
};

struct TrainingLog {
  std::vector<ModelLog> models;
  // DNN-C only: DP checksums captured after the DP stage and re-checked
  // after FC training.
  std::vector<uint64_t> dp_checksums_before_fc;
  std::vector<uint64_t> dp_checksums_after_fc;
};

struct SystemTrainOptions {
  TrainConfig train;
  int reference_channel = 0;
  int jobs = 1;
};

TrainedSystem TrainSystemS(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &shape,
                           const SystemTrainOptions &opts, TrainingLog *log = nullptr);

TrainedSystem TrainSystemF(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &shape,
                           const SystemTrainOptions &opts, TrainingLog *log = nullptr);

// Two-phase DNN-C protocol: the DP stage must finish before the FC stage,
// and the DP models stay fixed while FC trains.
class TwoStageTrainer {
 public:
  TwoStageTrainer(std::span<const MultichannelRecording> recs, FrontEndConfig fe,
                  NetworkShape dp_shape, NetworkShape fc_shape, SystemTrainOptions opts);

  void TrainDistributedStage();
  void TrainFusionStage();

  bool distributed_done() const { return distributed_done_; }
  bool fusion_done() const { return fusion_done_; }
  const std::vector<NetworkModel> &dp_models() const { return dp_models_; }
  const TrainingLog &log() const { return log_; }

  TrainedSystem Finish() const;

 private:
  std::vector<ChannelFeatures> features_;
  FrontEndConfig fe_;
  NetworkShape dp_shape_;
  NetworkShape fc_shape_;
  SystemTrainOptions opts_;
  int num_channels_ = 0;
  std::vector<NetworkModel> dp_models_;
  NetworkModel fc_model_;
  TrainingLog log_;
  bool distributed_done_ = false;
  bool fusion_done_ = false;
};

TrainedSystem TrainSystemC(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &dp_shape,
                           const NetworkShape &fc_shape, const SystemTrainOptions &opts,
                           TrainingLog *log = nullptr);

// Normalise with the model's input stats, then run the network.
Matrix RunModel(const NetworkModel &model, const Matrix &features);

// DNN-C building blocks: E_p = DP_p(splice(Y_p)); E = FC([E_1; ...; E_P]).
std::vector<Matrix> RunDistributedStage(const TrainedSystem &sys,
                                        std::span<const LpsMatrix> noisy);
Matrix RunFusionStage(const TrainedSystem &sys, std::span<const Matrix> dp_outputs);

// Enhanced LPS: P matrices for DNN-S, one for DNN-F / DNN-C.
std::vector<Matrix> EnhanceLps(const TrainedSystem &sys, const ChannelFeatures &feats);

// Waveform reconstruction with the noisy phase: DNN-S uses each channel's
// own phase, DNN-F and DNN-C the reference channel's.
std::vector<Waveform> Enhance(const TrainedSystem &sys, std::span<const Waveform> noisy);
std::vector<Waveform> Enhance(const TrainedSystem &sys, const MultichannelRecording &rec);

}  // namespace distse

#endif  // DISTSE_SYSTEMS_H_
