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

#include "distse/systems.h"

#include <cmath>
#include <utility>

#include "distse/parallel.h"

namespace distse {

namespace {

// Stream ids for per-model seed derivation.
constexpr uint64_t kSeedS = 100, kSeedF = 200, kSeedDp = 300, kSeedFc = 400;

std::string ChannelModelName(const std::string &prefix, int p) {
  return prefix + "_ch" + std::to_string(p + 1);
}

int CheckRecordings(std::span<const MultichannelRecording> recs, const FrontEndConfig &fe) {
  if (recs.empty()) throw Error("training set is empty");
  const int p = recs[0].num_channels();
  if (p < 1) throw Error("training recording has no channels");
  for (size_t i = 0; i < recs.size(); ++i) {
    if (recs[i].num_channels() != p)
      throw Error("training recording " + std::to_string(i) + " has " +
                  std::to_string(recs[i].num_channels()) + " channels, expected " +
                  std::to_string(p));
    if (recs[i].source.sample_rate != fe.sample_rate)
      throw Error("training recording " + std::to_string(i) + " has sample rate " +
                  std::to_string(recs[i].source.sample_rate) + ", front end expects " +
                  std::to_string(fe.sample_rate));
  }
  return p;
}

std::vector<ChannelFeatures> AnalyzeAll(std::span<const MultichannelRecording> recs,
                                        const FrontEndConfig &fe, int jobs) {
  std::vector<ChannelFeatures> out(recs.size());
  ParallelFor(static_cast<int>(recs.size()), jobs,
              [&](int i) { out[i] = AnalyzeRecording(recs[i], fe); });
  return out;
}

TrainConfig WithSeed(const TrainConfig &cfg, uint64_t stream) {
  TrainConfig c = cfg;
  c.seed = MixSeed(cfg.seed, stream);
  return c;
}

NetworkModel FitModel(const std::string &name, const Matrix &inputs, const Matrix &targets,
                      const NetworkShape &shape, const TrainConfig &cfg, ModelLog *log) {
  NetworkModel model;
  model.name = name;
  model.input_norm = FitNorm(inputs);
  const Matrix normed = ApplyNorm(inputs, model.input_norm);
  const MlpSpec spec = MlpSpec::Uniform(static_cast<int>(inputs.cols()),
                                        static_cast<int>(targets.cols()), shape.depth, shape.width);
  TrainResult result = Train(spec, normed, targets, cfg);
  model.params = std::move(result.params);
  log->name = name;
  log->loss_history = std::move(result.loss_history);
  log->checksum = ParamsChecksum(model.params);
  return model;
}

// Pooled (splice(Y_p), target) pairs over the training set.
template <typename TargetFn>
std::pair<Matrix, Matrix> ChannelDataset(const std::vector<ChannelFeatures> &feats, int p,
                                         int context, TargetFn target) {
  std::vector<Matrix> xs, ts;
  for (const ChannelFeatures &f : feats) {
    xs.push_back(SpliceContext(f.noisy[p], context).values);
    ts.push_back(target(f).values);
  }
  return {StackRows(xs), StackRows(ts)};
}

Matrix FusionInput(std::span<const LpsMatrix> noisy, int context) {
  std::vector<FeatureMatrix> spliced;
  for (const LpsMatrix &l : noisy) spliced.push_back(SpliceContext(l, context));
  return ConcatChannels(spliced).values;
}

void AppendLogs(TrainingLog *log, std::vector<ModelLog> logs) {
  if (!log) return;
  for (ModelLog &l : logs) log->models.push_back(std::move(l));
}

}  // namespace

SystemKind ParseSystemKind(const std::string &name) {
  if (name == "s" || name == "S") return SystemKind::kS;
  if (name == "f" || name == "F") return SystemKind::kF;
  if (name == "c" || name == "C") return SystemKind::kC;
  throw Error("unknown system kind '" + name + "' (expected s, f or c)");
}

std::string SystemKindTag(SystemKind kind) {
  switch (kind) {
    case SystemKind::kS: return "s";
    case SystemKind::kF: return "f";
    case SystemKind::kC: return "c";
  }
  return "?";
}

std::string SystemKindName(SystemKind kind) {
  switch (kind) {
    case SystemKind::kS: return "DNN-S";
    case SystemKind::kF: return "DNN-F";
    case SystemKind::kC: return "DNN-C";
  }
  return "?";
}

void FrontEndConfig::Validate() const {
  stft.Validate();
  if (context < 1 || context % 2 == 0) throw Error("front end: context must be odd");
  if (!(floor_eps > 0.0)) throw Error("front end: floor_eps must be positive");
  if (sample_rate <= 0) throw Error("front end: sample_rate must be positive");
}

SystemTopology SystemTopology::Desk() { return SystemTopology{}; }

SystemTopology SystemTopology::PaperScale() {
  return SystemTopology{{7, 2048}, {7, 2048}, {5, 2048}, {4, 2048}};
}

RoleDims ComputeRoleDims(const FrontEndConfig &fe, int num_channels) {
  const int bins = fe.bins();
  return {SingleChannelInputDim(bins, fe.context), FusionInputDim(bins, fe.context, num_channels),
          FusionCenterInputDim(bins, num_channels), bins};
}

void TrainedSystem::Validate() const {
  front_end.Validate();
  if (num_channels < 1) throw Error("system: no channels");
  if (reference_channel < 0 || reference_channel >= num_channels)
    throw Error("system: reference channel out of range");
  const RoleDims dims = ComputeRoleDims(front_end, num_channels);
  size_t expected = 0;
  switch (kind) {
    case SystemKind::kS: expected = num_channels; break;
    case SystemKind::kF: expected = 1; break;
    case SystemKind::kC: expected = num_channels + 1; break;
  }
  if (models.size() != expected)
    throw Error(SystemKindName(kind) + ": expected " + std::to_string(expected) +
                " models, have " + std::to_string(models.size()));
  for (size_t i = 0; i < models.size(); ++i) {
    int in = dims.channel_input;
    if (kind == SystemKind::kF) in = dims.fusion_input;
    if (kind == SystemKind::kC && i == models.size() - 1) in = dims.fc_input;
    const MlpSpec spec = models[i].params.spec();
    if (spec.input_dim() != in || spec.output_dim() != dims.output)
      throw Error(SystemKindName(kind) + " model " + models[i].name + " is " +
                  spec.ToString() + ", role needs input " + std::to_string(in) +
                  " and output " + std::to_string(dims.output));
    if (models[i].input_norm.dim() != in)
      throw Error("model " + models[i].name + ": norm stats dim mismatch");
  }
}

ChannelFeatures AnalyzeNoisy(std::span<const Waveform> channels, const FrontEndConfig &fe) {
  ChannelFeatures f;
  for (const Waveform &w : channels) {
    if (w.sample_rate != fe.sample_rate)
      throw Error("channel sample rate " + std::to_string(w.sample_rate) +
                  " != front end rate " + std::to_string(fe.sample_rate));
    auto [lps, phase] = ToLpsPhase(Stft(w, fe.stft), fe.floor_eps);
    f.noisy.push_back(std::move(lps));
    f.phase.push_back(std::move(phase));
  }
  return f;
}

ChannelFeatures AnalyzeRecording(const MultichannelRecording &rec, const FrontEndConfig &fe) {
  ChannelFeatures f = AnalyzeNoisy(rec.channels, fe);
  for (const Waveform &w : rec.clean_channels)
    f.clean_channels.push_back(ToLpsPhase(Stft(w, fe.stft), fe.floor_eps).first);
  f.source = ToLpsPhase(Stft(rec.source, fe.stft), fe.floor_eps).first;
  return f;
}

TrainedSystem TrainSystemS(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &shape,
                           const SystemTrainOptions &opts, TrainingLog *log) {
  fe.Validate();
  const int num_channels = CheckRecordings(recs, fe);
  const std::vector<ChannelFeatures> feats = AnalyzeAll(recs, fe, opts.jobs);
  TrainedSystem sys;
  sys.kind = SystemKind::kS;
  sys.num_channels = num_channels;
  sys.front_end = fe;
  sys.reference_channel = opts.reference_channel;
  sys.models.resize(num_channels);
  std::vector<ModelLog> logs(num_channels);
  ParallelFor(num_channels, opts.jobs, [&](int p) {
    auto [x, t] = ChannelDataset(feats, p, fe.context,
                                 [](const ChannelFeatures &f) -> const LpsMatrix & { return f.source; });
    sys.models[p] = FitModel(ChannelModelName("s", p), x, t, shape,
                             WithSeed(opts.train, kSeedS + p), &logs[p]);
  });
  AppendLogs(log, std::move(logs));
  sys.Validate();
  return sys;
}

TrainedSystem TrainSystemF(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &shape,
                           const SystemTrainOptions &opts, TrainingLog *log) {
  fe.Validate();
  const int num_channels = CheckRecordings(recs, fe);
  const std::vector<ChannelFeatures> feats = AnalyzeAll(recs, fe, opts.jobs);
  std::vector<Matrix> xs, ts;
  for (const ChannelFeatures &f : feats) {
    xs.push_back(FusionInput(f.noisy, fe.context));
    ts.push_back(f.source.values);
  }
  TrainedSystem sys;
  sys.kind = SystemKind::kF;
  sys.num_channels = num_channels;
  sys.front_end = fe;
  sys.reference_channel = opts.reference_channel;
  std::vector<ModelLog> logs(1);
  sys.models.push_back(FitModel("f", StackRows(xs), StackRows(ts), shape,
                                WithSeed(opts.train, kSeedF), &logs[0]));
  AppendLogs(log, std::move(logs));
  sys.Validate();
  return sys;
}

TwoStageTrainer::TwoStageTrainer(std::span<const MultichannelRecording> recs,
                                 FrontEndConfig fe, NetworkShape dp_shape,
                                 NetworkShape fc_shape, SystemTrainOptions opts)
    : fe_(std::move(fe)), dp_shape_(dp_shape), fc_shape_(fc_shape), opts_(std::move(opts)) {
  fe_.Validate();
  num_channels_ = CheckRecordings(recs, fe_);
  for (const MultichannelRecording &r : recs)
    if (static_cast<int>(r.clean_channels.size()) != num_channels_)
      throw Error("DNN-C training needs channel-dependent clean references");
  features_ = AnalyzeAll(recs, fe_, opts_.jobs);
}

void TwoStageTrainer::TrainDistributedStage() {
  if (distributed_done_) throw Error("DNN-C: distributed stage already trained");
  dp_models_.assign(num_channels_, NetworkModel{});
  std::vector<ModelLog> logs(num_channels_);
  ParallelFor(num_channels_, opts_.jobs, [&](int p) {
    auto [x, t] = ChannelDataset(features_, p, fe_.context,
                                 [p](const ChannelFeatures &f) -> const LpsMatrix & {
                                   return f.clean_channels[p];
                                 });
    dp_models_[p] = FitModel(ChannelModelName("dp", p), x, t, dp_shape_,
                             WithSeed(opts_.train, kSeedDp + p), &logs[p]);
  });
  for (ModelLog &l : logs) {
    log_.dp_checksums_before_fc.push_back(l.checksum);
    log_.models.push_back(std::move(l));
  }
  distributed_done_ = true;
}

void TwoStageTrainer::TrainFusionStage() {
  if (!distributed_done_)
    throw Error("DNN-C: fusion stage requested before the distributed stage completed");
  if (fusion_done_) throw Error("DNN-C: fusion stage already trained");
  // DP models are read-only from here on.
  const std::vector<NetworkModel> &frozen = dp_models_;
  std::vector<Matrix> xs(features_.size()), ts(features_.size());
  ParallelFor(static_cast<int>(features_.size()), opts_.jobs, [&](int i) {
    std::vector<FeatureMatrix> outs;
    for (int p = 0; p < num_channels_; ++p) {
      FeatureMatrix e;
      e.values = RunModel(frozen[p], SpliceContext(features_[i].noisy[p], fe_.context).values);
      outs.push_back(std::move(e));
    }
    xs[i] = ConcatChannels(outs).values;
    ts[i] = features_[i].source.values;
  });
  ModelLog fc_log;
  fc_log.phase = 2;
  fc_model_ = FitModel("fc", StackRows(xs), StackRows(ts), fc_shape_,
                       WithSeed(opts_.train, kSeedFc), &fc_log);
  log_.models.push_back(std::move(fc_log));
  for (const NetworkModel &m : frozen) log_.dp_checksums_after_fc.push_back(ParamsChecksum(m.params));
  if (log_.dp_checksums_after_fc != log_.dp_checksums_before_fc)
    throw Error("DNN-C: DP parameters changed during fusion training");
  fusion_done_ = true;
}

TrainedSystem TwoStageTrainer::Finish() const {
  if (!distributed_done_ || !fusion_done_) throw Error("DNN-C: training incomplete");
  TrainedSystem sys;
  sys.kind = SystemKind::kC;
  sys.num_channels = num_channels_;
  sys.front_end = fe_;
  sys.reference_channel = opts_.reference_channel;
  sys.models = dp_models_;
  sys.models.push_back(fc_model_);
  sys.Validate();
  return sys;
}

TrainedSystem TrainSystemC(std::span<const MultichannelRecording> recs,
                           const FrontEndConfig &fe, const NetworkShape &dp_shape,
                           const NetworkShape &fc_shape, const SystemTrainOptions &opts,
                           TrainingLog *log) {
  TwoStageTrainer trainer(recs, fe, dp_shape, fc_shape, opts);
  trainer.TrainDistributedStage();
  trainer.TrainFusionStage();
  if (log) *log = trainer.log();
  return trainer.Finish();
}

Matrix RunModel(const NetworkModel &model, const Matrix &features) {
  return Forward(model.params, ApplyNorm(features, model.input_norm));
}

std::vector<Matrix> RunDistributedStage(const TrainedSystem &sys,
                                        std::span<const LpsMatrix> noisy) {
  if (sys.kind != SystemKind::kC) throw Error("distributed stage exists only in DNN-C");
  if (static_cast<int>(noisy.size()) != sys.num_channels)
    throw Error("DNN-C: expected " + std::to_string(sys.num_channels) + " channels, got " +
                std::to_string(noisy.size()));
  std::vector<Matrix> out;
  for (int p = 0; p < sys.num_channels; ++p)
    out.push_back(RunModel(sys.models[p], SpliceContext(noisy[p], sys.front_end.context).values));
  return out;
}

Matrix RunFusionStage(const TrainedSystem &sys, std::span<const Matrix> dp_outputs) {
  if (sys.kind != SystemKind::kC) throw Error("fusion stage exists only in DNN-C");
  std::vector<FeatureMatrix> parts;
  for (const Matrix &m : dp_outputs) {
    FeatureMatrix f;
    f.values = m;
    parts.push_back(std::move(f));
  }
  return RunModel(sys.models.back(), ConcatChannels(parts).values);
}

std::vector<Matrix> EnhanceLps(const TrainedSystem &sys, const ChannelFeatures &feats) {
  if (static_cast<int>(feats.noisy.size()) != sys.num_channels)
    throw Error(SystemKindName(sys.kind) + " expects P=" + std::to_string(sys.num_channels) +
                " channels, recording has P=" + std::to_string(feats.noisy.size()));
  const int context = sys.front_end.context;
  std::vector<Matrix> out;
  switch (sys.kind) {
    case SystemKind::kS:
      for (int p = 0; p < sys.num_channels; ++p)
        out.push_back(RunModel(sys.models[p], SpliceContext(feats.noisy[p], context).values));
      break;
    case SystemKind::kF:
      out.push_back(RunModel(sys.models[0], FusionInput(feats.noisy, context)));
      break;
    case SystemKind::kC:
      out.push_back(RunFusionStage(sys, RunDistributedStage(sys, feats.noisy)));
      break;
  }
  return out;
}

std::vector<Waveform> Enhance(const TrainedSystem &sys, std::span<const Waveform> noisy) {
  const ChannelFeatures feats = AnalyzeNoisy(noisy, sys.front_end);
  const std::vector<Matrix> lps = EnhanceLps(sys, feats);
  // Outputs are clamped to the range a valid LPS can take: the power floor
  // below, and the power of a full-scale windowed frame above.
  const double lo = std::log(sys.front_end.floor_eps);
  const double hi = 2.0 * std::log(static_cast<double>(sys.front_end.stft.frame_len));
  std::vector<Waveform> out;
  for (size_t i = 0; i < lps.size(); ++i) {
    const int phase_channel = sys.kind == SystemKind::kS ? static_cast<int>(i) : sys.reference_channel;
    LpsMatrix e;
    e.values = lps[i].cwiseMax(lo).cwiseMin(hi);
    e.floor_eps = sys.front_end.floor_eps;
    out.push_back(Istft(FromLpsPhase(e, feats.phase[phase_channel], sys.front_end.stft,
                                     sys.front_end.sample_rate)));
  }
  return out;
}

std::vector<Waveform> Enhance(const TrainedSystem &sys, const MultichannelRecording &rec) {
  return Enhance(sys, std::span<const Waveform>(rec.channels));
}

}  // namespace distse
