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

#include "distse/experiment.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "distse/bundle.h"
#include "distse/parallel.h"
#include "distse/speech_synth.h"
#include "distse/text_format.h"
#include "distse/wav_io.h"

namespace distse {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

template <typename T>
std::vector<T> ParseList(const std::string &text) {
  std::vector<T> out;
  for (const std::string &field : Split(text, ',')) {
    const std::string f = Trim(field);
    if (f.empty()) continue;
    if constexpr (std::is_same_v<T, std::string>) {
      out.push_back(f);
    } else if constexpr (std::is_same_v<T, int>) {
      out.push_back(std::stoi(f));
    } else {
      out.push_back(std::stod(f));
    }
  }
  return out;
}

template <typename T>
std::string JoinList(const std::vector<T> &items) {
  std::ostringstream os;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) os << ",";
    if constexpr (std::is_same_v<T, double>) {
      os << FormatDouble(items[i], 1);
    } else {
      os << items[i];
    }
  }
  return os.str();
}

bool ParseBool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error("expected a boolean, got '" + s + "'");
}

std::string SnrTag(double snr) {
  std::string v = FormatDouble(std::fabs(snr), std::fabs(snr - std::round(snr)) < 1e-9 ? 0 : 1);
  return (snr < 0 ? "m" : "p") + v;
}

std::string ChannelLabel(const Corpus &corpus, int p, const std::vector<std::string> &labels) {
  (void)corpus;
  return p < static_cast<int>(labels.size()) ? labels[p] : "ch" + std::to_string(p + 1);
}

std::vector<std::string> ReadChannelLabels(const Corpus &corpus) {
  const fs::path path = fs::path(corpus.root) / "geometry.csv";
  std::vector<std::string> labels;
  if (!fs::exists(path)) return labels;
  const CsvTable t = ReadCsv(path.string());
  const int mic = t.Column("mic");
  for (const auto &r : t.rows) labels.push_back("m" + r[mic]);
  return labels;
}

// Runs `body` into <target>.tmp, then renames it into place and drops a
// marker; skipped when the marker exists and `force` is off.
template <typename Body>
bool RunStage(const fs::path &out, const std::string &name, const fs::path &target,
              const ExperimentOptions &opts, Body body) {
  const fs::path marker = out / ("." + name + ".done");
  if (!opts.force && fs::exists(marker) && fs::exists(target)) {
    if (opts.verbose) std::cerr << "[experiment] " << name << ": already complete, skipping\n";
    return false;
  }
  if (opts.verbose) std::cerr << "[experiment] " << name << " ...\n";
  fs::remove(marker);
  fs::path tmp = target;
  tmp += ".tmp";
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    body(tmp);
  } catch (const std::exception &e) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw Error("stage " + name + " failed: " + e.what());
  }
  fs::remove_all(target);
  fs::rename(tmp, target);
  WriteTextFile(marker.string(), name + "\n");
  return true;
}

}  // namespace

FrontEndConfig ExperimentConfig::front_end() const {
  FrontEndConfig fe;
  fe.stft = stft;
  fe.context = context;
  fe.floor_eps = floor_eps;
  fe.sample_rate = sample_rate;
  return fe;
}

MicGeometry ExperimentConfig::geometry() const { return SelectMics(DefaultGeometry(), mics); }

void ExperimentConfig::Validate() const {
  if (sample_rate <= 0) throw Error("config: scene.sample_rate must be positive");
  geometry();
  if (reference_channel < 1 || reference_channel > static_cast<int>(mics.size()))
    throw Error("config: scene.reference_channel must be in 1.." + std::to_string(mics.size()));
  if (train_noises.empty() || test_noises.empty())
    throw Error("config: noise lists must be nonempty");
  if (train_snrs.empty() || test_snrs.empty()) throw Error("config: SNR grids must be nonempty");
  for (const auto *list : {&train_noises, &test_noises})
    for (const std::string &n : *list)
      if (ParseNoiseKind(n) == NoiseKind::kFile && !fs::exists(noise_file))
        throw Error("config: noise file '" + noise_file + "' does not exist");
  if (generate_sources) {
    if (train_utterances < 1 || test_utterances < 1)
      throw Error("config: utterance list is empty");
    if (!(duration_s > 0.0)) throw Error("config: sources.duration_s must be positive");
  } else if (train_sources.empty() || test_sources.empty()) {
    throw Error("config: utterance list is empty");
  } else if (!fs::is_directory(source_dir)) {
    throw Error("config: source directory '" + source_dir + "' does not exist");
  }
  front_end().Validate();
  train.Validate();
}

void ExperimentConfig::SetSeed(uint64_t s) {
  seed = s;
  train.seed = s;
}

ExperimentConfig ExperimentConfig::Desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::PaperScale() {
  ExperimentConfig c;
  c.sample_rate = 16000;
  c.mics = {1, 2, 3, 4, 5, 6, 7};
  c.train_noises = {"white", "pink", "babble"};
  c.train_snrs = {-5, -2, 1, 4, 7, 10, 13, 16};
  c.test_noises = {"babble", "pink"};
  c.test_snrs = {-5, 0, 5};
  c.train_utterances = 300;
  c.test_utterances = 20;
  c.stft = StftConfig::ForSampleRate(16000);
  c.topology = SystemTopology::PaperScale();
  return c;
}

ExperimentConfig ExperimentConfig::Load(const std::string &path) {
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error &e) {
    throw Error("cannot parse config " + path + ": " + e.what());
  }
  ExperimentConfig c = Desk();
  auto get = [&](const std::string &key) { return tree.get_optional<std::string>(key); };
  try {
    if (auto v = get("scene.preset")) {
      if (*v == "paper-scale") c = PaperScale();
      else if (*v != "desk") throw Error("unknown scene.preset '" + *v + "'");
    }
    if (auto v = get("scene.sample_rate")) {
      c.sample_rate = std::stoi(*v);
      if (!get("features.frame_len")) c.stft = StftConfig::ForSampleRate(c.sample_rate);
    }
    if (auto v = get("scene.mics")) c.mics = ParseList<int>(*v);
    if (auto v = get("scene.reference_channel")) c.reference_channel = std::stoi(*v);
    if (auto v = get("scene.attenuation")) c.attenuation = ParseAttenuation(*v);
    if (auto v = get("scene.train_noises")) c.train_noises = ParseList<std::string>(*v);
    if (auto v = get("scene.train_snrs")) c.train_snrs = ParseList<double>(*v);
    if (auto v = get("scene.snr_assignment")) {
      if (*v == "full") c.train_assignment = SnrAssignment::kFullGrid;
      else if (*v == "cycle") c.train_assignment = SnrAssignment::kCycle;
      else throw Error("scene.snr_assignment must be full or cycle");
    }
    if (auto v = get("scene.test_noises")) c.test_noises = ParseList<std::string>(*v);
    if (auto v = get("scene.test_snrs")) c.test_snrs = ParseList<double>(*v);
    if (auto v = get("scene.noise_file")) c.noise_file = *v;
    if (auto v = get("scene.seed")) c.seed = std::stoull(*v);

    if (auto v = get("sources.generate")) c.generate_sources = ParseBool(*v);
    if (auto v = get("sources.train_utterances")) c.train_utterances = std::stoi(*v);
    if (auto v = get("sources.test_utterances")) c.test_utterances = std::stoi(*v);
    if (auto v = get("sources.duration_s")) c.duration_s = std::stod(*v);
    if (auto v = get("sources.dir")) c.source_dir = *v;
    if (auto v = get("sources.train")) c.train_sources = ParseList<std::string>(*v);
    if (auto v = get("sources.test")) c.test_sources = ParseList<std::string>(*v);

    if (auto v = get("features.frame_len")) c.stft.frame_len = std::stoi(*v);
    if (auto v = get("features.hop_len")) c.stft.hop_len = std::stoi(*v);
    if (auto v = get("features.fft_len")) c.stft.fft_len = std::stoi(*v);
    if (auto v = get("features.window")) {
      if (*v == "hann") c.stft.window = WindowKind::kHann;
      else if (*v == "hamming") c.stft.window = WindowKind::kHamming;
      else throw Error("features.window must be hann or hamming");
    }
    if (auto v = get("features.context")) c.context = std::stoi(*v);
    if (auto v = get("features.floor_eps")) c.floor_eps = std::stod(*v);

    auto shape = [&](const std::string &role, NetworkShape *s) {
      if (auto v = get("model." + role + "_depth")) s->depth = std::stoi(*v);
      if (auto v = get("model." + role + "_width")) s->width = std::stoi(*v);
    };
    shape("s", &c.topology.s);
    shape("f", &c.topology.f);
    shape("dp", &c.topology.dp);
    shape("fc", &c.topology.fc);

    if (auto v = get("train.optimizer")) c.train.optimizer = ParseOptimizer(*v);
    if (auto v = get("train.learning_rate")) c.train.learning_rate = std::stod(*v);
    if (auto v = get("train.batch_size")) c.train.batch_size = std::stoi(*v);
    if (auto v = get("train.epochs")) c.train.epochs = std::stoi(*v);
    if (auto v = get("train.seed")) c.train.seed = std::stoull(*v);
    if (auto v = get("train.shuffle")) c.train.shuffle = ParseBool(*v);
    if (auto v = get("train.l2")) c.train.l2 = std::stod(*v);

    if (auto v = get("run.jobs")) c.jobs = std::stoi(*v);
  } catch (const std::invalid_argument &e) {
    throw Error("config " + path + ": bad numeric value");
  } catch (const std::out_of_range &e) {
    throw Error("config " + path + ": numeric value out of range");
  }
  c.Validate();
  return c;
}

std::string ExperimentConfig::ToIni() const {
  std::ostringstream os;
  os << "[scene]\n"
     << "sample_rate = " << sample_rate << "\n"
     << "mics = " << JoinList(mics) << "\n"
     << "reference_channel = " << reference_channel << "\n"
     << "attenuation = " << AttenuationName(attenuation) << "\n"
     << "train_noises = " << JoinList(train_noises) << "\n"
     << "train_snrs = " << JoinList(train_snrs) << "\n"
     << "snr_assignment = " << (train_assignment == SnrAssignment::kCycle ? "cycle" : "full") << "\n"
     << "test_noises = " << JoinList(test_noises) << "\n"
     << "test_snrs = " << JoinList(test_snrs) << "\n";
  if (!noise_file.empty()) os << "noise_file = " << noise_file << "\n";
  os << "seed = " << seed << "\n\n[sources]\n"
     << "generate = " << (generate_sources ? "true" : "false") << "\n"
     << "train_utterances = " << train_utterances << "\n"
     << "test_utterances = " << test_utterances << "\n"
     << "duration_s = " << FormatDouble(duration_s, 3) << "\n";
  if (!source_dir.empty()) os << "dir = " << source_dir << "\n";
  if (!train_sources.empty()) os << "train = " << JoinList(train_sources) << "\n";
  if (!test_sources.empty()) os << "test = " << JoinList(test_sources) << "\n";
  os << "\n[features]\n"
     << "frame_len = " << stft.frame_len << "\n"
     << "hop_len = " << stft.hop_len << "\n"
     << "fft_len = " << stft.fft_len << "\n"
     << "window = " << (stft.window == WindowKind::kHann ? "hann" : "hamming") << "\n"
     << "context = " << context << "\n"
     << "floor_eps = " << floor_eps << "\n\n[model]\n";
  auto shape = [&](const char *role, const NetworkShape &s) {
    os << role << "_depth = " << s.depth << "\n" << role << "_width = " << s.width << "\n";
  };
  shape("s", topology.s);
  shape("f", topology.f);
  shape("dp", topology.dp);
  shape("fc", topology.fc);
  os << "\n[train]\n"
     << "optimizer = " << (train.optimizer == OptimizerKind::kAdam ? "adam" : "sgd") << "\n"
     << "learning_rate = " << train.learning_rate << "\n"
     << "batch_size = " << train.batch_size << "\n"
     << "epochs = " << train.epochs << "\n"
     << "seed = " << train.seed << "\n"
     << "shuffle = " << (train.shuffle ? "true" : "false") << "\n"
     << "l2 = " << train.l2 << "\n\n[run]\n"
     << "jobs = " << jobs << "\n";
  return os.str();
}

std::vector<CorpusScene> Corpus::Split(const std::string &split) const {
  std::vector<CorpusScene> out;
  for (const CorpusScene &s : scenes)
    if (s.split == split) out.push_back(s);
  return out;
}

std::string Corpus::SourcePath(const std::string &source) const {
  return (fs::path(root) / "sources" / (source + "_clean.wav")).string();
}

std::string Corpus::NoisyPath(const CorpusScene &s, int channel) const {
  return (fs::path(root) / s.split / s.name / (s.name + "_ch" + std::to_string(channel + 1) + ".wav"))
      .string();
}

std::string Corpus::CleanChannelPath(const CorpusScene &s, int channel) const {
  return (fs::path(root) / s.split / s.name /
          (s.name + "_clean_ch" + std::to_string(channel + 1) + ".wav"))
      .string();
}

Corpus SynthesizeCorpus(const ExperimentConfig &cfg, const std::string &out_dir) {
  cfg.Validate();
  const MicGeometry geom = cfg.geometry();
  Corpus corpus;
  corpus.root = out_dir;
  fs::create_directories(fs::path(out_dir) / "sources");

  // Clean sources: generated, or read from source_dir.
  std::vector<std::pair<std::string, std::string>> sources;  // (name, split)
  std::vector<Waveform> waves;
  if (cfg.generate_sources) {
    SpeechSynthConfig sc;
    sc.duration_s = cfg.duration_s;
    sc.sample_rate = cfg.sample_rate;
    char name[32];
    for (int i = 0; i < cfg.train_utterances; ++i) {
      std::snprintf(name, sizeof name, "tr%03d", i);
      sources.emplace_back(name, "train");
      waves.push_back(SynthesizeSpeechLike(sc, MixSeed(cfg.seed, 10000 + i)));
    }
    for (int i = 0; i < cfg.test_utterances; ++i) {
      std::snprintf(name, sizeof name, "te%03d", i);
      sources.emplace_back(name, "test");
      waves.push_back(SynthesizeSpeechLike(sc, MixSeed(cfg.seed, 20000 + i)));
    }
  } else {
    std::vector<std::string> missing;
    for (const auto &[list, split] : {std::pair{&cfg.train_sources, "train"},
                                      std::pair{&cfg.test_sources, "test"}}) {
      for (const std::string &n : *list) {
        const fs::path p = fs::path(cfg.source_dir) / (n + ".wav");
        if (!fs::exists(p)) {
          missing.push_back(n);
          continue;
        }
        Waveform w = ReadWav(p.string());
        if (w.sample_rate != cfg.sample_rate)
          throw Error("source " + p.string() + " has rate " + std::to_string(w.sample_rate) +
                      ", config expects " + std::to_string(cfg.sample_rate));
        sources.emplace_back(n, split);
        waves.push_back(std::move(w));
      }
    }
    if (!missing.empty()) throw Error("missing source WAVs in " + cfg.source_dir + ": " + JoinList(missing));
  }
  for (size_t i = 0; i < sources.size(); ++i) WriteWav(corpus.SourcePath(sources[i].first), waves[i]);

  // Scene list.
  std::vector<std::pair<CorpusScene, size_t>> plan;
  int train_index = 0;
  for (size_t i = 0; i < sources.size(); ++i) {
    const bool train = sources[i].second == "train";
    const auto &noises = train ? cfg.train_noises : cfg.test_noises;
    const auto &snrs = train ? cfg.train_snrs : cfg.test_snrs;
    for (size_t k = 0; k < noises.size(); ++k) {
      std::vector<double> levels = snrs;
      if (train && cfg.train_assignment == SnrAssignment::kCycle)
        levels = {snrs[(train_index + k) % snrs.size()]};
      for (double snr : levels) {
        CorpusScene s;
        s.split = sources[i].second;
        s.source = sources[i].first;
        s.noise = noises[k];
        s.snr_db = snr;
        s.name = s.source + "_" + s.noise + "_" + SnrTag(snr);
        s.channels = geom.num_mics();
        s.seed = MixSeed(cfg.seed, 50000 + plan.size());
        plan.emplace_back(s, i);
      }
    }
    if (train) ++train_index;
  }

  ParallelFor(static_cast<int>(plan.size()), cfg.jobs, [&](int j) {
    const CorpusScene &s = plan[j].first;
    SceneConfig sc;
    sc.geometry = geom;
    sc.noise.kind = ParseNoiseKind(s.noise);
    sc.noise.file = cfg.noise_file;
    sc.snr_db = s.snr_db;
    sc.seed = s.seed;
    sc.attenuation = cfg.attenuation;
    sc.reference_channel = cfg.reference_channel - 1;
    const MultichannelRecording rec = SynthesizeScene(waves[plan[j].second], sc);
    fs::create_directories(fs::path(out_dir) / s.split / s.name);
    for (int p = 0; p < rec.num_channels(); ++p) {
      const WavWriteReport r = WriteWav(corpus.NoisyPath(s, p), rec.channels[p]);
      if (r.clipped_samples > 0)
        std::cerr << "warning: " << r.clipped_samples << " samples clipped in "
                  << corpus.NoisyPath(s, p) << "\n";
      WriteWav(corpus.CleanChannelPath(s, p), rec.clean_channels[p]);
    }
  });

  CsvTable manifest;
  manifest.header = Split(kCorpusManifestHeader, ',');
  for (const auto &[s, i] : plan) {
    corpus.scenes.push_back(s);
    manifest.rows.push_back({s.name, s.split, s.source, s.noise, FormatDouble(s.snr_db, 1),
                             std::to_string(s.seed), std::to_string(s.channels)});
  }
  WriteCsv((fs::path(out_dir) / "manifest.csv").string(), manifest);

  CsvTable g;
  g.header = {"channel", "mic", "x", "y", "distance"};
  for (int p = 0; p < geom.num_mics(); ++p)
    g.rows.push_back({std::to_string(p + 1), std::to_string(cfg.mics[p]),
                      FormatDouble(geom.mics[p].x, 6), FormatDouble(geom.mics[p].y, 6),
                      FormatDouble(geom.SpeakerDistance(p), 6)});
  WriteCsv((fs::path(out_dir) / "geometry.csv").string(), g);
  return corpus;
}

Corpus ReadCorpus(const std::string &dir) {
  const fs::path path = fs::path(dir) / "manifest.csv";
  if (!fs::exists(path)) throw Error("no corpus manifest at " + path.string());
  const CsvTable t = ReadCsv(path.string());
  Corpus corpus;
  corpus.root = dir;
  const int name = t.Column("scene"), split = t.Column("split"), src = t.Column("source"),
            noise = t.Column("noise"), snr = t.Column("snr_db"), seed = t.Column("seed"),
            ch = t.Column("channels");
  for (const auto &r : t.rows)
    corpus.scenes.push_back({r[name], r[split], r[src], r[noise], std::stod(r[snr]),
                             std::stoull(r[seed]), std::stoi(r[ch])});
  return corpus;
}

std::vector<Waveform> LoadNoisyChannels(const Corpus &corpus, const CorpusScene &scene) {
  std::vector<Waveform> out;
  for (int p = 0; p < scene.channels; ++p) out.push_back(ReadWav(corpus.NoisyPath(scene, p)));
  return out;
}

MultichannelRecording LoadScene(const Corpus &corpus, const CorpusScene &scene) {
  MultichannelRecording rec;
  rec.channels = LoadNoisyChannels(corpus, scene);
  for (int p = 0; p < scene.channels; ++p)
    rec.clean_channels.push_back(ReadWav(corpus.CleanChannelPath(scene, p)));
  rec.source = ReadWav(corpus.SourcePath(scene.source));
  rec.config.snr_db = scene.snr_db;
  rec.config.seed = scene.seed;
  return rec;
}

TrainedSystem TrainFromCorpus(const ExperimentConfig &cfg, const Corpus &corpus,
                              SystemKind kind, TrainingLog *log) {
  const std::vector<CorpusScene> scenes = corpus.Split("train");
  if (scenes.empty()) throw Error("corpus " + corpus.root + " has no training scenes");
  std::vector<MultichannelRecording> recs(scenes.size());
  ParallelFor(static_cast<int>(scenes.size()), cfg.jobs,
              [&](int i) { recs[i] = LoadScene(corpus, scenes[i]); });
  const int expected_p = static_cast<int>(cfg.mics.size());
  if (recs[0].num_channels() != expected_p)
    throw Error("corpus has P=" + std::to_string(recs[0].num_channels()) + " but config expects P=" +
                std::to_string(expected_p));
  SystemTrainOptions opts;
  opts.train = cfg.train;
  opts.reference_channel = cfg.reference_channel - 1;
  opts.jobs = cfg.jobs;
  const FrontEndConfig fe = cfg.front_end();
  switch (kind) {
    case SystemKind::kS: return TrainSystemS(recs, fe, cfg.topology.s, opts, log);
    case SystemKind::kF: return TrainSystemF(recs, fe, cfg.topology.f, opts, log);
    case SystemKind::kC: return TrainSystemC(recs, fe, cfg.topology.dp, cfg.topology.fc, opts, log);
  }
  throw Error("unknown system kind");
}

void TrainBundle(const ExperimentConfig &cfg, const std::string &corpus_dir, SystemKind kind,
                 const std::string &bundle_dir) {
  const Corpus corpus = ReadCorpus(corpus_dir);
  TrainingLog log;
  const TrainedSystem sys = TrainFromCorpus(cfg, corpus, kind, &log);
  WriteBundle(bundle_dir, sys, log);
}

std::vector<EvalEntry> EnhanceCorpus(const TrainedSystem &sys, const Corpus &corpus,
                                     const std::string &split, const std::string &out_dir,
                                     int jobs) {
  const std::vector<CorpusScene> scenes = corpus.Split(split);
  if (scenes.empty()) throw Error("corpus " + corpus.root + " has no '" + split + "' scenes");
  for (const CorpusScene &s : scenes)
    if (s.channels != sys.num_channels)
      throw Error("bundle expects P=" + std::to_string(sys.num_channels) + " but scene " + s.name +
                  " has P=" + std::to_string(s.channels));
  const std::vector<std::string> labels = ReadChannelLabels(corpus);
  const std::string system = SystemKindName(sys.kind);
  std::vector<std::vector<EvalEntry>> per_scene(scenes.size());
  ParallelFor(static_cast<int>(scenes.size()), jobs, [&](int i) {
    const CorpusScene &s = scenes[i];
    const std::vector<Waveform> noisy = LoadNoisyChannels(corpus, s);
    const std::vector<Waveform> enhanced = Enhance(sys, noisy);
    const fs::path dir = fs::path(out_dir) / s.name;
    fs::create_directories(dir);
    std::vector<std::string> paths;
    for (size_t k = 0; k < enhanced.size(); ++k) {
      const std::string file = sys.kind == SystemKind::kS
                                   ? s.name + "_enh_ch" + std::to_string(k + 1) + ".wav"
                                   : s.name + "_enh.wav";
      paths.push_back((dir / file).string());
      WriteWav(paths.back(), enhanced[k]);
    }
    for (int p = 0; p < s.channels; ++p) {
      const std::string &enh = sys.kind == SystemKind::kS ? paths[p] : paths[0];
      per_scene[i].push_back({s.name, system, ChannelLabel(corpus, p, labels), s.noise, s.snr_db,
                              corpus.SourcePath(s.source), corpus.NoisyPath(s, p), enh});
    }
  });
  std::vector<EvalEntry> entries;
  for (auto &v : per_scene)
    for (EvalEntry &e : v) entries.push_back(std::move(e));
  WriteEvalManifest((fs::path(out_dir) / "eval_manifest.csv").string(), entries);
  return entries;
}

std::vector<EvalEntry> NoisyBaselineEntries(const Corpus &corpus, const std::string &split) {
  const std::vector<std::string> labels = ReadChannelLabels(corpus);
  std::vector<EvalEntry> out;
  for (const CorpusScene &s : corpus.Split(split))
    for (int p = 0; p < s.channels; ++p)
      out.push_back({s.name, kNoisySystem, ChannelLabel(corpus, p, labels), s.noise, s.snr_db,
                     corpus.SourcePath(s.source), corpus.NoisyPath(s, p), corpus.NoisyPath(s, p)});
  return out;
}

SegSnrOptions SegSnrFor(const ExperimentConfig &cfg) {
  SegSnrOptions o;
  o.frame_len = cfg.stft.frame_len;
  o.hop_len = cfg.stft.hop_len;
  return o;
}

ExperimentResult RunExperiment(const ExperimentConfig &cfg, const std::string &out_dir,
                               const ExperimentOptions &opts) {
  cfg.Validate();
  const fs::path out(out_dir);
  fs::create_directories(out);
  WriteTextFile((out / "config.cfg").string(), cfg.ToIni());

  const fs::path corpus_dir = out / "corpus";
  RunStage(out, "synth", corpus_dir, opts,
           [&](const fs::path &tmp) { SynthesizeCorpus(cfg, tmp.string()); });
  const Corpus corpus = ReadCorpus(corpus_dir.string());

  const SystemKind kinds[] = {SystemKind::kS, SystemKind::kF, SystemKind::kC};
  for (SystemKind k : kinds) {
    const std::string tag = SystemKindTag(k);
    RunStage(out, "train_" + tag, out / "bundles" / tag, opts, [&](const fs::path &tmp) {
      TrainingLog log;
      WriteBundle(tmp.string(), TrainFromCorpus(cfg, corpus, k, &log), log);
    });
  }
  for (SystemKind k : kinds) {
    const std::string tag = SystemKindTag(k);
    RunStage(out, "enhance_" + tag, out / "enhanced" / tag, opts, [&](const fs::path &tmp) {
      EnhanceCorpus(ReadBundle((out / "bundles" / tag).string()), corpus, "test", tmp.string(),
                    cfg.jobs);
    });
  }

  ExperimentResult result;
  RunStage(out, "eval", out / "eval", opts, [&](const fs::path &tmp) {
    std::vector<EvalEntry> entries = NoisyBaselineEntries(corpus, "test");
    for (SystemKind k : kinds) {
      const std::vector<EvalEntry> e =
          ReadEvalManifest((out / "enhanced" / SystemKindTag(k) / "eval_manifest.csv").string());
      entries.insert(entries.end(), e.begin(), e.end());
    }
    WriteEvalManifest((tmp / "eval_manifest.csv").string(), entries);
    const EvalReport report = Evaluate(entries, SegSnrFor(cfg), cfg.jobs);
    WriteTextFile((tmp / "report.csv").string(), ReportToCsv(report));
    WriteTextFile((tmp / "summary.txt").string(), FormatSummary(report));
  });
  result.report_csv = ReadTextFile((out / "eval" / "report.csv").string());
  result.summary = ReadTextFile((out / "eval" / "summary.txt").string());
  result.report = ReportFromCsv((out / "eval" / "report.csv").string());
  return result;
}

}  // namespace distse
