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

// distse: synth / train / enhance / eval / experiment.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <regex>

#include "distse/bundle.h"
#include "distse/experiment.h"
#include "distse/metrics.h"
#include "distse/text_format.h"
#include "distse/wav_io.h"

namespace fs = std::filesystem;
using namespace distse;

namespace {

struct Common {
  std::string config;
  uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
  std::string out;
};

void AddCommon(CLI::App *cmd, Common *c, bool want_config = true) {
  if (want_config) cmd->add_option("--config", c->config, "experiment config file");
  cmd->add_option_function<uint64_t>(
      "--seed", [c](const uint64_t &s) { c->seed = s, c->seed_set = true; }, "master seed");
  cmd->add_option("--jobs", c->jobs, "worker threads (0 = config value)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", c->out, "output location")->required();
}

ExperimentConfig ResolveConfig(const Common &c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig::Desk() : ExperimentConfig::Load(c.config);
  if (c.seed_set) cfg.SetSeed(c.seed);
  if (c.jobs > 0) cfg.jobs = c.jobs;
  cfg.Validate();
  return cfg;
}

// Noisy channels of a single scene directory: files named *_ch<p>.wav.
std::vector<Waveform> ReadSceneDir(const std::string &dir, std::string *stem) {
  static const std::regex pattern(R"((.*)_ch(\d+)\.wav)");
  std::map<int, fs::path> files;
  for (const auto &entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (name.find("_clean_ch") != std::string::npos || name.find("_enh") != std::string::npos)
      continue;
    if (std::regex_match(name, m, pattern)) {
      files[std::stoi(m[2])] = entry.path();
      *stem = m[1];
    }
  }
  if (files.empty()) throw Error("no *_ch<p>.wav files in " + dir);
  std::vector<Waveform> out;
  int expect = 1;
  for (const auto &[p, path] : files) {
    if (p != expect) throw Error("scene " + dir + " is missing channel " + std::to_string(expect));
    out.push_back(ReadWav(path.string()));
    ++expect;
  }
  return out;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"distributed-microphone DNN speech enhancement"};
  app.require_subcommand(1);

  Common synth_opts;
  CLI::App *synth = app.add_subcommand("synth", "synthesize a multichannel corpus");
  AddCommon(synth, &synth_opts);

  Common train_opts;
  std::string train_system, train_corpus;
  CLI::App *train = app.add_subcommand("train", "train one system into a bundle");
  AddCommon(train, &train_opts);
  train->add_option("--system", train_system, "s, f or c")
      ->required()
      ->check(CLI::IsMember({"s", "f", "c"}));
  train->add_option("--corpus", train_corpus, "corpus directory")->required();

  Common enh_opts;
  std::string enh_bundle, enh_corpus, enh_scene, enh_split = "test";
  CLI::App *enhance = app.add_subcommand("enhance", "enhance noisy recordings with a bundle");
  AddCommon(enhance, &enh_opts, false);
  enhance->add_option("--bundle", enh_bundle, "bundle directory")->required();
  auto *corpus_opt = enhance->add_option("--corpus", enh_corpus, "corpus directory");
  auto *scene_opt = enhance->add_option("--scene", enh_scene, "single noisy scene directory");
  corpus_opt->excludes(scene_opt);
  enhance->add_option("--split", enh_split, "corpus split to enhance");

  Common eval_opts;
  std::string eval_manifest;
  CLI::App *eval = app.add_subcommand("eval", "score an evaluation manifest");
  AddCommon(eval, &eval_opts);
  eval->add_option("--manifest", eval_manifest, "evaluation manifest CSV")->required();

  Common exp_opts;
  bool exp_force = false, exp_quiet = false;
  CLI::App *experiment = app.add_subcommand("experiment", "synth, train x3, enhance, eval");
  AddCommon(experiment, &exp_opts);
  experiment->add_flag("--force", exp_force, "rerun stages that are already complete");
  experiment->add_flag("--quiet", exp_quiet, "no progress messages");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const ExperimentConfig cfg = ResolveConfig(synth_opts);
      const Corpus corpus = SynthesizeCorpus(cfg, synth_opts.out);
      std::cout << "wrote " << corpus.scenes.size() << " scenes to " << synth_opts.out << "\n";
    } else if (*train) {
      const ExperimentConfig cfg = ResolveConfig(train_opts);
      TrainBundle(cfg, train_corpus, ParseSystemKind(train_system), train_opts.out);
      std::cout << "wrote " << SystemKindName(ParseSystemKind(train_system)) << " bundle to "
                << train_opts.out << "\n";
    } else if (*enhance) {
      const TrainedSystem sys = ReadBundle(enh_bundle);
      const int jobs = enh_opts.jobs > 0 ? enh_opts.jobs : 1;
      if (!enh_corpus.empty()) {
        const auto entries =
            EnhanceCorpus(sys, ReadCorpus(enh_corpus), enh_split, enh_opts.out, jobs);
        std::cout << "enhanced " << entries.size() << " channel entries into " << enh_opts.out
                  << "\n";
      } else if (!enh_scene.empty()) {
        std::string stem;
        const std::vector<Waveform> noisy = ReadSceneDir(enh_scene, &stem);
        if (static_cast<int>(noisy.size()) != sys.num_channels)
          throw Error("bundle expects P=" + std::to_string(sys.num_channels) + " but scene " +
                      enh_scene + " has P=" + std::to_string(noisy.size()));
        const std::vector<Waveform> out = Enhance(sys, noisy);
        fs::create_directories(enh_opts.out);
        for (size_t k = 0; k < out.size(); ++k) {
          const std::string name = out.size() == 1
                                       ? stem + "_enh.wav"
                                       : stem + "_enh_ch" + std::to_string(k + 1) + ".wav";
          WriteWav((fs::path(enh_opts.out) / name).string(), out[k]);
        }
        std::cout << "wrote " << out.size() << " enhanced file(s) to " << enh_opts.out << "\n";
      } else {
        throw Error("enhance needs --corpus or --scene");
      }
    } else if (*eval) {
      const ExperimentConfig cfg = ResolveConfig(eval_opts);
      const EvalReport report = Evaluate(ReadEvalManifest(eval_manifest), SegSnrFor(cfg), cfg.jobs);
      const fs::path out(eval_opts.out);
      if (out.has_parent_path()) fs::create_directories(out.parent_path());
      WriteTextFile(out.string(), ReportToCsv(report));
      std::cout << FormatSummary(report);
    } else if (*experiment) {
      const ExperimentConfig cfg = ResolveConfig(exp_opts);
      ExperimentOptions opts;
      opts.force = exp_force;
      opts.verbose = !exp_quiet;
      const ExperimentResult result = RunExperiment(cfg, exp_opts.out, opts);
      std::cout << result.summary;
    }
  } catch (const std::exception &e) {
    std::cerr << "distse: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
