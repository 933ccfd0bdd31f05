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

#include "distse/bundle.h"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "distse/model_io.h"
#include "distse/text_format.h"

namespace distse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json StftToJson(const StftConfig &c) {
  return {{"frame_len", c.frame_len},
          {"hop_len", c.hop_len},
          {"fft_len", c.fft_len},
          {"window", c.window == WindowKind::kHann ? "hann" : "hamming"}};
}

StftConfig StftFromJson(const json &j) {
  StftConfig c;
  c.frame_len = j.at("frame_len").get<int>();
  c.hop_len = j.at("hop_len").get<int>();
  c.fft_len = j.at("fft_len").get<int>();
  c.window = j.at("window").get<std::string>() == "hamming" ? WindowKind::kHamming : WindowKind::kHann;
  return c;
}

std::string Hex(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void WriteBundle(const std::string &dir, const TrainedSystem &sys, const TrainingLog &log) {
  sys.Validate();
  fs::create_directories(dir);
  json manifest;
  manifest["format_version"] = kBundleFormatVersion;
  manifest["kind"] = SystemKindTag(sys.kind);
  manifest["channels"] = sys.num_channels;
  manifest["reference_channel"] = sys.reference_channel;
  manifest["front_end"] = {{"sample_rate", sys.front_end.sample_rate},
                           {"context", sys.front_end.context},
                           {"floor_eps", sys.front_end.floor_eps},
                           {"stft", StftToJson(sys.front_end.stft)}};
  json models = json::array();
  for (const NetworkModel &m : sys.models) {
    const std::string file = m.name + ".mlp";
    WriteModel((fs::path(dir) / file).string(), StoredModel{m.params, m.input_norm});
    models.push_back({{"name", m.name},
                      {"file", file},
                      {"layers", m.params.spec().layer_dims},
                      {"checksum", Hex(ParamsChecksum(m.params))}});
  }
  manifest["models"] = models;
  if (sys.kind == SystemKind::kC) {
    json phases = json::array();
    for (const ModelLog &l : log.models) phases.push_back({{"model", l.name}, {"phase", l.phase}});
    json before = json::array(), after = json::array();
    for (uint64_t c : log.dp_checksums_before_fc) before.push_back(Hex(c));
    for (uint64_t c : log.dp_checksums_after_fc) after.push_back(Hex(c));
    manifest["training"] = {{"phase_order", phases},
                            {"dp_checksums_before_fc", before},
                            {"dp_checksums_after_fc", after}};
  }
  {
    std::ofstream f(fs::path(dir) / "manifest.json");
    if (!f) throw Error("cannot write bundle manifest in " + dir);
    f << manifest.dump(2) << "\n";
  }
  std::ofstream losses(fs::path(dir) / "losses.csv");
  if (!losses) throw Error("cannot write loss log in " + dir);
  losses << "model,phase,epoch,loss\n";
  for (const ModelLog &l : log.models)
    for (size_t e = 0; e < l.loss_history.size(); ++e)
      losses << l.name << "," << l.phase << "," << (e + 1) << "," << FormatDouble(l.loss_history[e], 9) << "\n";
}

TrainedSystem ReadBundle(const std::string &dir) {
  const fs::path manifest_path = fs::path(dir) / "manifest.json";
  std::ifstream f(manifest_path);
  if (!f) throw Error("no bundle manifest at " + manifest_path.string());
  json manifest;
  try {
    f >> manifest;
  } catch (const json::exception &e) {
    throw Error("bad bundle manifest " + manifest_path.string() + ": " + e.what());
  }
  TrainedSystem sys;
  try {
    if (manifest.at("format_version").get<int>() != kBundleFormatVersion)
      throw Error("unsupported bundle format version");
    sys.kind = ParseSystemKind(manifest.at("kind").get<std::string>());
    sys.num_channels = manifest.at("channels").get<int>();
    sys.reference_channel = manifest.at("reference_channel").get<int>();
    const json &fe = manifest.at("front_end");
    sys.front_end.sample_rate = fe.at("sample_rate").get<int>();
    sys.front_end.context = fe.at("context").get<int>();
    sys.front_end.floor_eps = fe.at("floor_eps").get<double>();
    sys.front_end.stft = StftFromJson(fe.at("stft"));
    for (const json &m : manifest.at("models")) {
      const std::string file = m.at("file").get<std::string>();
      StoredModel stored = ReadModel((fs::path(dir) / file).string());
      if (!stored.input_norm) throw Error("model " + file + " lacks input normalisation");
      if (m.contains("checksum") &&
          m.at("checksum").get<std::string>() != Hex(ParamsChecksum(stored.params)))
        throw Error("model " + file + " does not match its manifest checksum");
      sys.models.push_back({m.at("name").get<std::string>(), std::move(stored.params),
                            std::move(*stored.input_norm)});
    }
  } catch (const json::exception &e) {
    throw Error("bad bundle manifest " + manifest_path.string() + ": " + e.what());
  }
  sys.Validate();
  return sys;
}

}  // namespace distse
