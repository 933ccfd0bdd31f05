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

#include "distse/model_io.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace distse {

namespace {

constexpr char kMagic[8] = {'D', 'S', 'E', 'M', 'L', 'P', '\0', '\0'};

template <typename T>
void Put(std::string *out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
  out->append(reinterpret_cast<const char *>(bytes), sizeof(T));
}

class Reader {
 public:
  explicit Reader(const std::string &bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw Error("model file: truncated");
    unsigned char b[sizeof(T)];
    std::memcpy(b, bytes_.data() + pos_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
      for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    pos_ += sizeof(T);
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
  }

  void Expect(const char *data, size_t n) {
    if (pos_ + n > bytes_.size() || std::memcmp(bytes_.data() + pos_, data, n) != 0)
      throw Error("model file: bad magic");
    pos_ += n;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string &bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string SerializeModel(const StoredModel &model) {
  const MlpSpec spec = model.params.spec();
  spec.Validate();
  std::string out(kMagic, sizeof kMagic);
  Put<uint32_t>(&out, kModelFormatVersion);
  Put<uint32_t>(&out, static_cast<uint32_t>(spec.layer_dims.size()));
  for (int d : spec.layer_dims) Put<uint32_t>(&out, static_cast<uint32_t>(d));
  for (const Layer &l : model.params.layers) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) Put<double>(&out, l.weight.data()[i]);
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) Put<double>(&out, l.bias[i]);
  }
  if (model.input_norm) {
    const NormStats &n = *model.input_norm;
    if (n.dim() != spec.input_dim()) throw Error("model file: norm dim != input dim");
    Put<uint32_t>(&out, static_cast<uint32_t>(n.dim()));
    for (Eigen::Index i = 0; i < n.dim(); ++i) Put<double>(&out, n.mean[i]);
    for (Eigen::Index i = 0; i < n.dim(); ++i) Put<double>(&out, n.std[i]);
  } else {
    Put<uint32_t>(&out, 0);
  }
  return out;
}

StoredModel DeserializeModel(const std::string &bytes) {
  Reader in(bytes);
  in.Expect(kMagic, sizeof kMagic);
  const uint32_t version = in.Get<uint32_t>();
  if (version != kModelFormatVersion)
    throw Error("model file: unsupported version " + std::to_string(version));
  const uint32_t n_dims = in.Get<uint32_t>();
  if (n_dims < 2 || n_dims > 1024) throw Error("model file: bad layer count");
  MlpSpec spec;
  for (uint32_t i = 0; i < n_dims; ++i) spec.layer_dims.push_back(static_cast<int>(in.Get<uint32_t>()));
  spec.Validate();
  StoredModel model;
  for (int l = 1; l <= spec.num_layers(); ++l) {
    Layer layer;
    layer.weight.resize(spec.layer_dims[l], spec.layer_dims[l - 1]);
    layer.bias.resize(spec.layer_dims[l]);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = in.Get<double>();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = in.Get<double>();
    model.params.layers.push_back(std::move(layer));
  }
  const uint32_t norm_dim = in.Get<uint32_t>();
  if (norm_dim != 0) {
    if (static_cast<int>(norm_dim) != spec.input_dim())
      throw Error("model file: norm dim " + std::to_string(norm_dim) +
                  " != input dim " + std::to_string(spec.input_dim()));
    NormStats n;
    n.mean.resize(norm_dim);
    n.std.resize(norm_dim);
    for (uint32_t i = 0; i < norm_dim; ++i) n.mean[i] = in.Get<double>();
    for (uint32_t i = 0; i < norm_dim; ++i) n.std[i] = in.Get<double>();
    model.input_norm = std::move(n);
  }
  if (!in.done()) throw Error("model file: trailing bytes");
  return model;
}

void WriteModel(const std::string &path, const StoredModel &model) {
  const std::string bytes = SerializeModel(model);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write model file " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error("write failed for " + path);
}

StoredModel ReadModel(const std::string &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open model file " + path);
  const std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  try {
    return DeserializeModel(bytes);
  } catch (const Error &e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace distse
