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

#ifndef DISTSE_MODEL_IO_H_
#define DISTSE_MODEL_IO_H_

#include <optional>
#include <string>

#include "distse/features.h"
#include "distse/nn.h"

namespace distse {

// Binary model container, little-endian:
//   char[8]  magic "DSEMLP\0\0"
//   u32      format version (kModelFormatVersion)
//   u32      number of dims n, then u32 dims[n]   (d_0 .. d_L)
//   per layer: f64 weight[d_l * d_{l-1}] row-major, f64 bias[d_l]
//   u32      norm dim k (0 = no input normalisation), f64 mean[k], f64 std[k]
inline constexpr uint32_t kModelFormatVersion = 1;

struct StoredModel {
  MlpParams params;
  std::optional<NormStats> input_norm;
};

std::string SerializeModel(const StoredModel &model);
StoredModel DeserializeModel(const std::string &bytes);

void WriteModel(const std::string &path, const StoredModel &model);
StoredModel ReadModel(const std::string &path);

}  // namespace distse

#endif  // DISTSE_MODEL_IO_H_
