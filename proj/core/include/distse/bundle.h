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

#ifndef DISTSE_BUNDLE_H_
#define DISTSE_BUNDLE_H_

#include <string>

#include "distse/systems.h"

namespace distse {

inline constexpr int kBundleFormatVersion = 1;

// A system bundle is a directory holding manifest.json (kind, channel count,
// front-end config, reference channel, model file list, and for DNN-C the
// training phase order with DP checksums), one <name>.mlp per network, and
// losses.csv with per-epoch training losses.
void WriteBundle(const std::string &dir, const TrainedSystem &sys, const TrainingLog &log);

// Loads and validates a bundle; every model's dims are checked against its role.
TrainedSystem ReadBundle(const std::string &dir);

}  // namespace distse

#endif  // DISTSE_BUNDLE_H_
