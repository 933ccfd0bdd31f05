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

#ifndef DISTSE_FEATURES_H_
#define DISTSE_FEATURES_H_

#include <span>
#include <vector>

#include "distse/common.h"
#include "distse/dsp.h"

namespace distse {

enum class FeatureLayout {
  kSingleChannelContext,
  kConcatChannelsContext,
  kConcatChannelsFlat,
};

struct FeatureMatrix {
  Matrix values;  // rows = frames, cols = feature dimension
  FeatureLayout layout = FeatureLayout::kSingleChannelContext;
  int channels = 1;
  int context = 1;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  // Per-channel, per-frame dimension (the LPS bin count).
  int bins() const { return static_cast<int>(values.cols()) / (channels * context); }
};

// Row t = [lps[t - c/2]; ...; lps[t + c/2]] with boundary frames replicated.
FeatureMatrix SpliceContext(const LpsMatrix &lps, int context = 3);
FeatureMatrix SpliceContext(const Matrix &lps, int context = 3);

// Column-wise concatenation in the given channel order.
FeatureMatrix ConcatChannels(std::span<const FeatureMatrix> mats);

// Slice channel `index` back out of a concatenation.
FeatureMatrix SliceChannel(const FeatureMatrix &concat, int index);

// Feature dimension of each network input role.
int SingleChannelInputDim(int bins, int context);
int FusionInputDim(int bins, int context, int channels);
int FusionCenterInputDim(int bins, int channels);

inline constexpr double kStdFloor = 1e-8;

struct NormStats {
  Vector mean;
  Vector std;  // population std, floored at kStdFloor

  Eigen::Index dim() const { return mean.size(); }
};

NormStats FitNorm(const Matrix &train);
NormStats FitNorm(const FeatureMatrix &train);
Matrix ApplyNorm(const Matrix &x, const NormStats &stats);
FeatureMatrix ApplyNorm(const FeatureMatrix &x, const NormStats &stats);
Matrix InvertNorm(const Matrix &x, const NormStats &stats);
FeatureMatrix InvertNorm(const FeatureMatrix &x, const NormStats &stats);

// Stack row blocks vertically (pooled training frames across utterances).
Matrix StackRows(std::span<const Matrix> blocks);

}  // namespace distse

#endif  // DISTSE_FEATURES_H_
