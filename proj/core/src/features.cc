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

#include "distse/features.h"

#include <algorithm>
#include <cmath>

namespace distse {

FeatureMatrix SpliceContext(const Matrix &lps, int context) {
  if (context < 1 || context % 2 == 0)
    throw Error("splice_context: context must be odd and >= 1, got " +
                std::to_string(context));
  const Eigen::Index frames = lps.rows();
  const Eigen::Index bins = lps.cols();
  const int half = context / 2;
  FeatureMatrix out;
  out.layout = FeatureLayout::kSingleChannelContext;
  out.context = context;
  out.values.resize(frames, bins * context);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (int j = 0; j < context; ++j) {
      const Eigen::Index src = std::clamp<Eigen::Index>(t + j - half, 0, frames - 1);
      out.values.block(t, j * bins, 1, bins) = lps.row(src);
    }
  }
  return out;
}

FeatureMatrix SpliceContext(const LpsMatrix &lps, int context) {
  return SpliceContext(lps.values, context);
}

FeatureMatrix ConcatChannels(std::span<const FeatureMatrix> mats) {
  if (mats.empty()) throw Error("concat_channels: no inputs");
  const Eigen::Index rows = mats[0].rows();
  const Eigen::Index dim = mats[0].cols();
  const int context = mats[0].context;
  for (size_t p = 1; p < mats.size(); ++p) {
    if (mats[p].rows() != rows || mats[p].cols() != dim || mats[p].context != context)
      throw Error("concat_channels: channel " + std::to_string(p) + " is " +
                  std::to_string(mats[p].rows()) + "x" + std::to_string(mats[p].cols()) +
                  ", expected " + std::to_string(rows) + "x" + std::to_string(dim));
  }
  if (mats.size() == 1) return mats[0];
  FeatureMatrix out;
  out.channels = 0;
  out.context = context;
  out.layout = context > 1 ? FeatureLayout::kConcatChannelsContext
                           : FeatureLayout::kConcatChannelsFlat;
  out.values.resize(rows, dim * static_cast<Eigen::Index>(mats.size()));
  for (size_t p = 0; p < mats.size(); ++p) {
    out.values.middleCols(static_cast<Eigen::Index>(p) * dim, dim) = mats[p].values;
    out.channels += mats[p].channels;
  }
  return out;
}

FeatureMatrix SliceChannel(const FeatureMatrix &concat, int index) {
  if (index < 0 || index >= concat.channels)
    throw Error("slice_channel: index out of range");
  const Eigen::Index dim = concat.cols() / concat.channels;
  FeatureMatrix out;
  out.layout = FeatureLayout::kSingleChannelContext;
  out.context = concat.context;
  out.values = concat.values.middleCols(index * dim, dim);
  return out;
}

int SingleChannelInputDim(int bins, int context) { return bins * context; }
int FusionInputDim(int bins, int context, int channels) { return bins * context * channels; }
int FusionCenterInputDim(int bins, int channels) { return bins * channels; }

NormStats FitNorm(const Matrix &train) {
  if (train.rows() < 2) throw Error("fit_norm: need at least two training rows");
  NormStats stats;
  stats.mean = train.colwise().mean().transpose();
  const Matrix centred = train.rowwise() - stats.mean.transpose();
  stats.std = (centred.array().square().colwise().sum() / static_cast<double>(train.rows()))
                  .sqrt()
                  .transpose();
  stats.std = stats.std.cwiseMax(kStdFloor);
  return stats;
}

NormStats FitNorm(const FeatureMatrix &train) { return FitNorm(train.values); }

Matrix ApplyNorm(const Matrix &x, const NormStats &stats) {
  if (x.cols() != stats.dim())
    throw Error("apply_norm: input dim " + std::to_string(x.cols()) +
                " != stats dim " + std::to_string(stats.dim()));
  return ((x.rowwise() - stats.mean.transpose()).array().rowwise() /
          stats.std.transpose().array())
      .matrix();
}

FeatureMatrix ApplyNorm(const FeatureMatrix &x, const NormStats &stats) {
  FeatureMatrix out = x;
  out.values = ApplyNorm(x.values, stats);
  return out;
}

Matrix InvertNorm(const Matrix &x, const NormStats &stats) {
  if (x.cols() != stats.dim())
    throw Error("invert_norm: input dim " + std::to_string(x.cols()) +
                " != stats dim " + std::to_string(stats.dim()));
  return ((x.array().rowwise() * stats.std.transpose().array()).matrix().rowwise() +
          stats.mean.transpose());
}

FeatureMatrix InvertNorm(const FeatureMatrix &x, const NormStats &stats) {
  FeatureMatrix out = x;
  out.values = InvertNorm(x.values, stats);
  return out;
}

Matrix StackRows(std::span<const Matrix> blocks) {
  Eigen::Index rows = 0;
  const Eigen::Index cols = blocks.empty() ? 0 : blocks[0].cols();
  for (const Matrix &b : blocks) {
    if (b.cols() != cols) throw Error("stack_rows: ragged column counts");
    rows += b.rows();
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Matrix &b : blocks) {
    out.middleRows(r, b.rows()) = b;
    r += b.rows();
  }
  return out;
}

}  // namespace distse
