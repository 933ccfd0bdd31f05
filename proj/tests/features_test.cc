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

#include <gtest/gtest.h>

#include "distse/features.h"
#include "test_util.h"

namespace distse {
namespace {

using testing::RandomMatrix;

TEST(Splice, LayoutAndEdgeReplication) {
  Matrix lps(4, 2);
  lps << 1, 10, 2, 20, 3, 30, 4, 40;
  const FeatureMatrix f = SpliceContext(lps, 3);
  ASSERT_EQ(f.rows(), 4);
  ASSERT_EQ(f.cols(), 6);
  EXPECT_EQ(f.bins(), 2);
  Matrix want(4, 6);
  want << 1, 10, 1, 10, 2, 20,
          1, 10, 2, 20, 3, 30,
          2, 20, 3, 30, 4, 40,
          3, 30, 4, 40, 4, 40;
  EXPECT_EQ(f.values, want);
}

TEST(Splice, Dimensions) {
  EXPECT_EQ(SpliceContext(RandomMatrix(5, 257, 1), 3).cols(), 771);
  EXPECT_EQ(SingleChannelInputDim(257, 3), 771);
  const Matrix x = RandomMatrix(5, 7, 2);
  EXPECT_EQ(SpliceContext(x, 1).values, x);
  EXPECT_EQ(SpliceContext(x, 5).cols(), 35);
}

TEST(Splice, ConstantInputStaysConstant) {
  const FeatureMatrix f = SpliceContext(Matrix::Constant(6, 4, -2.5), 3);
  EXPECT_EQ(f.values.maxCoeff(), -2.5);
  EXPECT_EQ(f.values.minCoeff(), -2.5);
}

TEST(Splice, EvenContextThrows) {
  EXPECT_THROW(SpliceContext(RandomMatrix(3, 3, 1), 2), Error);
  EXPECT_THROW(SpliceContext(RandomMatrix(3, 3, 1), 0), Error);
}

TEST(Concat, DimensionsAndSlices) {
  std::vector<FeatureMatrix> chans;
  for (int p = 0; p < 7; ++p) chans.push_back(SpliceContext(RandomMatrix(9, 257, p), 3));
  const FeatureMatrix all = ConcatChannels(chans);
  EXPECT_EQ(all.cols(), 5397);
  EXPECT_EQ(all.channels, 7);
  EXPECT_EQ(all.layout, FeatureLayout::kConcatChannelsContext);
  EXPECT_EQ(FusionInputDim(257, 3, 7), 5397);
  for (int p = 0; p < 7; ++p) EXPECT_EQ(SliceChannel(all, p).values, chans[p].values);

  std::vector<FeatureMatrix> flat;
  for (int p = 0; p < 7; ++p) flat.push_back(SpliceContext(RandomMatrix(9, 257, p), 1));
  const FeatureMatrix fc = ConcatChannels(flat);
  EXPECT_EQ(fc.cols(), 1799);
  EXPECT_EQ(fc.layout, FeatureLayout::kConcatChannelsFlat);
  EXPECT_EQ(FusionCenterInputDim(257, 7), 1799);
}

TEST(Concat, SingleChannelIsIdentity) {
  std::vector<FeatureMatrix> one{SpliceContext(RandomMatrix(4, 5, 1), 3)};
  const FeatureMatrix out = ConcatChannels(one);
  EXPECT_EQ(out.values, one[0].values);
  EXPECT_EQ(out.channels, 1);
}

TEST(Concat, RaggedThrows) {
  std::vector<FeatureMatrix> m{SpliceContext(RandomMatrix(4, 5, 1), 3),
                               SpliceContext(RandomMatrix(5, 5, 1), 3)};
  EXPECT_THROW(ConcatChannels(m), Error);
  EXPECT_THROW(ConcatChannels({}), Error);
}

TEST(Norm, StandardizesFittingSet) {
  Matrix x = RandomMatrix(200, 6, 4, 3.0);
  x.col(2).array() += 10.0;
  const NormStats s = FitNorm(x);
  const Matrix z = ApplyNorm(x, s);
  for (int j = 0; j < 6; ++j) {
    EXPECT_NEAR(z.col(j).mean(), 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(z.col(j).array().square().mean()), 1.0, 1e-6);
  }
  EXPECT_LT((InvertNorm(z, s) - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Norm, ConstantColumn) {
  Matrix x = RandomMatrix(10, 3, 5);
  x.col(1).setConstant(4.0);
  const NormStats s = FitNorm(x);
  EXPECT_EQ(s.std(1), kStdFloor);
  const Matrix z = ApplyNorm(x, s);
  EXPECT_EQ(z.col(1).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(InvertNorm(z, s).col(1), x.col(1));
}

TEST(Norm, Errors) {
  EXPECT_THROW(FitNorm(RandomMatrix(1, 3, 1)), Error);
  const NormStats s = FitNorm(RandomMatrix(5, 3, 1));
  EXPECT_THROW(ApplyNorm(RandomMatrix(5, 4, 1), s), Error);
}

TEST(StackRows, Concatenates) {
  std::vector<Matrix> b{RandomMatrix(2, 3, 1), RandomMatrix(4, 3, 2)};
  const Matrix s = StackRows(b);
  ASSERT_EQ(s.rows(), 6);
  EXPECT_EQ(s.topRows(2), b[0]);
  EXPECT_EQ(s.bottomRows(4), b[1]);
}

}  // namespace
}  // namespace distse
