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

#ifndef DISTSE_TESTS_TEST_UTIL_H_
#define DISTSE_TESTS_TEST_UTIL_H_

#include <cstdint>
#include <string>
#include <vector>

#include "distse/dsp.h"
#include "distse/nn.h"

namespace distse::testing {

// Gaussian samples with the given std.
Waveform RandomWave(size_t n, int sample_rate, uint64_t seed, double scale = 0.1);
Matrix RandomMatrix(int rows, int cols, uint64_t seed, double scale = 1.0);

// Fresh empty directory under the system temp dir; removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string &tag);
  ~ScratchDir();
  ScratchDir(const ScratchDir &) = delete;
  ScratchDir &operator=(const ScratchDir &) = delete;
  const std::string &path() const { return path_; }
  std::string operator/(const std::string &name) const;

 private:
  std::string path_;
};

std::string FileBytes(const std::string &path);

}  // namespace distse::testing

#endif  // DISTSE_TESTS_TEST_UTIL_H_
