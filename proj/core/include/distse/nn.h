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

#ifndef DISTSE_NN_H_
#define DISTSE_NN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "distse/common.h"

namespace distse {

// Feed-forward network z(l) = relu(W(l) z(l-1) + b(l)) for hidden layers and
// a linear output layer. layer_dims = {d_0, ..., d_L}.
struct MlpSpec {
  std::vector<int> layer_dims;

  int num_layers() const { return static_cast<int>(layer_dims.size()) - 1; }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  void Validate() const;
  std::string ToString() const;

  // depth linear layers, all hidden layers of the given width.
  static MlpSpec Uniform(int input_dim, int output_dim, int depth, int width);

  bool operator==(const MlpSpec &) const = default;
};

struct Layer {
  Matrix weight;  // d_l x d_{l-1}
  Vector bias;    // d_l
};

struct MlpParams {
  std::vector<Layer> layers;

  MlpSpec spec() const;
  size_t num_parameters() const;
  void SetZero();
};

MlpParams InitMlp(const MlpSpec &spec, uint64_t seed);

// Activations z(0) .. z(L) of the last forward pass.
struct ForwardCache {
  std::vector<Matrix> activations;
};

Matrix Forward(const MlpParams &params, const Matrix &batch,
               ForwardCache *cache = nullptr);

// Mean over all N*d elements of the squared difference.
double MseLoss(const Matrix &pred, const Matrix &target);

// Gradients of MseLoss(Forward(batch), target) + l2 * sum ||W||^2.
// relu'(0) is taken as 0. When `loss` is given it receives the MSE of the
// forward pass the gradients were taken at.
MlpParams Backward(const MlpParams &params, const Matrix &batch,
                   const Matrix &target, double l2 = 0.0,
                   double *loss = nullptr);

enum class OptimizerKind { kSgd, kAdam };

OptimizerKind ParseOptimizer(const std::string &name);

struct TrainConfig {
  int batch_size = 128;
  int epochs = 10;
  double learning_rate = 1e-3;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  uint64_t seed = 1;
  bool shuffle = true;
  double l2 = 0.0;

  void Validate() const;
};

class Optimizer {
 public:
  Optimizer(const MlpSpec &spec, const TrainConfig &cfg);

  void Step(MlpParams *params, const MlpParams &grads);
  int steps() const { return steps_; }

 private:
  TrainConfig cfg_;
  MlpParams first_moment_;
  MlpParams second_moment_;
  int steps_ = 0;
};

struct TrainResult {
  MlpParams params;
  std::vector<double> loss_history;  // mean training loss per epoch
};

// Mini-batch training from a fresh InitMlp(spec, cfg.seed).
TrainResult Train(const MlpSpec &spec, const Matrix &inputs,
                  const Matrix &targets, const TrainConfig &cfg);

// Continue training existing parameters.
TrainResult Train(MlpParams init, const Matrix &inputs, const Matrix &targets,
                  const TrainConfig &cfg);

// FNV-1a over the raw parameter bytes, in layer order.
uint64_t ParamsChecksum(const MlpParams &params);

}  // namespace distse

#endif  // DISTSE_NN_H_
