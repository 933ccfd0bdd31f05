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

#include "distse/nn.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

namespace distse {

void MlpSpec::Validate() const {
  if (layer_dims.size() < 2) throw Error("mlp spec: need at least one layer");
  for (int d : layer_dims)
    if (d < 1) throw Error("mlp spec: layer dims must be >= 1 (" + ToString() + ")");
}

std::string MlpSpec::ToString() const {
  std::ostringstream os;
  for (size_t i = 0; i < layer_dims.size(); ++i) os << (i ? "-" : "") << layer_dims[i];
  return os.str();
}

MlpSpec MlpSpec::Uniform(int input_dim, int output_dim, int depth, int width) {
  if (depth < 1) throw Error("mlp spec: depth must be >= 1");
  MlpSpec spec;
  spec.layer_dims.push_back(input_dim);
  for (int l = 1; l < depth; ++l) spec.layer_dims.push_back(width);
  spec.layer_dims.push_back(output_dim);
  spec.Validate();
  return spec;
}

MlpSpec MlpParams::spec() const {
  MlpSpec s;
  if (layers.empty()) return s;
  s.layer_dims.push_back(static_cast<int>(layers.front().weight.cols()));
  for (const Layer &l : layers) s.layer_dims.push_back(static_cast<int>(l.weight.rows()));
  return s;
}

size_t MlpParams::num_parameters() const {
  size_t n = 0;
  for (const Layer &l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void MlpParams::SetZero() {
  for (Layer &l : layers) {
    l.weight.setZero();
    l.bias.setZero();
  }
}

MlpParams InitMlp(const MlpSpec &spec, uint64_t seed) {
  spec.Validate();
  std::mt19937_64 rng(MixSeed(seed, 0x1417));
  MlpParams params;
  for (int l = 1; l <= spec.num_layers(); ++l) {
    const int fan_in = spec.layer_dims[l - 1];
    const int fan_out = spec.layer_dims[l];
    const double a = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-a, a);
    Layer layer;
    layer.weight.resize(fan_out, fan_in);
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = dist(rng);
    layer.bias = Vector::Zero(fan_out);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

Matrix Forward(const MlpParams &params, const Matrix &batch, ForwardCache *cache) {
  if (params.layers.empty()) throw Error("forward: empty network");
  if (batch.cols() != params.layers.front().weight.cols())
    throw Error("forward: batch width " + std::to_string(batch.cols()) +
                " != input dim " + std::to_string(params.layers.front().weight.cols()));
  if (cache) {
    cache->activations.clear();
    cache->activations.push_back(batch);
  }
  Matrix z = batch;
  const size_t num_layers = params.layers.size();
  for (size_t l = 0; l < num_layers; ++l) {
    const Layer &layer = params.layers[l];
    Matrix next(z.rows(), layer.weight.rows());
    next.noalias() = z * layer.weight.transpose();
    next.rowwise() += layer.bias.transpose();
    if (l + 1 < num_layers) next = next.cwiseMax(0.0);
    z = std::move(next);
    if (cache) cache->activations.push_back(z);
  }
  return z;
}

double MseLoss(const Matrix &pred, const Matrix &target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw Error("mse_loss: shape mismatch");
  if (pred.size() == 0) throw Error("mse_loss: empty input");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

MlpParams Backward(const MlpParams &params, const Matrix &batch,
                   const Matrix &target, double l2, double *loss) {
  ForwardCache cache;
  const Matrix pred = Forward(params, batch, &cache);
  if (pred.rows() != target.rows() || pred.cols() != target.cols())
    throw Error("backward: target shape mismatch");
  if (loss) *loss = MseLoss(pred, target);

  MlpParams grads;
  grads.layers.resize(params.layers.size());
  Matrix delta = (2.0 / static_cast<double>(pred.size())) * (pred - target);
  for (size_t li = params.layers.size(); li-- > 0;) {
    const Layer &layer = params.layers[li];
    const Matrix &input = cache.activations[li];
    Layer &g = grads.layers[li];
    g.weight.noalias() = delta.transpose() * input;
    if (l2 != 0.0) g.weight += (2.0 * l2) * layer.weight;
    g.bias = delta.colwise().sum().transpose();
    if (li > 0) {
      Matrix prev(delta.rows(), layer.weight.cols());
      prev.noalias() = delta * layer.weight;
      // input holds relu outputs; the mask is pre-activation > 0.
      delta = (input.array() > 0.0).select(prev, 0.0);
    }
  }
  return grads;
}

OptimizerKind ParseOptimizer(const std::string &name) {
  if (name == "sgd") return OptimizerKind::kSgd;
  if (name == "adam") return OptimizerKind::kAdam;
  throw Error("unsupported optimizer '" + name + "'");
}

void TrainConfig::Validate() const {
  if (batch_size < 1 || epochs < 1 || !(learning_rate > 0.0))
    throw Error("train config: batch_size, epochs and learning_rate must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0 && beta2 > 0.0 && beta2 < 1.0 && adam_eps > 0.0))
    throw Error("train config: invalid adam constants");
  if (l2 < 0.0) throw Error("train config: l2 must be non-negative");
}

Optimizer::Optimizer(const MlpSpec &spec, const TrainConfig &cfg) : cfg_(cfg) {
  if (cfg_.optimizer == OptimizerKind::kAdam) {
    first_moment_ = InitMlp(spec, 0);
    first_moment_.SetZero();
    second_moment_ = first_moment_;
  }
}

void Optimizer::Step(MlpParams *params, const MlpParams &grads) {
  if (params->layers.size() != grads.layers.size())
    throw Error("optimizer: gradient/parameter layer count mismatch");
  ++steps_;
  const double lr = cfg_.learning_rate;
  if (cfg_.optimizer == OptimizerKind::kSgd) {
    for (size_t l = 0; l < params->layers.size(); ++l) {
      params->layers[l].weight -= lr * grads.layers[l].weight;
      params->layers[l].bias -= lr * grads.layers[l].bias;
    }
    return;
  }
  const double b1 = cfg_.beta1, b2 = cfg_.beta2;
  const double c1 = 1.0 - std::pow(b1, steps_);
  const double c2 = 1.0 - std::pow(b2, steps_);
  auto update = [&](auto &p, const auto &g, auto &m, auto &v) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.adam_eps);
  };
  for (size_t l = 0; l < params->layers.size(); ++l) {
    update(params->layers[l].weight, grads.layers[l].weight,
           first_moment_.layers[l].weight, second_moment_.layers[l].weight);
    update(params->layers[l].bias, grads.layers[l].bias,
           first_moment_.layers[l].bias, second_moment_.layers[l].bias);
  }
}

TrainResult Train(const MlpSpec &spec, const Matrix &inputs,
                  const Matrix &targets, const TrainConfig &cfg) {
  return Train(InitMlp(spec, cfg.seed), inputs, targets, cfg);
}

TrainResult Train(MlpParams init, const Matrix &inputs, const Matrix &targets,
                  const TrainConfig &cfg) {
  cfg.Validate();
  if (inputs.rows() == 0) throw Error("train: empty dataset");
  if (inputs.rows() != targets.rows())
    throw Error("train: " + std::to_string(inputs.rows()) + " input rows vs " +
                std::to_string(targets.rows()) + " target rows");
  const MlpSpec spec = init.spec();
  if (inputs.cols() != spec.input_dim() || targets.cols() != spec.output_dim())
    throw Error("train: data dims " + std::to_string(inputs.cols()) + "->" +
                std::to_string(targets.cols()) + " do not match network " + spec.ToString());

  TrainResult result;
  result.params = std::move(init);
  Optimizer opt(spec, cfg);
  const Eigen::Index n = inputs.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  Matrix xb, tb;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) {
      std::mt19937_64 rng(MixSeed(cfg.seed, 0x5eed0000ULL + epoch));
      std::shuffle(order.begin(), order.end(), rng);
    }
    double weighted_loss = 0.0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index rows = std::min<Eigen::Index>(cfg.batch_size, n - start);
      xb.resize(rows, inputs.cols());
      tb.resize(rows, targets.cols());
      for (Eigen::Index r = 0; r < rows; ++r) {
        xb.row(r) = inputs.row(order[start + r]);
        tb.row(r) = targets.row(order[start + r]);
      }
      double batch_loss = 0.0;
      const MlpParams grads = Backward(result.params, xb, tb, cfg.l2, &batch_loss);
      weighted_loss += batch_loss * rows;
      opt.Step(&result.params, grads);
    }
    result.loss_history.push_back(weighted_loss / static_cast<double>(n));
  }
  return result;
}

uint64_t ParamsChecksum(const MlpParams &params) {
  uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const double *data, Eigen::Index count) {
    const auto *bytes = reinterpret_cast<const unsigned char *>(data);
    for (size_t i = 0; i < static_cast<size_t>(count) * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const Layer &l : params.layers) {
    feed(l.weight.data(), l.weight.size());
    feed(l.bias.data(), l.bias.size());
  }
  return h;
}

}  // namespace distse
