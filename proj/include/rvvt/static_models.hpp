// Copyright 2026 The rvvt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rvvt/dataset.hpp"
#include "rvvt/matrix.hpp"

namespace rvvt::models {

struct Prediction {
  std::size_t label = 0;
  double score = 0.0;  // probability of the predicted class
};

/// Multinomial naive Bayes with Laplace smoothing.
struct NbModel {
  std::vector<double> class_log_priors;
  Matrix feature_log_likelihoods;  // classes x features
  double alpha = 1.0;
  std::uint64_t vocab_id = 0;
  std::vector<std::string> class_names;

  std::size_t num_features() const noexcept { return feature_log_likelihoods.cols(); }

  friend bool operator==(const NbModel&, const NbModel&) = default;
};

/// Every class named in `data.class_names` needs at least one row
/// (EmptyClass otherwise). Rows are treated as (possibly fractional) counts.
NbModel train_nb(const LabeledDataset& data, double alpha = 1.0);

std::vector<double> posterior(const NbModel& model, std::span<const double> x);
Prediction predict(const NbModel& model, std::span<const double> x);

struct DenseLayer {
  Matrix weights;  // out x in
  std::vector<double> biases;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Feed-forward network: ReLU hidden layers, softmax output.
struct MlpModel {
  std::vector<std::size_t> layer_sizes;  // input, hidden..., output
  std::vector<DenseLayer> layers;        // layer_sizes.size() - 1 of them
  std::uint64_t vocab_id = 0;
  std::vector<std::string> class_names;

  std::size_t num_inputs() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
  std::size_t num_outputs() const noexcept { return layer_sizes.empty() ? 0 : layer_sizes.back(); }

  friend bool operator==(const MlpModel&, const MlpModel&) = default;
};

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 200;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double l2_penalty = 0.0;
  std::size_t frozen_layer_count = 0;
  std::vector<std::size_t> hidden = {64, 32};

  /// Throws InvalidArgument for non-positive rates, sizes or an out of range
  /// freeze count (given the number of weight layers).
  void validate(std::size_t weight_layers) const;
};

/// Weights uniform in +-1/sqrt(fan_in), biases zero.
MlpModel init_mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

std::vector<double> forward(const MlpModel& model, std::span<const double> x);
Prediction predict(const MlpModel& model, std::span<const double> x);

/// Mean cross-entropy over the rows plus (l2/2) * sum of squared weights.
double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const std::size_t> y,
                double l2_penalty = 0.0);

/// Same loss; `grads` receives one DenseLayer of partial derivatives per layer.
double mlp_loss_and_gradients(const MlpModel& model, const Matrix& x,
                              std::span<const std::size_t> y, double l2_penalty,
                              std::vector<DenseLayer>& grads);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_history;  // full-dataset loss after each epoch
};

/// Mini-batch gradient descent from a seeded initialisation. Deterministic
/// given (data, cfg).
TrainResult train_mlp(const LabeledDataset& data, const TrainConfig& cfg);

/// Continues training from `base` with the first cfg.frozen_layer_count
/// weight layers held fixed. cfg.hidden is ignored; the base shape is kept.
TrainResult fine_tune(const MlpModel& base, const LabeledDataset& data, const TrainConfig& cfg);

/// Argmax with lowest-index tie-break.
std::size_t argmax(std::span<const double> values);

}  // namespace rvvt::models
