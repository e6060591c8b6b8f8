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

#include "rvvt/static_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rvvt/error.hpp"
#include "rvvt/rng.hpp"

namespace rvvt::models {

namespace {

void check_input(std::size_t expected, std::size_t got) {
  if (expected != got)
    fail(ErrorCode::ShapeMismatch, "model expects " + std::to_string(expected) +
                                       " features, input has " + std::to_string(got));
}

std::vector<double> softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - peak);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double log_sum_exp(std::span<const double> v) {
  const double peak = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double e : v) s += std::exp(e - peak);
  return peak + std::log(s);
}

// z = a * W^T + b for a batch.
Matrix affine(const Matrix& a, const DenseLayer& layer) {
  const std::size_t out = layer.weights.rows(), in = layer.weights.cols();
  Matrix z(a.rows(), out);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ar = a.row(r);
    for (std::size_t o = 0; o < out; ++o) {
      auto w = layer.weights.row(o);
      double s = layer.biases[o];
      for (std::size_t i = 0; i < in; ++i) s += ar[i] * w[i];
      z(r, o) = s;
    }
  }
  return z;
}

double l2_term(const MlpModel& model, double l2) {
  if (l2 == 0.0) return 0.0;
  double s = 0.0;
  for (const auto& layer : model.layers)
    for (double w : layer.weights.data()) s += w * w;
  return 0.5 * l2 * s;
}

void check_labels(const MlpModel& model, std::span<const std::size_t> y) {
  for (std::size_t label : y)
    if (label >= model.num_outputs())
      fail(ErrorCode::ShapeMismatch, "label " + std::to_string(label) + " outside output width " +
                                         std::to_string(model.num_outputs()));
}

struct Batch {
  Matrix x;
  std::vector<std::size_t> y;
};

TrainResult train_loop(MlpModel model, const LabeledDataset& data, const TrainConfig& cfg) {
  cfg.validate(model.layers.size());
  data.validate();
  if (data.size() == 0) fail(ErrorCode::InvalidArgument, "training set is empty");
  check_input(model.num_inputs(), data.num_features());
  check_labels(model, data.labels);

  TrainResult result;
  Rng rng(mix_seed(cfg.seed, 1));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<DenseLayer> grads;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::span<const std::size_t> idx(order.data() + start, end - start);
      Batch b{data.features.select_rows(idx), {}};
      for (std::size_t i : idx) b.y.push_back(data.labels[i]);
      mlp_loss_and_gradients(model, b.x, b.y, cfg.l2_penalty, grads);
      for (std::size_t l = cfg.frozen_layer_count; l < model.layers.size(); ++l) {
        auto& w = model.layers[l].weights.data();
        const auto& gw = grads[l].weights.data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= cfg.learning_rate * gw[k];
        auto& bias = model.layers[l].biases;
        for (std::size_t k = 0; k < bias.size(); ++k)
          bias[k] -= cfg.learning_rate * grads[l].biases[k];
      }
    }
    const double loss = mlp_loss(model, data.features, data.labels, cfg.l2_penalty);
    if (!std::isfinite(loss))
      fail(ErrorCode::NonFiniteLoss, "training loss diverged at epoch " + std::to_string(epoch + 1));
    result.loss_history.push_back(loss);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

NbModel train_nb(const LabeledDataset& data, double alpha) {
  if (!(alpha > 0.0)) fail(ErrorCode::InvalidArgument, "smoothing alpha must be positive");
  data.validate();
  const std::size_t classes = data.num_classes();
  const std::size_t d = data.num_features();
  std::vector<std::size_t> per_class(classes, 0);
  for (std::size_t label : data.labels) ++per_class[label];
  for (std::size_t c = 0; c < classes; ++c)
    if (per_class[c] == 0)
      fail(ErrorCode::EmptyClass, "class '" + data.class_names[c] + "' has no training rows");

  NbModel model;
  model.alpha = alpha;
  model.vocab_id = data.vocab_id;
  model.class_names = data.class_names;
  model.feature_log_likelihoods = Matrix(classes, d);
  Matrix counts(classes, d, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto row = data.features.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      if (row[j] < 0.0) fail(ErrorCode::InvalidArgument, "naive Bayes needs non-negative features");
      counts(data.labels[i], j) += row[j];
    }
  }
  const double n = static_cast<double>(data.size());
  for (std::size_t c = 0; c < classes; ++c) {
    model.class_log_priors.push_back(std::log(static_cast<double>(per_class[c]) / n));
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) total += counts(c, j);
    const double denom = total + alpha * static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j)
      model.feature_log_likelihoods(c, j) = std::log((counts(c, j) + alpha) / denom);
  }
  return model;
}

std::vector<double> posterior(const NbModel& model, std::span<const double> x) {
  check_input(model.num_features(), x.size());
  std::vector<double> logp(model.class_log_priors);
  for (std::size_t c = 0; c < logp.size(); ++c) {
    auto ll = model.feature_log_likelihoods.row(c);
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] != 0.0) logp[c] += x[j] * ll[j];
  }
  const double norm = log_sum_exp(logp);
  for (double& v : logp) v = std::exp(v - norm);
  return logp;
}

Prediction predict(const NbModel& model, std::span<const double> x) {
  const auto p = posterior(model, x);
  const std::size_t best = argmax(p);
  return {best, p[best]};
}

void TrainConfig::validate(std::size_t weight_layers) const {
  if (!(learning_rate > 0.0)) fail(ErrorCode::InvalidArgument, "learning rate must be positive");
  if (batch_size == 0) fail(ErrorCode::InvalidArgument, "batch size must be positive");
  if (l2_penalty < 0.0) fail(ErrorCode::InvalidArgument, "l2 penalty must be non-negative");
  if (frozen_layer_count >= weight_layers)
    fail(ErrorCode::InvalidArgument, "cannot freeze " + std::to_string(frozen_layer_count) +
                                         " of " + std::to_string(weight_layers) + " layers");
  for (std::size_t h : hidden)
    if (h == 0) fail(ErrorCode::InvalidArgument, "hidden layer width must be positive");
}

MlpModel init_mlp(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2)
    fail(ErrorCode::InvalidArgument, "a network needs input and output widths");
  for (std::size_t s : layer_sizes)
    if (s == 0) fail(ErrorCode::InvalidArgument, "layer widths must be positive");
  MlpModel model;
  model.layer_sizes = std::move(layer_sizes);
  Rng rng(mix_seed(seed, 0));
  for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
    const std::size_t in = model.layer_sizes[l], out = model.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    DenseLayer layer{Matrix(out, in), std::vector<double>(out, 0.0)};
    for (double& w : layer.weights.data()) w = rng.uniform(-bound, bound);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  check_input(model.num_inputs(), x.size());
  Matrix a(1, x.size());
  std::copy(x.begin(), x.end(), a.row(0).begin());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    a = affine(a, model.layers[l]);
    if (l + 1 < model.layers.size())
      for (double& v : a.data()) v = std::max(0.0, v);
  }
  return softmax(a.row(0));
}

Prediction predict(const MlpModel& model, std::span<const double> x) {
  const auto p = forward(model, x);
  const std::size_t best = argmax(p);
  return {best, p[best]};
}

double mlp_loss(const MlpModel& model, const Matrix& x, std::span<const std::size_t> y,
                double l2_penalty) {
  check_input(model.num_inputs(), x.cols());
  if (x.rows() != y.size()) fail(ErrorCode::ShapeMismatch, "row and label counts differ");
  check_labels(model, y);
  Matrix a = x;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    a = affine(a, model.layers[l]);
    if (l + 1 < model.layers.size())
      for (double& v : a.data()) v = std::max(0.0, v);
  }
  double loss = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) loss += log_sum_exp(a.row(r)) - a(r, y[r]);
  return loss / static_cast<double>(x.rows()) + l2_term(model, l2_penalty);
}

double mlp_loss_and_gradients(const MlpModel& model, const Matrix& x,
                              std::span<const std::size_t> y, double l2_penalty,
                              std::vector<DenseLayer>& grads) {
  check_input(model.num_inputs(), x.cols());
  if (x.rows() != y.size()) fail(ErrorCode::ShapeMismatch, "row and label counts differ");
  if (x.rows() == 0) fail(ErrorCode::InvalidArgument, "empty batch");
  check_labels(model, y);
  const std::size_t depth = model.layers.size();
  const double batch = static_cast<double>(x.rows());

  // activations[l] is the input to layer l; pre[l] its pre-activation output.
  std::vector<Matrix> activations{x};
  std::vector<Matrix> pre;
  for (std::size_t l = 0; l < depth; ++l) {
    pre.push_back(affine(activations.back(), model.layers[l]));
    if (l + 1 < depth) {
      Matrix a = pre.back();
      for (double& v : a.data()) v = std::max(0.0, v);
      activations.push_back(std::move(a));
    }
  }

  double loss = 0.0;
  Matrix delta(x.rows(), model.num_outputs());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto logits = pre.back().row(r);
    loss += log_sum_exp(logits) - logits[y[r]];
    const auto p = softmax(logits);
    for (std::size_t c = 0; c < p.size(); ++c)
      delta(r, c) = (p[c] - (c == y[r] ? 1.0 : 0.0)) / batch;
  }
  loss = loss / batch + l2_term(model, l2_penalty);

  grads.assign(depth, DenseLayer{});
  for (std::size_t l = depth; l-- > 0;) {
    const DenseLayer& layer = model.layers[l];
    const Matrix& input = activations[l];
    const std::size_t out = layer.weights.rows(), in = layer.weights.cols();
    DenseLayer g{Matrix(out, in, 0.0), std::vector<double>(out, 0.0)};
    for (std::size_t r = 0; r < input.rows(); ++r) {
      auto dr = delta.row(r);
      auto ar = input.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        if (dr[o] == 0.0) continue;
        g.biases[o] += dr[o];
        auto gw = g.weights.row(o);
        for (std::size_t i = 0; i < in; ++i) gw[i] += dr[o] * ar[i];
      }
    }
    if (l2_penalty != 0.0)
      for (std::size_t k = 0; k < g.weights.data().size(); ++k)
        g.weights.data()[k] += l2_penalty * layer.weights.data()[k];
    grads[l] = std::move(g);

    if (l == 0) break;
    Matrix next(input.rows(), in, 0.0);
    for (std::size_t r = 0; r < input.rows(); ++r) {
      auto dr = delta.row(r);
      auto nr = next.row(r);
      for (std::size_t o = 0; o < out; ++o) {
        if (dr[o] == 0.0) continue;
        auto w = layer.weights.row(o);
        for (std::size_t i = 0; i < in; ++i) nr[i] += dr[o] * w[i];
      }
      auto z = pre[l - 1].row(r);
      for (std::size_t i = 0; i < in; ++i)
        if (z[i] <= 0.0) nr[i] = 0.0;
    }
    delta = std::move(next);
  }
  return loss;
}

TrainResult train_mlp(const LabeledDataset& data, const TrainConfig& cfg) {
  std::vector<std::size_t> sizes{data.num_features()};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(std::max<std::size_t>(data.num_classes(), 2));
  MlpModel init = init_mlp(std::move(sizes), cfg.seed);
  init.vocab_id = data.vocab_id;
  init.class_names = data.class_names;
  return train_loop(std::move(init), data, cfg);
}

TrainResult fine_tune(const MlpModel& base, const LabeledDataset& data, const TrainConfig& cfg) {
  return train_loop(base, data, cfg);
}

}  // namespace rvvt::models
