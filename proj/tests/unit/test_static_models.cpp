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

#include <cmath>

#include "rvvt/rng.hpp"
#include "rvvt/static_models.hpp"
#include "test_support.hpp"

using namespace rvvt;
using namespace rvvt::models;
using rvvt::testing::code_of;

namespace {

LabeledDataset make(Matrix x, std::vector<std::size_t> y, std::size_t classes = 2) {
  LabeledDataset d;
  d.features = std::move(x);
  d.labels = std::move(y);
  d.class_names = default_class_names(classes);
  return d;
}

LabeledDataset disjoint_counts() {
  // Class 0 uses grams 0-1, class 1 uses grams 2-3.
  return make(Matrix::from_rows({{3, 1, 0, 0}, {2, 2, 0, 0}, {1, 4, 0, 0},
                                 {0, 0, 2, 3}, {0, 0, 5, 1}, {0, 0, 1, 1}}),
              {0, 0, 0, 1, 1, 1});
}

LabeledDataset xor_data() {
  return make(Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), {0, 1, 1, 0});
}

double max_grad_rel_error(const MlpModel& model, const Matrix& x,
                          const std::vector<std::size_t>& y, double l2) {
  std::vector<DenseLayer> grads;
  mlp_loss_and_gradients(model, x, y, l2, grads);
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](double analytic, auto&& param) {
    MlpModel m = model;
    double& p = param(m);
    const double orig = p;
    p = orig + h;
    const double up = mlp_loss(m, x, y, l2);
    p = orig - h;
    const double down = mlp_loss(m, x, y, l2);
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    worst = std::max(worst, std::fabs(analytic - numeric) / denom);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    for (std::size_t k = 0; k < model.layers[l].weights.data().size(); ++k)
      probe(grads[l].weights.data()[k],
            [&](MlpModel& m) -> double& { return m.layers[l].weights.data()[k]; });
    for (std::size_t k = 0; k < model.layers[l].biases.size(); ++k)
      probe(grads[l].biases[k], [&](MlpModel& m) -> double& { return m.layers[l].biases[k]; });
  }
  return worst;
}

}  // namespace

TEST_CASE("naive Bayes separates disjoint vocabularies") {
  auto data = disjoint_counts();
  auto model = train_nb(data);
  for (std::size_t i = 0; i < data.size(); ++i)
    CHECK(predict(model, data.features.row(i)).label == data.labels[i]);
  std::vector<double> pure0{5, 5, 0, 0};
  auto p = predict(model, pure0);
  CHECK(p.label == 0);
  CHECK(p.score > 0.99);
}

TEST_CASE("naive Bayes smoothing limit and degenerate inputs") {
  auto data = disjoint_counts();
  auto model = train_nb(data, 1e6);
  const double uniform = std::log(1.0 / 4.0);
  for (double v : model.feature_log_likelihoods.data())
    CHECK(std::fabs(std::exp(v) - std::exp(uniform)) < 1e-3);

  // Zero input leaves only the prior; class 1 is the majority here.
  auto skew = make(Matrix::from_rows({{1, 0}, {0, 1}, {0, 2}}), {0, 1, 1});
  std::vector<double> zero{0, 0};
  CHECK(predict(train_nb(skew), zero).label == 1);

  auto single = make(Matrix::from_rows({{1, 0}, {2, 0}}), {0, 0});
  CHECK(code_of([&] { train_nb(single); }) == ErrorCode::EmptyClass);
  CHECK(code_of([&] { train_nb(data, 0.0); }) == ErrorCode::InvalidArgument);
  std::vector<double> narrow{1, 2};
  CHECK(code_of([&] { predict(model, narrow); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("posterior ties go to the lowest class") {
  auto data = make(Matrix::from_rows({{1, 1}, {1, 1}}), {0, 1});
  auto model = train_nb(data);
  std::vector<double> x{1, 1};
  auto p = predict(model, x);
  CHECK(p.label == 0);
  CHECK(p.score == doctest::Approx(0.5));
}

TEST_CASE("mlp learns xor") {
  // A 2-8-2 ReLU net occasionally starts in a dead-unit basin, so this
  // checks the fit rate over many seeds rather than one lucky seed.
  TrainConfig cfg;
  cfg.hidden = {8};
  cfg.learning_rate = 0.1;
  cfg.epochs = 2000;
  cfg.batch_size = 4;
  auto data = xor_data();
  int fitted = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    cfg.seed = seed;
    auto result = train_mlp(data, cfg);
    REQUIRE(result.loss_history.size() == 2000);
    REQUIRE(result.model.layer_sizes == std::vector<std::size_t>{2, 8, 2});
    CHECK(result.loss_history.back() < result.loss_history.front());
    bool all = true;
    for (std::size_t i = 0; i < data.size(); ++i)
      all = all && predict(result.model, data.features.row(i)).label == data.labels[i];
    fitted += all;
  }
  MESSAGE("xor fitted for " << fitted << "/50 seeds");
  CHECK(fitted >= 45);
}

TEST_CASE("zero epochs is a no-op and training is deterministic") {
  TrainConfig cfg;
  cfg.hidden = {4};
  cfg.epochs = 0;
  auto result = train_mlp(xor_data(), cfg);
  CHECK(result.loss_history.empty());
  auto init = init_mlp({2, 4, 2}, cfg.seed);
  CHECK(result.model.layers == init.layers);

  cfg.epochs = 30;
  CHECK(train_mlp(xor_data(), cfg).model == train_mlp(xor_data(), cfg).model);
}

TEST_CASE("init weights are bounded by fan-in") {
  auto model = init_mlp({9, 5, 3}, 17);
  for (double w : model.layers[0].weights.data()) CHECK(std::fabs(w) <= 1.0 / 3.0);
  for (double w : model.layers[1].weights.data()) CHECK(std::fabs(w) <= 1.0 / std::sqrt(5.0));
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(21);
  auto model = init_mlp({6, 7, 5, 3}, 4);
  Matrix x(5, 6);
  for (double& v : x.data()) v = rng.normal();
  std::vector<std::size_t> y{0, 2, 1, 1, 0};
  CHECK(max_grad_rel_error(model, x, y, 0.0) <= 1e-4);
  CHECK(max_grad_rel_error(model, x, y, 0.01) <= 1e-4);
}

TEST_CASE("fine tuning honours frozen layers") {
  TrainConfig cfg;
  cfg.hidden = {6, 4};
  cfg.epochs = 20;
  auto base = train_mlp(xor_data(), cfg).model;

  auto shifted = make(Matrix::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}), {1, 0, 0, 1});
  TrainConfig head = cfg;
  head.frozen_layer_count = 2;
  auto tuned = fine_tune(base, shifted, head).model;
  CHECK(tuned.layers[0] == base.layers[0]);
  CHECK(tuned.layers[1] == base.layers[1]);
  CHECK_FALSE(tuned.layers[2] == base.layers[2]);

  // No frozen layers equals continuing training from the base.
  TrainConfig all = cfg;
  all.frozen_layer_count = 0;
  CHECK(fine_tune(base, shifted, all).model == fine_tune(base, shifted, all).model);

  head.frozen_layer_count = 3;
  CHECK(code_of([&] { fine_tune(base, shifted, head); }) == ErrorCode::InvalidArgument);
  auto wide = make(Matrix(4, 3, 1.0), {0, 1, 0, 1});
  CHECK(code_of([&] { fine_tune(base, wide, cfg); }) == ErrorCode::ShapeMismatch);
}
