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
#include <type_traits>

#include "json.hpp"
#include "rvvt/model_io.hpp"
#include "rvvt/rng.hpp"
#include "test_support.hpp"

using namespace rvvt;
using rvvt::testing::code_of;

namespace {

LabeledDataset noisy(std::uint64_t seed, std::size_t n, std::size_t d, std::size_t classes) {
  Rng rng(seed);
  LabeledDataset data;
  data.features = Matrix(n, d);
  data.class_names = default_class_names(classes);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    for (std::size_t j = 0; j < d; ++j)
      data.features(i, j) = std::fabs(rng.normal() + (j % classes == c ? 2.0 : 0.0));
    data.labels.push_back(c);
  }
  return data;
}

std::vector<double> outputs(const io::AnyModel& m, std::span<const double> x) {
  return std::visit(
      [&](const auto& model) -> std::vector<double> {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, models::NbModel>) return models::posterior(model, x);
        else if constexpr (std::is_same_v<T, models::MlpModel>) return models::forward(model, x);
        else if constexpr (std::is_same_v<T, detect::GaussianOneClass> ||
                           std::is_same_v<T, detect::KnnOneClass>)
          return {detect::oneclass_score(model, x)};
        else if constexpr (std::is_same_v<T, detect::AdaBoostModel>)
          return {detect::adaboost_margin(model, x)};
        else if constexpr (std::is_same_v<T, detect::BaggingModel>)
          return {detect::bagging_score(model, x)};
        else if constexpr (std::is_same_v<T, detect::TwoStageModel>) {
          auto v = detect::two_stage_detect(model, x);
          return {v.score, static_cast<double>(v.label)};
        } else {
          Matrix row(1, x.size());
          std::copy(x.begin(), x.end(), row.data().begin());
          return fs::pca_transform(model, row).data();
        }
      },
      m);
}

void check_round_trip(const io::AnyModel& model, std::size_t dims, std::uint64_t schema = 0x1234) {
  auto file = io::wrap(model, schema);
  auto text = io::dump_model(file);
  auto back = io::parse_model(text);
  CHECK(back == file);
  CHECK(io::dump_model(back) == text);
  Rng rng(77);
  std::vector<double> x(dims);
  for (int i = 0; i < 100; ++i) {
    for (double& v : x) v = std::fabs(rng.normal() * 3.0);
    CHECK(outputs(back.model, x) == outputs(model, x));
  }
}

}  // namespace

TEST_CASE("every model kind round trips bit for bit") {
  auto three = noisy(1, 60, 4, 3);
  auto two = noisy(2, 60, 4, 2);

  check_round_trip(models::train_nb(three), 4);
  models::TrainConfig cfg;
  cfg.hidden = {5};
  cfg.epochs = 10;
  check_round_trip(models::train_mlp(three, cfg).model, 4);
  check_round_trip(detect::fit_oneclass_gaussian(two.features, 90), 4);
  check_round_trip(detect::fit_knn_oneclass(two.features, 3, 95), 4);
  check_round_trip(detect::adaboost_train(two, 7), 4);
  detect::BaggingConfig bag;
  bag.bags = 5;
  bag.base = detect::BaseLearner::AdaBoost;
  bag.rounds = 3;
  check_round_trip(detect::bagging_train(two, bag), 4);
  detect::TwoStageConfig ts;
  ts.stage2.hidden = {4};
  ts.stage2.epochs = 5;
  three.class_names = {"normal", "ratio_shift", "spike"};
  check_round_trip(detect::train_two_stage(three, ts), 4);
  ts.knn = true;
  check_round_trip(detect::train_two_stage(three, ts), 4);
  check_round_trip(fs::pca_fit(two.features, 2), 4);
}

TEST_CASE("non-finite and extreme values survive") {
  detect::GaussianOneClass g;
  g.mean = {1e-300, -0.0, 123456789.123456789};
  g.variances = {detect::kVarianceFloor, 1.0, 0.1};
  g.threshold = 0.30000000000000004;
  g.training_scores = {0.1, 0.2};
  auto back = io::parse_model(io::dump_model(io::wrap(g)));
  CHECK(std::get<detect::GaussianOneClass>(back.model) == g);
}

TEST_CASE("envelope fields and kind names") {
  auto model = detect::fit_oneclass_gaussian(noisy(3, 10, 2, 2).features);
  auto file = io::wrap(model, 0xabcdef);
  CHECK(file.class_names == std::vector<std::string>{"normal", "anomaly"});
  auto j = nlohmann::json::parse(io::dump_model(file));
  CHECK(j["format"] == "rvvt-model");
  CHECK(j["format_version"] == io::kModelFormatVersion);
  CHECK(j["kind"] == "gauss");
  CHECK(io::model_kind(file.model) == std::string("gauss"));

  rvvt::testing::TempDir dir("model");
  io::save_model(dir.file("m.json"), file);
  CHECK(io::load_model(dir.file("m.json")) == file);
}

TEST_CASE("malformed model files") {
  CHECK(code_of([] { io::parse_model("not json"); }) == ErrorCode::Format);
  CHECK(code_of([] { io::parse_model(R"({"format":"other"})"); }) == ErrorCode::Format);
  auto text = io::dump_model(io::wrap(detect::fit_oneclass_gaussian(noisy(3, 10, 2, 2).features)));
  auto j = nlohmann::json::parse(text);
  j["format_version"] = 99;
  CHECK(code_of([&] { io::parse_model(j.dump()); }) == ErrorCode::Unsupported);
  j["format_version"] = 1;
  j["kind"] = "forest";
  CHECK(code_of([&] { io::parse_model(j.dump()); }) == ErrorCode::Format);
  j["kind"] = "gauss";
  j["params"].erase("mean");
  CHECK(code_of([&] { io::parse_model(j.dump()); }) == ErrorCode::Format);
  CHECK(code_of([] { io::load_model("/nonexistent/model.json"); }) == ErrorCode::Io);
}
