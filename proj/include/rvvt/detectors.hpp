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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rvvt/dataset.hpp"
#include "rvvt/matrix.hpp"
#include "rvvt/static_models.hpp"

namespace rvvt::detect {

inline constexpr double kVarianceFloor = 1e-12;
inline constexpr double kMinEpsilon = 1e-10;

/// Linear-interpolation percentile (p in [0,100]) of unsorted values.
double percentile(std::vector<double> values, double p);

/// Diagonal-covariance Gaussian; score is the squared Mahalanobis distance.
struct GaussianOneClass {
  std::vector<double> mean;
  std::vector<double> variances;
  double threshold = 0.0;
  double threshold_percentile = 95.0;
  std::vector<double> training_scores;

  friend bool operator==(const GaussianOneClass&, const GaussianOneClass&) = default;
};

/// Mean Euclidean distance to the k nearest retained normal vectors.
struct KnnOneClass {
  Matrix reference;
  std::size_t k = 1;
  double threshold = 0.0;
  double threshold_percentile = 95.0;
  std::vector<double> training_scores;  // leave-one-out

  friend bool operator==(const KnnOneClass&, const KnnOneClass&) = default;
};

using OneClassModel = std::variant<GaussianOneClass, KnnOneClass>;

GaussianOneClass fit_oneclass_gaussian(const Matrix& normal, double threshold_percentile = 95.0);
KnnOneClass fit_knn_oneclass(const Matrix& normal, std::size_t k, double threshold_percentile = 95.0);

struct Detection {
  double score = 0.0;
  bool is_anomalous = false;
};

double oneclass_score(const OneClassModel& model, std::span<const double> x);
double oneclass_threshold(const OneClassModel& model) noexcept;
std::size_t oneclass_dims(const OneClassModel& model) noexcept;
Detection detect(const OneClassModel& model, std::span<const double> x);

/// h(x) = polarity if x[feature] > threshold, else -polarity.
struct Stump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  int predict(std::span<const double> x) const noexcept {
    return x[feature] > threshold ? polarity : -polarity;
  }
  friend bool operator==(const Stump&, const Stump&) = default;
};

/// Binary booster. Class id 0 maps to -1 and class id 1 to +1.
struct AdaBoostModel {
  std::vector<Stump> stumps;
  std::vector<double> alphas;
  std::size_t num_features = 0;
  std::vector<std::string> class_names;

  friend bool operator==(const AdaBoostModel&, const AdaBoostModel&) = default;
};

/// Per-round diagnostics; training_error[t] is measured after round t.
struct AdaBoostTrace {
  std::vector<double> epsilons;
  std::vector<double> training_error;
  std::vector<double> weight_sums;  // sum of D_t before round t
};

AdaBoostModel adaboost_train(const LabeledDataset& data, std::size_t rounds,
                             AdaBoostTrace* trace = nullptr);
/// Signed margin sum(alpha_t h_t(x)) / sum(alpha_t).
double adaboost_margin(const AdaBoostModel& model, std::span<const double> x);
/// Class id; a zero margin resolves to class 0.
std::size_t adaboost_predict(const AdaBoostModel& model, std::span<const double> x);

/// Degenerate bag member produced when a bootstrap sample holds one class.
struct ConstantModel {
  std::size_t label = 0;
  friend bool operator==(const ConstantModel&, const ConstantModel&) = default;
};

using BaggingMember = std::variant<AdaBoostModel, ConstantModel>;

enum class BaseLearner { Stump, AdaBoost };
BaseLearner parse_base_learner(const std::string& text);
const char* base_learner_name(BaseLearner base) noexcept;

struct BaggingConfig {
  std::size_t bags = 25;
  BaseLearner base = BaseLearner::Stump;
  std::size_t rounds = 10;  // AdaBoost base only
  std::uint64_t seed = 1;
  bool identity_resample = false;  // test hook: every bag is the dataset itself
};

struct BaggingModel {
  std::vector<BaggingMember> members;
  std::uint64_t seed = 0;
  std::size_t num_features = 0;
  std::vector<std::string> class_names;

  friend bool operator==(const BaggingModel&, const BaggingModel&) = default;
};

BaggingModel bagging_train(const LabeledDataset& data, const BaggingConfig& cfg);
/// Fraction of members voting for class 1.
double bagging_score(const BaggingModel& model, std::span<const double> x);
std::size_t bagging_predict(const BaggingModel& model, std::span<const double> x);

/// Per-feature z-scoring; zero deviations are replaced by 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  std::vector<double> apply(std::span<const double> x) const;
  Matrix apply(const Matrix& x) const;
  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

Standardizer fit_standardizer(const Matrix& x);

/// Stage 1 flags anomalies; stage 2 names them. class_names[0] is "normal"
/// and class id c >= 1 corresponds to stage-2 output c - 1.
struct TwoStageModel {
  OneClassModel stage1;
  Standardizer scaler;
  models::MlpModel stage2;
  std::vector<std::string> class_names;
  std::uint64_t schema_id = 0;

  friend bool operator==(const TwoStageModel&, const TwoStageModel&) = default;
};

struct TwoStageConfig {
  bool knn = false;
  std::size_t k = 5;
  double threshold_percentile = 95.0;
  models::TrainConfig stage2;
};

/// Trains stage 1 on rows labelled 0 and stage 2 on the remaining rows.
TwoStageModel train_two_stage(const LabeledDataset& data, const TwoStageConfig& cfg);

struct TwoStageVerdict {
  double score = 0.0;
  std::size_t label = 0;  // 0 = normal
};

/// `stage2_calls`, when given, is incremented each time stage 2 runs.
TwoStageVerdict two_stage_detect(const TwoStageModel& model, std::span<const double> x,
                                 std::size_t* stage2_calls = nullptr);

}  // namespace rvvt::detect
