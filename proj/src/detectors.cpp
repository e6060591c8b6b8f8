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

#include "rvvt/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rvvt/error.hpp"
#include "rvvt/rng.hpp"

namespace rvvt::detect {

namespace {

void check_percentile(double p) {
  if (!(p > 0.0 && p <= 100.0)) fail(ErrorCode::InvalidArgument, "threshold percentile must be in (0, 100]");
}

void check_dims(std::size_t expected, std::size_t got) {
  if (expected != got)
    fail(ErrorCode::ShapeMismatch, "expected " + std::to_string(expected) + " features, got " + std::to_string(got));
}

double gaussian_score(const GaussianOneClass& m, std::span<const double> x) {
  double s = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - m.mean[j];
    s += d * d / m.variances[j];
  }
  return s;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

// Mean of the k smallest distances from x to reference rows, skipping `skip`.
double knn_mean_distance(const Matrix& ref, std::size_t k, std::span<const double> x, std::size_t skip) {
  std::vector<double> d;
  d.reserve(ref.rows());
  for (std::size_t i = 0; i < ref.rows(); ++i)
    if (i != skip) d.push_back(distance(ref.row(i), x));
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += d[i];
  return s / static_cast<double>(k);
}

void check_binary(const LabeledDataset& data) {
  data.validate();
  bool seen[2] = {false, false};
  for (auto l : data.labels) {
    if (l > 1) fail(ErrorCode::InvalidArgument, "binary learner needs class ids 0 and 1, found " + std::to_string(l));
    seen[l] = true;
  }
  if (!seen[0] || !seen[1]) fail(ErrorCode::SingleClass, "training data holds a single class");
}

struct StumpChoice {
  Stump stump;
  double error = 1.0;
  bool found = false;
};

// Exhaustive stump search. Candidates are visited in (feature, threshold,
// polarity +1 then -1) order and only a strictly smaller error replaces the
// incumbent, which makes ties deterministic.
StumpChoice best_stump(const Matrix& x, std::span<const int> y, std::span<const double> w,
                       const std::vector<std::vector<std::size_t>>& order) {
  StumpChoice best;
  double pos_total = 0.0, neg_total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] > 0 ? pos_total : neg_total) += w[i];
  for (std::size_t f = 0; f < x.cols(); ++f) {
    const auto& idx = order[f];
    double pos_le = 0.0, neg_le = 0.0;
    for (std::size_t p = 0; p + 1 < idx.size(); ++p) {
      const std::size_t i = idx[p];
      (y[i] > 0 ? pos_le : neg_le) += w[i];
      const double lo = x(i, f), hi = x(idx[p + 1], f);
      if (lo == hi) continue;
      const double t = lo + (hi - lo) / 2.0;
      const double err_plus = pos_le + (neg_total - neg_le);
      const double err_minus = neg_le + (pos_total - pos_le);
      if (err_plus < best.error) best = {{f, t, 1}, err_plus, true};
      if (err_minus < best.error) best = {{f, t, -1}, err_minus, true};
    }
  }
  return best;
}

std::size_t vote(const BaggingMember& m, std::span<const double> x) {
  if (const auto* c = std::get_if<ConstantModel>(&m)) return c->label;
  return adaboost_predict(std::get<AdaBoostModel>(m), x);
}

}  // namespace

double percentile(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorCode::TooFewSamples, "percentile of an empty set");
  if (!(p >= 0.0 && p <= 100.0)) fail(ErrorCode::InvalidArgument, "percentile must be in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

GaussianOneClass fit_oneclass_gaussian(const Matrix& normal, double threshold_percentile) {
  check_percentile(threshold_percentile);
  if (normal.rows() < 2) fail(ErrorCode::TooFewSamples, "Gaussian one-class needs at least 2 samples");
  const std::size_t n = normal.rows(), d = normal.cols();
  GaussianOneClass m;
  m.mean.assign(d, 0.0);
  m.variances.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.mean[j] += normal(i, j);
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m.variances[j] += (normal(i, j) - m.mean[j]) * (normal(i, j) - m.mean[j]);
  for (auto& v : m.variances) v = std::max(v / static_cast<double>(n), kVarianceFloor);
  m.threshold_percentile = threshold_percentile;
  for (std::size_t i = 0; i < n; ++i) m.training_scores.push_back(gaussian_score(m, normal.row(i)));
  m.threshold = percentile(m.training_scores, threshold_percentile);
  return m;
}

KnnOneClass fit_knn_oneclass(const Matrix& normal, std::size_t k, double threshold_percentile) {
  check_percentile(threshold_percentile);
  if (k == 0) fail(ErrorCode::InvalidK, "k must be >= 1");
  if (normal.rows() <= k)
    fail(ErrorCode::TooFewSamples, "kNN one-class needs more than k=" + std::to_string(k) + " samples");
  KnnOneClass m;
  m.reference = normal;
  m.k = k;
  m.threshold_percentile = threshold_percentile;
  for (std::size_t i = 0; i < normal.rows(); ++i)
    m.training_scores.push_back(knn_mean_distance(normal, k, normal.row(i), i));
  m.threshold = percentile(m.training_scores, threshold_percentile);
  return m;
}

std::size_t oneclass_dims(const OneClassModel& model) noexcept {
  if (const auto* g = std::get_if<GaussianOneClass>(&model)) return g->mean.size();
  return std::get<KnnOneClass>(model).reference.cols();
}

double oneclass_threshold(const OneClassModel& model) noexcept {
  return std::visit([](const auto& m) { return m.threshold; }, model);
}

double oneclass_score(const OneClassModel& model, std::span<const double> x) {
  check_dims(oneclass_dims(model), x.size());
  if (const auto* g = std::get_if<GaussianOneClass>(&model)) return gaussian_score(*g, x);
  const auto& knn = std::get<KnnOneClass>(model);
  return knn_mean_distance(knn.reference, knn.k, x, knn.reference.rows());
}

Detection detect(const OneClassModel& model, std::span<const double> x) {
  const double s = oneclass_score(model, x);
  return {s, s > oneclass_threshold(model)};
}

AdaBoostModel adaboost_train(const LabeledDataset& data, std::size_t rounds, AdaBoostTrace* trace) {
  check_binary(data);
  const Matrix& x = data.features;
  const std::size_t n = x.rows();
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == 1 ? 1 : -1;

  std::vector<std::vector<std::size_t>> order(x.cols());
  for (std::size_t f = 0; f < x.cols(); ++f) {
    order[f].resize(n);
    std::iota(order[f].begin(), order[f].end(), 0);
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](std::size_t a, std::size_t b) { return x(a, f) < x(b, f); });
  }

  AdaBoostModel model;
  model.num_features = x.cols();
  model.class_names = data.class_names;
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> margin(n, 0.0);

  for (std::size_t t = 0; t < rounds; ++t) {
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
    const StumpChoice choice = best_stump(x, y, w, order);
    if (!choice.found) break;
    // Recompute the weighted error directly; the sweep's running sums can
    // differ from it in the last bits.
    double eps = 0.0;
    std::vector<int> h(n);
    for (std::size_t i = 0; i < n; ++i) {
      h[i] = choice.stump.predict(x.row(i));
      if (h[i] != y[i]) eps += w[i];
    }
    if (eps >= 0.5) break;
    const double e = std::max(eps, kMinEpsilon);
    const double alpha = 0.5 * std::log((1.0 - e) / e);
    model.stumps.push_back(choice.stump);
    model.alphas.push_back(alpha);

    std::size_t wrong = 0;
    for (std::size_t i = 0; i < n; ++i) {
      margin[i] += alpha * h[i];
      if ((margin[i] > 0 ? 1 : -1) != y[i]) ++wrong;
    }
    if (trace != nullptr) {
      trace->epsilons.push_back(eps);
      trace->weight_sums.push_back(wsum);
      trace->training_error.push_back(static_cast<double>(wrong) / static_cast<double>(n));
    }
    if (eps == 0.0) break;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(-alpha * y[i] * h[i]);
      z += w[i];
    }
    for (auto& v : w) v /= z;
  }
  return model;
}

double adaboost_margin(const AdaBoostModel& model, std::span<const double> x) {
  if (model.stumps.empty()) fail(ErrorCode::EmptyEnsemble, "AdaBoost model has no stumps");
  check_dims(model.num_features, x.size());
  double f = 0.0, total = 0.0;
  for (std::size_t t = 0; t < model.stumps.size(); ++t) {
    f += model.alphas[t] * model.stumps[t].predict(x);
    total += model.alphas[t];
  }
  return f / total;
}

std::size_t adaboost_predict(const AdaBoostModel& model, std::span<const double> x) {
  return adaboost_margin(model, x) > 0.0 ? 1 : 0;
}

BaseLearner parse_base_learner(const std::string& text) {
  if (text == "stump") return BaseLearner::Stump;
  if (text == "adaboost") return BaseLearner::AdaBoost;
  fail(ErrorCode::InvalidArgument, "unknown base learner '" + text + "' (stump|adaboost)");
}

const char* base_learner_name(BaseLearner base) noexcept {
  return base == BaseLearner::Stump ? "stump" : "adaboost";
}

BaggingModel bagging_train(const LabeledDataset& data, const BaggingConfig& cfg) {
  if (cfg.bags == 0) fail(ErrorCode::InvalidArgument, "bagging needs at least one bag");
  check_binary(data);
  const std::size_t n = data.size();
  BaggingModel model;
  model.seed = cfg.seed;
  model.num_features = data.num_features();
  model.class_names = data.class_names;
  std::vector<std::size_t> rows(n);
  for (std::size_t b = 0; b < cfg.bags; ++b) {
    if (cfg.identity_resample) {
      std::iota(rows.begin(), rows.end(), 0);
    } else {
      Rng rng(mix_seed(cfg.seed, b));
      for (auto& r : rows) r = rng.below(n);
    }
    const LabeledDataset bag = data.subset(rows);
    const auto ones = static_cast<std::size_t>(std::count(bag.labels.begin(), bag.labels.end(), 1u));
    const std::size_t majority = ones * 2 > n ? 1 : 0;
    if (ones == 0 || ones == n) {
      model.members.emplace_back(ConstantModel{majority});
      continue;
    }
    AdaBoostModel m = adaboost_train(bag, cfg.base == BaseLearner::Stump ? 1 : cfg.rounds);
    if (m.stumps.empty())
      model.members.emplace_back(ConstantModel{majority});
    else
      model.members.emplace_back(std::move(m));
  }
  return model;
}

double bagging_score(const BaggingModel& model, std::span<const double> x) {
  if (model.members.empty()) fail(ErrorCode::EmptyEnsemble, "bagging model has no members");
  check_dims(model.num_features, x.size());
  std::size_t ones = 0;
  for (const auto& m : model.members) ones += vote(m, x);
  return static_cast<double>(ones) / static_cast<double>(model.members.size());
}

std::size_t bagging_predict(const BaggingModel& model, std::span<const double> x) {
  // Strict majority for class 1; an even split goes to the lower label.
  return bagging_score(model, x) > 0.5 ? 1 : 0;
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  check_dims(mean.size(), x.size());
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / scale[j];
  return out;
}

Matrix Standardizer::apply(const Matrix& x) const {
  check_dims(mean.size(), x.cols());
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = (x(i, j) - mean[j]) / scale[j];
  return out;
}

Standardizer fit_standardizer(const Matrix& x) {
  if (x.rows() == 0) fail(ErrorCode::TooFewSamples, "cannot standardize an empty matrix");
  Standardizer s;
  s.mean.assign(x.cols(), 0.0);
  s.scale.assign(x.cols(), 0.0);
  const auto n = static_cast<double>(x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) s.mean[j] += x(i, j);
  for (auto& m : s.mean) m /= n;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) s.scale[j] += (x(i, j) - s.mean[j]) * (x(i, j) - s.mean[j]);
  for (auto& v : s.scale) {
    v = std::sqrt(v / n);
    if (v == 0.0) v = 1.0;
  }
  return s;
}

TwoStageModel train_two_stage(const LabeledDataset& data, const TwoStageConfig& cfg) {
  data.validate();
  if (data.num_classes() < 2) fail(ErrorCode::SingleClass, "two-stage model needs normal and anomaly classes");
  std::vector<std::size_t> normal_rows, anomaly_rows;
  for (std::size_t i = 0; i < data.size(); ++i) (data.labels[i] == 0 ? normal_rows : anomaly_rows).push_back(i);
  if (normal_rows.empty() || anomaly_rows.empty())
    fail(ErrorCode::SingleClass, "two-stage training needs both normal (0) and anomalous rows");

  TwoStageModel model;
  model.class_names = data.class_names;
  model.schema_id = data.vocab_id;
  const Matrix normal = data.features.select_rows(normal_rows);
  if (cfg.knn)
    model.stage1 = fit_knn_oneclass(normal, cfg.k, cfg.threshold_percentile);
  else
    model.stage1 = fit_oneclass_gaussian(normal, cfg.threshold_percentile);

  LabeledDataset anomalies = data.subset(anomaly_rows);
  for (auto& l : anomalies.labels) --l;
  anomalies.class_names.erase(anomalies.class_names.begin());
  model.scaler = fit_standardizer(anomalies.features);
  anomalies.features = model.scaler.apply(anomalies.features);
  model.stage2 = models::train_mlp(anomalies, cfg.stage2).model;
  return model;
}

TwoStageVerdict two_stage_detect(const TwoStageModel& model, std::span<const double> x,
                                 std::size_t* stage2_calls) {
  const Detection d = detect(model.stage1, x);
  if (!d.is_anomalous) return {d.score, 0};
  if (stage2_calls != nullptr) ++*stage2_calls;
  const auto out = models::forward(model.stage2, model.scaler.apply(x));
  // The head may be wider than the anomaly class list (minimum width 2).
  const std::size_t valid = std::min(out.size(), model.class_names.size() - 1);
  return {d.score, models::argmax(std::span<const double>(out).first(valid)) + 1};
}

}  // namespace rvvt::detect
