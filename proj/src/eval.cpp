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

#include "rvvt/eval.hpp"

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>

#include "json.hpp"

#include "rvvt/dataset.hpp"
#include "rvvt/error.hpp"

namespace rvvt::eval {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::optional<double> roc_auc(std::span<const double> scores, std::span<const bool> positive) {
  if (scores.size() != positive.size()) fail(ErrorCode::LengthMismatch, "scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), true));
  const std::size_t neg = positive.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  // Twice the area in units of 1/(pos*neg), accumulated exactly.
  std::uint64_t twice_area = 0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < idx.size();) {
    const std::size_t prev_tp = tp, prev_fp = fp;
    // All items sharing a score enter the ROC together.
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) {
      (positive[idx[j]] ? tp : fp) += 1;
      ++j;
    }
    twice_area += static_cast<std::uint64_t>(fp - prev_fp) * (tp + prev_tp);
    i = j;
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

EvalReport eval_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> truth,
                        std::span<const double> scores, std::size_t positive_class,
                        std::vector<std::string> class_names) {
  if (predictions.size() != truth.size())
    fail(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions for " +
                                        std::to_string(truth.size()) + " labels");
  if (!scores.empty() && scores.size() != truth.size())
    fail(ErrorCode::LengthMismatch, "score count does not match label count");
  std::size_t max_label = 0;
  for (auto v : predictions) max_label = std::max(max_label, v);
  for (auto v : truth) max_label = std::max(max_label, v);
  if (class_names.empty()) class_names = default_class_names(std::max<std::size_t>(2, max_label + 1));
  if (max_label >= class_names.size())
    fail(ErrorCode::InvalidArgument, "class id " + std::to_string(max_label) + " has no name");
  if (positive_class >= class_names.size())
    fail(ErrorCode::UnknownPositiveClass, "positive class " + std::to_string(positive_class) + " is not among " +
                                              std::to_string(class_names.size()) + " classes");

  EvalReport r;
  r.samples = truth.size();
  r.positive_class = positive_class;
  const std::size_t k = class_names.size();
  r.class_names = std::move(class_names);
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  std::size_t correct = 0, tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++r.confusion[truth[i]][predictions[i]];
    correct += truth[i] == predictions[i];
    const bool t = truth[i] == positive_class, p = predictions[i] == positive_class;
    tp += t && p;
    fp += !t && p;
    fn += t && !p;
    tn += !t && !p;
  }
  r.accuracy = ratio(correct, truth.size());
  r.precision = ratio(tp, tp + fp);
  r.recall = ratio(tp, tp + fn);
  r.false_positive_rate = ratio(fp, fp + tn);
  r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
  if (!scores.empty()) {
    // std::vector<bool> is not contiguous, so the flags live in a plain array.
    auto pos = std::make_unique<bool[]>(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) pos[i] = truth[i] == positive_class;
    r.auc = roc_auc(scores, std::span<const bool>(pos.get(), truth.size()));
  }
  return r;
}

std::string format_report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["samples"] = report.samples;
  j["positive_class"] = report.class_names.at(report.positive_class);
  j["class_names"] = report.class_names;
  j["accuracy"] = report.accuracy;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  j["false_positive_rate"] = report.false_positive_rate;
  if (report.auc) j["auc"] = *report.auc;
  j["confusion"] = report.confusion;
  return j.dump(2) + "\n";
}

}  // namespace rvvt::eval
