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
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rvvt::eval {

/// Binary metrics are one-vs-rest for `positive_class`. Rates whose
/// denominator is zero are reported as 0.
struct EvalReport {
  std::size_t samples = 0;
  std::size_t positive_class = 1;
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> confusion;  // [truth][predicted]
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double false_positive_rate = 0.0;
  std::optional<double> auc;  // only with scores and both classes present
};

/// `scores` (optional) rank items by how strongly they belong to the
/// positive class.
EvalReport eval_metrics(std::span<const std::size_t> predictions, std::span<const std::size_t> truth,
                        std::span<const double> scores = {}, std::size_t positive_class = 1,
                        std::vector<std::string> class_names = {});

/// Trapezoidal area under the ROC swept over unique score thresholds.
/// Empty when either class is absent.
std::optional<double> roc_auc(std::span<const double> scores, std::span<const bool> positive);

/// JSON object with the report fields.
std::string format_report_json(const EvalReport& report);

}  // namespace rvvt::eval
