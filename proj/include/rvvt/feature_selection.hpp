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
#include <span>
#include <string>
#include <vector>

#include "rvvt/matrix.hpp"

namespace rvvt::fs {

enum class ScoreMethod { Fisher, Pearson, MutualInfo };

const char* method_name(ScoreMethod method) noexcept;

struct FeatureScoreReport {
  ScoreMethod method = ScoreMethod::Fisher;
  std::vector<double> scores;
  /// Feature indices by descending score; equal scores keep ascending index.
  std::vector<std::size_t> ranking;
  std::vector<std::string> feature_names;  // optional, for reports
};

/// Ranks scores descending with ascending-index tie-break. +inf sorts first.
std::vector<std::size_t> rank_scores(std::span<const double> scores);

/// Between-class over within-class spread per feature, using population
/// variances. A zero denominator with a positive numerator scores +inf;
/// 0/0 scores 0. Needs two or more classes with at least two rows each.
FeatureScoreReport fisher_score(const Matrix& x, std::span<const std::size_t> y);

/// Sample Pearson correlation. Throws ConstantInput rather than returning
/// NaN when either series has zero variance, LengthMismatch when the lengths
/// differ or are below 2.
double pearson_corr(std::span<const double> x, std::span<const double> y);

/// |r| between each feature and the class id. Constant features score 0.
FeatureScoreReport pearson_scores(const Matrix& x, std::span<const std::size_t> y);

/// Walks `ranking` and keeps a feature only if its |r| against every feature
/// kept so far is at most `max_abs_r`. Constant features are kept.
std::vector<std::size_t> correlation_filter(const Matrix& x,
                                            std::span<const std::size_t> ranking,
                                            double max_abs_r);

/// Mutual information (natural log) between each equal-width-binned feature
/// and the labels. A constant feature lands in a single bin.
FeatureScoreReport mutual_information(const Matrix& x, std::span<const std::size_t> y,
                                      std::size_t bins = 10);

/// Top `budget` entries of the ranking (all of them when budget >= d).
std::vector<std::size_t> select_events(const FeatureScoreReport& report, std::size_t budget);

struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // k rows, each a unit direction over the d features
  std::vector<double> eigenvalues;  // descending, non-negative

  std::size_t k() const noexcept { return components.rows(); }
  std::size_t dim() const noexcept { return mean.size(); }

  friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

struct SymmetricEigen {
  std::vector<double> values;  // unsorted, as produced by the sweeps
  Matrix vectors;              // column j pairs with values[j]
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// `tol` times the matrix norm.
SymmetricEigen jacobi_eigen(const Matrix& a, double tol = 1e-12, int max_sweeps = 100);

/// PCA on the population covariance. Each component is sign-normalised so its
/// largest-magnitude entry is positive (first such entry on ties).
PcaModel pca_fit(const Matrix& x, std::size_t k);
Matrix pca_transform(const PcaModel& model, const Matrix& x);
Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores);

/// `rank,feature,score` with a 1-based rank.
void write_score_csv(const std::string& path, const FeatureScoreReport& report);
std::string format_score_csv(const FeatureScoreReport& report);

}  // namespace rvvt::fs
