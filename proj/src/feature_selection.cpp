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

#include "rvvt/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "csv.hpp"
#include "rvvt/error.hpp"

namespace rvvt::fs {

namespace {

void check_shape(const Matrix& x, std::span<const std::size_t> y) {
  if (x.rows() != y.size())
    fail(ErrorCode::ShapeMismatch, std::to_string(x.rows()) + " rows but " +
                                       std::to_string(y.size()) + " labels");
}

FeatureScoreReport make_report(ScoreMethod method, std::vector<double> scores) {
  FeatureScoreReport r;
  r.method = method;
  r.ranking = rank_scores(scores);
  r.scores = std::move(scores);
  return r;
}

std::size_t class_count(std::span<const std::size_t> y) {
  return y.empty() ? 0 : *std::max_element(y.begin(), y.end()) + 1;
}

}  // namespace

const char* method_name(ScoreMethod method) noexcept {
  switch (method) {
    case ScoreMethod::Fisher: return "fisher";
    case ScoreMethod::Pearson: return "pearson";
    case ScoreMethod::MutualInfo: return "mutual_info";
  }
  return "fisher";
}

std::vector<std::size_t> rank_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

FeatureScoreReport fisher_score(const Matrix& x, std::span<const std::size_t> y) {
  check_shape(x, y);
  const std::size_t n_classes = class_count(y);
  std::vector<std::size_t> n_c(n_classes, 0);
  for (std::size_t label : y) ++n_c[label];
  std::size_t present = 0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (n_c[c] == 0) continue;
    ++present;
    if (n_c[c] < 2)
      fail(ErrorCode::TooFewSamples, "class " + std::to_string(c) + " has a single sample");
  }
  if (present < 2) fail(ErrorCode::SingleClass, "Fisher score needs two or more classes");

  const std::size_t n = x.rows();
  std::vector<double> scores(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::vector<double> sum(n_classes, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum[y[i]] += x(i, j);
      total += x(i, j);
    }
    const double mu = total / static_cast<double>(n);
    std::vector<double> mu_c(n_classes, 0.0), ss(n_classes, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c)
      if (n_c[c] > 0) mu_c[c] = sum[c] / static_cast<double>(n_c[c]);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x(i, j) - mu_c[y[i]];
      ss[y[i]] += d * d;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (n_c[c] == 0) continue;
      const double nc = static_cast<double>(n_c[c]);
      num += nc * (mu_c[c] - mu) * (mu_c[c] - mu);
      den += ss[c];  // n_c * population variance == sum of squared deviations
    }
    if (den == 0.0)
      scores[j] = num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    else
      scores[j] = num / den;
  }
  return make_report(ScoreMethod::Fisher, std::move(scores));
}

double pearson_corr(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    fail(ErrorCode::LengthMismatch, "series lengths differ (" + std::to_string(x.size()) +
                                        " vs " + std::to_string(y.size()) + ")");
  if (x.size() < 2) fail(ErrorCode::LengthMismatch, "correlation needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) fail(ErrorCode::ConstantInput, "constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

FeatureScoreReport pearson_scores(const Matrix& x, std::span<const std::size_t> y) {
  check_shape(x, y);
  std::vector<double> yd(y.begin(), y.end());
  std::vector<double> scores(x.cols(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto col = x.column(j);
    try {
      scores[j] = std::fabs(pearson_corr(col, yd));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ConstantInput) throw;
      scores[j] = 0.0;
    }
  }
  return make_report(ScoreMethod::Pearson, std::move(scores));
}

std::vector<std::size_t> correlation_filter(const Matrix& x,
                                            std::span<const std::size_t> ranking,
                                            double max_abs_r) {
  std::vector<std::size_t> kept;
  std::vector<std::vector<double>> kept_cols;
  for (std::size_t idx : ranking) {
    auto col = x.column(idx);
    bool redundant = false;
    for (const auto& other : kept_cols) {
      try {
        if (std::fabs(pearson_corr(col, other)) > max_abs_r) {
          redundant = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ConstantInput) throw;
      }
    }
    if (!redundant) {
      kept.push_back(idx);
      kept_cols.push_back(std::move(col));
    }
  }
  return kept;
}

FeatureScoreReport mutual_information(const Matrix& x, std::span<const std::size_t> y,
                                      std::size_t bins) {
  check_shape(x, y);
  if (bins < 2) fail(ErrorCode::InvalidArgument, "mutual information needs bins >= 2");
  const std::size_t n = x.rows();
  const std::size_t n_classes = class_count(y);
  std::vector<double> scores(x.cols(), 0.0);
  if (n == 0) return make_report(ScoreMethod::MutualInfo, std::move(scores));

  std::vector<std::size_t> class_n(n_classes, 0);
  for (std::size_t label : y) ++class_n[label];
  const double total = static_cast<double>(n);

  std::vector<std::size_t> joint(bins * n_classes);
  std::vector<std::size_t> bin_n(bins);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double lo = x(0, j), hi = x(0, j);
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, x(i, j));
      hi = std::max(hi, x(i, j));
    }
    std::fill(joint.begin(), joint.end(), 0);
    std::fill(bin_n.begin(), bin_n.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t b = 0;
      if (hi > lo) {
        const double t = (x(i, j) - lo) / (hi - lo) * static_cast<double>(bins);
        b = std::min(static_cast<std::size_t>(t), bins - 1);
      }
      ++joint[b * n_classes + y[i]];
      ++bin_n[b];
    }
    double mi = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
      for (std::size_t c = 0; c < n_classes; ++c) {
        const std::size_t nbc = joint[b * n_classes + c];
        if (nbc == 0) continue;
        const double ratio = (static_cast<double>(nbc) * total) /
                             (static_cast<double>(bin_n[b]) * static_cast<double>(class_n[c]));
        mi += static_cast<double>(nbc) / total * std::log(ratio);
      }
    }
    scores[j] = std::max(0.0, mi);
  }
  return make_report(ScoreMethod::MutualInfo, std::move(scores));
}

std::vector<std::size_t> select_events(const FeatureScoreReport& report, std::size_t budget) {
  if (budget == 0) fail(ErrorCode::InvalidArgument, "counter budget must be at least 1");
  const std::size_t take = std::min(budget, report.ranking.size());
  return {report.ranking.begin(), report.ranking.begin() + static_cast<std::ptrdiff_t>(take)};
}

SymmetricEigen jacobi_eigen(const Matrix& input, double tol, int max_sweeps) {
  const std::size_t d = input.rows();
  if (input.cols() != d) fail(ErrorCode::ShapeMismatch, "eigen-decomposition needs a square matrix");
  Matrix a = input;
  Matrix v(d, d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v(i, i) = 1.0;

  double norm = 0.0;
  for (double e : a.data()) norm += e * e;
  norm = std::sqrt(norm);
  const double target = tol * (norm > 0.0 ? norm : 1.0);

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= target) break;

    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  SymmetricEigen out;
  out.values.resize(d);
  for (std::size_t i = 0; i < d; ++i) out.values[i] = a(i, i);
  out.vectors = std::move(v);
  return out;
}

PcaModel pca_fit(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows(), d = x.cols();
  if (k < 1 || k > std::min(n, d))
    fail(ErrorCode::InvalidK, "k=" + std::to_string(k) + " outside [1, min(" +
                                  std::to_string(n) + ", " + std::to_string(d) + ")]");
  PcaModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) model.mean[j] += x(i, j);
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix cov(d, d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < d; ++p) {
      const double dp = x(i, p) - model.mean[p];
      for (std::size_t q = p; q < d; ++q) cov(p, q) += dp * (x(i, q) - model.mean[q]);
    }
  }
  for (std::size_t p = 0; p < d; ++p) {
    for (std::size_t q = p; q < d; ++q) {
      cov(p, q) /= static_cast<double>(n);
      cov(q, p) = cov(p, q);
    }
  }

  const SymmetricEigen eig = jacobi_eigen(cov);
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return eig.values[a] > eig.values[b]; });

  model.components = Matrix(k, d);
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t col = order[r];
    model.eigenvalues.push_back(std::max(0.0, eig.values[col]));
    std::size_t lead = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::fabs(eig.vectors(j, col)) > std::fabs(eig.vectors(lead, col))) lead = j;
    const double sign = eig.vectors(lead, col) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < d; ++j) model.components(r, j) = sign * eig.vectors(j, col);
  }
  return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.dim())
    fail(ErrorCode::ShapeMismatch, "PCA expects " + std::to_string(model.dim()) + " features");
  Matrix out(x.rows(), model.k(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t r = 0; r < model.k(); ++r) {
      double s = 0.0;
      for (std::size_t j = 0; j < model.dim(); ++j)
        s += (x(i, j) - model.mean[j]) * model.components(r, j);
      out(i, r) = s;
    }
  return out;
}

Matrix pca_reconstruct(const PcaModel& model, const Matrix& scores) {
  if (scores.cols() != model.k())
    fail(ErrorCode::ShapeMismatch, "PCA scores must have " + std::to_string(model.k()) + " columns");
  Matrix out(scores.rows(), model.dim(), 0.0);
  for (std::size_t i = 0; i < scores.rows(); ++i)
    for (std::size_t j = 0; j < model.dim(); ++j) {
      double s = model.mean[j];
      for (std::size_t r = 0; r < model.k(); ++r) s += scores(i, r) * model.components(r, j);
      out(i, j) = s;
    }
  return out;
}

std::string format_score_csv(const FeatureScoreReport& report) {
  std::string out = "rank,feature,score\n";
  for (std::size_t r = 0; r < report.ranking.size(); ++r) {
    const std::size_t idx = report.ranking[r];
    const std::string name =
        idx < report.feature_names.size() ? report.feature_names[idx] : std::to_string(idx);
    out += std::to_string(r + 1) + "," + name + "," + csv::format_double(report.scores[idx]) + "\n";
  }
  return out;
}

void write_score_csv(const std::string& path, const FeatureScoreReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << format_score_csv(report);
}

}  // namespace rvvt::fs
