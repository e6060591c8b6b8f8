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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rvvt/feature_selection.hpp"
#include "rvvt/rng.hpp"
#include "test_support.hpp"

#ifdef RVVT_HAVE_EIGEN
#include <Eigen/Dense>
#endif

using namespace rvvt;
using namespace rvvt::fs;
using rvvt::testing::code_of;

namespace {

using Labels = std::vector<std::size_t>;

Matrix column(std::vector<double> values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  // Correlated columns so the spectrum is not flat.
  for (std::size_t r = 0; r < rows; ++r) {
    double shared = rng.normal();
    for (std::size_t c = 0; c < cols; ++c)
      m(r, c) = rng.normal() * (1.0 + static_cast<double>(c)) + shared * 0.5;
  }
  return m;
}

double reconstruction_error(const PcaModel& model, const Matrix& x) {
  auto back = pca_reconstruct(model, pca_transform(model, x));
  double err = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    double d = back.data()[i] - x.data()[i];
    err += d * d;
  }
  return err;
}

}  // namespace

TEST_CASE("fisher score hand cases") {
  CHECK(fisher_score(column({0, 1, 2, 3}), Labels{0, 0, 1, 1}).scores[0] ==
        doctest::Approx(4.0).epsilon(1e-12));
  auto inf = fisher_score(column({0, 0, 1, 1}), Labels{0, 0, 1, 1});
  CHECK(inf.scores[0] == std::numeric_limits<double>::infinity());
  CHECK(fisher_score(column({5, 5, 5, 5}), Labels{0, 0, 1, 1}).scores[0] == 0.0);
  CHECK(code_of([] { fisher_score(column({1, 2}), Labels{0, 0}); }) == ErrorCode::SingleClass);
  CHECK(code_of([] { fisher_score(column({1, 2}), Labels{0}); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("infinite scores rank first and budgets cut exactly") {
  Matrix x = Matrix::from_rows({{0, 0, 5}, {1, 0, 5}, {2, 1, 5}, {3, 1, 5}});
  auto report = fisher_score(x, Labels{0, 0, 1, 1});
  CHECK(report.ranking == std::vector<std::size_t>{1, 0, 2});
  CHECK(select_events(report, 1) == std::vector<std::size_t>{1});
  CHECK(select_events(report, 2).size() == 2);
  CHECK(select_events(report, 10) == report.ranking);
  CHECK(code_of([&] { select_events(report, 0); }) == ErrorCode::InvalidArgument);
  std::vector<double> ties{1.0, 2.0, 1.0, 2.0};
  CHECK(rank_scores(ties) == std::vector<std::size_t>{1, 3, 0, 2});
}

TEST_CASE("pearson hand cases") {
  std::vector<double> x{1, 2, 3, 4};
  std::vector<double> neg{-1, -2, -3, -4};
  CHECK(pearson_corr(x, x) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson_corr(x, neg) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pearson_corr(std::vector<double>{1, 2, 3}, std::vector<double>{1, 3, 2}) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(code_of([&] { pearson_corr(x, std::vector<double>{2, 2, 2, 2}); }) ==
        ErrorCode::ConstantInput);
  CHECK(code_of([&] { pearson_corr(x, std::vector<double>{1, 2}); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("correlation filter drops redundant columns") {
  Matrix x = Matrix::from_rows({{1, 2, 0}, {2, 4, 1}, {3, 6, 0}, {4, 8, 1}});
  std::vector<std::size_t> ranking{0, 1, 2};
  CHECK(correlation_filter(x, ranking, 0.95) == std::vector<std::size_t>{0, 2});
}

TEST_CASE("mutual information hand cases") {
  CHECK(mutual_information(column({0, 0, 1, 1}), Labels{0, 0, 1, 1}, 2).scores[0] ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(std::fabs(mutual_information(column({0, 1, 0, 1}), Labels{0, 0, 1, 1}, 2).scores[0]) <
        1e-12);
  CHECK(mutual_information(column({3, 3, 3, 3}), Labels{0, 0, 1, 1}, 4).scores[0] == 0.0);
  CHECK(code_of([] { mutual_information(column({0, 1}), Labels{0, 1}, 1); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("pca on a line has one non-zero eigenvalue") {
  Matrix x = Matrix::from_rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  auto model = pca_fit(x, 2);
  // Population variance per axis is 1.25; the covariance is 1.25 * [[1,1],[1,1]].
  CHECK(model.eigenvalues[0] == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(std::fabs(model.eigenvalues[1]) < 1e-12);
  auto one = pca_fit(x, 1);
  CHECK(reconstruction_error(one, x) < 1e-18);
  CHECK(one.components(0, 0) > 0.0);
  CHECK(code_of([&] { pca_fit(x, 0); }) == ErrorCode::InvalidK);
  CHECK(code_of([&] { pca_fit(x, 3); }) == ErrorCode::InvalidK);
}

TEST_CASE("pca full basis reconstructs and centres the mean") {
  Rng rng(5);
  Matrix x = random_matrix(rng, 30, 6);
  auto model = pca_fit(x, 6);
  auto back = pca_reconstruct(model, pca_transform(model, x));
  for (std::size_t i = 0; i < x.data().size(); ++i)
    CHECK(std::fabs(back.data()[i] - x.data()[i]) < 1e-9);
  Matrix mean_row(1, 6);
  for (std::size_t c = 0; c < 6; ++c) mean_row(0, c) = model.mean[c];
  const Matrix centred = pca_transform(model, mean_row);
  for (double s : centred.data()) CHECK(std::fabs(s) < 1e-9);

  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k <= 6; ++k) {
    double err = reconstruction_error(pca_fit(x, k), x);
    CHECK(err <= prev + 1e-9);
    prev = err;
  }
}

TEST_CASE("jacobi agrees with a reference eigensolver") {
#ifdef RVVT_HAVE_EIGEN
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t d = 3 + rng.below(8);
    Matrix a(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = rng.normal();
    auto mine = jacobi_eigen(a);
    std::vector<double> values = mine.values;
    std::sort(values.begin(), values.end());

    Eigen::MatrixXd e(d, d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) e(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
    for (std::size_t i = 0; i < d; ++i)
      CHECK(values[i] == doctest::Approx(solver.eigenvalues()(static_cast<Eigen::Index>(i)))
                             .epsilon(1e-9));
    // A v = lambda v for every returned pair.
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t i = 0; i < d; ++i) {
        double av = 0.0;
        for (std::size_t k = 0; k < d; ++k) av += a(i, k) * mine.vectors(k, j);
        CHECK(std::fabs(av - mine.values[j] * mine.vectors(i, j)) < 1e-9);
      }
  }
#else
  MESSAGE("Eigen not found; reference comparison skipped");
#endif
}

TEST_CASE("score csv has one row per feature") {
  auto report = fisher_score(column({0, 1, 2, 3}), Labels{0, 0, 1, 1});
  report.feature_names = {"mean.L3_MISS/L1D_MISS"};
  auto text = format_score_csv(report);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
  CHECK(text.find("L3_MISS/L1D_MISS") != std::string::npos);
}
