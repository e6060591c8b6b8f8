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
#include <memory>

#include "json.hpp"
#include "rvvt/eval.hpp"
#include "rvvt/rng.hpp"
#include "test_support.hpp"

using namespace rvvt;
using namespace rvvt::eval;
using rvvt::testing::code_of;

using Ids = std::vector<std::size_t>;

TEST_CASE("perfect predictions") {
  Ids truth{0, 1, 1, 0, 1};
  std::vector<double> scores{0.1, 0.9, 0.8, 0.2, 0.7};
  auto r = eval_metrics(truth, truth, scores);
  CHECK(r.accuracy == 1.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK(r.false_positive_rate == 0.0);
  REQUIRE(r.auc.has_value());
  CHECK(*r.auc == 1.0);
  CHECK(r.confusion[1][1] == 3);
}

TEST_CASE("all predictions wrong") {
  Ids truth{0, 0, 1, 1};
  Ids pred{1, 1, 0, 0};
  auto r = eval_metrics(pred, truth);
  CHECK(r.accuracy == 0.0);
  CHECK(r.false_positive_rate == 1.0);
  CHECK(r.recall == 0.0);
  CHECK(r.precision == 0.0);
  CHECK(r.f1 == 0.0);
  CHECK_FALSE(r.auc.has_value());
}

TEST_CASE("hand computed binary metrics") {
  Ids truth{1, 1, 1, 0, 0, 0, 0, 0};
  Ids pred{1, 1, 0, 1, 0, 0, 0, 0};
  auto r = eval_metrics(pred, truth);
  CHECK(r.accuracy == doctest::Approx(6.0 / 8.0));
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(2.0 / 3.0));
  CHECK(r.false_positive_rate == doctest::Approx(1.0 / 5.0));
}

TEST_CASE("multi-class with an explicit positive class") {
  Ids truth{0, 1, 2, 2, 3};
  Ids pred{0, 2, 2, 2, 0};
  auto r = eval_metrics(pred, truth, {}, 2, {"normal", "ratio_shift", "spike", "phase_swap"});
  CHECK(r.confusion.size() == 4);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == 1.0);
  CHECK(code_of([&] { eval_metrics(pred, truth, {}, 7); }) == ErrorCode::UnknownPositiveClass);
  CHECK(code_of([&] { eval_metrics(pred, Ids{0}); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("auc") {
  std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  bool pos[] = {false, false, true, true};
  CHECK(*roc_auc(s, pos) == doctest::Approx(0.75));
  bool ties_pos[] = {false, true};
  std::vector<double> tied{0.5, 0.5};
  CHECK(*roc_auc(tied, ties_pos) == doctest::Approx(0.5));
  bool none[] = {false, false};
  CHECK_FALSE(roc_auc(tied, none).has_value());

  Rng rng(1000);
  std::vector<double> scores(1000);
  auto flags1000 = std::make_unique<bool[]>(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    scores[i] = rng.uniform();
    flags1000[i] = i % 2 == 0;
  }
  auto auc = roc_auc(scores, std::span<const bool>(flags1000.get(), 1000));
  CHECK(std::fabs(*auc - 0.5) <= 0.05);
}

TEST_CASE("report json carries every metric") {
  Ids truth{0, 1};
  std::vector<double> scores{0.2, 0.9};
  auto j = nlohmann::json::parse(format_report_json(eval_metrics(truth, truth, scores)));
  for (const char* key : {"samples", "accuracy", "precision", "recall", "f1",
                          "false_positive_rate", "auc", "confusion"})
    CHECK_MESSAGE(j.contains(key), key);
}
