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
#include <sstream>

#include "rvvt/hpc.hpp"
#include "test_support.hpp"

using namespace rvvt;
using namespace rvvt::hpc;
using rvvt::testing::code_of;

namespace {

HpcTrace parse(const std::string& text) {
  std::istringstream in(text);
  return parse_trace_csv(in, "mem");
}

ErrorCode parse_error(const std::string& text) {
  return code_of([&] { parse(text); });
}

Matrix series(std::vector<double> v) {
  Matrix m(v.size(), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
  return m;
}

HpcTrace two_event(std::vector<std::uint64_t> l3, std::vector<std::uint64_t> l1) {
  HpcTrace t;
  t.sampling_period_ns = 1000;
  t.events = {"L3_MISS", "L1D_MISS"};
  t.rows = l3.size();
  for (std::size_t r = 0; r < l3.size(); ++r) {
    t.samples.push_back(l3[r]);
    t.samples.push_back(l1[r]);
  }
  return t;
}

}  // namespace

TEST_CASE("trace csv parses and round trips") {
  auto t = parse("t_ns,CYCLES,L3_MISS\n0,10,1\n1000000,12,0\n2000000,11,3\n");
  CHECK(t.rows == 3);
  CHECK(t.events.size() == 2);
  CHECK(t.sampling_period_ns == 1'000'000);
  CHECK(t.at(2, 1) == 3);
  CHECK(t.series("CYCLES") == std::vector<double>{10, 12, 11});
  CHECK(code_of([&] { t.event_index("NOPE"); }) == ErrorCode::UnknownEvent);
  CHECK(parse(format_trace_csv(t)) == t);

  auto labeled = parse("# label=mcf\nt_ns,CYCLES,anomaly\n5,1,0\n15,2,1\n25,3,1\n");
  CHECK(labeled.label == "mcf");
  CHECK(labeled.start_ns == 5);
  CHECK(labeled.mask == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(parse(format_trace_csv(labeled)) == labeled);
}

TEST_CASE("trace csv errors") {
  CHECK(parse_error("t_ns,A\n0,1\n10,1\n5,1\n") == ErrorCode::NonMonotonicTime);
  CHECK(parse_error("t_ns,A\n0,1\n10,-1\n") == ErrorCode::NegativeCount);
  CHECK(parse_error("t_ns,A,B\n0,1\n10,1,2\n") == ErrorCode::RaggedRow);
  CHECK(parse_error("t_ns,A\n0,1\n10,1\n30,1\n") == ErrorCode::NonUniformPeriod);
  CHECK(parse_error("t_ns,A\n0,1\n") == ErrorCode::NonUniformPeriod);
  CHECK(parse_error("time,A\n0,1\n10,1\n") == ErrorCode::BadHeader);
  CHECK(parse_error("t_ns,A,A\n0,1,1\n10,1,1\n") == ErrorCode::BadHeader);
  CHECK(parse_error("t_ns\n0\n10\n") == ErrorCode::BadHeader);
  CHECK(parse_error("t_ns,A\n0,x\n10,1\n") == ErrorCode::Format);
  CHECK(code_of([] { load_trace_csv("/nonexistent/trace.csv"); }) == ErrorCode::Io);
}

TEST_CASE("event names") {
  CHECK(is_canonical_event_name("L3_MISS"));
  CHECK(is_canonical_event_name("BRANCH_MISS"));
  CHECK_FALSE(is_canonical_event_name("l3-miss"));
  CHECK_FALSE(is_canonical_event_name(""));
}

TEST_CASE("derived ratios") {
  HpcTrace t;
  t.sampling_period_ns = 1;
  t.events = {"NUM", "DEN"};
  t.rows = 3;
  t.samples = {4, 2, 2, 2, 7, 0};
  CHECK(derive_ratio(t, "NUM", "DEN") == std::vector<double>{2.0, 1.0, 0.0});
  CHECK(derive_ratio(t, "NUM", "DEN", EpsilonPolicy::Epsilon) ==
        std::vector<double>{2.0, 1.0, 7.0});
  CHECK(derive_ratio(two_event({10, 10}, {100, 5}), "L3_MISS", "L1D_MISS") ==
        std::vector<double>{0.1, 2.0});
  CHECK(parse_epsilon_policy("epsilon") == EpsilonPolicy::Epsilon);
  CHECK(code_of([] { parse_epsilon_policy("maybe"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("window statistics") {
  CHECK(windowize(series({1, 2, 3}), {3, 1, kMean}).features(0, 0) == doctest::Approx(2.0));
  CHECK(windowize(series({4, 4, 4, 4}), {4, 1, kStd}).features(0, 0) == 0.0);
  CHECK(windowize(series({0, 1, 2, 3}), {4, 1, kSlope}).features(0, 0) ==
        doctest::Approx(1.0));
  auto minmax = windowize(series({3, 1, 2}), {3, 1, kMin | kMax});
  CHECK(minmax.features(0, 0) == 1.0);
  CHECK(minmax.features(0, 1) == 3.0);
  // population std of {1,2,3}
  CHECK(windowize(series({1, 2, 3}), {3, 1, kStd}).features(0, 0) ==
        doctest::Approx(std::sqrt(2.0 / 3.0)));
}

TEST_CASE("window layout, naming and errors") {
  Matrix two(10, 2);
  for (std::size_t r = 0; r < 10; ++r) {
    two(r, 0) = static_cast<double>(r);
    two(r, 1) = 1.0;
  }
  std::vector<std::string> names{"a", "b"};
  auto w = windowize(two, {4, 3, kMean | kMax}, names);
  CHECK(w.start_rows == std::vector<std::size_t>{0, 3, 6});
  CHECK(w.column_names == std::vector<std::string>{"mean.a", "mean.b", "max.a", "max.b"});
  CHECK(w.features(1, 0) == doctest::Approx(4.5));
  CHECK(w.features(2, 2) == 9.0);
  CHECK(code_of([&] { windowize(two, {11, 1, kMean}); }) == ErrorCode::WindowTooLong);
  CHECK(code_of([&] { windowize(two, {4, 0, kMean}); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { windowize(two, {4, 1, 0}); }) == ErrorCode::InvalidArgument);
  CHECK(parse_stats("mean,std,slope") == (kMean | kStd | kSlope));
  CHECK(code_of([] { parse_stats("median"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("series assembly") {
  auto t = two_event({1, 2, 3}, {10, 10, 0});
  std::vector<std::string> names;
  SeriesSpec spec{{"L1D_MISS"}, {{"L3_MISS", "L1D_MISS"}}, EpsilonPolicy::Zero};
  auto m = build_series(t, spec, &names);
  CHECK(names == std::vector<std::string>{"L1D_MISS", "L3_MISS/L1D_MISS"});
  CHECK(m(1, 1) == doctest::Approx(0.2));
  CHECK(m(2, 1) == 0.0);
  SeriesSpec bad{{"CYCLES"}, {}, EpsilonPolicy::Zero};
  CHECK(code_of([&] { build_series(t, bad); }) == ErrorCode::UnknownEvent);
}

TEST_CASE("window labels follow row coverage") {
  std::vector<std::size_t> starts{0, 50, 100, 150};
  std::vector<LabeledSpan> spans{{120, 10, 2}, {60, 5, 1}};
  auto labels = window_labels(starts, 100, spans);
  CHECK(labels == std::vector<std::size_t>{1, 2, 2, 0});
  // The stronger overlap wins when two classes share a window.
  std::vector<LabeledSpan> both{{10, 5, 1}, {40, 30, 3}};
  CHECK(window_labels(std::vector<std::size_t>{0}, 100, both)[0] == 3);
  CHECK(window_labels(starts, 100, spans, 20) == std::vector<std::size_t>{0, 0, 0, 0});

  std::vector<std::uint8_t> mask{0, 1, 1, 0, 0, 1};
  auto from_mask = spans_from_mask(mask);
  REQUIRE(from_mask.size() == 2);
  CHECK(from_mask[0].start == 1);
  CHECK(from_mask[0].length == 2);
  CHECK(from_mask[1].start == 5);
  CHECK(from_mask[1].length == 1);
}

TEST_CASE("windowed csv round trip") {
  Matrix s(8, 1);
  for (std::size_t r = 0; r < 8; ++r) s(r, 0) = 0.1 * static_cast<double>(r * r);
  std::vector<std::string> names{"L3_MISS/L1D_MISS"};
  auto w = windowize(s, {4, 2, kMean | kStd}, names);
  std::vector<std::size_t> labels{0, 1, 0};
  std::istringstream in(format_windowed_csv(w, &labels));
  auto back = parse_windowed_csv(in, "mem");
  CHECK(back.has_labels);
  CHECK(back.start_rows == w.start_rows);
  CHECK(back.data.features == w.features);
  CHECK(back.data.labels == labels);
  CHECK(back.data.feature_names == w.column_names);
  CHECK(back.data.vocab_id == schema_id(w.column_names));

  std::istringstream unlabeled(format_windowed_csv(w));
  auto plain = parse_windowed_csv(unlabeled, "mem");
  CHECK_FALSE(plain.has_labels);
  CHECK(plain.data.labels == std::vector<std::size_t>{0, 0, 0});
}
