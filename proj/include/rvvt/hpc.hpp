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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvvt/dataset.hpp"
#include "rvvt/matrix.hpp"

namespace rvvt::hpc {

/// Counter samples, one row per sampling period. Counts are per-period
/// deltas, never cumulative register values, so there is no wraparound to
/// undo. Event names are canonical upper snake case (L1D_MISS, CYCLES, ...).
struct HpcTrace {
  std::uint64_t sampling_period_ns = 0;
  std::uint64_t start_ns = 0;
  std::vector<std::string> events;
  std::size_t rows = 0;
  std::vector<std::uint64_t> samples;  // rows x events, row-major
  std::optional<std::string> label;
  std::vector<std::uint8_t> mask;  // empty, or one ground-truth flag per row

  std::uint64_t at(std::size_t row, std::size_t event) const {
    return samples[row * events.size() + event];
  }
  std::uint64_t& at(std::size_t row, std::size_t event) {
    return samples[row * events.size() + event];
  }

  /// Index of `name`, or UnknownEvent.
  std::size_t event_index(const std::string& name) const;
  std::vector<double> series(const std::string& name) const;
  Matrix as_matrix() const;

  void validate() const;

  friend bool operator==(const HpcTrace&, const HpcTrace&) = default;
};

bool is_canonical_event_name(const std::string& name) noexcept;

/// Header `t_ns,<EVENT>...` with an optional `anomaly` column (0/1). The
/// period is inferred from the timestamps, which must be strictly increasing
/// and spaced within 1% of the mean spacing.
HpcTrace parse_trace_csv(std::istream& in, const std::string& source);
HpcTrace load_trace_csv(const std::string& path);
std::string format_trace_csv(const HpcTrace& trace);
void write_trace_csv(const std::string& path, const HpcTrace& trace);

std::string describe(const HpcTrace& trace);

enum class EpsilonPolicy {
  Zero,     // den == 0 -> 0
  Epsilon,  // den == 0 -> num / (den + 1)
};

EpsilonPolicy parse_epsilon_policy(const std::string& text);

/// Row-wise numerator / denominator.
std::vector<double> derive_ratio(const HpcTrace& trace, const std::string& numerator,
                                 const std::string& denominator,
                                 EpsilonPolicy policy = EpsilonPolicy::Zero);

enum Stat : unsigned {
  kMean = 1u << 0,
  kStd = 1u << 1,
  kMin = 1u << 2,
  kMax = 1u << 3,
  kSlope = 1u << 4,
};

/// Parses "mean,std,max" style lists.
unsigned parse_stats(const std::string& text);

struct WindowConfig {
  std::size_t window_len = 100;
  std::size_t stride = 50;
  unsigned stats = kMean | kStd;
};

struct WindowedFeatures {
  Matrix features;
  std::vector<std::size_t> start_rows;
  std::vector<std::string> column_names;  // "<stat>.<column>"
};

/// Sliding windows at rows 0, stride, 2*stride, ...; a trailing partial
/// window is dropped. Columns are stat-major in the order mean, std, min,
/// max, slope, then input column order. std is the population deviation;
/// slope is the least-squares slope against the in-window row index.
WindowedFeatures windowize(const Matrix& series, const WindowConfig& cfg,
                           std::span<const std::string> column_names = {});

/// Builds the series matrix for windowing: the listed events followed by one
/// column per "NUM/DEN" ratio.
struct SeriesSpec {
  std::vector<std::string> events;
  std::vector<std::pair<std::string, std::string>> ratios;
  EpsilonPolicy policy = EpsilonPolicy::Zero;
};

Matrix build_series(const HpcTrace& trace, const SeriesSpec& spec,
                    std::vector<std::string>* column_names = nullptr);

/// Anomalous span of rows with a class id (1-based; 0 is normal).
struct LabeledSpan {
  std::size_t start = 0;
  std::size_t length = 0;
  std::size_t class_id = 1;
};

/// Labels each window: the class covering the most of its rows when that
/// coverage is at least `min_rows`, else 0. With only a mask, every masked
/// row counts as class 1.
std::vector<std::size_t> window_labels(std::span<const std::size_t> start_rows,
                                       std::size_t window_len,
                                       std::span<const LabeledSpan> spans, std::size_t min_rows = 1);
std::vector<LabeledSpan> spans_from_mask(std::span<const std::uint8_t> mask);

/// `window_start_row,<stat.column>...[,label]`.
std::string format_windowed_csv(const WindowedFeatures& w,
                                const std::vector<std::size_t>* labels = nullptr);
void write_windowed_csv(const std::string& path, const WindowedFeatures& w,
                        const std::vector<std::size_t>* labels = nullptr);

struct WindowedDataset {
  LabeledDataset data;  // labels all 0 when the file has no label column
  std::vector<std::size_t> start_rows;
  bool has_labels = false;
};

WindowedDataset parse_windowed_csv(std::istream& in, const std::string& source,
                                   std::vector<std::string> class_names = {});
WindowedDataset read_windowed_csv(const std::string& path,
                                  std::vector<std::string> class_names = {});

/// Schema id for a list of column names.
std::uint64_t schema_id(std::span<const std::string> column_names);

}  // namespace rvvt::hpc
