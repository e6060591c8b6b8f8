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

#include "rvvt/hpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "rvvt/error.hpp"

namespace rvvt::hpc {

namespace {

constexpr const char* kStatNames[] = {"mean", "std", "min", "max", "slope"};
constexpr unsigned kStatBits[] = {kMean, kStd, kMin, kMax, kSlope};
constexpr std::string_view kLabelPrefix = "# label=";

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

}  // namespace

bool is_canonical_event_name(const std::string& name) noexcept {
  if (name.empty() || name.front() < 'A' || name.front() > 'Z') return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
  });
}

std::size_t HpcTrace::event_index(const std::string& name) const {
  auto it = std::find(events.begin(), events.end(), name);
  if (it == events.end()) fail(ErrorCode::UnknownEvent, "no event '" + name + "' in trace");
  return static_cast<std::size_t>(it - events.begin());
}

std::vector<double> HpcTrace::series(const std::string& name) const {
  const std::size_t c = event_index(name);
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = static_cast<double>(at(r, c));
  return out;
}

Matrix HpcTrace::as_matrix() const {
  Matrix m(rows, events.size());
  for (std::size_t i = 0; i < samples.size(); ++i) m.data()[i] = static_cast<double>(samples[i]);
  return m;
}

void HpcTrace::validate() const {
  if (sampling_period_ns == 0) fail(ErrorCode::InvalidArgument, "sampling period must be positive");
  if (events.empty()) fail(ErrorCode::BadHeader, "trace has no events");
  std::set<std::string> seen;
  for (const auto& e : events) {
    if (!is_canonical_event_name(e)) fail(ErrorCode::BadHeader, "event name '" + e + "' is not upper snake case");
    if (!seen.insert(e).second) fail(ErrorCode::BadHeader, "duplicate event '" + e + "'");
  }
  if (samples.size() != rows * events.size())
    fail(ErrorCode::ShapeMismatch, "sample count does not match rows x events");
  if (!mask.empty() && mask.size() != rows)
    fail(ErrorCode::ShapeMismatch, "mask length " + std::to_string(mask.size()) + " != row count " +
                                       std::to_string(rows));
  for (auto m : mask)
    if (m > 1) fail(ErrorCode::InvalidArgument, "mask values must be 0 or 1");
}

HpcTrace parse_trace_csv(std::istream& in, const std::string& source) {
  csv::LineReader reader(in, source);
  std::string line;
  HpcTrace trace;
  if (!reader.next(line)) fail(ErrorCode::BadHeader, source + ": empty trace file");
  if (line.starts_with(kLabelPrefix)) {
    trace.label = line.substr(kLabelPrefix.size());
    if (!reader.next(line)) fail(ErrorCode::BadHeader, source + ": missing header");
  }
  const auto header = csv::split(line, ',');
  if (header.front() != "t_ns") fail(ErrorCode::BadHeader, reader.where() + "first column must be 't_ns'");
  std::size_t n_events = header.size() - 1;
  const bool has_mask = header.size() > 1 && header.back() == "anomaly";
  if (has_mask) --n_events;
  if (n_events == 0) fail(ErrorCode::BadHeader, reader.where() + "no event columns");
  std::set<std::string> seen;
  for (std::size_t i = 1; i <= n_events; ++i) {
    std::string name(header[i]);
    if (!is_canonical_event_name(name))
      fail(ErrorCode::BadHeader, reader.where() + "event name '" + name + "' is not upper snake case");
    if (!seen.insert(name).second) fail(ErrorCode::BadHeader, reader.where() + "duplicate event '" + name + "'");
    trace.events.push_back(std::move(name));
  }

  std::vector<long long> times;
  std::vector<std::size_t> lines;
  while (reader.next(line)) {
    const auto fields = csv::split(line, ',');
    if (fields.size() != header.size())
      fail(ErrorCode::RaggedRow, reader.where() + "expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
    const long long t = reader.parse_int(fields[0]);
    if (t < 0) fail(ErrorCode::NonMonotonicTime, reader.where() + "negative timestamp");
    if (!times.empty() && t <= times.back())
      fail(ErrorCode::NonMonotonicTime, reader.where() + "t_ns " + std::to_string(t) +
                                            " does not increase past " + std::to_string(times.back()));
    times.push_back(t);
    lines.push_back(reader.line_no());
    for (std::size_t j = 1; j <= n_events; ++j) {
      const long long v = reader.parse_int(fields[j]);
      if (v < 0) fail(ErrorCode::NegativeCount, reader.where() + "negative count for " + trace.events[j - 1]);
      trace.samples.push_back(static_cast<std::uint64_t>(v));
    }
    if (has_mask) {
      const long long m = reader.parse_int(fields.back());
      if (m != 0 && m != 1) fail(ErrorCode::Format, reader.where() + "anomaly must be 0 or 1");
      trace.mask.push_back(static_cast<std::uint8_t>(m));
    }
  }
  trace.rows = times.size();
  if (trace.rows < 2)
    fail(ErrorCode::NonUniformPeriod, source + ": need at least two rows to infer the sampling period");

  const double period = static_cast<double>(times.back() - times.front()) / static_cast<double>(trace.rows - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double delta = static_cast<double>(times[i] - times[i - 1]);
    if (std::fabs(delta - period) > 0.01 * period)
      fail(ErrorCode::NonUniformPeriod, source + ":" + std::to_string(lines[i]) + ": spacing " +
                                            std::to_string(times[i] - times[i - 1]) +
                                            " ns deviates more than 1% from the mean period");
  }
  trace.sampling_period_ns = static_cast<std::uint64_t>(std::llround(period));
  trace.start_ns = static_cast<std::uint64_t>(times.front());
  trace.validate();
  return trace;
}

HpcTrace load_trace_csv(const std::string& path) {
  std::istringstream in(read_all(path));
  return parse_trace_csv(in, path);
}

std::string format_trace_csv(const HpcTrace& trace) {
  trace.validate();
  std::ostringstream out;
  if (trace.label) out << kLabelPrefix << *trace.label << '\n';
  out << "t_ns";
  for (const auto& e : trace.events) out << ',' << e;
  if (!trace.mask.empty()) out << ",anomaly";
  out << '\n';
  for (std::size_t r = 0; r < trace.rows; ++r) {
    out << trace.start_ns + r * trace.sampling_period_ns;
    for (std::size_t c = 0; c < trace.events.size(); ++c) out << ',' << trace.at(r, c);
    if (!trace.mask.empty()) out << ',' << static_cast<int>(trace.mask[r]);
    out << '\n';
  }
  return out.str();
}

void write_trace_csv(const std::string& path, const HpcTrace& trace) {
  write_all(path, format_trace_csv(trace));
}

std::string describe(const HpcTrace& trace) {
  std::ostringstream out;
  out << "rows: " << trace.rows << '\n'
      << "period_ns: " << trace.sampling_period_ns << '\n'
      << "start_ns: " << trace.start_ns << '\n'
      << "label: " << (trace.label ? *trace.label : "-") << '\n';
  std::size_t masked = 0;
  for (auto m : trace.mask) masked += m;
  out << "masked_rows: " << (trace.mask.empty() ? std::string("-") : std::to_string(masked)) << '\n';
  out << "event,mean,min,max\n";
  for (std::size_t c = 0; c < trace.events.size(); ++c) {
    double sum = 0;
    std::uint64_t lo = UINT64_MAX, hi = 0;
    for (std::size_t r = 0; r < trace.rows; ++r) {
      sum += static_cast<double>(trace.at(r, c));
      lo = std::min(lo, trace.at(r, c));
      hi = std::max(hi, trace.at(r, c));
    }
    out << trace.events[c] << ',' << csv::format_double(trace.rows ? sum / static_cast<double>(trace.rows) : 0.0)
        << ',' << (trace.rows ? lo : 0) << ',' << hi << '\n';
  }
  return out.str();
}

EpsilonPolicy parse_epsilon_policy(const std::string& text) {
  if (text == "zero") return EpsilonPolicy::Zero;
  if (text == "epsilon") return EpsilonPolicy::Epsilon;
  fail(ErrorCode::InvalidArgument, "unknown epsilon policy '" + text + "' (zero|epsilon)");
}

std::vector<double> derive_ratio(const HpcTrace& trace, const std::string& numerator,
                                 const std::string& denominator, EpsilonPolicy policy) {
  const std::size_t n = trace.event_index(numerator);
  const std::size_t d = trace.event_index(denominator);
  std::vector<double> out(trace.rows);
  for (std::size_t r = 0; r < trace.rows; ++r) {
    const double num = static_cast<double>(trace.at(r, n));
    const double den = static_cast<double>(trace.at(r, d));
    if (den != 0.0)
      out[r] = num / den;
    else
      out[r] = policy == EpsilonPolicy::Zero ? 0.0 : num / (den + 1.0);
  }
  return out;
}

unsigned parse_stats(const std::string& text) {
  unsigned stats = 0;
  for (auto part : csv::split(text, ',')) {
    bool known = false;
    for (std::size_t i = 0; i < std::size(kStatNames); ++i) {
      if (part == kStatNames[i]) {
        stats |= kStatBits[i];
        known = true;
      }
    }
    if (!known) fail(ErrorCode::InvalidArgument, "unknown stat '" + std::string(part) + "'");
  }
  return stats;
}

WindowedFeatures windowize(const Matrix& series, const WindowConfig& cfg,
                           std::span<const std::string> column_names) {
  const std::size_t w = cfg.window_len;
  if (w == 0 || cfg.stride == 0) fail(ErrorCode::InvalidArgument, "window_len and stride must be >= 1");
  if ((cfg.stats & 0x1fu) == 0 || (cfg.stats & ~0x1fu) != 0)
    fail(ErrorCode::InvalidArgument, "stats must be a non-empty subset of mean,std,min,max,slope");
  if (!column_names.empty() && column_names.size() != series.cols())
    fail(ErrorCode::ShapeMismatch, "column name count does not match series width");
  if (w > series.rows())
    fail(ErrorCode::WindowTooLong, "window of " + std::to_string(w) + " rows exceeds series of " +
                                       std::to_string(series.rows()));

  WindowedFeatures out;
  const std::size_t cols = series.cols();
  for (std::size_t s = 0; s < std::size(kStatNames); ++s) {
    if (!(cfg.stats & kStatBits[s])) continue;
    for (std::size_t c = 0; c < cols; ++c)
      out.column_names.push_back(std::string(kStatNames[s]) + "." +
                                 (column_names.empty() ? "c" + std::to_string(c) : column_names[c]));
  }

  const std::size_t count = (series.rows() - w) / cfg.stride + 1;
  out.features = Matrix(count, out.column_names.size());
  // Centered index for the slope: sum((i - ibar)^2) over 0..w-1.
  const double ibar = static_cast<double>(w - 1) / 2.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < w; ++i) sxx += (static_cast<double>(i) - ibar) * (static_cast<double>(i) - ibar);

  std::vector<double> stat(5);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t start = k * cfg.stride;
    out.start_rows.push_back(start);
    auto row = out.features.row(k);
    for (std::size_t c = 0; c < cols; ++c) {
      double sum = 0.0, lo = INFINITY, hi = -INFINITY;
      for (std::size_t i = 0; i < w; ++i) {
        const double v = series(start + i, c);
        sum += v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      const double mean = sum / static_cast<double>(w);
      double ss = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        const double dv = series(start + i, c) - mean;
        ss += dv * dv;
        sxy += (static_cast<double>(i) - ibar) * dv;
      }
      stat = {mean, std::sqrt(ss / static_cast<double>(w)), lo, hi, sxx > 0.0 ? sxy / sxx : 0.0};
      std::size_t j = 0;
      for (std::size_t s = 0; s < std::size(kStatNames); ++s) {
        if (!(cfg.stats & kStatBits[s])) continue;
        row[j * cols + c] = stat[s];
        ++j;
      }
    }
  }
  return out;
}

Matrix build_series(const HpcTrace& trace, const SeriesSpec& spec, std::vector<std::string>* column_names) {
  if (spec.events.empty() && spec.ratios.empty()) fail(ErrorCode::InvalidArgument, "empty series spec");
  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  for (const auto& e : spec.events) {
    columns.push_back(trace.series(e));
    names.push_back(e);
  }
  for (const auto& [num, den] : spec.ratios) {
    columns.push_back(derive_ratio(trace, num, den, spec.policy));
    names.push_back(num + "/" + den);
  }
  Matrix m(trace.rows, columns.size());
  for (std::size_t r = 0; r < trace.rows; ++r)
    for (std::size_t c = 0; c < columns.size(); ++c) m(r, c) = columns[c][r];
  if (column_names != nullptr) *column_names = std::move(names);
  return m;
}

std::vector<std::size_t> window_labels(std::span<const std::size_t> start_rows, std::size_t window_len,
                                       std::span<const LabeledSpan> spans, std::size_t min_rows) {
  std::size_t max_class = 0;
  for (const auto& s : spans) {
    if (s.class_id == 0) fail(ErrorCode::InvalidArgument, "span class ids start at 1");
    max_class = std::max(max_class, s.class_id);
  }
  std::vector<std::size_t> labels(start_rows.size(), 0);
  std::vector<std::size_t> cover(max_class + 1);
  for (std::size_t k = 0; k < start_rows.size(); ++k) {
    std::fill(cover.begin(), cover.end(), 0);
    const std::size_t a = start_rows[k], b = a + window_len;
    for (const auto& s : spans) {
      const std::size_t lo = std::max(a, s.start), hi = std::min(b, s.start + s.length);
      if (hi > lo) cover[s.class_id] += hi - lo;
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c <= max_class; ++c)
      if (cover[c] > cover[best] || (best == 0 && cover[c] > 0)) best = c;
    if (best != 0 && cover[best] >= std::max<std::size_t>(min_rows, 1)) labels[k] = best;
  }
  return labels;
}

std::vector<LabeledSpan> spans_from_mask(std::span<const std::uint8_t> mask) {
  std::vector<LabeledSpan> spans;
  for (std::size_t i = 0; i < mask.size();) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    spans.push_back({i, j - i, 1});
    i = j;
  }
  return spans;
}

std::string format_windowed_csv(const WindowedFeatures& w, const std::vector<std::size_t>* labels) {
  if (labels != nullptr && labels->size() != w.start_rows.size())
    fail(ErrorCode::ShapeMismatch, "label count does not match window count");
  std::ostringstream out;
  out << "window_start_row";
  for (const auto& n : w.column_names) out << ',' << n;
  if (labels != nullptr) out << ",label";
  out << '\n';
  for (std::size_t k = 0; k < w.start_rows.size(); ++k) {
    out << w.start_rows[k];
    for (double v : w.features.row(k)) out << ',' << csv::format_double(v);
    if (labels != nullptr) out << ',' << (*labels)[k];
    out << '\n';
  }
  return out.str();
}

void write_windowed_csv(const std::string& path, const WindowedFeatures& w,
                        const std::vector<std::size_t>* labels) {
  write_all(path, format_windowed_csv(w, labels));
}

WindowedDataset parse_windowed_csv(std::istream& in, const std::string& source,
                                   std::vector<std::string> class_names) {
  csv::LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) fail(ErrorCode::BadHeader, source + ": empty windowed feature file");
  const auto header = csv::split(line, ',');
  if (header.front() != "window_start_row")
    fail(ErrorCode::BadHeader, reader.where() + "first column must be 'window_start_row'");
  WindowedDataset out;
  out.has_labels = header.back() == "label";
  const std::size_t width = header.size() - 1 - (out.has_labels ? 1 : 0);
  if (width == 0) fail(ErrorCode::BadHeader, reader.where() + "no feature columns");
  for (std::size_t i = 1; i <= width; ++i) out.data.feature_names.emplace_back(header[i]);
  out.data.features = Matrix(0, width);
  std::vector<double> row(width);
  std::size_t max_label = 0;
  while (reader.next(line)) {
    const auto fields = csv::split(line, ',');
    if (fields.size() != header.size())
      fail(ErrorCode::RaggedRow, reader.where() + "expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
    const long long start = reader.parse_int(fields[0]);
    if (start < 0) fail(ErrorCode::Format, reader.where() + "negative window start");
    out.start_rows.push_back(static_cast<std::size_t>(start));
    for (std::size_t j = 0; j < width; ++j) row[j] = reader.parse_double(fields[j + 1]);
    out.data.features.append_row(row);
    std::size_t label = 0;
    if (out.has_labels) {
      const long long l = reader.parse_int(fields.back());
      if (l < 0) fail(ErrorCode::Format, reader.where() + "negative class id");
      label = static_cast<std::size_t>(l);
    }
    max_label = std::max(max_label, label);
    out.data.labels.push_back(label);
  }
  out.data.class_names = class_names.empty() ? default_class_names(std::max<std::size_t>(2, max_label + 1))
                                             : std::move(class_names);
  out.data.vocab_id = schema_id(out.data.feature_names);
  out.data.norm = Norm::Raw;
  out.data.validate();
  return out;
}

WindowedDataset read_windowed_csv(const std::string& path, std::vector<std::string> class_names) {
  std::istringstream in(read_all(path));
  return parse_windowed_csv(in, path, std::move(class_names));
}

std::uint64_t schema_id(std::span<const std::string> column_names) {
  std::string text = "windowed\n";
  for (const auto& n : column_names) text += n + "\n";
  return fnv1a(text);
}

}  // namespace rvvt::hpc
