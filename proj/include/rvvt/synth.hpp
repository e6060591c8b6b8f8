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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvvt/decoder.hpp"
#include "rvvt/hpc.hpp"

namespace rvvt::synth {

/// CYCLES, RETIRED_INSTR, L1D_MISS, L3_MISS, BRANCH_MISS.
std::vector<std::string> default_events();

/// One execution phase: per-event mean counts per period, relative jitter,
/// and the number of rows it lasts.
struct PhaseSpec {
  std::vector<double> rates;
  double jitter = 0.05;
  std::size_t duration = 1;
};

/// Each count is round(max(0, N(rate, jitter * rate))); phases are laid out
/// back to back.
hpc::HpcTrace gen_phase_trace(std::span<const PhaseSpec> phases, std::vector<std::string> events,
                              std::uint64_t period_ns, std::uint64_t seed);

/// Calibrated default phases over default_events(); both keep
/// L3_MISS / L1D_MISS near 0.1.
std::vector<PhaseSpec> two_phase_preset(std::size_t rows);
PhaseSpec alternate_phase();

enum class AnomalyKind { RatioShift = 1, Spike = 2, PhaseSwap = 3 };

const char* anomaly_kind_name(AnomalyKind kind) noexcept;
AnomalyKind parse_anomaly_kind(const std::string& text);
/// "normal" followed by the kinds in class-id order.
std::vector<std::string> anomaly_class_names();

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::RatioShift;
  double magnitude = 20.0;  // multiplier (ratio_shift) or sigma units (spike)
  std::size_t start = 0;
  std::size_t length = 1;
  std::string event = "L3_MISS";         // ratio_shift numerator
  std::optional<PhaseSpec> swap_phase;  // phase_swap source
};

struct Injection {
  hpc::HpcTrace trace;  // trace.mask is the union of any prior mask and the span
  std::vector<std::uint8_t> mask;  // exactly the span
};

/// Rows outside the span are copied bit for bit. Spikes add
/// round(magnitude * sigma_e) to every event e, sigma_e being the population
/// deviation of that event over the input trace.
Injection inject_anomaly(const hpc::HpcTrace& trace, const AnomalySpec& spec, std::uint64_t seed);

/// `count` non-overlapping spans of `length` rows, one at a seeded offset in
/// each of `count` equal segments of the trace.
std::vector<hpc::LabeledSpan> plan_spans(std::size_t rows, std::size_t count, std::size_t length,
                                         std::size_t class_id, std::uint64_t seed);

/// `start_row,length,kind` with kind names from anomaly_class_names().
std::string format_spans_csv(std::span<const hpc::LabeledSpan> spans);
void write_spans_csv(const std::string& path, std::span<const hpc::LabeledSpan> spans);
std::vector<hpc::LabeledSpan> read_spans_csv(const std::string& path);

/// A phase-structured trace with planned anomalies injected.
struct TraceScenario {
  std::size_t rows = 5000;
  std::uint64_t period_ns = 1'000'000;
  std::size_t anomalies = 10;
  AnomalyKind kind = AnomalyKind::RatioShift;
  double magnitude = 20.0;
  std::size_t span_len = 50;
  std::uint64_t seed = 1;
};

struct ScenarioTraces {
  hpc::HpcTrace clean;     // before injection, no mask
  hpc::HpcTrace injected;  // with mask
  std::vector<hpc::LabeledSpan> spans;
};

/// Two-phase preset over default_events(); spans from plan_spans.
ScenarioTraces make_scenario(const TraceScenario& scenario);

/// First-order Markov chain over opcode tokens.
struct MarkovFamily {
  std::vector<std::string> states;
  std::vector<double> initial;
  std::vector<std::vector<double>> transition;  // row-stochastic
};

/// Random chain over `states` with Dirichlet(1) rows.
MarkovFamily random_family(std::vector<std::string> states, std::uint64_t seed);

/// Named family sets: "disjoint" (two chains over disjoint opcode sets),
/// "identical" (one chain twice), "shifted" (the disjoint pair with half of
/// each opcode set replaced and fresh transitions).
std::vector<MarkovFamily> family_preset(const std::string& name, std::uint64_t seed);

struct Corpus {
  std::vector<rv::OpcodeSequence> sequences;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
};

/// Sequence i belongs to family i mod F, so classes stay balanced and
/// interleaved. Lengths are uniform in [min_len, max_len].
Corpus gen_opcode_corpus(std::span<const MarkovFamily> families, std::size_t count, std::size_t min_len,
                         std::size_t max_len, std::uint64_t seed);

/// Token-per-line files plus `labels.csv` (`file,class`).
void write_corpus_dir(const std::string& dir, const Corpus& corpus);
/// Class ids follow `class_names` when given, else the sorted class names.
/// Listed files holding an ELF image are decoded instead of read as tokens.
Corpus read_corpus_dir(const std::string& dir, std::vector<std::string> class_names = {});

}  // namespace rvvt::synth
