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

#include "rvvt/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "csv.hpp"
#include "rvvt/error.hpp"
#include "rvvt/rng.hpp"

namespace rvvt::synth {

namespace {

std::uint64_t draw_count(Rng& rng, double rate, double jitter) {
  const double v = rate + jitter * rate * rng.normal();
  return static_cast<std::uint64_t>(std::llround(std::max(0.0, v)));
}

void check_phase(const PhaseSpec& p, std::size_t events) {
  if (p.rates.size() != events)
    fail(ErrorCode::ShapeMismatch, "phase has " + std::to_string(p.rates.size()) + " rates for " +
                                       std::to_string(events) + " events");
  if (p.duration == 0) fail(ErrorCode::InvalidArgument, "phase duration must be >= 1");
  if (!(p.jitter >= 0.0)) fail(ErrorCode::InvalidArgument, "jitter must be >= 0");
  for (double r : p.rates)
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorCode::InvalidArgument, "phase rates must be finite and >= 0");
}

std::vector<double> dirichlet_one(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log1p(-rng.uniform());
    sum += v;
  }
  for (auto& v : w) v /= sum;
  return w;
}

std::size_t sample(Rng& rng, const std::vector<double>& probs) {
  double u = rng.uniform();
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return probs.size() - 1;
}

// Real opcode tokens (placeholders excluded) in vocabulary order.
std::vector<std::string> opcode_pool() {
  std::vector<std::string> out;
  for (auto t : rv::vocabulary())
    if (t != rv::kUnknown32 && t != rv::kUnknown16 && t != rv::kPad8) out.emplace_back(t);
  return out;
}

bool looks_like_elf(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[4] = {};
  return in.read(magic, 4) && magic[0] == 0x7f && magic[1] == 'E' && magic[2] == 'L' && magic[3] == 'F';
}

}  // namespace

std::vector<std::string> default_events() {
  return {"CYCLES", "RETIRED_INSTR", "L1D_MISS", "L3_MISS", "BRANCH_MISS"};
}

hpc::HpcTrace gen_phase_trace(std::span<const PhaseSpec> phases, std::vector<std::string> events,
                              std::uint64_t period_ns, std::uint64_t seed) {
  if (phases.empty()) fail(ErrorCode::InvalidArgument, "at least one phase is required");
  hpc::HpcTrace trace;
  trace.sampling_period_ns = period_ns;
  trace.events = std::move(events);
  for (const auto& p : phases) check_phase(p, trace.events.size());
  Rng rng(seed);
  for (const auto& p : phases) {
    for (std::size_t r = 0; r < p.duration; ++r)
      for (double rate : p.rates) trace.samples.push_back(draw_count(rng, rate, p.jitter));
    trace.rows += p.duration;
  }
  trace.validate();
  return trace;
}

std::vector<PhaseSpec> two_phase_preset(std::size_t rows) {
  if (rows < 2) fail(ErrorCode::InvalidArgument, "two-phase preset needs at least 2 rows");
  return {
      {{1'000'000, 800'000, 2'000, 200, 1'500}, 0.05, rows / 2},
      {{1'200'000, 600'000, 3'000, 300, 2'500}, 0.05, rows - rows / 2},
  };
}

PhaseSpec alternate_phase() { return {{900'000, 1'000'000, 8'000, 400, 500}, 0.05, 1}; }

const char* anomaly_kind_name(AnomalyKind kind) noexcept {
  switch (kind) {
    case AnomalyKind::RatioShift: return "ratio_shift";
    case AnomalyKind::Spike: return "spike";
    case AnomalyKind::PhaseSwap: return "phase_swap";
  }
  return "?";
}

AnomalyKind parse_anomaly_kind(const std::string& text) {
  for (auto k : {AnomalyKind::RatioShift, AnomalyKind::Spike, AnomalyKind::PhaseSwap})
    if (text == anomaly_kind_name(k)) return k;
  fail(ErrorCode::InvalidArgument, "unknown anomaly kind '" + text + "' (ratio_shift|spike|phase_swap)");
}

std::vector<std::string> anomaly_class_names() { return {"normal", "ratio_shift", "spike", "phase_swap"}; }

Injection inject_anomaly(const hpc::HpcTrace& trace, const AnomalySpec& spec, std::uint64_t seed) {
  trace.validate();
  if (spec.length == 0 || spec.start > trace.rows || spec.length > trace.rows - spec.start)
    fail(ErrorCode::SpanOutOfRange, "span [" + std::to_string(spec.start) + ", +" + std::to_string(spec.length) +
                                        ") outside trace of " + std::to_string(trace.rows) + " rows");
  if (!(spec.magnitude > 0.0) || !std::isfinite(spec.magnitude))
    fail(ErrorCode::InvalidArgument, "anomaly magnitude must be finite and > 0");

  Injection out{trace, std::vector<std::uint8_t>(trace.rows, 0)};
  hpc::HpcTrace& t = out.trace;
  const std::size_t end = spec.start + spec.length;
  switch (spec.kind) {
    case AnomalyKind::RatioShift: {
      const std::size_t e = t.event_index(spec.event);
      for (std::size_t r = spec.start; r < end; ++r)
        t.at(r, e) = static_cast<std::uint64_t>(std::llround(static_cast<double>(t.at(r, e)) * spec.magnitude));
      break;
    }
    case AnomalyKind::Spike: {
      for (std::size_t e = 0; e < t.events.size(); ++e) {
        double mean = 0.0, ss = 0.0;
        for (std::size_t r = 0; r < trace.rows; ++r) mean += static_cast<double>(trace.at(r, e));
        mean /= static_cast<double>(trace.rows);
        for (std::size_t r = 0; r < trace.rows; ++r) {
          const double d = static_cast<double>(trace.at(r, e)) - mean;
          ss += d * d;
        }
        const auto bump = static_cast<std::uint64_t>(
            std::llround(spec.magnitude * std::sqrt(ss / static_cast<double>(trace.rows))));
        for (std::size_t r = spec.start; r < end; ++r) t.at(r, e) += bump;
      }
      break;
    }
    case AnomalyKind::PhaseSwap: {
      if (!spec.swap_phase) fail(ErrorCode::InvalidArgument, "phase_swap needs a replacement phase");
      PhaseSpec p = *spec.swap_phase;
      p.duration = std::max<std::size_t>(p.duration, 1);
      check_phase(p, t.events.size());
      Rng rng(seed);
      for (std::size_t r = spec.start; r < end; ++r)
        for (std::size_t e = 0; e < t.events.size(); ++e) t.at(r, e) = draw_count(rng, p.rates[e], p.jitter);
      break;
    }
  }
  if (t.mask.empty()) t.mask.assign(t.rows, 0);
  for (std::size_t r = spec.start; r < end; ++r) out.mask[r] = t.mask[r] = 1;
  return out;
}

std::vector<hpc::LabeledSpan> plan_spans(std::size_t rows, std::size_t count, std::size_t length,
                                         std::size_t class_id, std::uint64_t seed) {
  if (count == 0) return {};
  const std::size_t segment = rows / count;
  if (length == 0 || length > segment)
    fail(ErrorCode::SpanOutOfRange, std::to_string(count) + " spans of " + std::to_string(length) +
                                        " rows do not fit in " + std::to_string(rows) + " rows");
  Rng rng(seed);
  std::vector<hpc::LabeledSpan> spans;
  for (std::size_t i = 0; i < count; ++i)
    spans.push_back({i * segment + rng.below(segment - length + 1), length, class_id});
  return spans;
}

std::string format_spans_csv(std::span<const hpc::LabeledSpan> spans) {
  const auto names = anomaly_class_names();
  std::string out = "start_row,length,kind\n";
  for (const auto& s : spans) {
    if (s.class_id == 0 || s.class_id >= names.size())
      fail(ErrorCode::InvalidArgument, "span class id " + std::to_string(s.class_id) + " has no kind");
    out += std::to_string(s.start) + "," + std::to_string(s.length) + "," + names[s.class_id] + "\n";
  }
  return out;
}

void write_spans_csv(const std::string& path, std::span<const hpc::LabeledSpan> spans) {
  const std::string text = format_spans_csv(spans);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

std::vector<hpc::LabeledSpan> read_spans_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  csv::LineReader reader(in, path);
  std::string line;
  if (!reader.next(line) || line != "start_row,length,kind")
    fail(ErrorCode::BadHeader, path + ": header must be 'start_row,length,kind'");
  std::vector<hpc::LabeledSpan> spans;
  while (reader.next(line)) {
    const auto f = csv::split(line, ',');
    if (f.size() != 3) fail(ErrorCode::RaggedRow, reader.where() + "expected 3 fields");
    const long long start = reader.parse_int(f[0]), len = reader.parse_int(f[1]);
    if (start < 0 || len <= 0) fail(ErrorCode::Format, reader.where() + "invalid span");
    AnomalyKind kind;
    try {
      kind = parse_anomaly_kind(std::string(f[2]));
    } catch (const Error&) {
      fail(ErrorCode::Format, reader.where() + "unknown anomaly kind '" + std::string(f[2]) + "'");
    }
    spans.push_back({static_cast<std::size_t>(start), static_cast<std::size_t>(len), static_cast<std::size_t>(kind)});
  }
  return spans;
}

ScenarioTraces make_scenario(const TraceScenario& sc) {
  ScenarioTraces out;
  const auto phases = two_phase_preset(sc.rows);
  out.clean = gen_phase_trace(phases, default_events(), sc.period_ns, mix_seed(sc.seed, 0));
  out.spans = plan_spans(sc.rows, sc.anomalies, sc.span_len, static_cast<std::size_t>(sc.kind), mix_seed(sc.seed, 1));
  out.injected = out.clean;
  out.injected.mask.assign(out.injected.rows, 0);
  for (std::size_t i = 0; i < out.spans.size(); ++i) {
    AnomalySpec spec;
    spec.kind = sc.kind;
    spec.magnitude = sc.magnitude;
    spec.start = out.spans[i].start;
    spec.length = out.spans[i].length;
    if (sc.kind == AnomalyKind::PhaseSwap) spec.swap_phase = alternate_phase();
    out.injected = inject_anomaly(out.injected, spec, mix_seed(sc.seed, 100 + i)).trace;
  }
  return out;
}

MarkovFamily random_family(std::vector<std::string> states, std::uint64_t seed) {
  if (states.empty()) fail(ErrorCode::InvalidArgument, "a family needs at least one state");
  for (const auto& s : states)
    if (!rv::in_vocabulary(s)) fail(ErrorCode::InvalidArgument, "'" + s + "' is not a vocabulary token");
  Rng rng(seed);
  MarkovFamily f;
  f.initial = dirichlet_one(rng, states.size());
  for (std::size_t i = 0; i < states.size(); ++i) f.transition.push_back(dirichlet_one(rng, states.size()));
  f.states = std::move(states);
  return f;
}

std::vector<MarkovFamily> family_preset(const std::string& name, std::uint64_t seed) {
  const auto pool = opcode_pool();
  constexpr std::size_t kSet = 16, kHalf = kSet / 2;
  const std::vector<std::string> a(pool.begin(), pool.begin() + kSet);
  const std::vector<std::string> b(pool.begin() + kSet, pool.begin() + 2 * kSet);
  if (name == "disjoint") return {random_family(a, mix_seed(seed, 0)), random_family(b, mix_seed(seed, 1))};
  if (name == "identical") {
    auto f = random_family(a, mix_seed(seed, 0));
    return {f, f};
  }
  if (name == "shifted") {
    // Each family keeps the first half of its opcode set and borrows the
    // second half of the other's.
    std::vector<std::string> a2(a.begin(), a.begin() + kHalf), b2(b.begin(), b.begin() + kHalf);
    a2.insert(a2.end(), b.begin() + kHalf, b.end());
    b2.insert(b2.end(), a.begin() + kHalf, a.end());
    return {random_family(a2, mix_seed(seed, 2)), random_family(b2, mix_seed(seed, 3))};
  }
  fail(ErrorCode::InvalidArgument, "unknown family preset '" + name + "' (disjoint|identical|shifted)");
}

Corpus gen_opcode_corpus(std::span<const MarkovFamily> families, std::size_t count, std::size_t min_len,
                         std::size_t max_len, std::uint64_t seed) {
  if (families.size() < 2) fail(ErrorCode::InvalidArgument, "a corpus needs at least two families");
  if (min_len > max_len) fail(ErrorCode::InvalidArgument, "min length exceeds max length");
  Corpus corpus;
  for (std::size_t f = 0; f < families.size(); ++f) corpus.class_names.push_back("family" + std::to_string(f));
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t f = i % families.size();
    const MarkovFamily& fam = families[f];
    Rng rng(mix_seed(seed, i));
    const std::size_t len = min_len + rng.below(max_len - min_len + 1);
    rv::OpcodeSequence seq;
    char id[32];
    std::snprintf(id, sizeof id, "seq_%05zu", i);
    seq.source_id = id;
    std::size_t state = 0;
    for (std::size_t k = 0; k < len; ++k) {
      state = k == 0 ? sample(rng, fam.initial) : sample(rng, fam.transition[state]);
      seq.tokens.push_back(fam.states[state]);
    }
    corpus.sequences.push_back(std::move(seq));
    corpus.labels.push_back(f);
  }
  return corpus;
}

void write_corpus_dir(const std::string& dir, const Corpus& corpus) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create " + dir + ": " + ec.message());
  std::ofstream labels(fs::path(dir) / "labels.csv", std::ios::binary);
  if (!labels) fail(ErrorCode::Io, "cannot write labels.csv in " + dir);
  labels << "file,class\n";
  for (std::size_t i = 0; i < corpus.sequences.size(); ++i) {
    const std::string file = corpus.sequences[i].source_id + ".tok";
    rv::write_token_file((fs::path(dir) / file).string(), corpus.sequences[i]);
    labels << file << ',' << corpus.class_names.at(corpus.labels[i]) << '\n';
  }
  if (!labels) fail(ErrorCode::Io, "write failed: labels.csv in " + dir);
}

Corpus read_corpus_dir(const std::string& dir, std::vector<std::string> class_names) {
  namespace fs = std::filesystem;
  const std::string path = (fs::path(dir) / "labels.csv").string();
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  csv::LineReader reader(in, path);
  std::string line;
  if (!reader.next(line) || line != "file,class") fail(ErrorCode::BadHeader, path + ": header must be 'file,class'");
  std::vector<std::pair<std::string, std::string>> entries;
  while (reader.next(line)) {
    const auto fields = csv::split(line, ',');
    if (fields.size() != 2) fail(ErrorCode::RaggedRow, reader.where() + "expected 2 fields");
    entries.emplace_back(std::string(fields[0]), std::string(fields[1]));
  }
  Corpus corpus;
  if (class_names.empty()) {
    for (const auto& [file, cls] : entries) class_names.push_back(cls);
    std::sort(class_names.begin(), class_names.end());
    class_names.erase(std::unique(class_names.begin(), class_names.end()), class_names.end());
  }
  std::map<std::string, std::size_t> ids;
  for (std::size_t i = 0; i < class_names.size(); ++i) ids[class_names[i]] = i;
  for (const auto& [file, cls] : entries) {
    auto it = ids.find(cls);
    if (it == ids.end()) fail(ErrorCode::Format, path + ": unknown class '" + cls + "'");
    const std::string full = (fs::path(dir) / file).string();
    auto seq = looks_like_elf(full) ? rv::decode_stream(elf::code_bytes(elf::load_elf_file(full)))
                                    : rv::read_token_file(full);
    seq.source_id = fs::path(file).stem().string();
    corpus.sequences.push_back(std::move(seq));
    corpus.labels.push_back(it->second);
  }
  corpus.class_names = std::move(class_names);
  return corpus;
}

}  // namespace rvvt::synth
