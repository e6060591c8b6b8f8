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

#include "rvvt/rvvt.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <memory>
#include <new>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "rvvt/dataset.hpp"
#include "rvvt/decoder.hpp"
#include "rvvt/detectors.hpp"
#include "rvvt/elf.hpp"
#include "rvvt/error.hpp"
#include "rvvt/eval.hpp"
#include "rvvt/feature_selection.hpp"
#include "rvvt/hpc.hpp"
#include "rvvt/model_io.hpp"
#include "rvvt/rng.hpp"
#include "rvvt/ngram.hpp"
#include "rvvt/static_models.hpp"
#include "rvvt/synth.hpp"

using namespace rvvt;

struct rvvt_elf {
  elf::ElfImage image;
  std::string source;
};

struct rvvt_tokens {
  rv::OpcodeSequence seq;
};

struct rvvt_corpus {
  synth::Corpus corpus;
};

struct rvvt_vocab {
  features::NgramVocab vocab;
};

struct rvvt_dataset {
  LabeledDataset data;
  bool windowed = false;
  bool has_labels = true;
  std::vector<std::size_t> start_rows;  // windowed only
  std::vector<std::string> ids;         // static only, may be empty
};

struct rvvt_trace {
  hpc::HpcTrace trace;
  std::vector<hpc::LabeledSpan> spans;
};

struct rvvt_model {
  io::ModelFile file;
};

struct rvvt_predictions {
  bool windowed = false;
  std::vector<std::string> ids;
  std::vector<double> scores;
  std::vector<std::string> labels;
};

namespace {

thread_local std::string g_last_error;
const std::size_t kDefaultHidden[] = {64, 32};

template <typename F>
rvvt_status guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return RVVT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<rvvt_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    g_last_error = "internal error";
  }
  return RVVT_INTERNAL;
}

template <typename T>
T& need(T* p, const char* what) {
  if (p == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return *p;
}

std::string need_str(const char* s, const char* what) {
  if (s == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " is NULL");
  return s;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split_list(const char* text, char sep = ',') {
  std::vector<std::string> out;
  if (text == nullptr || *text == '\0') return out;
  for (auto part : csv::split(text, sep))
    if (!part.empty()) out.emplace_back(part);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

// Windowed datasets name label 1 "anomaly" when it is the only anomaly
// class, otherwise use the synthetic anomaly kinds.
std::vector<std::string> windowed_class_names(std::span<const std::size_t> labels) {
  std::size_t max_label = 0;
  for (auto l : labels) max_label = std::max(max_label, l);
  if (max_label <= 1) return {"normal", "anomaly"};
  auto kinds = synth::anomaly_class_names();
  if (max_label < kinds.size()) return kinds;
  return default_class_names(max_label + 1);
}

models::TrainConfig to_train_config(const rvvt_mlp_config* c) {
  models::TrainConfig cfg;
  if (c == nullptr) return cfg;
  cfg.learning_rate = c->learning_rate;
  cfg.epochs = c->epochs;
  cfg.batch_size = c->batch_size;
  cfg.seed = c->seed;
  cfg.l2_penalty = c->l2_penalty;
  cfg.frozen_layer_count = c->frozen_layers;
  if (c->hidden_count > 0 && c->hidden == nullptr) fail(ErrorCode::InvalidArgument, "hidden sizes are NULL");
  cfg.hidden.assign(c->hidden, c->hidden + c->hidden_count);
  return cfg;
}

void check_schema(std::uint64_t model_schema, const rvvt_dataset& ds) {
  if (model_schema != 0 && ds.data.vocab_id != 0 && model_schema != ds.data.vocab_id)
    fail(ErrorCode::ShapeMismatch, "dataset schema " + format_id(ds.data.vocab_id) + " does not match model schema " +
                                       format_id(model_schema));
}

void check_width(std::size_t expected, const rvvt_dataset& ds) {
  if (expected != ds.data.num_features())
    fail(ErrorCode::ShapeMismatch, "model expects " + std::to_string(expected) + " features, dataset has " +
                                       std::to_string(ds.data.num_features()));
}

// Binary view for boosting and bagging: every non-zero label becomes 1.
LabeledDataset binary_view(const rvvt_dataset& ds) {
  LabeledDataset d = ds.data;
  if (!ds.windowed) return d;
  for (auto& l : d.labels) l = l == 0 ? 0 : 1;
  d.class_names = {"normal", "anomaly"};
  return d;
}

Matrix normal_rows(const rvvt_dataset& ds) {
  if (!ds.has_labels) return ds.data.features;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < ds.data.size(); ++i)
    if (ds.data.labels[i] == 0) rows.push_back(i);
  return ds.data.features.select_rows(rows);
}

std::size_t index_of(const std::vector<std::string>& names, const std::string& name, const char* what) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) fail(ErrorCode::InvalidArgument, std::string("unknown ") + what + " '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

std::string class_name(const std::vector<std::string>& names, std::size_t id) {
  return id < names.size() ? names[id] : "class" + std::to_string(id);
}

void predict_into(const io::ModelFile& f, const rvvt_dataset& ds, rvvt_predictions& p) {
  const auto& names = f.class_names;
  const std::size_t n = ds.data.size();
  p.windowed = ds.windowed;
  for (std::size_t i = 0; i < n; ++i)
    p.ids.push_back(ds.windowed ? std::to_string(ds.start_rows[i])
                                : (ds.ids.empty() ? std::to_string(i) : ds.ids[i]));
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, fs::PcaModel>) {
          fail(ErrorCode::InvalidArgument, "a PCA model transforms data; it does not predict");
        } else {
          for (std::size_t i = 0; i < n; ++i) {
            const auto x = ds.data.features.row(i);
            double score = 0.0;
            std::size_t label = 0;
            if constexpr (std::is_same_v<T, models::NbModel> || std::is_same_v<T, models::MlpModel>) {
              std::vector<double> probs;
              if constexpr (std::is_same_v<T, models::NbModel>)
                probs = models::posterior(m, x);
              else
                probs = models::forward(m, x);
              label = models::predict(m, x).label;
              score = probs.size() > 1 ? probs[1] : probs[0];
            } else if constexpr (std::is_same_v<T, detect::GaussianOneClass> ||
                                 std::is_same_v<T, detect::KnnOneClass>) {
              const auto d = detect::detect(detect::OneClassModel(m), x);
              score = d.score;
              label = d.is_anomalous ? 1 : 0;
            } else if constexpr (std::is_same_v<T, detect::AdaBoostModel>) {
              score = detect::adaboost_margin(m, x);
              label = detect::adaboost_predict(m, x);
            } else if constexpr (std::is_same_v<T, detect::BaggingModel>) {
              score = detect::bagging_score(m, x);
              label = detect::bagging_predict(m, x);
            } else {
              const auto v = detect::two_stage_detect(m, x);
              score = v.score;
              label = v.label;
            }
            p.scores.push_back(score);
            p.labels.push_back(class_name(names, label));
          }
        }
      },
      f.model);
}

std::size_t model_width(const io::AnyModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, models::NbModel>) return m.num_features();
        else if constexpr (std::is_same_v<T, models::MlpModel>) return m.num_inputs();
        else if constexpr (std::is_same_v<T, detect::GaussianOneClass>) return m.mean.size();
        else if constexpr (std::is_same_v<T, detect::KnnOneClass>) return m.reference.cols();
        else if constexpr (std::is_same_v<T, detect::AdaBoostModel> || std::is_same_v<T, detect::BaggingModel>)
          return m.num_features;
        else if constexpr (std::is_same_v<T, detect::TwoStageModel>) return detect::oneclass_dims(m.stage1);
        else return m.dim();
      },
      model);
}

struct Truth {
  std::vector<std::string> names;  // per row, when the file carries names
  std::vector<std::size_t> ids;    // per row, when the file carries ids
  bool named = false;
  std::vector<std::string> classes;  // class table from a "# classes=" line
};

Truth read_truth(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  csv::LineReader reader(in, path);
  std::string line;
  if (!reader.next(line)) fail(ErrorCode::BadHeader, path + ": empty truth file");
  Truth t;
  // Feature CSVs may carry their class table on a leading comment line.
  constexpr std::string_view kClasses = "# classes=";
  if (line.starts_with(kClasses)) {
    for (auto name : csv::split(std::string_view(line).substr(kClasses.size()), ','))
      t.classes.emplace_back(name);
    if (!reader.next(line)) fail(ErrorCode::BadHeader, path + ": missing header line");
  }
  const auto header = csv::split(line, ',');
  std::size_t col = 0;
  if (line == "file,class") {
    t.named = true;
    col = 1;
  } else if (header.front() == "window_start_row" && header.back() == "label") {
    col = header.size() - 1;
  } else if (header.front() == "label") {
    col = 0;
  } else {
    fail(ErrorCode::BadHeader, path + ": expected a labels.csv, labelled windowed CSV or feature CSV");
  }
  while (reader.next(line)) {
    const auto f = csv::split(line, ',');
    if (f.size() != header.size()) fail(ErrorCode::RaggedRow, reader.where() + "wrong field count");
    if (t.named) {
      t.names.emplace_back(f[col]);
    } else {
      const long long v = reader.parse_int(f[col]);
      if (v < 0) fail(ErrorCode::Format, reader.where() + "negative class id");
      t.ids.push_back(static_cast<std::size_t>(v));
    }
  }
  return t;
}

}  // namespace

extern "C" {

const char* rvvt_version(void) { return "0.1.0"; }

const char* rvvt_status_name(rvvt_status status) {
  if (status == RVVT_OK) return "Ok";
  if (status == RVVT_INTERNAL) return "Internal";
  return error_code_name(static_cast<ErrorCode>(status)).data();
}

int rvvt_status_is_input_error(rvvt_status status) { return is_input_error(static_cast<ErrorCode>(status)) ? 1 : 0; }

const char* rvvt_last_error(void) { return g_last_error.c_str(); }

void rvvt_string_free(char* s) { std::free(s); }

// ---- ELF and decoding

rvvt_status rvvt_elf_load(const char* path, rvvt_elf** out) {
  return guard([&] {
    need(out, "out");
    auto h = std::make_unique<rvvt_elf>();
    h->source = need_str(path, "path");
    h->image = elf::load_elf_file(h->source);
    *out = h.release();
  });
}

rvvt_status rvvt_elf_describe(const rvvt_elf* e, char** out) {
  return guard([&] { need(out, "out") = dup_string(elf::describe(need(e, "elf").image)); });
}

void rvvt_elf_free(rvvt_elf* e) { delete e; }

rvvt_status rvvt_tokens_from_elf(const rvvt_elf* e, rvvt_tokens** out) {
  return guard([&] {
    need(out, "out");
    const auto& h = need(e, "elf");
    auto t = std::make_unique<rvvt_tokens>();
    t->seq = rv::decode_stream(elf::code_bytes(h.image), h.source);
    *out = t.release();
  });
}

rvvt_status rvvt_tokens_read(const char* path, rvvt_tokens** out) {
  return guard([&] {
    need(out, "out");
    auto t = std::make_unique<rvvt_tokens>();
    t->seq = rv::read_token_file(need_str(path, "path"));
    *out = t.release();
  });
}

rvvt_status rvvt_tokens_write(const rvvt_tokens* t, const char* path) {
  return guard([&] { rv::write_token_file(need_str(path, "path"), need(t, "tokens").seq); });
}

size_t rvvt_tokens_count(const rvvt_tokens* t) { return t ? t->seq.tokens.size() : 0; }

const char* rvvt_tokens_at(const rvvt_tokens* t, size_t index) {
  if (t == nullptr || index >= t->seq.tokens.size()) return nullptr;
  return t->seq.tokens[index].c_str();
}

void rvvt_tokens_free(rvvt_tokens* t) { delete t; }

// ---- corpora

rvvt_status rvvt_corpus_read_dir(const char* dir, rvvt_corpus** out) {
  return guard([&] {
    need(out, "out");
    auto c = std::make_unique<rvvt_corpus>();
    c->corpus = synth::read_corpus_dir(need_str(dir, "dir"));
    *out = c.release();
  });
}

rvvt_status rvvt_corpus_write_dir(const rvvt_corpus* c, const char* dir) {
  return guard([&] { synth::write_corpus_dir(need_str(dir, "dir"), need(c, "corpus").corpus); });
}

rvvt_status rvvt_corpus_synth(const char* preset, size_t count, size_t min_len, size_t max_len, uint64_t seed,
                              rvvt_corpus** out) {
  return guard([&] {
    need(out, "out");
    const auto families = synth::family_preset(need_str(preset, "preset"), seed);
    auto c = std::make_unique<rvvt_corpus>();
    c->corpus = synth::gen_opcode_corpus(families, count, min_len, max_len, mix_seed(seed, 7));
    *out = c.release();
  });
}

size_t rvvt_corpus_size(const rvvt_corpus* c) { return c ? c->corpus.sequences.size() : 0; }

void rvvt_corpus_free(rvvt_corpus* c) { delete c; }

void rvvt_vocab_options_init(rvvt_vocab_options* o) {
  if (o == nullptr) return;
  const features::VocabOptions d;
  o->n = d.n;
  o->max_size = d.max_size;
  o->min_doc_freq = d.min_doc_freq;
  o->selection = "frequency";
}

rvvt_status rvvt_vocab_build(const rvvt_corpus* c, const rvvt_vocab_options* o, rvvt_vocab** out) {
  return guard([&] {
    need(out, "out");
    const auto& corpus = need(c, "corpus").corpus;
    features::VocabOptions opts;
    if (o != nullptr) {
      opts.n = o->n;
      opts.max_size = o->max_size;
      opts.min_doc_freq = o->min_doc_freq;
      if (o->selection != nullptr) opts.selection = features::parse_selection(o->selection);
    }
    std::vector<features::GramCounts> grams;
    for (const auto& s : corpus.sequences) grams.push_back(features::extract_ngrams(s.tokens, opts.n));
    auto v = std::make_unique<rvvt_vocab>();
    v->vocab = features::build_vocab(grams, corpus.labels, opts);
    *out = v.release();
  });
}

rvvt_status rvvt_vocab_read(const char* path, rvvt_vocab** out) {
  return guard([&] {
    need(out, "out");
    auto v = std::make_unique<rvvt_vocab>();
    v->vocab = features::read_vocab(need_str(path, "path"));
    *out = v.release();
  });
}

rvvt_status rvvt_vocab_write(const rvvt_vocab* v, const char* path) {
  return guard([&] { features::write_vocab(need_str(path, "path"), need(v, "vocab").vocab); });
}

size_t rvvt_vocab_size(const rvvt_vocab* v) { return v ? v->vocab.size() : 0; }
uint64_t rvvt_vocab_id(const rvvt_vocab* v) { return v ? v->vocab.id() : 0; }
void rvvt_vocab_free(rvvt_vocab* v) { delete v; }

// ---- datasets

rvvt_status rvvt_dataset_vectorize(const rvvt_corpus* c, const rvvt_vocab* v, const char* norm, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    const auto& corpus = need(c, "corpus").corpus;
    auto d = std::make_unique<rvvt_dataset>();
    d->data = features::vectorize_corpus(corpus.sequences, corpus.labels, need(v, "vocab").vocab,
                                         parse_norm(need_str(norm, "norm")), corpus.class_names);
    for (const auto& s : corpus.sequences) d->ids.push_back(s.source_id);
    *out = d.release();
  });
}

rvvt_status rvvt_dataset_read_features(const char* path, const rvvt_vocab* v, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    auto d = std::make_unique<rvvt_dataset>();
    d->data = features::read_feature_csv(need_str(path, "path"), v ? &v->vocab : nullptr);
    *out = d.release();
  });
}

rvvt_status rvvt_dataset_read_windowed(const char* path, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    auto w = hpc::read_windowed_csv(need_str(path, "path"));
    auto d = std::make_unique<rvvt_dataset>();
    d->windowed = true;
    d->has_labels = w.has_labels;
    d->start_rows = std::move(w.start_rows);
    d->data = std::move(w.data);
    d->data.class_names = windowed_class_names(d->data.labels);
    *out = d.release();
  });
}

rvvt_status rvvt_dataset_write(const rvvt_dataset* ds, const char* path) {
  return guard([&] {
    const auto& d = need(ds, "dataset");
    const std::string p = need_str(path, "path");
    if (!d.windowed) {
      features::write_feature_csv(p, d.data);
      return;
    }
    hpc::WindowedFeatures w{d.data.features, d.start_rows, d.data.feature_names};
    hpc::write_windowed_csv(p, w, d.has_labels ? &d.data.labels : nullptr);
  });
}

rvvt_status rvvt_dataset_select_columns(const rvvt_dataset* ds, const char* columns, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    const auto& d = need(ds, "dataset");
    const auto names = split_list(need_str(columns, "columns").c_str());
    if (names.empty()) fail(ErrorCode::InvalidArgument, "no columns selected");
    std::vector<std::size_t> idx;
    for (const auto& n : names) idx.push_back(index_of(d.data.feature_names, n, "column"));
    auto r = std::make_unique<rvvt_dataset>(d);
    r->data.features = d.data.features.select_cols(idx);
    r->data.feature_names = names;
    r->data.vocab_id = d.windowed ? hpc::schema_id(names) : 0;
    *out = r.release();
  });
}

rvvt_status rvvt_dataset_set_class_names(rvvt_dataset* ds, const char* names) {
  return guard([&] {
    auto& d = need(ds, "dataset");
    auto list = split_list(need_str(names, "names").c_str());
    auto saved = d.data.class_names;
    d.data.class_names = std::move(list);
    try {
      d.data.validate();
    } catch (...) {
      d.data.class_names = std::move(saved);
      throw;
    }
  });
}

size_t rvvt_dataset_rows(const rvvt_dataset* d) { return d ? d->data.size() : 0; }
size_t rvvt_dataset_cols(const rvvt_dataset* d) { return d ? d->data.num_features() : 0; }

size_t rvvt_dataset_label(const rvvt_dataset* d, size_t row) {
  return d && row < d->data.size() ? d->data.labels[row] : 0;
}

const double* rvvt_dataset_row(const rvvt_dataset* d, size_t row) {
  return d && row < d->data.size() ? d->data.features.row(row).data() : nullptr;
}

const char* rvvt_dataset_feature_name(const rvvt_dataset* d, size_t col) {
  return d && col < d->data.feature_names.size() ? d->data.feature_names[col].c_str() : nullptr;
}

void rvvt_dataset_free(rvvt_dataset* d) { delete d; }

// ---- traces

rvvt_status rvvt_trace_load(const char* path, rvvt_trace** out) {
  return guard([&] {
    need(out, "out");
    auto t = std::make_unique<rvvt_trace>();
    t->trace = hpc::load_trace_csv(need_str(path, "path"));
    *out = t.release();
  });
}

rvvt_status rvvt_trace_write(const rvvt_trace* t, const char* path) {
  return guard([&] { hpc::write_trace_csv(need_str(path, "path"), need(t, "trace").trace); });
}

rvvt_status rvvt_trace_describe(const rvvt_trace* t, char** out) {
  return guard([&] { need(out, "out") = dup_string(hpc::describe(need(t, "trace").trace)); });
}

size_t rvvt_trace_rows(const rvvt_trace* t) { return t ? t->trace.rows : 0; }

rvvt_status rvvt_trace_read_spans(rvvt_trace* t, const char* path) {
  return guard([&] {
    auto& h = need(t, "trace");
    auto spans = synth::read_spans_csv(need_str(path, "path"));
    for (const auto& s : spans)
      if (s.start + s.length > h.trace.rows)
        fail(ErrorCode::SpanOutOfRange, "span at row " + std::to_string(s.start) + " exceeds the trace");
    h.spans = std::move(spans);
  });
}

rvvt_status rvvt_trace_write_spans(const rvvt_trace* t, const char* path) {
  return guard([&] { synth::write_spans_csv(need_str(path, "path"), need(t, "trace").spans); });
}

void rvvt_trace_free(rvvt_trace* t) { delete t; }

void rvvt_synth_trace_options_init(rvvt_synth_trace_options* o) {
  if (o == nullptr) return;
  const synth::TraceScenario d;
  o->rows = d.rows;
  o->period_ns = d.period_ns;
  o->anomalies = d.anomalies;
  o->kind = "ratio_shift";
  o->magnitude = d.magnitude;
  o->span_len = d.span_len;
  o->seed = d.seed;
}

rvvt_status rvvt_synth_trace(const rvvt_synth_trace_options* o, rvvt_trace** clean_out, rvvt_trace** out) {
  return guard([&] {
    need(out, "out");
    const auto& opts = need(o, "options");
    synth::TraceScenario sc;
    sc.rows = opts.rows;
    sc.period_ns = opts.period_ns;
    sc.anomalies = opts.anomalies;
    sc.kind = synth::parse_anomaly_kind(need_str(opts.kind, "kind"));
    sc.magnitude = opts.magnitude;
    sc.span_len = opts.span_len;
    sc.seed = opts.seed;
    auto s = synth::make_scenario(sc);
    auto t = std::make_unique<rvvt_trace>();
    t->trace = std::move(s.injected);
    t->spans = std::move(s.spans);
    if (clean_out != nullptr) {
      auto c = std::make_unique<rvvt_trace>();
      c->trace = std::move(s.clean);
      *clean_out = c.release();
    }
    *out = t.release();
  });
}

void rvvt_window_options_init(rvvt_window_options* o) {
  if (o == nullptr) return;
  const hpc::WindowConfig d;
  o->window_len = d.window_len;
  o->stride = d.stride;
  o->stats = "mean,std";
  o->events = nullptr;
  o->ratios = nullptr;
  o->epsilon_policy = "zero";
  o->min_overlap_rows = 1;
}

rvvt_status rvvt_trace_windowize(const rvvt_trace* t, const rvvt_window_options* o, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    const auto& h = need(t, "trace");
    const auto& opts = need(o, "options");
    hpc::SeriesSpec spec;
    spec.events = split_list(opts.events);
    for (const auto& r : split_list(opts.ratios)) {
      const auto slash = r.find('/');
      if (slash == std::string::npos) fail(ErrorCode::InvalidArgument, "ratio '" + r + "' is not NUM/DEN");
      spec.ratios.emplace_back(r.substr(0, slash), r.substr(slash + 1));
    }
    if (spec.events.empty() && spec.ratios.empty()) spec.events = h.trace.events;
    spec.policy = hpc::parse_epsilon_policy(opts.epsilon_policy ? opts.epsilon_policy : "zero");
    hpc::WindowConfig cfg;
    cfg.window_len = opts.window_len;
    cfg.stride = opts.stride;
    cfg.stats = hpc::parse_stats(need_str(opts.stats, "stats"));

    std::vector<std::string> columns;
    const Matrix series = hpc::build_series(h.trace, spec, &columns);
    auto w = hpc::windowize(series, cfg, columns);
    auto d = std::make_unique<rvvt_dataset>();
    d->windowed = true;
    if (!h.spans.empty()) {
      d->data.labels = hpc::window_labels(w.start_rows, cfg.window_len, h.spans, opts.min_overlap_rows);
    } else if (!h.trace.mask.empty()) {
      const auto spans = hpc::spans_from_mask(h.trace.mask);
      d->data.labels = hpc::window_labels(w.start_rows, cfg.window_len, spans, opts.min_overlap_rows);
    } else {
      d->has_labels = false;
      d->data.labels.assign(w.start_rows.size(), 0);
    }
    d->data.class_names = windowed_class_names(d->data.labels);
    d->data.vocab_id = hpc::schema_id(w.column_names);
    d->data.feature_names = std::move(w.column_names);
    d->data.features = std::move(w.features);
    d->start_rows = std::move(w.start_rows);
    d->data.validate();
    *out = d.release();
  });
}

// ---- feature selection

rvvt_status rvvt_select_features(const rvvt_dataset* ds, const char* method, size_t bins, size_t budget,
                                 const char* include, char** score_csv, char** selected) {
  return guard([&] {
    const auto& d = need(ds, "dataset");
    if (!d.has_labels) fail(ErrorCode::InvalidArgument, "feature scoring needs labelled data");
    const std::string m = need_str(method, "method");
    fs::FeatureScoreReport report;
    if (m == "fisher")
      report = fs::fisher_score(d.data.features, d.data.labels);
    else if (m == "pearson")
      report = fs::pearson_scores(d.data.features, d.data.labels);
    else if (m == "mi")
      report = fs::mutual_information(d.data.features, d.data.labels, bins);
    else
      fail(ErrorCode::InvalidArgument, "unknown scoring method '" + m + "' (fisher|pearson|mi)");
    report.feature_names = d.data.feature_names;

    std::vector<std::size_t> keep;
    for (const auto& name : split_list(include)) {
      const std::size_t i = index_of(d.data.feature_names, name, "feature");
      if (std::find(keep.begin(), keep.end(), i) == keep.end()) keep.push_back(i);
    }
    if (keep.size() > budget)
      fail(ErrorCode::InvalidArgument, std::to_string(keep.size()) + " included features exceed the budget of " +
                                           std::to_string(budget));
    for (std::size_t i : fs::select_events(report, budget)) {
      if (keep.size() >= budget) break;
      if (std::find(keep.begin(), keep.end(), i) == keep.end()) keep.push_back(i);
    }
    std::string list;
    for (std::size_t i = 0; i < keep.size(); ++i) list += (i ? "," : "") + d.data.feature_names[keep[i]];
    if (score_csv != nullptr) *score_csv = dup_string(fs::format_score_csv(report));
    if (selected != nullptr) *selected = dup_string(list);
  });
}

// ---- models

void rvvt_mlp_config_init(rvvt_mlp_config* c) {
  if (c == nullptr) return;
  const models::TrainConfig d;
  c->learning_rate = d.learning_rate;
  c->epochs = d.epochs;
  c->batch_size = d.batch_size;
  c->seed = d.seed;
  c->l2_penalty = d.l2_penalty;
  c->frozen_layers = d.frozen_layer_count;
  c->hidden = kDefaultHidden;
  c->hidden_count = std::size(kDefaultHidden);
}

void rvvt_detector_config_init(rvvt_detector_config* c) {
  if (c == nullptr) return;
  c->kind = "gauss";
  c->percentile = 95.0;
  c->k = 5;
  c->rounds = 50;
  c->bags = 25;
  c->base = "stump";
  c->seed = 1;
  c->two_stage_knn = 0;
  rvvt_mlp_config_init(&c->stage2);
}

rvvt_status rvvt_model_train_nb(const rvvt_dataset* ds, double alpha, rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    auto m = std::make_unique<rvvt_model>();
    m->file = io::wrap(models::train_nb(need(ds, "dataset").data, alpha));
    *out = m.release();
  });
}

rvvt_status rvvt_model_train_mlp(const rvvt_dataset* ds, const rvvt_mlp_config* c, rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    auto m = std::make_unique<rvvt_model>();
    m->file = io::wrap(models::train_mlp(need(ds, "dataset").data, to_train_config(c)).model);
    *out = m.release();
  });
}

rvvt_status rvvt_model_fine_tune(const rvvt_model* base, const rvvt_dataset* ds, const rvvt_mlp_config* c,
                                 rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    const auto& b = need(base, "base");
    const auto* mlp = std::get_if<models::MlpModel>(&b.file.model);
    if (mlp == nullptr) fail(ErrorCode::InvalidArgument, "fine-tuning needs an mlp model");
    const auto& d = need(ds, "dataset");
    check_schema(b.file.schema_id, d);
    check_width(mlp->num_inputs(), d);
    auto m = std::make_unique<rvvt_model>();
    m->file = io::wrap(models::fine_tune(*mlp, d.data, to_train_config(c)).model);
    *out = m.release();
  });
}

rvvt_status rvvt_model_train_detector(const rvvt_dataset* ds, const rvvt_detector_config* c, rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    const auto& d = need(ds, "dataset");
    const auto& cfg = need(c, "config");
    const std::string kind = need_str(cfg.kind, "kind");
    const std::uint64_t schema = d.data.vocab_id;
    auto m = std::make_unique<rvvt_model>();
    if (kind == "gauss") {
      m->file = io::wrap(detect::fit_oneclass_gaussian(normal_rows(d), cfg.percentile), schema);
    } else if (kind == "knn") {
      m->file = io::wrap(detect::fit_knn_oneclass(normal_rows(d), cfg.k, cfg.percentile), schema);
    } else if (kind == "adaboost") {
      m->file = io::wrap(detect::adaboost_train(binary_view(d), cfg.rounds), schema);
    } else if (kind == "bagging") {
      detect::BaggingConfig bc;
      bc.bags = cfg.bags;
      bc.base = detect::parse_base_learner(need_str(cfg.base, "base"));
      bc.rounds = cfg.rounds;
      bc.seed = cfg.seed;
      m->file = io::wrap(detect::bagging_train(binary_view(d), bc), schema);
    } else if (kind == "two-stage") {
      if (!d.has_labels) fail(ErrorCode::InvalidArgument, "two-stage training needs labelled windows");
      detect::TwoStageConfig tc;
      tc.knn = cfg.two_stage_knn != 0;
      tc.k = cfg.k;
      tc.threshold_percentile = cfg.percentile;
      tc.stage2 = to_train_config(&cfg.stage2);
      m->file = io::wrap(detect::train_two_stage(d.data, tc));
    } else {
      fail(ErrorCode::InvalidArgument, "unknown detector kind '" + kind + "' (gauss|knn|adaboost|bagging|two-stage)");
    }
    *out = m.release();
  });
}

rvvt_status rvvt_model_train_pca(const rvvt_dataset* ds, size_t k, rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    const auto& d = need(ds, "dataset");
    auto m = std::make_unique<rvvt_model>();
    m->file = io::wrap(fs::pca_fit(d.data.features, k), d.data.vocab_id, d.data.feature_names);
    *out = m.release();
  });
}

rvvt_status rvvt_model_load(const char* path, rvvt_model** out) {
  return guard([&] {
    need(out, "out");
    auto m = std::make_unique<rvvt_model>();
    m->file = io::load_model(need_str(path, "path"));
    *out = m.release();
  });
}

rvvt_status rvvt_model_save(const rvvt_model* m, const char* path) {
  return guard([&] { io::save_model(need_str(path, "path"), need(m, "model").file); });
}

const char* rvvt_model_kind(const rvvt_model* m) { return m ? io::model_kind(m->file.model) : nullptr; }

void rvvt_model_free(rvvt_model* m) { delete m; }

rvvt_status rvvt_model_transform(const rvvt_model* m, const rvvt_dataset* ds, rvvt_dataset** out) {
  return guard([&] {
    need(out, "out");
    const auto& model = need(m, "model");
    const auto* pca = std::get_if<fs::PcaModel>(&model.file.model);
    if (pca == nullptr) fail(ErrorCode::InvalidArgument, "only PCA models transform datasets");
    const auto& d = need(ds, "dataset");
    check_schema(model.file.schema_id, d);
    check_width(pca->dim(), d);
    auto r = std::make_unique<rvvt_dataset>(d);
    r->data.features = fs::pca_transform(*pca, d.data.features);
    r->data.feature_names.clear();
    for (std::size_t i = 0; i < pca->k(); ++i) r->data.feature_names.push_back("pc" + std::to_string(i + 1));
    r->data.vocab_id = d.windowed ? hpc::schema_id(r->data.feature_names) : 0;
    *out = r.release();
  });
}

rvvt_status rvvt_model_predict(const rvvt_model* m, const rvvt_dataset* ds, rvvt_predictions** out) {
  return guard([&] {
    need(out, "out");
    const auto& model = need(m, "model");
    const auto& d = need(ds, "dataset");
    check_schema(model.file.schema_id, d);
    check_width(model_width(model.file.model), d);
    auto p = std::make_unique<rvvt_predictions>();
    predict_into(model.file, d, *p);
    *out = p.release();
  });
}

rvvt_status rvvt_predictions_read(const char* path, rvvt_predictions** out) {
  return guard([&] {
    need(out, "out");
    const std::string p = need_str(path, "path");
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open " + p);
    csv::LineReader reader(in, p);
    std::string line;
    auto r = std::make_unique<rvvt_predictions>();
    if (!reader.next(line)) fail(ErrorCode::BadHeader, p + ": empty predictions file");
    std::size_t id_col = 0, score_col = 0, label_col = 0;
    if (line == "window_start_row,score,verdict") {
      r->windowed = true;
      score_col = 1;
      label_col = 2;
    } else if (line == "id,predicted,score") {
      label_col = 1;
      score_col = 2;
    } else {
      fail(ErrorCode::BadHeader, reader.where() + "expected a detection report or prediction CSV header");
    }
    while (reader.next(line)) {
      const auto f = csv::split(line, ',');
      if (f.size() != 3) fail(ErrorCode::RaggedRow, reader.where() + "expected 3 fields");
      r->ids.emplace_back(f[id_col]);
      r->scores.push_back(reader.parse_double(f[score_col]));
      r->labels.emplace_back(f[label_col]);
    }
    *out = r.release();
  });
}

rvvt_status rvvt_predictions_write(const rvvt_predictions* pr, const char* path) {
  return guard([&] {
    const auto& p = need(pr, "predictions");
    std::string text = p.windowed ? "window_start_row,score,verdict\n" : "id,predicted,score\n";
    for (std::size_t i = 0; i < p.ids.size(); ++i) {
      if (p.windowed)
        text += p.ids[i] + "," + csv::format_double(p.scores[i]) + "," + p.labels[i] + "\n";
      else
        text += p.ids[i] + "," + p.labels[i] + "," + csv::format_double(p.scores[i]) + "\n";
    }
    write_text(need_str(path, "path"), text);
  });
}

size_t rvvt_predictions_count(const rvvt_predictions* p) { return p ? p->labels.size() : 0; }

const char* rvvt_predictions_label(const rvvt_predictions* p, size_t i) {
  return p && i < p->labels.size() ? p->labels[i].c_str() : nullptr;
}

double rvvt_predictions_score(const rvvt_predictions* p, size_t i) {
  return p && i < p->scores.size() ? p->scores[i] : 0.0;
}

void rvvt_predictions_free(rvvt_predictions* p) { delete p; }

rvvt_status rvvt_evaluate(const rvvt_predictions* pr, const char* truth_path, const char* positive,
                          const char* class_names, char** report) {
  return guard([&] {
    need(report, "report");
    const auto& p = need(pr, "predictions");
    const Truth truth = read_truth(need_str(truth_path, "truth_path"));
    const std::size_t n = truth.named ? truth.names.size() : truth.ids.size();
    if (n != p.labels.size())
      fail(ErrorCode::LengthMismatch, std::to_string(p.labels.size()) + " predictions for " + std::to_string(n) +
                                          " truth rows");

    std::vector<std::string> classes = split_list(class_names);
    std::vector<std::string> truth_names;
    if (truth.named) {
      truth_names = truth.names;
      if (classes.empty()) {
        std::set<std::string> all(truth.names.begin(), truth.names.end());
        all.insert(p.labels.begin(), p.labels.end());
        classes.assign(all.begin(), all.end());
      }
    } else {
      if (classes.empty()) classes = truth.classes;
      if (classes.empty()) {
        const std::set<std::string> predicted(p.labels.begin(), p.labels.end());
        const auto kinds = synth::anomaly_class_names();
        const bool binary = std::all_of(predicted.begin(), predicted.end(),
                                        [](const std::string& s) { return s == "normal" || s == "anomaly"; });
        const bool kinded = std::all_of(predicted.begin(), predicted.end(), [&](const std::string& s) {
          return std::find(kinds.begin(), kinds.end(), s) != kinds.end();
        });
        std::size_t max_id = 0;
        for (auto id : truth.ids) max_id = std::max(max_id, id);
        if (binary) {
          classes = {"normal", "anomaly"};
          for (auto id : truth.ids) truth_names.push_back(id == 0 ? "normal" : "anomaly");
        } else if (kinded && max_id < kinds.size()) {
          classes = kinds;
        } else {
          classes = default_class_names(std::max<std::size_t>(2, max_id + 1));
        }
      }
      if (truth_names.empty()) {
        for (auto id : truth.ids) {
          if (id >= classes.size()) fail(ErrorCode::InvalidArgument, "truth class id " + std::to_string(id) + " has no name");
          truth_names.push_back(classes[id]);
        }
      }
    }

    std::map<std::string, std::size_t> ids;
    for (std::size_t i = 0; i < classes.size(); ++i) ids.emplace(classes[i], i);
    auto lookup = [&](const std::string& name) {
      auto it = ids.find(name);
      if (it == ids.end()) fail(ErrorCode::InvalidArgument, "class '" + name + "' is not in the class list");
      return it->second;
    };
    std::vector<std::size_t> pred_ids, truth_ids;
    for (const auto& s : p.labels) pred_ids.push_back(lookup(s));
    for (const auto& s : truth_names) truth_ids.push_back(lookup(s));

    std::size_t pos = 1;
    if (positive != nullptr && *positive != '\0') {
      auto it = ids.find(positive);
      if (it == ids.end()) fail(ErrorCode::UnknownPositiveClass, std::string("positive class '") + positive + "' is unknown");
      pos = it->second;
    } else if (auto it = ids.find("anomaly"); it != ids.end()) {
      pos = it->second;
    }
    const auto r = eval::eval_metrics(pred_ids, truth_ids, p.scores, pos, classes);
    *report = dup_string(eval::format_report_json(r));
  });
}

}  // extern "C"
