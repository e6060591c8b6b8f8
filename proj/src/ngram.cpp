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

#include "rvvt/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "rvvt/error.hpp"
#include "rvvt/feature_selection.hpp"

namespace rvvt::features {

GramCounts extract_ngrams(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) fail(ErrorCode::InvalidN, "gram length must be at least 1");
  GramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[Gram(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return counts;
}

const char* selection_name(Selection s) noexcept {
  return s == Selection::InfoGain ? "info_gain" : "frequency";
}

Selection parse_selection(const std::string& text) {
  if (text == "frequency") return Selection::Frequency;
  if (text == "info_gain" || text == "mi") return Selection::InfoGain;
  fail(ErrorCode::InvalidArgument, "unknown vocabulary selection '" + text + "'");
}

NgramVocab::NgramVocab(std::size_t n, std::vector<Gram> grams, std::vector<double> idf,
                       Selection selection)
    : n_(n), grams_(std::move(grams)), idf_(std::move(idf)), selection_(selection) {
  if (n_ == 0) fail(ErrorCode::InvalidN, "gram length must be at least 1");
  if (idf_.size() != grams_.size())
    fail(ErrorCode::ShapeMismatch, "idf weight count differs from vocabulary size");
  std::string canonical = std::to_string(n_) + "\n";
  for (std::size_t i = 0; i < grams_.size(); ++i) {
    if (grams_[i].size() != n_)
      fail(ErrorCode::InvalidN, "gram '" + gram_to_text(grams_[i]) + "' does not have length " +
                                    std::to_string(n_));
    if (!index_.emplace(grams_[i], i).second)
      fail(ErrorCode::Format, "duplicate gram '" + gram_to_text(grams_[i]) + "'");
    canonical += gram_to_text(grams_[i]) + "\t" + csv::format_double(idf_[i]) + "\n";
  }
  id_ = fnv1a(canonical);
}

std::optional<std::size_t> NgramVocab::find(const Gram& gram) const {
  auto it = index_.find(gram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> NgramVocab::column_names() const {
  std::vector<std::string> names;
  names.reserve(grams_.size());
  for (const auto& g : grams_) names.push_back(gram_to_text(g));
  return names;
}

NgramVocab build_vocab(std::span<const GramCounts> corpus, std::span<const std::size_t> labels,
                       const VocabOptions& options) {
  if (options.n == 0) fail(ErrorCode::InvalidN, "gram length must be at least 1");
  if (corpus.empty()) fail(ErrorCode::InvalidArgument, "vocabulary corpus is empty");
  if (options.selection == Selection::InfoGain && labels.size() != corpus.size())
    fail(ErrorCode::LengthMismatch, "information-gain selection needs one label per document");

  std::map<Gram, std::pair<std::uint64_t, std::size_t>> stats;  // total, doc freq
  for (const auto& doc : corpus) {
    for (const auto& [gram, count] : doc) {
      if (gram.size() != options.n)
        fail(ErrorCode::InvalidN, "corpus gram '" + gram_to_text(gram) + "' has length " +
                                      std::to_string(gram.size()));
      auto& s = stats[gram];
      s.first += count;
      s.second += 1;
    }
  }

  std::vector<Gram> candidates;
  std::vector<std::uint64_t> totals;
  std::vector<std::size_t> doc_freq;
  for (const auto& [gram, s] : stats) {  // std::map iterates in gram order
    if (s.second < options.min_doc_freq) continue;
    candidates.push_back(gram);
    totals.push_back(s.first);
    doc_freq.push_back(s.second);
  }
  if (candidates.empty())
    fail(ErrorCode::EmptyVocabulary, "no gram reaches document frequency " +
                                         std::to_string(options.min_doc_freq));

  std::vector<double> score(candidates.size());
  if (options.selection == Selection::Frequency) {
    for (std::size_t i = 0; i < candidates.size(); ++i) score[i] = static_cast<double>(totals[i]);
  } else {
    // Presence indicator per document against the labels, two bins.
    Matrix presence(corpus.size(), candidates.size(), 0.0);
    for (std::size_t d = 0; d < corpus.size(); ++d)
      for (std::size_t i = 0; i < candidates.size(); ++i)
        if (corpus[d].contains(candidates[i])) presence(d, i) = 1.0;
    score = fs::mutual_information(presence, labels, 2).scores;
  }

  // Candidates are already in gram order, so a stable sort breaks ties by it.
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  if (options.max_size > 0 && order.size() > options.max_size) order.resize(options.max_size);

  const double docs = static_cast<double>(corpus.size());
  std::vector<Gram> grams;
  std::vector<double> idf;
  for (std::size_t i : order) {
    grams.push_back(candidates[i]);
    idf.push_back(std::log((1.0 + docs) / (1.0 + static_cast<double>(doc_freq[i]))) + 1.0);
  }
  return NgramVocab(options.n, std::move(grams), std::move(idf), options.selection);
}

FeatureVector vectorize(std::span<const std::string> tokens, const NgramVocab& vocab, Norm norm) {
  if (vocab.empty()) fail(ErrorCode::EmptyVocabulary, "cannot vectorize against an empty vocabulary");
  FeatureVector fv;
  fv.values.assign(vocab.size(), 0.0);
  fv.vocab_id = vocab.id();
  fv.norm = norm;
  const std::size_t n = vocab.n();
  if (tokens.size() < n) return fv;
  const std::size_t total = tokens.size() - n + 1;
  Gram window;
  for (std::size_t i = 0; i < total; ++i) {
    window.assign(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                  tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    if (auto idx = vocab.find(window)) fv.values[*idx] += 1.0;
  }
  if (norm != Norm::Raw) {
    const double denom = static_cast<double>(total);
    for (std::size_t j = 0; j < fv.values.size(); ++j) {
      fv.values[j] /= denom;
      if (norm == Norm::TfIdf) fv.values[j] *= vocab.idf()[j];
    }
  }
  return fv;
}

LabeledDataset vectorize_corpus(std::span<const rv::OpcodeSequence> corpus,
                                std::span<const std::size_t> labels, const NgramVocab& vocab,
                                Norm norm, std::vector<std::string> class_names) {
  if (corpus.size() != labels.size())
    fail(ErrorCode::LengthMismatch, "corpus and label counts differ");
  LabeledDataset data;
  data.features = Matrix(0, vocab.size());
  for (const auto& seq : corpus) data.features.append_row(vectorize(seq.tokens, vocab, norm).values);
  data.labels.assign(labels.begin(), labels.end());
  data.class_names = std::move(class_names);
  data.feature_names = vocab.column_names();
  data.vocab_id = vocab.id();
  data.norm = norm;
  data.validate();
  return data;
}

std::string gram_to_text(const Gram& gram) {
  std::string out;
  for (std::size_t i = 0; i < gram.size(); ++i) {
    if (i) out += '|';
    out += gram[i];
  }
  return out;
}

Gram gram_from_text(const std::string& text) {
  Gram gram;
  for (auto part : csv::split(text, '|')) {
    if (part.empty()) fail(ErrorCode::Format, "empty token in gram '" + text + "'");
    gram.emplace_back(part);
  }
  return gram;
}

std::string format_vocab(const NgramVocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i)
    out += std::to_string(i) + "\t" + gram_to_text(vocab.grams()[i]) + "\t" +
           csv::format_double(vocab.idf()[i]) + "\n";
  return out;
}

void write_vocab(const std::string& path, const NgramVocab& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << format_vocab(vocab);
}

NgramVocab parse_vocab(std::istream& in, const std::string& source) {
  csv::LineReader reader(in, source);
  std::string line;
  std::vector<Gram> grams;
  std::vector<double> idf;
  while (reader.next(line)) {
    auto fields = csv::split(line, '\t');
    if (fields.size() != 3) fail(ErrorCode::Format, reader.where() + "expected index<TAB>gram<TAB>idf");
    if (reader.parse_int(fields[0]) != static_cast<long long>(grams.size()))
      fail(ErrorCode::Format, reader.where() + "indices must run 0..k-1 in order");
    grams.push_back(gram_from_text(std::string(fields[1])));
    idf.push_back(reader.parse_double(fields[2]));
  }
  if (grams.empty()) fail(ErrorCode::EmptyVocabulary, source + ": vocabulary file is empty");
  const std::size_t n = grams.front().size();
  return NgramVocab(n, std::move(grams), std::move(idf));
}

NgramVocab read_vocab(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return parse_vocab(in, path);
}

namespace {
constexpr std::string_view kClassesPrefix = "# classes=";
}  // namespace

std::string format_feature_csv(const LabeledDataset& data) {
  std::string out;
  if (!data.class_names.empty()) {
    out += kClassesPrefix;
    for (std::size_t c = 0; c < data.class_names.size(); ++c)
      out += (c ? "," : "") + data.class_names[c];
    out += "\n";
  }
  out += "label";
  for (const auto& name : data.feature_names) out += "," + name;
  out += "\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.labels[i]);
    for (double v : data.features.row(i)) out += "," + csv::format_double(v);
    out += "\n";
  }
  return out;
}

void write_feature_csv(const std::string& path, const LabeledDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << format_feature_csv(data);
}

LabeledDataset parse_feature_csv(std::istream& in, const std::string& source,
                                 const NgramVocab* vocab, std::vector<std::string> class_names) {
  csv::LineReader reader(in, source);
  std::string line;
  if (!reader.next(line)) fail(ErrorCode::BadHeader, source + ": empty feature file");
  std::vector<std::string> stored_names;
  if (line.starts_with(kClassesPrefix)) {
    for (auto name : csv::split(std::string_view(line).substr(kClassesPrefix.size()), ','))
      stored_names.emplace_back(name);
    if (!reader.next(line)) fail(ErrorCode::BadHeader, source + ": missing header line");
  }
  if (class_names.empty()) class_names = std::move(stored_names);
  auto header = csv::split(line, ',');
  if (header.front() != "label") fail(ErrorCode::BadHeader, reader.where() + "first column must be 'label'");

  LabeledDataset data;
  for (std::size_t i = 1; i < header.size(); ++i) data.feature_names.emplace_back(header[i]);
  if (vocab != nullptr) {
    if (data.feature_names != vocab->column_names())
      fail(ErrorCode::BadHeader, reader.where() + "columns do not match the vocabulary");
    data.vocab_id = vocab->id();
  }
  data.features = Matrix(0, data.feature_names.size());
  std::vector<double> row(data.feature_names.size());
  std::size_t max_label = 0;
  while (reader.next(line)) {
    auto fields = csv::split(line, ',');
    if (fields.size() != header.size())
      fail(ErrorCode::RaggedRow, reader.where() + "expected " + std::to_string(header.size()) +
                                     " fields, found " + std::to_string(fields.size()));
    const long long label = reader.parse_int(fields[0]);
    if (label < 0) fail(ErrorCode::Format, reader.where() + "negative class id");
    data.labels.push_back(static_cast<std::size_t>(label));
    max_label = std::max(max_label, static_cast<std::size_t>(label));
    for (std::size_t j = 1; j < fields.size(); ++j) row[j - 1] = reader.parse_double(fields[j]);
    data.features.append_row(row);
  }
  data.class_names = class_names.empty() ? default_class_names(std::max<std::size_t>(2, max_label + 1))
                                         : std::move(class_names);
  data.validate();
  return data;
}

LabeledDataset read_feature_csv(const std::string& path, const NgramVocab* vocab,
                                std::vector<std::string> class_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  return parse_feature_csv(in, path, vocab, std::move(class_names));
}

}  // namespace rvvt::features
