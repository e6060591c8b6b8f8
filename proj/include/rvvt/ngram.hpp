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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rvvt/dataset.hpp"
#include "rvvt/decoder.hpp"

namespace rvvt::features {

/// A contiguous run of n opcode tokens. Ordered lexicographically by token.
using Gram = std::vector<std::string>;
using GramCounts = std::map<Gram, std::uint64_t>;

/// Sliding window of width n, stride 1. Total count is max(0, len - n + 1).
GramCounts extract_ngrams(std::span<const std::string> tokens, std::size_t n);

enum class Selection { Frequency, InfoGain };

const char* selection_name(Selection s) noexcept;
Selection parse_selection(const std::string& text);

struct VocabOptions {
  std::size_t n = 2;
  std::size_t max_size = 1000;  // 0 keeps every surviving gram
  std::size_t min_doc_freq = 1;
  Selection selection = Selection::Frequency;
};

/// Learned n-gram schema. Column order is the ranking order at build time;
/// idf weights are frozen from the training corpus.
class NgramVocab {
 public:
  NgramVocab() = default;
  NgramVocab(std::size_t n, std::vector<Gram> grams, std::vector<double> idf,
             Selection selection = Selection::Frequency);

  std::size_t n() const noexcept { return n_; }
  std::size_t size() const noexcept { return grams_.size(); }
  bool empty() const noexcept { return grams_.empty(); }
  const std::vector<Gram>& grams() const noexcept { return grams_; }
  const std::vector<double>& idf() const noexcept { return idf_; }
  Selection selection() const noexcept { return selection_; }
  std::uint64_t id() const noexcept { return id_; }

  std::optional<std::size_t> find(const Gram& gram) const;

  /// Column names, grams encoded as "tok1|tok2".
  std::vector<std::string> column_names() const;

 private:
  std::size_t n_ = 0;
  std::vector<Gram> grams_;
  std::vector<double> idf_;
  std::map<Gram, std::size_t> index_;
  Selection selection_ = Selection::Frequency;
  std::uint64_t id_ = 0;
};

/// Keeps grams with document frequency >= min_doc_freq, ranks them by total
/// count or by information gain of gram presence against `labels`, breaks
/// ties by gram order, truncates to max_size. `labels` may be empty for
/// frequency selection.
NgramVocab build_vocab(std::span<const GramCounts> corpus, std::span<const std::size_t> labels,
                       const VocabOptions& options);

struct FeatureVector {
  std::vector<double> values;
  std::uint64_t vocab_id = 0;
  Norm norm = Norm::RelFreq;
};

/// Projects a sequence onto the vocabulary. Out-of-vocabulary grams are
/// dropped; relfreq divides by the sequence's total gram count, tfidf further
/// multiplies by the frozen idf, raw keeps counts.
FeatureVector vectorize(std::span<const std::string> tokens, const NgramVocab& vocab, Norm norm);

LabeledDataset vectorize_corpus(std::span<const rv::OpcodeSequence> corpus,
                                std::span<const std::size_t> labels, const NgramVocab& vocab,
                                Norm norm, std::vector<std::string> class_names);

std::string gram_to_text(const Gram& gram);
Gram gram_from_text(const std::string& text);

/// `index<TAB>gram<TAB>idf`, one line per column.
void write_vocab(const std::string& path, const NgramVocab& vocab);
NgramVocab read_vocab(const std::string& path);
std::string format_vocab(const NgramVocab& vocab);
NgramVocab parse_vocab(std::istream& in, const std::string& source);

/// Feature matrix CSV: `label,<col_1>,...,<col_k>` then one row per sample.
void write_feature_csv(const std::string& path, const LabeledDataset& data);
std::string format_feature_csv(const LabeledDataset& data);
/// Column names must match `vocab` when it is given; its id is then stamped
/// on the dataset. Class names default to class0..classK.
LabeledDataset read_feature_csv(const std::string& path, const NgramVocab* vocab = nullptr,
                                std::vector<std::string> class_names = {});
LabeledDataset parse_feature_csv(std::istream& in, const std::string& source,
                                 const NgramVocab* vocab, std::vector<std::string> class_names);

}  // namespace rvvt::features
