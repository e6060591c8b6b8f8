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

#include "rvvt/ngram.hpp"
#include "rvvt/rng.hpp"
#include "test_support.hpp"

using namespace rvvt;
using namespace rvvt::features;
using rvvt::testing::code_of;

namespace {

using Tokens = std::vector<std::string>;

GramCounts brute_force(const Tokens& seq, std::size_t n) {
  GramCounts out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i)
    ++out[Gram(seq.begin() + static_cast<std::ptrdiff_t>(i),
               seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
  return out;
}

GramCounts counts(std::initializer_list<std::pair<Gram, std::uint64_t>> items) {
  GramCounts out;
  for (const auto& [g, c] : items) out[g] = c;
  return out;
}

}  // namespace

TEST_CASE("extract_ngrams examples") {
  Tokens abab{"a", "b", "a", "b"};
  auto bigrams = extract_ngrams(abab, 2);
  CHECK(bigrams.size() == 2);
  CHECK(bigrams[Gram{"a", "b"}] == 2);
  CHECK(bigrams[Gram{"b", "a"}] == 1);
  CHECK(extract_ngrams(Tokens{}, 3).empty());
  CHECK(extract_ngrams(Tokens{"a", "b"}, 3).empty());
  CHECK(code_of([&] { extract_ngrams(abab, 0); }) == ErrorCode::InvalidN);
}

TEST_CASE("extract_ngrams matches a sliding-window count") {
  Rng rng(3);
  const Tokens alphabet{"addi", "ld", "sd", "beq", "c.mv", "jal"};
  for (int trial = 0; trial < 100; ++trial) {
    Tokens seq(rng.below(80));
    for (auto& t : seq) t = alphabet[rng.below(alphabet.size())];
    for (std::size_t n = 1; n <= 4; ++n) CHECK(extract_ngrams(seq, n) == brute_force(seq, n));
  }
}

TEST_CASE("build_vocab filters and ranks") {
  VocabOptions opt;
  opt.n = 2;
  opt.min_doc_freq = 2;
  std::vector<GramCounts> docs{counts({{{"a", "b"}, 1}, {{"x", "y"}, 4}}),
                               counts({{{"a", "b"}, 3}, {{"p", "q"}, 1}})};
  auto vocab = build_vocab(docs, {}, opt);
  REQUIRE(vocab.size() == 1);
  CHECK(vocab.grams()[0] == Gram{"a", "b"});
  // idf = ln((1+D)/(1+df)) + 1 with D = df = 2
  CHECK(vocab.idf()[0] == doctest::Approx(1.0));

  opt.min_doc_freq = 3;
  CHECK(code_of([&] { build_vocab(docs, {}, opt); }) == ErrorCode::EmptyVocabulary);

  VocabOptions top;
  top.n = 1;
  top.max_size = 1;
  std::vector<GramCounts> unigram{counts({{{"x"}, 5}, {{"y"}, 3}})};
  auto one = build_vocab(unigram, {}, top);
  REQUIRE(one.size() == 1);
  CHECK(one.grams()[0] == Gram{"x"});
}

TEST_CASE("info-gain ranks the class-exclusive gram first") {
  // g only in class 1; h everywhere; k independent of the label.
  std::vector<GramCounts> docs{
      counts({{{"h"}, 9}, {{"k"}, 9}}),
      counts({{{"h"}, 9}}),
      counts({{{"g"}, 1}, {{"h"}, 9}, {{"k"}, 9}}),
      counts({{{"g"}, 1}, {{"h"}, 9}}),
  };
  std::vector<std::size_t> labels{0, 0, 1, 1};
  VocabOptions opt;
  opt.n = 1;
  opt.selection = Selection::InfoGain;
  auto vocab = build_vocab(docs, labels, opt);
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.grams()[0] == Gram{"g"});
  // Frequency selection would have put g last.
  opt.selection = Selection::Frequency;
  CHECK(build_vocab(docs, labels, opt).grams().back() == Gram{"g"});
  opt.selection = Selection::InfoGain;
  CHECK(code_of([&] { build_vocab(docs, std::vector<std::size_t>{0}, opt); }) ==
        ErrorCode::LengthMismatch);
}

TEST_CASE("vectorize normalizations") {
  NgramVocab vocab(2, {{"a", "b"}, {"b", "a"}}, {1.0, 2.0});
  Tokens abab{"a", "b", "a", "b"};
  auto rel = vectorize(abab, vocab, Norm::RelFreq);
  CHECK(rel.values[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(rel.values[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(rel.vocab_id == vocab.id());
  auto raw = vectorize(abab, vocab, Norm::Raw);
  CHECK(raw.values == std::vector<double>{2.0, 1.0});
  auto tfidf = vectorize(abab, vocab, Norm::TfIdf);
  CHECK(tfidf.values[1] == doctest::Approx(2.0 / 3.0));
  CHECK(vectorize(Tokens{"a"}, vocab, Norm::RelFreq).values == std::vector<double>{0.0, 0.0});
  CHECK(code_of([&] { vectorize(abab, NgramVocab{}, Norm::Raw); }) == ErrorCode::EmptyVocabulary);
}

TEST_CASE("vocab and feature files round trip") {
  NgramVocab vocab(2, {{"addi", "ld"}, {"c.mv", "jal"}}, {1.5, 1.25});
  auto text = format_vocab(vocab);
  std::istringstream in(text);
  auto back = parse_vocab(in, "mem");
  CHECK(back.grams() == vocab.grams());
  CHECK(back.idf() == vocab.idf());
  CHECK(back.id() == vocab.id());
  CHECK(gram_from_text(gram_to_text({"a", "b.c"})) == Gram{"a", "b.c"});

  std::vector<rv::OpcodeSequence> corpus{{{"addi", "ld", "c.mv", "jal"}, "s0"},
                                         {{"c.mv", "jal", "c.mv", "jal"}, "s1"}};
  auto data = vectorize_corpus(corpus, std::vector<std::size_t>{0, 1}, vocab, Norm::RelFreq,
                               {"benign", "malware"});
  std::istringstream csv(format_feature_csv(data));
  auto parsed = parse_feature_csv(csv, "mem", &vocab, {"benign", "malware"});
  CHECK(parsed.features == data.features);
  CHECK(parsed.labels == data.labels);
  CHECK(parsed.vocab_id == vocab.id());
  std::istringstream named(format_feature_csv(data));
  CHECK(parse_feature_csv(named, "mem", nullptr, {}).class_names ==
        std::vector<std::string>{"benign", "malware"});

  NgramVocab other(2, {{"addi", "sd"}}, {1.0});
  std::istringstream again(format_feature_csv(data));
  CHECK(code_of([&] { parse_feature_csv(again, "mem", &other, {}); }) == ErrorCode::BadHeader);
}

TEST_CASE("build_vocab is deterministic") {
  Rng rng(11);
  const Tokens alphabet{"a", "b", "c", "d"};
  std::vector<GramCounts> docs;
  for (int d = 0; d < 30; ++d) {
    Tokens seq(50);
    for (auto& t : seq) t = alphabet[rng.below(alphabet.size())];
    docs.push_back(extract_ngrams(seq, 3));
  }
  VocabOptions opt;
  opt.n = 3;
  opt.max_size = 20;
  auto a = build_vocab(docs, {}, opt);
  auto b = build_vocab(docs, {}, opt);
  CHECK(a.grams() == b.grams());
  CHECK(a.id() == b.id());
}
