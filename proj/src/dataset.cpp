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

#include "rvvt/dataset.hpp"

#include <cinttypes>
#include <cstdio>

#include "rvvt/error.hpp"

namespace rvvt {

const char* norm_name(Norm norm) noexcept {
  switch (norm) {
    case Norm::RelFreq: return "relfreq";
    case Norm::TfIdf: return "tfidf";
    case Norm::Raw: return "raw";
  }
  return "raw";
}

Norm parse_norm(const std::string& text) {
  if (text == "relfreq") return Norm::RelFreq;
  if (text == "tfidf") return Norm::TfIdf;
  if (text == "raw") return Norm::Raw;
  fail(ErrorCode::InvalidArgument, "unknown normalisation '" + text + "'");
}

void LabeledDataset::validate() const {
  if (features.rows() != labels.size())
    fail(ErrorCode::ShapeMismatch, std::to_string(features.rows()) + " rows but " +
                                       std::to_string(labels.size()) + " labels");
  if (!feature_names.empty() && feature_names.size() != features.cols())
    fail(ErrorCode::ShapeMismatch, "feature name count differs from column count");
  for (std::size_t label : labels)
    if (label >= class_names.size())
      fail(ErrorCode::InvalidArgument, "label " + std::to_string(label) +
                                           " has no class name (" +
                                           std::to_string(class_names.size()) + " classes)");
}

LabeledDataset LabeledDataset::subset(const std::vector<std::size_t>& rows) const {
  LabeledDataset out;
  out.features = features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (std::size_t r : rows) out.labels.push_back(labels[r]);
  out.class_names = class_names;
  out.feature_names = feature_names;
  out.vocab_id = vocab_id;
  out.norm = norm;
  if (rows.empty()) out.features = Matrix(0, features.cols());
  return out;
}

std::vector<std::string> default_class_names(std::size_t count) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < count; ++i) names.push_back("class" + std::to_string(i));
  return names;
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_id(std::uint64_t id) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, id);
  return buf;
}

std::uint64_t parse_id(const std::string& text) {
  if (text.empty() || text.size() > 16) fail(ErrorCode::Format, "bad identifier '" + text + "'");
  std::uint64_t v = 0;
  for (char c : text) {
    v <<= 4;
    if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
    else fail(ErrorCode::Format, "bad identifier '" + text + "'");
  }
  return v;
}

}  // namespace rvvt
