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
#include <string>
#include <vector>

#include "rvvt/matrix.hpp"

namespace rvvt {

/// How a feature row was normalised. Dynamic (windowed) datasets use Raw.
enum class Norm { RelFreq, TfIdf, Raw };

const char* norm_name(Norm norm) noexcept;
Norm parse_norm(const std::string& text);

/// Fixed-width numeric rows plus one class id per row. Shared by the static
/// (n-gram) and dynamic (windowed counter) pipelines.
struct LabeledDataset {
  Matrix features;
  std::vector<std::size_t> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;
  std::uint64_t vocab_id = 0;
  Norm norm = Norm::Raw;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t num_features() const noexcept { return features.cols(); }
  std::size_t num_classes() const noexcept { return class_names.size(); }

  /// Throws ShapeMismatch / InvalidArgument when the fields disagree.
  void validate() const;

  LabeledDataset subset(const std::vector<std::size_t>& rows) const;
};

/// Default class names "class0".."class<k-1>".
std::vector<std::string> default_class_names(std::size_t count);

/// 64-bit FNV-1a, used for schema identifiers.
std::uint64_t fnv1a(const std::string& text, std::uint64_t seed = 0xcbf29ce484222325ULL);

std::string format_id(std::uint64_t id);
std::uint64_t parse_id(const std::string& text);

}  // namespace rvvt
