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

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rvvt/detectors.hpp"
#include "rvvt/feature_selection.hpp"
#include "rvvt/static_models.hpp"

namespace rvvt::io {

inline constexpr int kModelFormatVersion = 1;

using AnyModel = std::variant<models::NbModel, models::MlpModel, detect::GaussianOneClass, detect::KnnOneClass,
                              detect::AdaBoostModel, detect::BaggingModel, detect::TwoStageModel, fs::PcaModel>;

/// Kind tag stored in the file: nb, mlp, gauss, knn, adaboost, bagging,
/// two_stage or pca.
const char* model_kind(const AnyModel& model) noexcept;

/// The shared model file: a JSON envelope
/// `{format, format_version, kind, schema_id, class_names, params}`.
/// `schema_id` is the vocabulary id for static models and the windowed
/// column schema id for detectors.
struct ModelFile {
  AnyModel model;
  std::uint64_t schema_id = 0;
  std::vector<std::string> class_names;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// Builds the envelope, taking schema and class names from the model when it
/// carries them.
ModelFile wrap(AnyModel model, std::uint64_t schema_id = 0, std::vector<std::string> class_names = {});

std::string dump_model(const ModelFile& file);
ModelFile parse_model(const std::string& text, const std::string& source = "<model>");
void save_model(const std::string& path, const ModelFile& file);
ModelFile load_model(const std::string& path);

}  // namespace rvvt::io
