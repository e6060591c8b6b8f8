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

#include "rvvt/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rvvt/dataset.hpp"
#include "rvvt/error.hpp"

namespace rvvt::io {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormatTag = "rvvt-model";

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", m.data()}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) fail(ErrorCode::Format, "matrix data does not match its shape");
  m.data() = std::move(data);
  return m;
}

json mlp_to_json(const models::MlpModel& m) {
  json layers = json::array();
  for (const auto& l : m.layers) layers.push_back({{"weights", matrix_to_json(l.weights)}, {"biases", l.biases}});
  return {{"layer_sizes", m.layer_sizes}, {"layers", layers}};
}

models::MlpModel mlp_from_json(const json& j) {
  models::MlpModel m;
  m.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
  for (const auto& l : j.at("layers"))
    m.layers.push_back({matrix_from_json(l.at("weights")), l.at("biases").get<std::vector<double>>()});
  if (m.layer_sizes.size() < 2 || m.layers.size() != m.layer_sizes.size() - 1)
    fail(ErrorCode::Format, "MLP layer list does not match layer_sizes");
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const auto& l = m.layers[i];
    if (l.weights.rows() != m.layer_sizes[i + 1] || l.weights.cols() != m.layer_sizes[i] ||
        l.biases.size() != m.layer_sizes[i + 1])
      fail(ErrorCode::Format, "MLP layer " + std::to_string(i) + " has the wrong shape");
  }
  return m;
}

json oneclass_to_json(const detect::OneClassModel& m) {
  if (const auto* g = std::get_if<detect::GaussianOneClass>(&m))
    return {{"kind", "gauss"},
            {"mean", g->mean},
            {"variances", g->variances},
            {"threshold", g->threshold},
            {"threshold_percentile", g->threshold_percentile},
            {"training_scores", g->training_scores}};
  const auto& k = std::get<detect::KnnOneClass>(m);
  return {{"kind", "knn"},
          {"reference", matrix_to_json(k.reference)},
          {"k", k.k},
          {"threshold", k.threshold},
          {"threshold_percentile", k.threshold_percentile},
          {"training_scores", k.training_scores}};
}

detect::OneClassModel oneclass_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "gauss") {
    detect::GaussianOneClass g;
    g.mean = j.at("mean").get<std::vector<double>>();
    g.variances = j.at("variances").get<std::vector<double>>();
    g.threshold = j.at("threshold").get<double>();
    g.threshold_percentile = j.at("threshold_percentile").get<double>();
    g.training_scores = j.at("training_scores").get<std::vector<double>>();
    if (g.mean.size() != g.variances.size()) fail(ErrorCode::Format, "mean and variances differ in length");
    for (double v : g.variances)
      if (!(v >= detect::kVarianceFloor)) fail(ErrorCode::Format, "variance below floor");
    return g;
  }
  if (kind == "knn") {
    detect::KnnOneClass k;
    k.reference = matrix_from_json(j.at("reference"));
    k.k = j.at("k").get<std::size_t>();
    k.threshold = j.at("threshold").get<double>();
    k.threshold_percentile = j.at("threshold_percentile").get<double>();
    k.training_scores = j.at("training_scores").get<std::vector<double>>();
    if (k.k == 0 || k.k > k.reference.rows()) fail(ErrorCode::Format, "kNN k out of range");
    return k;
  }
  fail(ErrorCode::Format, "unknown one-class kind '" + kind + "'");
}

json adaboost_to_json(const detect::AdaBoostModel& m) {
  json stumps = json::array();
  for (const auto& s : m.stumps)
    stumps.push_back({{"feature", s.feature}, {"threshold", s.threshold}, {"polarity", s.polarity}});
  return {{"num_features", m.num_features}, {"stumps", stumps}, {"alphas", m.alphas}};
}

detect::AdaBoostModel adaboost_from_json(const json& j, const std::vector<std::string>& class_names) {
  detect::AdaBoostModel m;
  m.num_features = j.at("num_features").get<std::size_t>();
  for (const auto& s : j.at("stumps")) {
    detect::Stump st{s.at("feature").get<std::size_t>(), s.at("threshold").get<double>(), s.at("polarity").get<int>()};
    if (st.feature >= m.num_features || (st.polarity != 1 && st.polarity != -1))
      fail(ErrorCode::Format, "invalid stump");
    m.stumps.push_back(st);
  }
  m.alphas = j.at("alphas").get<std::vector<double>>();
  if (m.alphas.size() != m.stumps.size()) fail(ErrorCode::Format, "stump and alpha counts differ");
  m.class_names = class_names;
  return m;
}

json params_of(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, models::NbModel>) {
          return {{"alpha", m.alpha},
                  {"class_log_priors", m.class_log_priors},
                  {"feature_log_likelihoods", matrix_to_json(m.feature_log_likelihoods)}};
        } else if constexpr (std::is_same_v<T, models::MlpModel>) {
          return mlp_to_json(m);
        } else if constexpr (std::is_same_v<T, detect::GaussianOneClass> || std::is_same_v<T, detect::KnnOneClass>) {
          json j = oneclass_to_json(detect::OneClassModel(m));
          j.erase("kind");
          return j;
        } else if constexpr (std::is_same_v<T, detect::AdaBoostModel>) {
          return adaboost_to_json(m);
        } else if constexpr (std::is_same_v<T, detect::BaggingModel>) {
          json members = json::array();
          for (const auto& mem : m.members) {
            if (const auto* c = std::get_if<detect::ConstantModel>(&mem)) {
              members.push_back({{"kind", "constant"}, {"label", c->label}});
            } else {
              json a = adaboost_to_json(std::get<detect::AdaBoostModel>(mem));
              a["kind"] = "adaboost";
              members.push_back(a);
            }
          }
          return {{"seed", m.seed}, {"num_features", m.num_features}, {"members", members}};
        } else if constexpr (std::is_same_v<T, detect::TwoStageModel>) {
          return {{"stage1", oneclass_to_json(m.stage1)},
                  {"scaler", {{"mean", m.scaler.mean}, {"scale", m.scaler.scale}}},
                  {"stage2", mlp_to_json(m.stage2)}};
        } else {
          return {{"mean", m.mean}, {"components", matrix_to_json(m.components)}, {"eigenvalues", m.eigenvalues}};
        }
      },
      model);
}

AnyModel model_from_json(const std::string& kind, const json& p, std::uint64_t schema,
                         const std::vector<std::string>& names) {
  if (kind == "nb") {
    models::NbModel m;
    m.alpha = p.at("alpha").get<double>();
    m.class_log_priors = p.at("class_log_priors").get<std::vector<double>>();
    m.feature_log_likelihoods = matrix_from_json(p.at("feature_log_likelihoods"));
    if (m.class_log_priors.size() != m.feature_log_likelihoods.rows() || m.class_log_priors.size() != names.size())
      fail(ErrorCode::Format, "naive Bayes class counts disagree");
    m.vocab_id = schema;
    m.class_names = names;
    return m;
  }
  if (kind == "mlp") {
    auto m = mlp_from_json(p);
    m.vocab_id = schema;
    m.class_names = names;
    return m;
  }
  if (kind == "gauss" || kind == "knn") {
    json j = p;
    j["kind"] = kind;
    auto oc = oneclass_from_json(j);
    if (kind == "gauss") return std::get<detect::GaussianOneClass>(std::move(oc));
    return std::get<detect::KnnOneClass>(std::move(oc));
  }
  if (kind == "adaboost") return adaboost_from_json(p, names);
  if (kind == "bagging") {
    detect::BaggingModel m;
    m.seed = p.at("seed").get<std::uint64_t>();
    m.num_features = p.at("num_features").get<std::size_t>();
    m.class_names = names;
    for (const auto& mem : p.at("members")) {
      const auto mk = mem.at("kind").get<std::string>();
      if (mk == "constant")
        m.members.emplace_back(detect::ConstantModel{mem.at("label").get<std::size_t>()});
      else if (mk == "adaboost")
        m.members.emplace_back(adaboost_from_json(mem, names));
      else
        fail(ErrorCode::Format, "unknown bagging member kind '" + mk + "'");
    }
    return m;
  }
  if (kind == "two_stage") {
    detect::TwoStageModel m;
    m.stage1 = oneclass_from_json(p.at("stage1"));
    m.scaler.mean = p.at("scaler").at("mean").get<std::vector<double>>();
    m.scaler.scale = p.at("scaler").at("scale").get<std::vector<double>>();
    m.stage2 = mlp_from_json(p.at("stage2"));
    if (names.size() < 2) fail(ErrorCode::Format, "two-stage model needs normal plus anomaly class names");
    m.stage2.vocab_id = schema;
    m.stage2.class_names.assign(names.begin() + 1, names.end());
    m.class_names = names;
    m.schema_id = schema;
    return m;
  }
  if (kind == "pca") {
    fs::PcaModel m;
    m.mean = p.at("mean").get<std::vector<double>>();
    m.components = matrix_from_json(p.at("components"));
    m.eigenvalues = p.at("eigenvalues").get<std::vector<double>>();
    if (m.components.cols() != m.mean.size() || m.eigenvalues.size() != m.components.rows())
      fail(ErrorCode::Format, "PCA shapes disagree");
    return m;
  }
  fail(ErrorCode::Format, "unknown model kind '" + kind + "'");
}

}  // namespace

const char* model_kind(const AnyModel& model) noexcept {
  static constexpr const char* kKinds[] = {"nb", "mlp", "gauss", "knn", "adaboost", "bagging", "two_stage", "pca"};
  return kKinds[model.index()];
}

ModelFile wrap(AnyModel model, std::uint64_t schema_id, std::vector<std::string> class_names) {
  ModelFile f{std::move(model), schema_id, std::move(class_names)};
  // The envelope is authoritative on load, so stamp its values into the model
  // here as well; that keeps a wrapped model equal to its reloaded copy.
  std::visit(
      [&](auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, models::NbModel> || std::is_same_v<T, models::MlpModel>) {
          if (f.schema_id == 0) f.schema_id = m.vocab_id;
          if (f.class_names.empty()) f.class_names = m.class_names;
          m.vocab_id = f.schema_id;
          m.class_names = f.class_names;
        } else if constexpr (std::is_same_v<T, detect::TwoStageModel>) {
          if (f.schema_id == 0) f.schema_id = m.schema_id;
          if (f.class_names.empty()) f.class_names = m.class_names;
          m.schema_id = f.schema_id;
          m.class_names = f.class_names;
          m.stage2.vocab_id = f.schema_id;
          if (!f.class_names.empty()) m.stage2.class_names.assign(f.class_names.begin() + 1, f.class_names.end());
        } else if constexpr (std::is_same_v<T, detect::AdaBoostModel>) {
          if (f.class_names.empty()) f.class_names = m.class_names;
          m.class_names = f.class_names;
        } else if constexpr (std::is_same_v<T, detect::BaggingModel>) {
          if (f.class_names.empty()) f.class_names = m.class_names;
          m.class_names = f.class_names;
          for (auto& member : m.members)
            if (auto* boost = std::get_if<detect::AdaBoostModel>(&member)) boost->class_names = f.class_names;
        } else if constexpr (std::is_same_v<T, detect::GaussianOneClass> || std::is_same_v<T, detect::KnnOneClass>) {
          if (f.class_names.empty()) f.class_names = {"normal", "anomaly"};
        }
      },
      f.model);
  return f;
}

std::string dump_model(const ModelFile& file) {
  json j;
  j["format"] = kFormatTag;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = model_kind(file.model);
  j["schema_id"] = format_id(file.schema_id);
  j["class_names"] = file.class_names;
  j["params"] = params_of(file.model);
  return j.dump(1) + "\n";
}

ModelFile parse_model(const std::string& text, const std::string& source) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != kFormatTag) fail(ErrorCode::Format, source + ": not a model file");
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion)
      fail(ErrorCode::Unsupported, source + ": model format version " + std::to_string(version));
    ModelFile f;
    f.schema_id = parse_id(j.at("schema_id").get<std::string>());
    f.class_names = j.at("class_names").get<std::vector<std::string>>();
    f.model = model_from_json(j.at("kind").get<std::string>(), j.at("params"), f.schema_id, f.class_names);
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Format, source + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Format && std::string(e.what()).find(source) == std::string::npos)
      fail(ErrorCode::Format, source + ": " + e.what());
    throw;
  }
}

void save_model(const std::string& path, const ModelFile& file) {
  const std::string text = dump_model(file);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed: " + path);
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

}  // namespace rvvt::io
