#include "finspect/serialization.hpp"

#include "finspect/error.hpp"
#include "finspect/raster.hpp"

namespace finspect {

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::kData, std::string("invalid JSON: ") + e.what());
  }
}

Json load_json(const std::filesystem::path& path) {
  try {
    return parse_json(read_file(path));
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
}

void save_json(const std::filesystem::path& path, const Json& j) { write_file(path, dump_json(j)); }

namespace {

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::kData, std::string("JSON is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kData, std::string("JSON field '") + key + "': " + e.what());
  }
}

}  // namespace

Json feature_to_json(const FeatureVector& f) {
  return {{"extractor", std::string(to_string(f.extractor))}, {"descriptor", f.descriptor}, {"values", f.values}};
}

FeatureVector feature_from_json(const Json& j) {
  FeatureVector f;
  f.extractor = extractor_from_string(field<std::string>(j, "extractor"));
  f.descriptor = field<std::vector<std::string>>(j, "descriptor");
  f.values = field<std::vector<double>>(j, "values");
  if (f.descriptor.size() != f.values.size()) fail(ErrorKind::kData, "descriptor and values differ in length");
  return f;
}

Json labeled_set_to_json(const LabeledSet& s) {
  return {{"inputs", s.inputs}, {"labels", s.labels}, {"classes", s.classes}};
}

LabeledSet labeled_set_from_json(const Json& j) {
  LabeledSet s;
  s.inputs = field<std::vector<std::vector<double>>>(j, "inputs");
  s.labels = field<std::vector<int>>(j, "labels");
  s.classes = field<int>(j, "classes");
  s.validate();
  return s;
}

Json mlp_to_json(const ann::MlpModel& model, const ann::TrainConfig& config, const std::vector<double>& loss_trace) {
  Json weights = Json::array();
  Json biases = Json::array();
  for (const auto& layer : model.layers()) {
    weights.push_back(layer.weights);
    biases.push_back(layer.biases);
  }
  return {{"layers", model.sizes()},
          {"weights", weights},
          {"biases", biases},
          {"config",
           {{"hidden", config.hidden},
            {"beta", config.learning_rate},
            {"epochs", config.epochs},
            {"seed", config.seed},
            {"init_scale", config.init_scale}}},
          {"loss_trace", loss_trace}};
}

ann::MlpModel mlp_from_json(const Json& j) {
  ann::MlpModel model(field<std::vector<int>>(j, "layers"));
  const auto weights = field<std::vector<std::vector<double>>>(j, "weights");
  const auto biases = field<std::vector<std::vector<double>>>(j, "biases");
  auto& layers = model.layers();
  if (weights.size() != layers.size() || biases.size() != layers.size()) {
    fail(ErrorKind::kData, "MLP JSON layer count mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (weights[l].size() != layers[l].weights.size() || biases[l].size() != layers[l].biases.size()) {
      fail(ErrorKind::kData, "MLP JSON weight shape mismatch in layer " + std::to_string(l));
    }
    layers[l].weights = weights[l];
    layers[l].biases = biases[l];
  }
  model.validate();
  return model;
}

Json svm_to_json(const SvmModel& model) {
  return {{"eta", model.eta},
          {"A", model.A},
          {"kernel", model.kernel.name},
          {"inputs", model.inputs},
          {"labels", model.labels},
          {"classes", model.classes},
          {"sweeps", model.sweeps},
          {"converged", model.converged}};
}

SvmModel svm_from_json(const Json& j) {
  SvmModel m;
  m.eta = field<DualMatrix>(j, "eta");
  m.A = field<double>(j, "A");
  m.kernel = Kernel::by_name(field<std::string>(j, "kernel"));
  m.inputs = field<std::vector<std::vector<double>>>(j, "inputs");
  m.labels = field<std::vector<int>>(j, "labels");
  m.classes = field<int>(j, "classes");
  m.sweeps = j.value("sweeps", 0);
  m.converged = j.value("converged", true);
  if (m.eta.size() != m.inputs.size() || m.labels.size() != m.inputs.size()) {
    fail(ErrorKind::kData, "SVM JSON row counts disagree");
  }
  for (const auto& row : m.eta) {
    if (static_cast<int>(row.size()) != m.classes) fail(ErrorKind::kData, "SVM JSON eta width mismatch");
  }
  return m;
}

Json profile_to_json(const DecisionProfile& p) { return p.rows; }

DecisionProfile profile_from_json(const Json& j) {
  DecisionProfile p;
  try {
    p.rows = j.get<std::vector<std::vector<double>>>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kData, std::string("decision profile: ") + e.what());
  }
  p.validate();
  return p;
}

Json templates_to_json(const DecisionTemplates& t) {
  Json per_class = Json::array();
  for (const auto& p : t.per_class) per_class.push_back(p.rows);
  return {{"templates", per_class}, {"counts", t.counts}};
}

DecisionTemplates templates_from_json(const Json& j) {
  DecisionTemplates t;
  for (const auto& rows : field<std::vector<std::vector<std::vector<double>>>>(j, "templates")) {
    t.per_class.push_back(DecisionProfile{rows});
  }
  t.counts = field<std::vector<std::size_t>>(j, "counts");
  if (t.counts.size() != t.per_class.size()) fail(ErrorKind::kData, "template counts mismatch");
  return t;
}

Json two_stage_templates_to_json(const TwoStageTemplates& t) {
  Json stage1 = Json::array();
  for (const auto& s : t.stage1) stage1.push_back(templates_to_json(s));
  return {{"stage1", stage1}, {"stage2", templates_to_json(t.stage2)}};
}

TwoStageTemplates two_stage_templates_from_json(const Json& j) {
  TwoStageTemplates t;
  if (!j.contains("stage1") || !j.at("stage1").is_array()) fail(ErrorKind::kData, "templates JSON lacks stage1");
  for (const auto& s : j.at("stage1")) t.stage1.push_back(templates_from_json(s));
  if (!j.contains("stage2")) fail(ErrorKind::kData, "templates JSON lacks stage2");
  t.stage2 = templates_from_json(j.at("stage2"));
  return t;
}

Json support_to_json(const ClassSupport& s) {
  return {{"raw", s.raw}, {"normalized", s.normalized}, {"total_conflict", s.total_conflict},
          {"predicted", s.predicted()}};
}

Json fusion_report_to_json(const TwoStageSupport& s) {
  Json stage1 = Json::array();
  for (const auto& x : s.stage1) stage1.push_back(support_to_json(x));
  return {{"stage1", stage1}, {"final", support_to_json(s.final)}, {"predicted", s.final.predicted()}};
}

}  // namespace finspect
