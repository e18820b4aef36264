#include "finspect/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "finspect/error.hpp"

namespace finspect {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t mix(std::string_view key, std::uint64_t seed) {
  std::string s(key);
  s += '#';
  s += std::to_string(seed);
  return fnv1a(s);
}

}  // namespace

std::string content_key(std::string_view bytes) { return hex(fnv1a(bytes)); }

const std::vector<std::string>& default_catalog() {
  static const std::vector<std::string> catalog{"mature_shark", "shark_school", "baby_shark", "other"};
  return catalog;
}

DatasetManifest DatasetManifest::load(const std::filesystem::path& path) {
  const Json j = load_json(path);
  DatasetManifest m;
  const Json* entries = &j;
  if (j.is_object()) {
    if (j.contains("catalog")) m.catalog = j.at("catalog").get<std::vector<std::string>>();
    if (!j.contains("entries")) fail(ErrorKind::kData, "manifest object lacks 'entries'");
    entries = &j.at("entries");
  }
  if (!entries->is_array()) fail(ErrorKind::kData, "manifest must be a JSON array of {path, label}");
  const auto base = path.parent_path();
  for (const auto& e : *entries) {
    if (!e.is_object() || !e.contains("path") || !e.contains("label") || !e.at("path").is_string() ||
        !e.at("label").is_string()) {
      fail(ErrorKind::kData, "manifest entries need string 'path' and 'label'");
    }
    std::filesystem::path p = e.at("path").get<std::string>();
    if (p.is_relative()) p = base / p;
    m.entries.push_back({p, e.at("label").get<std::string>()});
  }
  return m;
}

Json DatasetManifest::to_json() const {
  Json arr = Json::array();
  for (const auto& e : entries) arr.push_back({{"path", e.path.generic_string()}, {"label", e.label}});
  return arr;
}

void DatasetManifest::validate() const {
  if (entries.empty()) fail(ErrorKind::kParameter, "manifest is empty");
  if (catalog.size() < 2) fail(ErrorKind::kParameter, "class catalog needs at least two classes");
  std::set<std::string> names(catalog.begin(), catalog.end());
  if (names.size() != catalog.size()) fail(ErrorKind::kParameter, "class catalog has duplicates");
  std::set<std::string> paths;
  for (const auto& e : entries) {
    if (!names.count(e.label)) fail(ErrorKind::kData, "label '" + e.label + "' is not in the class catalog");
    if (!paths.insert(e.path.lexically_normal().string()).second) {
      fail(ErrorKind::kData, "duplicate manifest path " + e.path.string());
    }
  }
}

std::vector<std::string> DatasetManifest::classes_used() const {
  std::set<std::string> used;
  for (const auto& e : entries) used.insert(e.label);
  std::vector<std::string> out;
  for (const auto& c : catalog) {
    if (used.count(c)) out.push_back(c);
  }
  return out;
}

std::string_view to_string(ClassifierKind c) {
  switch (c) {
    case ClassifierKind::kAnn: return "ann";
    case ClassifierKind::kGknn: return "gknn";
    case ClassifierKind::kSvm: return "svm";
  }
  return "unknown";
}

ClassifierKind classifier_from_string(std::string_view name) {
  for (auto c : kAllClassifiers) {
    if (to_string(c) == name) return c;
  }
  fail(ErrorKind::kConfiguration, "unknown classifier '" + std::string(name) + "'");
}

void PipelineConfig::validate() const {
  preprocess.grayscale.validate();
  MedianWindow{preprocess.median_side};
  if (cmi_basis.empty()) fail(ErrorKind::kConfiguration, "CMI basis is empty");
  for (const auto& spec : cmi_basis) {
    if (spec.terms.empty()) fail(ErrorKind::kConfiguration, "CMI basis product has no terms");
    if (!spec.rotation_invariant()) fail(ErrorKind::kConfiguration, "CMI product " + spec.label() + " is not rotation invariant");
  }
  if (gfd.radial < 1 || gfd.angular < 1 || gfd.radial_samples < 1 || gfd.angular_samples < 1) {
    fail(ErrorKind::kConfiguration, "GFD sizes must be positive");
  }
  if (elm_max_order < 1) fail(ErrorKind::kConfiguration, "ELM max order must be >= 1");
  ann.validate();
  gknn.validate();
  svm.validate();
  if (extractors.empty()) fail(ErrorKind::kConfiguration, "no extractors enabled");
  if (classifiers.empty()) fail(ErrorKind::kConfiguration, "no classifiers enabled");
  if (std::set<Extractor>(extractors.begin(), extractors.end()).size() != extractors.size()) {
    fail(ErrorKind::kConfiguration, "extractor listed twice");
  }
  if (std::set<ClassifierKind>(classifiers.begin(), classifiers.end()).size() != classifiers.size()) {
    fail(ErrorKind::kConfiguration, "classifier listed twice");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail(ErrorKind::kConfiguration, "test_fraction must be in (0, 1)");
}

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kConfiguration, std::string("config key '") + key + "': " + e.what());
  }
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::kConfiguration, where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail(ErrorKind::kConfiguration, "unknown config key '" + key + "' in " + where);
  }
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const Json& j) {
  PipelineConfig c;
  check_keys(j,
             {"grayscale", "median_window", "gfd", "elm_max_order", "cmi_basis", "ann", "gknn", "svm", "extractors",
              "classifiers", "test_fraction"},
             "config");
  if (j.contains("grayscale")) {
    const Json& g = j.at("grayscale");
    check_keys(g, {"alpha", "beta", "gamma", "mu"}, "grayscale");
    read_opt(g, "alpha", c.preprocess.grayscale.alpha);
    read_opt(g, "beta", c.preprocess.grayscale.beta);
    read_opt(g, "gamma", c.preprocess.grayscale.gamma);
    read_opt(g, "mu", c.preprocess.grayscale.mu);
  }
  read_opt(j, "median_window", c.preprocess.median_side);
  if (j.contains("gfd")) {
    const Json& g = j.at("gfd");
    check_keys(g, {"R", "T", "radial_samples", "angular_samples"}, "gfd");
    read_opt(g, "R", c.gfd.radial);
    read_opt(g, "T", c.gfd.angular);
    read_opt(g, "radial_samples", c.gfd.radial_samples);
    read_opt(g, "angular_samples", c.gfd.angular_samples);
  }
  read_opt(j, "elm_max_order", c.elm_max_order);
  if (j.contains("cmi_basis")) {
    c.cmi_basis.clear();
    if (!j.at("cmi_basis").is_array()) fail(ErrorKind::kConfiguration, "cmi_basis must be an array of products");
    for (const auto& product : j.at("cmi_basis")) {
      MomentProductSpec spec;
      if (!product.is_array()) fail(ErrorKind::kConfiguration, "each cmi_basis product is an array of terms");
      for (const auto& t : product) {
        check_keys(t, {"a", "b", "c"}, "cmi_basis term");
        MomentTerm term;
        read_opt(t, "a", term.a);
        read_opt(t, "b", term.b);
        read_opt(t, "c", term.c);
        spec.terms.push_back(term);
      }
      c.cmi_basis.push_back(std::move(spec));
    }
  }
  if (j.contains("ann")) {
    const Json& a = j.at("ann");
    check_keys(a, {"hidden", "beta", "epochs", "init_scale"}, "ann");
    read_opt(a, "hidden", c.ann.hidden);
    read_opt(a, "beta", c.ann.learning_rate);
    read_opt(a, "epochs", c.ann.epochs);
    read_opt(a, "init_scale", c.ann.init_scale);
  }
  if (j.contains("gknn")) {
    const Json& g = j.at("gknn");
    check_keys(g, {"k", "selection", "max_generations"}, "gknn");
    read_opt(g, "k", c.gknn.k);
    read_opt(g, "max_generations", c.gknn.max_generations);
    if (g.contains("selection")) {
      const auto s = g.at("selection").get<std::string>();
      if (s == "roulette") c.gknn.selection = Selection::kRoulette;
      else if (s == "truncation") c.gknn.selection = Selection::kTruncation;
      else fail(ErrorKind::kConfiguration, "gknn selection must be 'roulette' or 'truncation'");
    }
  }
  if (j.contains("svm")) {
    const Json& s = j.at("svm");
    check_keys(s, {"A", "tol", "max_iter"}, "svm");
    read_opt(s, "A", c.svm.A);
    read_opt(s, "tol", c.svm.tol);
    read_opt(s, "max_iter", c.svm.max_iter);
  }
  if (j.contains("extractors")) {
    c.extractors.clear();
    for (const auto& e : j.at("extractors")) c.extractors.push_back(extractor_from_string(e.get<std::string>()));
  }
  if (j.contains("classifiers")) {
    c.classifiers.clear();
    for (const auto& e : j.at("classifiers")) c.classifiers.push_back(classifier_from_string(e.get<std::string>()));
  }
  read_opt(j, "test_fraction", c.test_fraction);
  c.validate();
  return c;
}

Json PipelineConfig::to_json() const {
  Json basis = Json::array();
  for (const auto& spec : cmi_basis) {
    Json product = Json::array();
    for (const auto& t : spec.terms) product.push_back({{"a", t.a}, {"b", t.b}, {"c", t.c}});
    basis.push_back(product);
  }
  Json ex = Json::array();
  for (auto e : extractors) ex.push_back(std::string(to_string(e)));
  Json cl = Json::array();
  for (auto c : classifiers) cl.push_back(std::string(to_string(c)));
  const auto& g = preprocess.grayscale;
  return {{"grayscale", {{"alpha", g.alpha}, {"beta", g.beta}, {"gamma", g.gamma}, {"mu", g.mu}}},
          {"median_window", preprocess.median_side},
          {"gfd", {{"R", gfd.radial}, {"T", gfd.angular}, {"radial_samples", gfd.radial_samples},
                   {"angular_samples", gfd.angular_samples}}},
          {"elm_max_order", elm_max_order},
          {"cmi_basis", basis},
          {"ann", {{"hidden", ann.hidden}, {"beta", ann.learning_rate}, {"epochs", ann.epochs},
                   {"init_scale", ann.init_scale}}},
          {"gknn", {{"k", gknn.k}, {"max_generations", gknn.max_generations},
                    {"selection", gknn.selection == Selection::kRoulette ? "roulette" : "truncation"}}},
          {"svm", {{"A", svm.A}, {"tol", svm.tol}, {"max_iter", svm.max_iter}}},
          {"extractors", ex},
          {"classifiers", cl},
          {"test_fraction", test_fraction}};
}

FeatureVector extract(Extractor e, const GrayImage& img, const PipelineConfig& config) {
  switch (e) {
    case Extractor::kCmi: return cmi_features(img, config.cmi_basis);
    case Extractor::kGfd: return gfd_features(img, config.gfd);
    case Extractor::kElm: return elm_features(img, config.elm_max_order);
  }
  fail(ErrorKind::kConfiguration, "unknown extractor");
}

GrayImage classification_target(const GrayImage& img, const PipelineConfig& config) {
  PreprocessResult pre = preprocess(img, config.preprocess);
  if (pre.shapes.empty()) fail(ErrorKind::kDegenerate, "segmentation produced no foreground shape");
  return std::move(pre.shapes.front().image);
}

ImageFeatures extract_all(const GrayImage& target, const PipelineConfig& config) {
  ImageFeatures f;
  for (Extractor e : config.extractors) f.vectors.push_back(extract(e, target, config));
  return f;
}

namespace {

constexpr double kLogFloor = 1e-30;
constexpr double kScaleFloor = 1e-9;

double pre_transform(double v, bool log_transform) {
  return log_transform ? std::log(std::max(std::abs(v), kLogFloor)) : v;
}

}  // namespace

Standardizer Standardizer::fit(const std::vector<std::vector<double>>& rows, bool log_transform) {
  if (rows.empty()) fail(ErrorKind::kParameter, "cannot standardize an empty set");
  const std::size_t p = rows.front().size();
  Standardizer s;
  s.log_transform = log_transform;
  s.mean.assign(p, 0.0);
  s.scale.assign(p, 0.0);
  for (const auto& r : rows) {
    if (r.size() != p) fail(ErrorKind::kShape, "feature rows differ in length");
    for (std::size_t c = 0; c < p; ++c) s.mean[c] += pre_transform(r[c], log_transform);
  }
  for (double& m : s.mean) m /= static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < p; ++c) {
      const double d = pre_transform(r[c], log_transform) - s.mean[c];
      s.scale[c] += d * d;
    }
  }
  for (double& v : s.scale) {
    v = std::sqrt(v / static_cast<double>(rows.size()));
    if (v < kScaleFloor) v = 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) fail(ErrorKind::kShape, "feature row length does not match the standardizer");
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (pre_transform(row[c], log_transform) - mean[c]) / scale[c];
  return out;
}

Json Standardizer::to_json() const { return {{"log_transform", log_transform}, {"mean", mean}, {"scale", scale}}; }

Standardizer Standardizer::from_json(const Json& j) {
  Standardizer s;
  try {
    s.log_transform = j.at("log_transform").get<bool>();
    s.mean = j.at("mean").get<std::vector<double>>();
    s.scale = j.at("scale").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kData, std::string("standardizer JSON: ") + e.what());
  }
  if (s.mean.size() != s.scale.size()) fail(ErrorKind::kData, "standardizer JSON size mismatch");
  return s;
}

namespace {

// The multiclass SVM has no bias term; a constant feature supplies one.
std::vector<double> with_bias(std::vector<double> row) {
  row.push_back(1.0);
  return row;
}

std::uint64_t training_seed(const std::vector<Sample>& training, std::uint64_t seed, std::size_t extractor) {
  std::string keys;
  for (const auto& s : training) keys += s.key;
  return mix(keys, seed + 0x9e3779b97f4a7c15ull * (extractor + 1));
}

bool enabled(const PipelineConfig& c, ClassifierKind k) {
  return std::find(c.classifiers.begin(), c.classifiers.end(), k) != c.classifiers.end();
}

std::vector<DecisionProfile> profiles_for(const TrainedPipeline& model, const Sample& sample) {
  if (sample.features.vectors.size() != model.models.size()) {
    fail(ErrorKind::kShape, "sample has " + std::to_string(sample.features.vectors.size()) + " feature vectors, model expects " +
                                std::to_string(model.models.size()));
  }
  std::vector<DecisionProfile> groups;
  for (std::size_t e = 0; e < model.models.size(); ++e) {
    const ExtractorModels& m = model.models[e];
    const std::vector<double> z = m.standardizer.apply(sample.features.vectors[e].values);
    DecisionProfile p;
    for (ClassifierKind k : model.config.classifiers) {
      switch (k) {
        case ClassifierKind::kAnn:
          p.rows.push_back(ann::predict_proba(m.ann->model, z));
          break;
        case ClassifierKind::kGknn:
          p.rows.push_back(m.gknn->classify(z, mix(sample.key, model.seed + e)).omega);
          break;
        case ClassifierKind::kSvm:
          p.rows.push_back(predict_proba(*m.svm, with_bias(z)));
          break;
      }
    }
    groups.push_back(std::move(p));
  }
  return groups;
}

}  // namespace

TrainedPipeline train_pipeline(std::vector<Sample> training, std::vector<std::string> classes,
                               const PipelineConfig& config, std::uint64_t seed) {
  config.validate();
  if (training.empty()) fail(ErrorKind::kParameter, "no training samples");
  if (classes.size() < 2) fail(ErrorKind::kParameter, "training needs at least two classes");
  std::sort(training.begin(), training.end(), [](const Sample& a, const Sample& b) {
    return a.key != b.key ? a.key < b.key : a.label < b.label;
  });

  TrainedPipeline model;
  model.classes = std::move(classes);
  model.config = config;
  model.seed = seed;
  const int k = static_cast<int>(model.classes.size());

  for (std::size_t e = 0; e < config.extractors.size(); ++e) {
    ExtractorModels m;
    m.extractor = config.extractors[e];
    std::vector<std::vector<double>> raw;
    for (const auto& s : training) {
      if (s.features.vectors.size() != config.extractors.size()) fail(ErrorKind::kShape, "sample feature count mismatch");
      raw.push_back(s.features.vectors[e].values);
    }
    m.standardizer = Standardizer::fit(raw, m.extractor == Extractor::kCmi);
    LabeledSet set;
    set.classes = k;
    for (std::size_t i = 0; i < training.size(); ++i) {
      set.inputs.push_back(m.standardizer.apply(raw[i]));
      set.labels.push_back(training[i].label);
    }
    set.validate();

    if (enabled(config, ClassifierKind::kAnn)) {
      ann::TrainConfig tc = config.ann;
      tc.seed = training_seed(training, seed, e);
      m.ann = ann::train(tc, set);
    }
    if (enabled(config, ClassifierKind::kGknn)) {
      GknnConfig gc = config.gknn;
      gc.k = std::min<int>(gc.k, static_cast<int>(set.size()));
      m.gknn.emplace(set, gc);
    }
    if (enabled(config, ClassifierKind::kSvm)) {
      LabeledSet aug = set;
      for (auto& row : aug.inputs) row = with_bias(std::move(row));
      m.svm = train_svm(aug, config.svm);
    }
    model.models.push_back(std::move(m));
  }

  std::vector<LabeledGroups> held_in;
  for (const auto& s : training) held_in.push_back({profiles_for(model, s), s.label});
  model.templates = fit_two_stage(held_in, k);
  return model;
}

Prediction classify(const TrainedPipeline& model, const Sample& sample) {
  Prediction p;
  p.groups = profiles_for(model, sample);
  p.support = two_stage_fuse(p.groups, model.templates);
  return p;
}

void TrainedPipeline::save(const std::filesystem::path& dir) const {
  Json ex = Json::array();
  for (const auto& m : models) {
    const std::string name(to_string(m.extractor));
    Json entry{{"extractor", name}, {"standardizer", m.standardizer.to_json()}};
    if (m.ann) {
      entry["ann"] = "ann_" + name + ".json";
      save_json(dir / ("ann_" + name + ".json"), mlp_to_json(m.ann->model, config.ann, m.ann->loss_trace));
    }
    if (m.gknn) {
      entry["gknn"] = "gknn_" + name + ".json";
      save_json(dir / ("gknn_" + name + ".json"),
                {{"k", m.gknn->config().k}, {"training", labeled_set_to_json(m.gknn->training())}});
    }
    if (m.svm) {
      entry["svm"] = "svm_" + name + ".json";
      save_json(dir / ("svm_" + name + ".json"), svm_to_json(*m.svm));
    }
    ex.push_back(entry);
  }
  save_json(dir / "templates.json", two_stage_templates_to_json(templates));
  save_json(dir / "pipeline.json", {{"classes", classes},
                                    {"seed", seed},
                                    {"config", config.to_json()},
                                    {"extractors", ex},
                                    {"templates", "templates.json"}});
}

TrainedPipeline TrainedPipeline::load(const std::filesystem::path& dir) {
  const Json j = load_json(dir / "pipeline.json");
  TrainedPipeline model;
  try {
    model.classes = j.at("classes").get<std::vector<std::string>>();
    model.seed = j.at("seed").get<std::uint64_t>();
    model.config = PipelineConfig::from_json(j.at("config"));
    for (const auto& entry : j.at("extractors")) {
      ExtractorModels m;
      m.extractor = extractor_from_string(entry.at("extractor").get<std::string>());
      m.standardizer = Standardizer::from_json(entry.at("standardizer"));
      if (entry.contains("ann")) {
        ann::TrainResult r;
        const Json a = load_json(dir / entry.at("ann").get<std::string>());
        r.model = mlp_from_json(a);
        r.loss_trace = a.value("loss_trace", std::vector<double>{});
        m.ann = std::move(r);
      }
      if (entry.contains("gknn")) {
        const Json g = load_json(dir / entry.at("gknn").get<std::string>());
        GknnConfig gc = model.config.gknn;
        gc.k = g.at("k").get<int>();
        m.gknn.emplace(labeled_set_from_json(g.at("training")), gc);
      }
      if (entry.contains("svm")) m.svm = svm_from_json(load_json(dir / entry.at("svm").get<std::string>()));
      model.models.push_back(std::move(m));
    }
    model.templates = two_stage_templates_from_json(load_json(dir / j.at("templates").get<std::string>()));
  } catch (const Json::exception& e) {
    fail(ErrorKind::kData, std::string("model directory: ") + e.what());
  }
  for (std::size_t e = 0; e < model.models.size(); ++e) {
    const auto& m = model.models[e];
    for (ClassifierKind k : model.config.classifiers) {
      const bool present = (k == ClassifierKind::kAnn && m.ann) || (k == ClassifierKind::kGknn && m.gknn) ||
                           (k == ClassifierKind::kSvm && m.svm);
      if (!present) fail(ErrorKind::kData, "model directory lacks the " + std::string(to_string(k)) + " model");
    }
  }
  return model;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

double ConfusionMatrix::accuracy() const {
  const std::size_t t = total();
  if (t == 0) return 0.0;
  std::size_t diag = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) diag += counts[i][i];
  return static_cast<double>(diag) / static_cast<double>(t);
}

double ConfusionMatrix::false_positive_rate(std::size_t c) const {
  std::size_t fp = 0;
  std::size_t negatives = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i == c) continue;
    for (auto v : counts[i]) negatives += v;
    fp += counts[i][c];
  }
  return negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
}

double ConfusionMatrix::false_negative_rate(std::size_t c) const {
  std::size_t positives = 0;
  for (auto v : counts[c]) positives += v;
  return positives ? static_cast<double>(positives - counts[c][c]) / static_cast<double>(positives) : 0.0;
}

Json ConfusionMatrix::to_json() const {
  Json fp = Json::array();
  Json fn = Json::array();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    fp.push_back(false_positive_rate(c));
    fn.push_back(false_negative_rate(c));
  }
  return {{"counts", counts}, {"accuracy", accuracy()}, {"false_positive_rate", fp}, {"false_negative_rate", fn}};
}

double EvaluationReport::classifier_accuracy(const std::string& name) const {
  for (const auto& [n, m] : per_classifier) {
    if (n == name) return m.accuracy();
  }
  fail(ErrorKind::kParameter, "no classifier named " + name);
}

double EvaluationReport::best_single_accuracy() const {
  double best = 0.0;
  for (const auto& [n, m] : per_classifier) best = std::max(best, m.accuracy());
  return best;
}

Json EvaluationReport::to_json() const {
  Json pc = Json::object();
  for (const auto& [n, m] : per_classifier) pc[n] = m.to_json();
  Json pe = Json::object();
  for (const auto& [n, m] : per_extractor) pe[n] = m.to_json();
  Json fl = Json::array();
  for (const auto& f : failures) fl.push_back({{"path", f.path}, {"stage", f.stage}, {"message", f.message}});
  return {{"classes", classes},
          {"train_count", train_count},
          {"test_count", test_count},
          {"per_classifier", pc},
          {"per_extractor_fused", pe},
          {"final", final_confusion.to_json()},
          {"final_accuracy", final_accuracy},
          {"failures", fl}};
}

std::vector<LoadedImage> load_dataset(const DatasetManifest& manifest, const std::vector<std::string>& classes,
                                      const PipelineConfig& config) {
  config.validate();
  std::vector<LoadedImage> out;
  for (const auto& entry : manifest.entries) {
    LoadedImage li;
    li.path = entry.path.generic_string();
    const auto it = std::find(classes.begin(), classes.end(), entry.label);
    if (it == classes.end()) fail(ErrorKind::kData, "label '" + entry.label + "' not among the classes");
    li.label = static_cast<int>(it - classes.begin());
    std::string stage = "read";
    try {
      const std::string bytes = read_file(entry.path);
      stage = "decode";
      const DecodedImage decoded = decode_image(bytes);
      GrayImage gray = std::holds_alternative<GrayImage>(decoded)
                           ? std::get<GrayImage>(decoded)
                           : to_grayscale(std::get<RgbImage>(decoded), config.preprocess.grayscale);
      stage = "preprocess";
      const GrayImage target = classification_target(gray, config);
      stage = "extract";
      Sample s;
      s.key = content_key(bytes);
      s.label = li.label;
      s.features = extract_all(target, config);
      li.sample = std::move(s);
    } catch (const Error& e) {
      li.failure = ImageFailure{li.path, stage, e.what()};
    }
    out.push_back(std::move(li));
  }
  return out;
}

std::string features_csv(const std::vector<LoadedImage>& data, const std::vector<std::string>& classes) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "path,label,extractor,index,descriptor,value\n";
  for (const auto& li : data) {
    if (!li.sample) continue;
    for (const auto& fv : li.sample->features.vectors) {
      for (std::size_t i = 0; i < fv.values.size(); ++i) {
        os << li.path << ',' << classes[static_cast<std::size_t>(li.label)] << ',' << to_string(fv.extractor) << ','
           << i << ',' << fv.descriptor[i] << ',' << fv.values[i] << '\n';
      }
    }
  }
  return os.str();
}

PipelineRun evaluate_dataset(const std::vector<LoadedImage>& data, const std::vector<std::string>& classes,
                             const PipelineConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t k = classes.size();
  EvaluationReport report;
  report.classes = classes;

  std::vector<std::vector<const LoadedImage*>> by_class(k);
  for (const auto& li : data) {
    if (li.sample) {
      by_class[static_cast<std::size_t>(li.label)].push_back(&li);
    } else if (li.failure) {
      report.failures.push_back(*li.failure);
    }
  }
  std::vector<Sample> train;
  std::vector<const LoadedImage*> test;
  for (auto& members : by_class) {
    if (members.empty()) fail(ErrorKind::kData, "a class has no usable images");
    std::sort(members.begin(), members.end(), [&](const LoadedImage* a, const LoadedImage* b) {
      const auto ha = mix(a->sample->key, seed);
      const auto hb = mix(b->sample->key, seed);
      return ha != hb ? ha < hb : a->path < b->path;
    });
    const auto n = members.size();
    const auto n_test = std::min<std::size_t>(n - 1, static_cast<std::size_t>(std::lround(config.test_fraction * n)));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_test) test.push_back(members[i]);
      else train.push_back(*members[i]->sample);
    }
  }
  report.train_count = train.size();
  report.test_count = test.size() + report.failures.size();

  PipelineRun run;
  run.model = train_pipeline(std::move(train), classes, config, seed);

  for (Extractor e : config.extractors) {
    for (ClassifierKind c : config.classifiers) {
      report.per_classifier.emplace_back(std::string(to_string(e)) + "/" + std::string(to_string(c)), ConfusionMatrix(k));
    }
    report.per_extractor.emplace_back(std::string(to_string(e)), ConfusionMatrix(k));
  }
  report.final_confusion = ConfusionMatrix(k);

  std::sort(test.begin(), test.end(), [](const LoadedImage* a, const LoadedImage* b) {
    return a->sample->key != b->sample->key ? a->sample->key < b->sample->key : a->path < b->path;
  });
  std::size_t correct = 0;
  for (const LoadedImage* li : test) {
    try {
      const Prediction p = classify(run.model, *li->sample);
      std::size_t idx = 0;
      for (std::size_t e = 0; e < p.groups.size(); ++e) {
        for (const auto& row : p.groups[e].rows) {
          const int pred = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
          report.per_classifier[idx++].second.add(li->label, pred);
        }
        report.per_extractor[e].second.add(li->label, p.support.stage1[e].predicted());
      }
      report.final_confusion.add(li->label, p.predicted());
      if (p.predicted() == li->label) ++correct;
    } catch (const Error& err) {
      report.failures.push_back({li->path, "classify", err.what()});
    }
  }
  report.final_accuracy =
      report.test_count ? static_cast<double>(correct) / static_cast<double>(report.test_count) : 0.0;
  run.report = std::move(report);
  return run;
}

void SyntheticDatasetSpec::validate() const {
  if (kinds.empty()) fail(ErrorKind::kSpecification, "no shape kinds requested");
  if (per_kind < 1) fail(ErrorKind::kSpecification, "per_kind must be >= 1");
  if (min_size < 0 || max_size < min_size) fail(ErrorKind::kSpecification, "invalid size range");
  if (max_shift < 0) fail(ErrorKind::kSpecification, "max_shift must be non-negative");
  if (!(noise >= 0.0)) fail(ErrorKind::kSpecification, "noise must be non-negative");
}

DatasetManifest generate_dataset(const std::filesystem::path& dir, const SyntheticDatasetSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(spec.min_size, spec.max_size);
  std::uniform_int_distribution<int> shift(-spec.max_shift, spec.max_shift);
  std::uniform_int_distribution<int> turns(0, 3);
  DatasetManifest manifest;
  Json listing = Json::array();
  for (ShapeKind kind : spec.kinds) {
    for (int i = 0; i < spec.per_kind; ++i) {
      SyntheticShapeSpec s;
      s.kind = kind;
      s.size = size(rng);
      s.transform.dx = shift(rng);
      s.transform.dy = shift(rng);
      s.transform.quarter_turns = spec.rotate ? turns(rng) : 0;
      s.noise = spec.noise;
      s.canvas_width = s.canvas_height = spec.canvas;
      const GrayImage img = generate_synthetic(s, rng());
      const std::string name = std::string(to_string(kind)) + "_" + std::to_string(i) + ".pgm";
      write_file(dir / name, encode_pgm(img));
      const std::string label(default_label(kind));
      manifest.entries.push_back({dir / name, label});
      listing.push_back({{"path", name}, {"label", label}});
    }
  }
  save_json(dir / "manifest.json", listing);
  return manifest;
}

PipelineRun run_pipeline(const DatasetManifest& manifest, const PipelineConfig& config, std::uint64_t seed) {
  manifest.validate();
  config.validate();
  const auto classes = manifest.classes_used();
  if (classes.size() < 2) fail(ErrorKind::kData, "manifest uses fewer than two classes");
  return evaluate_dataset(load_dataset(manifest, classes, config), classes, config, seed);
}

}  // namespace finspect
