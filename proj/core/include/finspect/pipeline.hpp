#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "finspect/ann.hpp"
#include "finspect/features.hpp"
#include "finspect/fusion.hpp"
#include "finspect/gknn.hpp"
#include "finspect/preprocess.hpp"
#include "finspect/serialization.hpp"
#include "finspect/svm.hpp"
#include "finspect/synthetic.hpp"

namespace finspect {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ull);

// Hex FNV-1a digest identifying an image by its file content.
std::string content_key(std::string_view bytes);

const std::vector<std::string>& default_catalog();

struct ManifestEntry {
  std::filesystem::path path;
  std::string label;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> catalog = default_catalog();

  // Relative paths are resolved against the manifest's directory.
  static DatasetManifest load(const std::filesystem::path& path);
  Json to_json() const;

  // Labels in catalog, paths unique, non-empty, catalog has >= 2 classes.
  void validate() const;
  // Catalog entries that some entry uses, in catalog order.
  std::vector<std::string> classes_used() const;
};

enum class ClassifierKind { kAnn, kGknn, kSvm };
std::string_view to_string(ClassifierKind c);
ClassifierKind classifier_from_string(std::string_view name);

inline constexpr std::array<Extractor, 3> kAllExtractors{Extractor::kCmi, Extractor::kGfd, Extractor::kElm};
inline constexpr std::array<ClassifierKind, 3> kAllClassifiers{ClassifierKind::kAnn, ClassifierKind::kGknn,
                                                               ClassifierKind::kSvm};

struct PipelineConfig {
  PreprocessConfig preprocess;
  std::vector<MomentProductSpec> cmi_basis = default_cmi_basis();
  GfdConfig gfd;
  int elm_max_order = 5;
  ann::TrainConfig ann;
  GknnConfig gknn;
  SvmConfig svm;
  std::vector<Extractor> extractors{kAllExtractors.begin(), kAllExtractors.end()};
  std::vector<ClassifierKind> classifiers{kAllClassifiers.begin(), kAllClassifiers.end()};
  double test_fraction = 0.3;

  void validate() const;
  static PipelineConfig from_json(const Json& j);
  Json to_json() const;
};

FeatureVector extract(Extractor e, const GrayImage& img, const PipelineConfig& config);

// One feature vector per enabled extractor, in config order.
struct ImageFeatures {
  std::vector<FeatureVector> vectors;
};

// The image that gets classified: the largest segmented shape.
GrayImage classification_target(const GrayImage& img, const PipelineConfig& config);
ImageFeatures extract_all(const GrayImage& target, const PipelineConfig& config);

// z-score per column, fit on training rows; CMI columns are log-transformed
// first because their raw values span many orders of magnitude.
struct Standardizer {
  bool log_transform = false;
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const std::vector<std::vector<double>>& rows, bool log_transform);
  std::vector<double> apply(std::span<const double> row) const;
  Json to_json() const;
  static Standardizer from_json(const Json& j);
};

struct Sample {
  std::string key;  // content hash, fixes ordering and per-item seeds
  int label = 0;
  ImageFeatures features;
};

struct ExtractorModels {
  Extractor extractor = Extractor::kCmi;
  Standardizer standardizer;
  std::optional<ann::TrainResult> ann;
  std::optional<GknnClassifier> gknn;
  std::optional<SvmModel> svm;
};

struct TrainedPipeline {
  std::vector<std::string> classes;
  PipelineConfig config;
  std::uint64_t seed = 0;
  std::vector<ExtractorModels> models;  // config.extractors order
  TwoStageTemplates templates;

  void save(const std::filesystem::path& dir) const;
  static TrainedPipeline load(const std::filesystem::path& dir);
};

struct Prediction {
  std::vector<DecisionProfile> groups;  // per extractor, one row per classifier
  TwoStageSupport support;
  int predicted() const { return support.final.predicted(); }
};

TrainedPipeline train_pipeline(std::vector<Sample> training, std::vector<std::string> classes,
                               const PipelineConfig& config, std::uint64_t seed);

Prediction classify(const TrainedPipeline& model, const Sample& sample);

struct ConfusionMatrix {
  std::vector<std::vector<std::size_t>> counts;  // [true][predicted]

  explicit ConfusionMatrix(std::size_t classes = 0)
      : counts(classes, std::vector<std::size_t>(classes, 0)) {}
  void add(int truth, int predicted) { ++counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)]; }
  std::size_t total() const;
  double accuracy() const;
  double false_positive_rate(std::size_t c) const;
  double false_negative_rate(std::size_t c) const;
  Json to_json() const;
};

struct ImageFailure {
  std::string path;
  std::string stage;
  std::string message;
};

struct EvaluationReport {
  std::vector<std::string> classes;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::vector<std::pair<std::string, ConfusionMatrix>> per_classifier;  // "cmi/ann", ...
  std::vector<std::pair<std::string, ConfusionMatrix>> per_extractor;   // stage-1 fused
  ConfusionMatrix final_confusion;
  double final_accuracy = 0.0;  // failed test images count as wrong
  std::vector<ImageFailure> failures;

  double classifier_accuracy(const std::string& name) const;
  double best_single_accuracy() const;
  Json to_json() const;
};

struct LoadedImage {
  std::string path;
  int label = 0;
  std::optional<Sample> sample;  // empty when a stage failed
  std::optional<ImageFailure> failure;
};

// Loads, preprocesses and extracts every manifest entry. Per-image errors are
// recorded on the entry instead of thrown.
std::vector<LoadedImage> load_dataset(const DatasetManifest& manifest, const std::vector<std::string>& classes,
                                      const PipelineConfig& config);

// path,label,extractor,index,descriptor,value rows for every loaded image.
std::string features_csv(const std::vector<LoadedImage>& data, const std::vector<std::string>& classes);

// Stratified split keyed by content hash mixed with the seed, then train and
// evaluate.
struct PipelineRun {
  TrainedPipeline model;
  EvaluationReport report;
};
PipelineRun evaluate_dataset(const std::vector<LoadedImage>& data, const std::vector<std::string>& classes,
                             const PipelineConfig& config, std::uint64_t seed);

struct SyntheticDatasetSpec {
  std::vector<ShapeKind> kinds{ShapeKind::kDisk, ShapeKind::kTriangle};
  int per_kind = 20;
  int canvas = 64;
  int min_size = 8;
  int max_size = 14;
  int max_shift = 8;
  bool rotate = true;
  double noise = 0.05;

  void validate() const;
};

// Writes <kind>_<i>.pgm files plus manifest.json (relative paths, labels from
// default_label) into dir and returns the manifest with absolute paths.
DatasetManifest generate_dataset(const std::filesystem::path& dir, const SyntheticDatasetSpec& spec,
                                 std::uint64_t seed);

PipelineRun run_pipeline(const DatasetManifest& manifest, const PipelineConfig& config, std::uint64_t seed);

}  // namespace finspect
