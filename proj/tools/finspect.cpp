#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "finspect/error.hpp"
#include "finspect/pipeline.hpp"
#include "finspect/serialization.hpp"
#include "finspect/synthetic.hpp"

namespace fs = std::filesystem;
using namespace finspect;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Common {
  std::uint64_t seed = 0;
  std::string config_path;

  PipelineConfig config() const {
    return config_path.empty() ? PipelineConfig{} : PipelineConfig::from_json(load_json(config_path));
  }
};

void write_or_print(const std::string& output, const Json& j) {
  if (output.empty() || output == "-") {
    std::cout << dump_json(j);
  } else {
    save_json(output, j);
  }
}

GrayImage labels_image(const Segmentation& seg) {
  GrayImage out(seg.width, seg.height, 0.0);
  const double denom = seg.shape_count > 1 ? seg.shape_count - 1 : 1;
  for (int p = 0; p < seg.width * seg.height; ++p) {
    out.set(p % seg.width, p / seg.width, seg.labels[static_cast<std::size_t>(p)] / denom);
  }
  return out;
}

GrayImage binary_image(const BinaryImage& b) {
  GrayImage out(b.width(), b.height(), 0.0);
  for (int y = 0; y < b.height(); ++y) {
    for (int x = 0; x < b.width(); ++x) out.set(x, y, b.at(x, y));
  }
  return out;
}

struct PreprocessArgs {
  std::string input;
  std::string output_dir;
};

void run_preprocess(const Common& common, const PreprocessArgs& a) {
  const PipelineConfig config = common.config();
  const GrayImage img = load_gray(a.input, config.preprocess.grayscale);
  const PreprocessResult r = preprocess(img, config.preprocess);
  const fs::path dir = a.output_dir;
  write_file(dir / "filtered.pgm", encode_pgm(r.filtered));
  write_file(dir / "binary.pgm", encode_pgm(binary_image(r.binary)));
  write_file(dir / "labels.pgm", encode_pgm(labels_image(r.segmentation)));
  Json shapes = Json::array();
  for (std::size_t i = 0; i < r.shapes.size(); ++i) {
    const auto& s = r.shapes[i];
    const std::string name = "shape_" + std::to_string(i) + ".pgm";
    write_file(dir / name, encode_pgm(s.image));
    shapes.push_back({{"shape", s.shape},
                      {"file", name},
                      {"pixel_count", s.pixel_count},
                      {"box", {{"x", s.box.x}, {"y", s.box.y}, {"width", s.box.width}, {"height", s.box.height}}}});
  }
  save_json(dir / "segmentation.json", {{"width", img.width()},
                                        {"height", img.height()},
                                        {"theta", r.otsu.theta},
                                        {"sigma_in", r.otsu.sigma_in},
                                        {"sigma_out", r.otsu.sigma_out},
                                        {"shape_count", r.segmentation.shape_count},
                                        {"shapes", shapes}});
}

struct ExtractArgs {
  std::string method;
  std::string input;
  std::string output;
  bool segment = false;
};

void run_extract(const Common& common, const ExtractArgs& a) {
  const PipelineConfig config = common.config();
  GrayImage img = load_gray(a.input, config.preprocess.grayscale);
  if (a.segment) img = classification_target(img, config);
  write_or_print(a.output, feature_to_json(extract(extractor_from_string(a.method), img, config)));
}

struct TrainArgs {
  std::string manifest;
  std::string model_dir;
  std::string dump_csv;
};

void run_train(const Common& common, const TrainArgs& a) {
  const PipelineConfig config = common.config();
  const DatasetManifest manifest = DatasetManifest::load(a.manifest);
  manifest.validate();
  const auto classes = manifest.classes_used();
  if (classes.size() < 2) fail(ErrorKind::kData, "manifest uses fewer than two classes");
  const auto data = load_dataset(manifest, classes, config);
  if (!a.dump_csv.empty()) write_file(a.dump_csv, features_csv(data, classes));
  std::vector<Sample> samples;
  for (const auto& li : data) {
    if (li.sample) {
      samples.push_back(*li.sample);
    } else {
      std::cerr << "skipped " << li.failure->path << " (" << li.failure->stage << "): " << li.failure->message << "\n";
    }
  }
  const TrainedPipeline model = train_pipeline(std::move(samples), classes, config, common.seed);
  model.save(a.model_dir);
}

struct ClassifyArgs {
  std::string model_dir;
  std::string input;
  std::string output;
};

void run_classify(const Common&, const ClassifyArgs& a) {
  const TrainedPipeline model = TrainedPipeline::load(a.model_dir);
  const std::string bytes = read_file(a.input);
  const GrayImage img = load_gray(a.input, model.config.preprocess.grayscale);
  Sample s;
  s.key = content_key(bytes);
  s.features = extract_all(classification_target(img, model.config), model.config);
  const Prediction p = classify(model, s);
  Json groups = Json::array();
  for (const auto& g : p.groups) groups.push_back(profile_to_json(g));
  Json report = fusion_report_to_json(p.support);
  report["profiles"] = groups;
  report["predicted_label"] = model.classes[static_cast<std::size_t>(p.predicted())];
  write_or_print(a.output, report);
}

struct FuseArgs {
  std::string profile;
  std::string templates;
  std::string output;
};

void run_fuse(const Common&, const FuseArgs& a) {
  const Json profile = load_json(a.profile);
  const Json templates = load_json(a.templates);
  if (templates.contains("stage1")) {
    if (!profile.is_object() || !profile.contains("groups")) {
      fail(ErrorKind::kData, "two-stage templates need a profile of the form {\"groups\": [...]}");
    }
    std::vector<DecisionProfile> groups;
    for (const auto& g : profile.at("groups")) groups.push_back(profile_from_json(g));
    write_or_print(a.output, fusion_report_to_json(two_stage_fuse(groups, two_stage_templates_from_json(templates))));
  } else {
    const ClassSupport s = fuse(profile_from_json(profile), templates_from_json(templates));
    write_or_print(a.output, support_to_json(s));
  }
}

struct EvalArgs {
  std::string manifest;
  std::string report;
  std::string dump_csv;
  std::string model_dir;
};

void run_eval(const Common& common, const EvalArgs& a) {
  const PipelineConfig config = common.config();
  const DatasetManifest manifest = DatasetManifest::load(a.manifest);
  manifest.validate();
  const auto classes = manifest.classes_used();
  if (classes.size() < 2) fail(ErrorKind::kData, "manifest uses fewer than two classes");
  const auto data = load_dataset(manifest, classes, config);
  if (!a.dump_csv.empty()) write_file(a.dump_csv, features_csv(data, classes));
  const PipelineRun run = evaluate_dataset(data, classes, config, common.seed);
  if (!a.model_dir.empty()) run.model.save(a.model_dir);
  write_or_print(a.report, run.report.to_json());
}

struct SynthArgs {
  std::string output_dir;
  std::vector<std::string> kinds{"disk", "triangle"};
  int per_kind = 20;
  int canvas = 64;
  int min_size = 8;
  int max_size = 14;
  int max_shift = 8;
  double noise = 0.05;
  bool no_rotate = false;
};

void run_synth(const Common& common, const SynthArgs& a) {
  SyntheticDatasetSpec spec;
  spec.kinds.clear();
  for (const auto& k : a.kinds) spec.kinds.push_back(shape_kind_from_string(k));
  spec.per_kind = a.per_kind;
  spec.canvas = a.canvas;
  spec.min_size = a.min_size;
  spec.max_size = a.max_size;
  spec.max_shift = a.max_shift;
  spec.noise = a.noise;
  spec.rotate = !a.no_rotate;
  const DatasetManifest m = generate_dataset(a.output_dir, spec, common.seed);
  std::cout << "wrote " << m.entries.size() << " images and manifest.json to " << a.output_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finspect: shape classification with fused invariant features"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Random seed")->capture_default_str();
  app.add_option("--config", common.config_path, "Pipeline configuration JSON")->check(CLI::ExistingFile);

  PreprocessArgs pre;
  auto* c_pre = app.add_subcommand("preprocess", "Filter, binarize and segment one image");
  c_pre->add_option("--input", pre.input, "PGM/PPM image")->required()->check(CLI::ExistingFile);
  c_pre->add_option("--output-dir", pre.output_dir, "Directory for images and segmentation.json")->required();

  ExtractArgs ext;
  auto* c_ext = app.add_subcommand("extract", "Extract one feature vector from an image");
  c_ext->add_option("--method", ext.method, "cmi, gfd or elm")->required()->check(CLI::IsMember({"cmi", "gfd", "elm"}));
  c_ext->add_option("--input", ext.input, "PGM/PPM image")->required()->check(CLI::ExistingFile);
  c_ext->add_option("--output", ext.output, "Output JSON (stdout if omitted)");
  c_ext->add_flag("--segment", ext.segment, "Extract from the largest segmented shape");

  TrainArgs tr;
  auto* c_tr = app.add_subcommand("train", "Train all classifiers and fusion templates on a manifest");
  c_tr->add_option("--manifest", tr.manifest, "JSON array of {path, label}")->required()->check(CLI::ExistingFile);
  c_tr->add_option("--model-dir", tr.model_dir, "Directory for model JSON files")->required();
  c_tr->add_option("--dump-csv", tr.dump_csv, "Write extracted features as CSV");

  ClassifyArgs cl;
  auto* c_cl = app.add_subcommand("classify", "Classify one image with a trained model directory");
  c_cl->add_option("--model-dir", cl.model_dir, "Directory written by train")->required()->check(CLI::ExistingDirectory);
  c_cl->add_option("--input", cl.input, "PGM/PPM image")->required()->check(CLI::ExistingFile);
  c_cl->add_option("--output", cl.output, "Fusion report JSON (stdout if omitted)");

  FuseArgs fu;
  auto* c_fu = app.add_subcommand("fuse", "Fuse decision profiles against decision templates");
  c_fu->add_option("--profile", fu.profile, "Profile JSON: rows, or {groups: [...]}")->required()->check(CLI::ExistingFile);
  c_fu->add_option("--templates", fu.templates, "Templates JSON")->required()->check(CLI::ExistingFile);
  c_fu->add_option("--output", fu.output, "Output JSON (stdout if omitted)");

  EvalArgs ev;
  auto* c_ev = app.add_subcommand("eval", "Split, train and evaluate on a manifest");
  c_ev->add_option("--manifest", ev.manifest, "JSON array of {path, label}")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--report", ev.report, "EvaluationReport JSON (stdout if omitted)");
  c_ev->add_option("--dump-csv", ev.dump_csv, "Write extracted features as CSV");
  c_ev->add_option("--model-dir", ev.model_dir, "Also save the trained model");

  SynthArgs sy;
  auto* c_sy = app.add_subcommand("synth", "Generate a synthetic shape dataset with a manifest");
  c_sy->add_option("--output-dir", sy.output_dir, "Destination directory")->required();
  c_sy->add_option("--kinds", sy.kinds, "ellipse, triangle, fin-polygon, disk")
      ->delimiter(',')
      ->check(CLI::IsMember({"ellipse", "triangle", "fin-polygon", "disk"}))
      ->capture_default_str();
  c_sy->add_option("--count", sy.per_kind, "Images per kind")->capture_default_str();
  c_sy->add_option("--canvas", sy.canvas, "Canvas side in pixels")->capture_default_str();
  c_sy->add_option("--min-size", sy.min_size, "Smallest shape half-extent")->capture_default_str();
  c_sy->add_option("--max-size", sy.max_size, "Largest shape half-extent")->capture_default_str();
  c_sy->add_option("--max-shift", sy.max_shift, "Largest translation in pixels")->capture_default_str();
  c_sy->add_option("--noise", sy.noise, "Gaussian noise sigma")->capture_default_str();
  c_sy->add_flag("--no-rotate", sy.no_rotate, "Disable random quarter turns");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (c_pre->parsed()) run_preprocess(common, pre);
    else if (c_ext->parsed()) run_extract(common, ext);
    else if (c_tr->parsed()) run_train(common, tr);
    else if (c_cl->parsed()) run_classify(common, cl);
    else if (c_fu->parsed()) run_fuse(common, fu);
    else if (c_ev->parsed()) run_eval(common, ev);
    else if (c_sy->parsed()) run_synth(common, sy);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
