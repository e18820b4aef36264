#include <filesystem>

#include <gtest/gtest.h>

#include "finspect/serialization.hpp"
#include "fusion_fixtures.hpp"
#include "svm_fixtures.hpp"
#include "test_support.hpp"

using namespace finspect;

TEST(Json, DoublesRoundTripExactly) {
  const std::vector<double> values{0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.802184};
  const Json back = parse_json(dump_json(Json(values)));
  EXPECT_EQ(back.get<std::vector<double>>(), values);
}

TEST(Json, InvalidTextIsADataError) {
  EXPECT_FINSPECT_ERROR(parse_json("{not json"), ErrorKind::kData);
  EXPECT_FINSPECT_ERROR(load_json("/nonexistent/file.json"), ErrorKind::kData);
}

TEST(Json, FileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "finspect_serialization_test.json";
  save_json(path, Json{{"a", 1}});
  EXPECT_EQ(load_json(path).at("a").get<int>(), 1);
  std::filesystem::remove(path);
}

TEST(Json, FeatureVectorRoundTrip) {
  FeatureVector f;
  f.extractor = Extractor::kGfd;
  f.descriptor = {"rho=0,psi=0", "rho=0,psi=1"};
  f.values = {1.0, 0.123456789012345};
  const FeatureVector back = feature_from_json(parse_json(dump_json(feature_to_json(f))));
  EXPECT_EQ(back.extractor, f.extractor);
  EXPECT_EQ(back.descriptor, f.descriptor);
  EXPECT_EQ(back.values, f.values);
  Json bad = feature_to_json(f);
  bad["values"].push_back(2.0);
  EXPECT_FINSPECT_ERROR(feature_from_json(bad), ErrorKind::kData);
}

TEST(Json, LabeledSetRoundTrip) {
  const LabeledSet s = testing_support::three_cones(1);
  const LabeledSet back = labeled_set_from_json(labeled_set_to_json(s));
  EXPECT_EQ(back.inputs, s.inputs);
  EXPECT_EQ(back.labels, s.labels);
  EXPECT_EQ(back.classes, s.classes);
}

TEST(Json, MlpRoundTripKeepsWeightsExactly) {
  ann::TrainConfig cfg;
  cfg.epochs = 5;
  const LabeledSet s = testing_support::three_cones(1);
  const ann::TrainResult r = ann::train(cfg, s);
  const Json j = mlp_to_json(r.model, cfg, r.loss_trace);
  for (const char* key : {"layers", "weights", "biases", "config", "loss_trace"}) EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_EQ(mlp_from_json(parse_json(dump_json(j))), r.model);
  Json bad = j;
  bad["layers"] = std::vector<int>{2, 3};
  EXPECT_FINSPECT_ERROR(mlp_from_json(bad), ErrorKind::kData);
}

TEST(Json, SvmRoundTripPredictsIdentically) {
  const LabeledSet s = testing_support::three_cones(3);
  const SvmModel m = train_svm(s);
  const SvmModel back = svm_from_json(parse_json(dump_json(svm_to_json(m))));
  EXPECT_EQ(back.eta, m.eta);
  EXPECT_EQ(back.kernel.name, "linear");
  for (const auto& x : s.inputs) EXPECT_EQ(confidence(back, x), confidence(m, x));
}

TEST(Json, TemplatesAndProfilesRoundTrip) {
  const testing_support::FourClassifierCase c;
  EXPECT_EQ(profile_from_json(profile_to_json(c.profile)).rows, c.profile.rows);
  const DecisionTemplates t = templates_from_json(templates_to_json(c.templates));
  EXPECT_EQ(t.counts, c.templates.counts);
  EXPECT_EQ(t.per_class[1].rows, c.templates.per_class[1].rows);
  TwoStageTemplates two{{c.templates, c.templates}, c.templates};
  const TwoStageTemplates back = two_stage_templates_from_json(two_stage_templates_to_json(two));
  EXPECT_EQ(back.stage1.size(), 2u);
  EXPECT_EQ(back.stage2.per_class[0].rows, c.templates.per_class[0].rows);
  EXPECT_FINSPECT_ERROR(two_stage_templates_from_json(Json::object()), ErrorKind::kData);
  EXPECT_FINSPECT_ERROR(profile_from_json(Json("rows")), ErrorKind::kData);
}

TEST(Json, FusionReportLayout) {
  const testing_support::FourClassifierCase c;
  TwoStageSupport s;
  s.stage1.push_back(fuse(c.profile, c.templates));
  s.final = s.stage1.front();
  const Json j = fusion_report_to_json(s);
  EXPECT_TRUE(j.at("stage1").is_array());
  EXPECT_EQ(j.at("predicted").get<int>(), 0);
  EXPECT_TRUE(j.at("final").contains("normalized"));
}
