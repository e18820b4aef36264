#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "finspect/ann.hpp"
#include "finspect/dataset.hpp"
#include "finspect/features.hpp"
#include "finspect/fusion.hpp"
#include "finspect/svm.hpp"

namespace finspect {

using Json = nlohmann::json;

// Doubles are written in their shortest exactly round-tripping form.
std::string dump_json(const Json& j);
Json parse_json(std::string_view text);
Json load_json(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const Json& j);

Json feature_to_json(const FeatureVector& f);
FeatureVector feature_from_json(const Json& j);

Json labeled_set_to_json(const LabeledSet& s);
LabeledSet labeled_set_from_json(const Json& j);

Json mlp_to_json(const ann::MlpModel& model, const ann::TrainConfig& config, const std::vector<double>& loss_trace);
ann::MlpModel mlp_from_json(const Json& j);

Json svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const Json& j);

Json profile_to_json(const DecisionProfile& p);
DecisionProfile profile_from_json(const Json& j);

Json templates_to_json(const DecisionTemplates& t);
DecisionTemplates templates_from_json(const Json& j);

Json two_stage_templates_to_json(const TwoStageTemplates& t);
TwoStageTemplates two_stage_templates_from_json(const Json& j);

Json support_to_json(const ClassSupport& s);
// {stage1: [...], final: {...}, predicted}
Json fusion_report_to_json(const TwoStageSupport& s);

}  // namespace finspect
