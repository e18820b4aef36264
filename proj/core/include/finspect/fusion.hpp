#pragma once

#include <span>
#include <vector>

namespace finspect {

// l rows (classifiers) by k columns (classes); each row sums to one.
struct DecisionProfile {
  std::vector<std::vector<double>> rows;

  std::size_t classifiers() const noexcept { return rows.size(); }
  std::size_t classes() const noexcept { return rows.empty() ? 0 : rows.front().size(); }
  void validate() const;
};

struct LabeledProfile {
  DecisionProfile profile;
  int label = 0;
};

// Lambda_j: mean training profile of class j, with its sample count.
struct DecisionTemplates {
  std::vector<DecisionProfile> per_class;
  std::vector<std::size_t> counts;

  std::size_t classes() const noexcept { return per_class.size(); }
  std::size_t classifiers() const noexcept { return per_class.empty() ? 0 : per_class.front().classifiers(); }
};

DecisionTemplates compute_templates(std::span<const LabeledProfile> training, int classes);

// (1 + |a - b|)^-1 normalized over classes, for classifier row i.
std::vector<double> proximities(const DecisionTemplates& templates, std::size_t i, std::span<const double> row);

// Belief in class j from one classifier's proximity row.
double belief(std::span<const double> lambda, std::size_t j);

struct ClassSupport {
  std::vector<double> raw;         // prod_i pi_j before normalization
  std::vector<double> normalized;  // sums to one
  bool total_conflict = false;     // every raw support was zero; normalized is uniform

  int predicted() const;
};

ClassSupport fuse(const DecisionProfile& profile, const DecisionTemplates& templates);

// Stage 1 fuses each group (one per feature extractor) of classifier rows;
// stage 2 fuses the stage-1 supports. A stage with a single input row passes
// that row through unchanged: there is nothing to combine it with.
struct TwoStageTemplates {
  std::vector<DecisionTemplates> stage1;  // one per group
  DecisionTemplates stage2;
};

struct TwoStageSupport {
  std::vector<ClassSupport> stage1;
  ClassSupport final;
};

// groups[g] is the profile of group g.
TwoStageSupport two_stage_fuse(std::span<const DecisionProfile> groups, const TwoStageTemplates& templates);

struct LabeledGroups {
  std::vector<DecisionProfile> groups;
  int label = 0;
};

// Stage-1 templates from the grouped training profiles, stage-2 templates from
// the stage-1 supports of those same profiles.
TwoStageTemplates fit_two_stage(std::span<const LabeledGroups> training, int classes);

}  // namespace finspect
