#include "finspect/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "finspect/error.hpp"

namespace finspect {

void DecisionProfile::validate() const {
  if (rows.empty()) fail(ErrorKind::kShape, "decision profile has no rows");
  const std::size_t k = rows.front().size();
  if (k == 0) fail(ErrorKind::kShape, "decision profile has no classes");
  for (const auto& row : rows) {
    if (row.size() != k) fail(ErrorKind::kShape, "decision profile rows differ in length");
    double sum = 0.0;
    for (double v : row) {
      if (!(v >= 0.0 && v <= 1.0)) fail(ErrorKind::kData, "profile degree outside [0, 1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) fail(ErrorKind::kData, "profile row does not sum to one");
  }
}

DecisionTemplates compute_templates(std::span<const LabeledProfile> training, int classes) {
  if (classes < 1) fail(ErrorKind::kParameter, "class count must be positive");
  if (training.empty()) fail(ErrorKind::kParameter, "no training profiles");
  const auto k = static_cast<std::size_t>(classes);
  const std::size_t l = training.front().profile.classifiers();
  DecisionTemplates t;
  t.per_class.assign(k, DecisionProfile{std::vector<std::vector<double>>(l, std::vector<double>(k, 0.0))});
  t.counts.assign(k, 0);
  for (const auto& item : training) {
    item.profile.validate();
    if (item.profile.classifiers() != l || item.profile.classes() != k) {
      fail(ErrorKind::kShape, "training profiles differ in shape");
    }
    if (item.label < 0 || item.label >= classes) fail(ErrorKind::kParameter, "profile label out of range");
    auto& acc = t.per_class[static_cast<std::size_t>(item.label)].rows;
    for (std::size_t i = 0; i < l; ++i) {
      for (std::size_t j = 0; j < k; ++j) acc[i][j] += item.profile.rows[i][j];
    }
    ++t.counts[static_cast<std::size_t>(item.label)];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (t.counts[c] == 0) fail(ErrorKind::kParameter, "class " + std::to_string(c) + " has no training profiles");
    for (auto& row : t.per_class[c].rows) {
      for (double& v : row) v /= static_cast<double>(t.counts[c]);
    }
  }
  return t;
}

std::vector<double> proximities(const DecisionTemplates& templates, std::size_t i, std::span<const double> row) {
  const std::size_t k = templates.classes();
  if (i >= templates.classifiers()) fail(ErrorKind::kShape, "classifier row index out of range");
  std::vector<double> lambda(k);
  double sum = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& t = templates.per_class[j].rows[i];
    if (t.size() != row.size()) fail(ErrorKind::kShape, "template and output rows differ in length");
    double d2 = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) d2 += (t[c] - row[c]) * (t[c] - row[c]);
    lambda[j] = 1.0 / (1.0 + std::sqrt(d2));
    sum += lambda[j];
  }
  for (double& v : lambda) v /= sum;
  return lambda;
}

double belief(std::span<const double> lambda, std::size_t j) {
  if (j >= lambda.size()) fail(ErrorKind::kShape, "class index out of range");
  double others = 1.0;
  for (std::size_t r = 0; r < lambda.size(); ++r) {
    if (r != j) others *= 1.0 - lambda[r];
  }
  const double denom = 1.0 - lambda[j] * (1.0 - others);
  if (denom <= 1e-12) fail(ErrorKind::kDegenerate, "belief denominator vanishes (total conflicting evidence)");
  return lambda[j] * others / denom;
}

int ClassSupport::predicted() const {
  return static_cast<int>(std::max_element(normalized.begin(), normalized.end()) - normalized.begin());
}

ClassSupport fuse(const DecisionProfile& profile, const DecisionTemplates& templates) {
  profile.validate();
  if (profile.classifiers() != templates.classifiers() || profile.classes() != templates.classes()) {
    fail(ErrorKind::kShape, "profile shape does not match templates");
  }
  const std::size_t k = profile.classes();
  ClassSupport s;
  s.raw.assign(k, 1.0);
  for (std::size_t i = 0; i < profile.classifiers(); ++i) {
    const auto lambda = proximities(templates, i, profile.rows[i]);
    for (std::size_t j = 0; j < k; ++j) s.raw[j] *= belief(lambda, j);
  }
  double sum = 0.0;
  for (double v : s.raw) sum += v;
  if (sum > 0.0) {
    s.normalized.resize(k);
    for (std::size_t j = 0; j < k; ++j) s.normalized[j] = s.raw[j] / sum;
  } else {
    s.total_conflict = true;
    s.normalized.assign(k, 1.0 / static_cast<double>(k));
  }
  return s;
}

namespace {

ClassSupport pass_through(const DecisionProfile& p) {
  p.validate();
  ClassSupport s;
  s.raw = p.rows.front();
  s.normalized = p.rows.front();
  return s;
}

ClassSupport fuse_stage(const DecisionProfile& p, const DecisionTemplates& t) {
  return p.classifiers() == 1 ? pass_through(p) : fuse(p, t);
}

DecisionProfile stage1_profile(std::span<const ClassSupport> supports) {
  DecisionProfile p;
  for (const auto& s : supports) p.rows.push_back(s.normalized);
  return p;
}

}  // namespace

TwoStageSupport two_stage_fuse(std::span<const DecisionProfile> groups, const TwoStageTemplates& templates) {
  if (groups.size() != templates.stage1.size()) fail(ErrorKind::kShape, "group count does not match templates");
  TwoStageSupport out;
  for (std::size_t g = 0; g < groups.size(); ++g) out.stage1.push_back(fuse_stage(groups[g], templates.stage1[g]));
  out.final = fuse_stage(stage1_profile(out.stage1), templates.stage2);
  return out;
}

TwoStageTemplates fit_two_stage(std::span<const LabeledGroups> training, int classes) {
  if (training.empty()) fail(ErrorKind::kParameter, "no training profiles");
  const std::size_t g_count = training.front().groups.size();
  if (g_count == 0) fail(ErrorKind::kShape, "no classifier groups");
  TwoStageTemplates t;
  for (std::size_t g = 0; g < g_count; ++g) {
    std::vector<LabeledProfile> items;
    for (const auto& item : training) {
      if (item.groups.size() != g_count) fail(ErrorKind::kShape, "training items differ in group count");
      items.push_back({item.groups[g], item.label});
    }
    t.stage1.push_back(compute_templates(items, classes));
  }
  std::vector<LabeledProfile> stage2_items;
  for (const auto& item : training) {
    std::vector<ClassSupport> supports;
    for (std::size_t g = 0; g < g_count; ++g) supports.push_back(fuse_stage(item.groups[g], t.stage1[g]));
    stage2_items.push_back({stage1_profile(supports), item.label});
  }
  t.stage2 = compute_templates(stage2_items, classes);
  return t;
}

}  // namespace finspect
