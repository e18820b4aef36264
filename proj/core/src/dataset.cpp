#include "finspect/dataset.hpp"

#include <cmath>
#include <set>

#include "finspect/error.hpp"

namespace finspect {

void LabeledSet::validate() const {
  if (inputs.empty()) fail(ErrorKind::kParameter, "labeled set is empty");
  if (labels.size() != inputs.size()) fail(ErrorKind::kShape, "one label per input row required");
  if (classes < 1) fail(ErrorKind::kParameter, "class count must be positive");
  const std::size_t dim = inputs.front().size();
  if (dim == 0) fail(ErrorKind::kShape, "feature rows are empty");
  for (const auto& row : inputs) {
    if (row.size() != dim) fail(ErrorKind::kShape, "feature rows differ in length");
    for (double v : row) {
      if (!std::isfinite(v)) fail(ErrorKind::kData, "non-finite feature value");
    }
  }
  for (int y : labels) {
    if (y < 0 || y >= classes) fail(ErrorKind::kParameter, "label outside class range");
  }
}

int LabeledSet::classes_present() const {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

std::vector<double> LabeledSet::one_hot(std::size_t i) const {
  std::vector<double> y(static_cast<std::size_t>(classes), 0.0);
  y[static_cast<std::size_t>(labels[i])] = 1.0;
  return y;
}

}  // namespace finspect
