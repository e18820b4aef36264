#pragma once

#include <span>
#include <vector>

namespace finspect {

// n feature rows with integer class labels in [0, classes).
struct LabeledSet {
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  int classes = 0;

  std::size_t size() const noexcept { return inputs.size(); }
  std::size_t dimension() const noexcept { return inputs.empty() ? 0 : inputs.front().size(); }

  // Non-empty, rectangular, labels in range, finite values.
  void validate() const;
  // Number of distinct labels that actually occur.
  int classes_present() const;
  std::vector<double> one_hot(std::size_t i) const;
};

}  // namespace finspect
