#pragma once

#include <deque>
#include <stdexcept>
#include <vector>

#include "finspect/dataset.hpp"
#include "finspect/gknn.hpp"

namespace testing_support {

// Replays fixed choices; queued genes are consumed first, then `gene_default`.
class ScriptedDraws final : public finspect::GeneticDraws {
 public:
  ScriptedDraws(int crossover, int gene) : crossover_(crossover), gene_default_(gene) {}
  std::deque<int> genes;

  int crossover_point(int) override { return crossover_; }
  int gene(int) override {
    if (genes.empty()) return gene_default_;
    const int g = genes.front();
    genes.pop_front();
    return g;
  }
  std::size_t index(std::size_t) override { throw std::logic_error("index draw not scripted"); }
  double uniform() override { throw std::logic_error("uniform draw not scripted"); }

 private:
  int crossover_;
  int gene_default_;
};

// Six labelled points, query (1, 0); classes c1 -> 0, c2 -> 1.
inline finspect::LabeledSet example_two_data() {
  return {{{1, 1}, {0, 1}, {2, 3}, {2, 2}, {1, 1}, {4, 2}}, {0, 0, 1, 1, 0, 1}, 2};
}

}  // namespace testing_support
