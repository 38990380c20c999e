#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dynsketch/core.hpp"

namespace dynsketch {

struct PairEstimate {
  double true_jaccard = 0.0;
  double estimated_jaccard = 0.0;
  std::size_t collisions = 0;
  std::size_t comparable_slots = 0;
};

// Exact |A ∩ B| / |A ∪ B| of the supports; 0 when both are empty.
double jaccard_true(const SparseBinaryVector& x, const SparseBinaryVector& y);

// Collision fraction over slots. Slots EMPTY in both sketches are not
// comparable; EMPTY in exactly one is a miss. true_jaccard is left at 0.
PairEstimate jaccard_estimate(const Sketch& a, const Sketch& b);

// Root mean squared (estimated - true). Throws ValidationError on empty input.
double rmse(std::span<const PairEstimate> pairs);

struct UniformityResult {
  std::vector<double> frequency;  // frequency[u] for the u-th element of the set
  double max_deviation = 0.0;     // max |frequency - 1/|U||
  std::size_t trials = 0;
};

using PermutationSource = std::function<Permutation(std::size_t trial)>;

// Empirical distribution of argmin over `set` of the generated permutations.
// Requires |set| >= 2, set strictly increasing, trials >= 10 |set|^2.
UniformityResult minwise_uniformity_test(const PermutationSource& source, std::span<const Index> set,
                                         std::size_t trials);

}  // namespace dynsketch
