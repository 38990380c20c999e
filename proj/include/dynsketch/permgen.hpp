#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "dynsketch/core.hpp"

namespace dynsketch {

// Permutation `index` of a sketch family seeded by `seed`.
struct PermutationSeed {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
};

// std::mt19937_64 keyed by SplitMix64(seed, index). Output is fixed by the
// standard, and bounded draws below avoid std::uniform_int_distribution, so
// streams are identical across standard libraries.
std::mt19937_64 make_engine(PermutationSeed s);

// Uniform integer in [0, bound) (Lemire's multiply-shift rejection method).
std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound);

// Fisher-Yates shuffle of 1..d. Throws ValidationError for d == 0.
Permutation random_permutation(Index d, PermutationSeed seed);

// Permutations (master_seed, 0) .. (master_seed, k - 1).
std::vector<Permutation> random_permutations(Index d, std::uint64_t master_seed, std::size_t k);

// K permutations of one dimension stored position-major: row(m) holds the K
// ranks of feature m, so batch updates read one contiguous row per position.
class PermutationFamily {
public:
  PermutationFamily() = default;
  explicit PermutationFamily(std::span<const Permutation> perms);

  Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return k_; }
  std::span<const Rank> row(Index m) const noexcept { return {ranks_.data() + (m - 1) * k_, k_}; }
  Rank rank(std::size_t j, Index m) const noexcept { return ranks_[(m - 1) * k_ + j]; }

private:
  Index dim_ = 0;
  std::size_t k_ = 0;
  std::vector<Rank> ranks_;
};

// Lifts pi to dim + 1: the new feature at index r takes rank pi(r), and every
// rank >= pi(r) of the original features moves up by one.
Permutation lift_perm(const Permutation& pi, Index r);

// Removes index r and closes the gap in the ranks above pi(r).
Permutation drop_perm(const Permutation& pi, Index r);

// n-fold lift at positions R (pre-insertion frame, strictly increasing);
// the i-th lift (0-based) happens at R[i] + i. Computed in one O(d + n log n)
// pass rather than by composing lift_perm.
Permutation multiple_lift_perm(const Permutation& pi, std::span<const Index> positions);

// n-fold drop at positions R (strictly increasing, original frame).
Permutation multiple_drop_perm(const Permutation& pi, std::span<const Index> positions);

}  // namespace dynsketch
