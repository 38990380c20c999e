#pragma once
// Reference constructions used only by the tests. They are deliberately naive:
// each follows the printed algorithm or the plain definition step by step.

#include <algorithm>
#include <random>
#include <vector>

#include "dynsketch/core.hpp"
#include "dynsketch/permgen.hpp"
#include "dynsketch/sketch.hpp"

namespace dynsketch::testing {

// liftPerm exactly as listed: copy with a gap at r, then bump every value
// >= pi(r) except at r itself.
inline Permutation lift_perm_listing(const Permutation& pi, Index r) {
  const Index d = pi.dim();
  std::vector<Rank> out(d + 1);
  for (Index i = 1; i <= d + 1; ++i) out[i - 1] = i <= r ? pi.rank(i) : pi.rank(i - 1);
  for (Index i = 1; i <= d + 1; ++i) {
    if (i != r && out[i - 1] >= pi.rank(r)) out[i - 1] += 1;
  }
  return Permutation(std::move(out));
}

// Folds lift_perm at R[i] + i (0-based i).
inline Permutation lift_perm_folded(Permutation pi, std::span<const Index> positions) {
  for (std::size_t i = 0; i < positions.size(); ++i) pi = lift_perm(pi, positions[i] + static_cast<Index>(i));
  return pi;
}

// Folds drop_perm at R[i] - i (0-based i).
inline Permutation drop_perm_folded(Permutation pi, std::span<const Index> positions) {
  for (std::size_t i = 0; i < positions.size(); ++i) pi = drop_perm(pi, positions[i] - static_cast<Index>(i));
  return pi;
}

inline HashValue brute_min_hash(const SparseBinaryVector& x, const Permutation& pi) {
  Rank best = 0;
  for (Index j : x.support()) {
    if (best == 0 || pi.rank(j) < best) best = pi.rank(j);
  }
  return HashValue(best);
}

inline SparseBinaryVector random_vector(std::mt19937_64& eng, Index d, double density) {
  std::bernoulli_distribution coin(density);
  std::vector<Index> support;
  for (Index i = 1; i <= d; ++i) {
    if (coin(eng)) support.push_back(i);
  }
  return SparseBinaryVector(d, std::move(support));
}

// n distinct sorted positions in [1, d].
inline std::vector<Index> random_positions(std::mt19937_64& eng, Index d, std::size_t n) {
  std::vector<Index> all(d);
  for (Index i = 0; i < d; ++i) all[i] = i + 1;
  std::shuffle(all.begin(), all.end(), eng);
  all.resize(n);
  std::sort(all.begin(), all.end());
  return all;
}

inline std::vector<std::uint8_t> random_bits(std::mt19937_64& eng, std::size_t n, double p_one) {
  std::bernoulli_distribution coin(p_one);
  std::vector<std::uint8_t> bits(n);
  for (auto& b : bits) b = coin(eng);
  return bits;
}

inline SparseBinaryVector dense(std::initializer_list<int> bits) {
  std::vector<int> v(bits);
  return SparseBinaryVector::from_dense(v);
}

inline Permutation perm(std::initializer_list<Rank> ranks) { return Permutation(std::vector<Rank>(ranks)); }

}  // namespace dynsketch::testing
