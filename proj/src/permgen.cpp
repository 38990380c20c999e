#include "dynsketch/permgen.hpp"

#include <algorithm>
#include <numeric>

namespace dynsketch {
namespace {

__extension__ using u128 = unsigned __int128;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

void check_position(const Permutation& pi, Index r, const char* what) {
  if (r < 1 || r > pi.dim()) {
    throw ValidationError(std::string(what) + ": position " + std::to_string(r) + " outside [1, " +
                          std::to_string(pi.dim()) + "]");
  }
}

// Sorted pi(m) over the batch positions.
std::vector<Rank> sorted_batch_ranks(const Permutation& pi, std::span<const Index> positions) {
  std::vector<Rank> out;
  out.reserve(positions.size());
  for (Index m : positions) out.push_back(pi.rank(m));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::mt19937_64 make_engine(PermutationSeed s) {
  return std::mt19937_64(splitmix64(s.seed ^ splitmix64(s.index)));
}

std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
  // 64x64 -> 128 multiply; reject the biased low band.
  u128 m = static_cast<u128>(eng()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(eng()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Permutation random_permutation(Index d, PermutationSeed seed) {
  if (d == 0) throw ValidationError("random_permutation: dimension must be positive");
  std::vector<Rank> ranks(d);
  std::iota(ranks.begin(), ranks.end(), Rank{1});
  auto eng = make_engine(seed);
  for (std::size_t i = d - 1; i > 0; --i) {
    std::swap(ranks[i], ranks[uniform_below(eng, i + 1)]);
  }
  return Permutation(std::move(ranks));
}

std::vector<Permutation> random_permutations(Index d, std::uint64_t master_seed, std::size_t k) {
  std::vector<Permutation> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) out.push_back(random_permutation(d, {master_seed, j}));
  return out;
}

PermutationFamily::PermutationFamily(std::span<const Permutation> perms) : k_(perms.size()) {
  if (perms.empty()) return;
  dim_ = perms.front().dim();
  ranks_.resize(static_cast<std::size_t>(dim_) * k_);
  for (std::size_t j = 0; j < k_; ++j) {
    if (perms[j].dim() != dim_) throw ValidationError("PermutationFamily: permutations differ in dimension");
    const auto r = perms[j].ranks();
    for (std::size_t i = 0; i < dim_; ++i) ranks_[i * k_ + j] = r[i];
  }
}

Permutation lift_perm(const Permutation& pi, Index r) {
  check_position(pi, r, "lift_perm");
  const Rank pivot = pi.rank(r);
  std::vector<Rank> ranks;
  ranks.reserve(pi.dim() + 1);
  for (Index i = 1; i <= pi.dim(); ++i) {
    if (i == r) ranks.push_back(pivot);
    const Rank v = pi.rank(i);
    ranks.push_back(v >= pivot ? v + 1 : v);
  }
  return Permutation(std::move(ranks));
}

Permutation drop_perm(const Permutation& pi, Index r) {
  check_position(pi, r, "drop_perm");
  const Rank pivot = pi.rank(r);
  std::vector<Rank> ranks;
  ranks.reserve(pi.dim() - 1);
  for (Index i = 1; i <= pi.dim(); ++i) {
    if (i == r) continue;
    const Rank v = pi.rank(i);
    ranks.push_back(v > pivot ? v - 1 : v);
  }
  return Permutation(std::move(ranks));
}

Permutation multiple_lift_perm(const Permutation& pi, std::span<const Index> positions) {
  if (positions.empty()) throw ValidationError("multiple_lift_perm: empty batch");
  validate_positions(positions, pi.dim(), "multiple_lift_perm");
  const auto batch = sorted_batch_ranks(pi, positions);
  // Each inserted feature sits directly below the original feature it was
  // inserted in front of, so a rank v among originals gains one per batch rank <= v.
  auto shifted = [&](Rank v, bool inclusive) {
    const auto it = inclusive ? std::upper_bound(batch.begin(), batch.end(), v)
                              : std::lower_bound(batch.begin(), batch.end(), v);
    return v + static_cast<Rank>(it - batch.begin());
  };
  std::vector<Rank> ranks;
  ranks.reserve(pi.dim() + positions.size());
  std::size_t next = 0;
  for (Index i = 1; i <= pi.dim(); ++i) {
    if (next < positions.size() && positions[next] == i) {
      ranks.push_back(shifted(pi.rank(i), false));
      ++next;
    }
    ranks.push_back(shifted(pi.rank(i), true));
  }
  return Permutation(std::move(ranks));
}

Permutation multiple_drop_perm(const Permutation& pi, std::span<const Index> positions) {
  validate_positions(positions, pi.dim(), "multiple_drop_perm");
  const auto batch = sorted_batch_ranks(pi, positions);
  std::vector<Rank> ranks;
  ranks.reserve(pi.dim() - positions.size());
  std::size_t next = 0;
  for (Index i = 1; i <= pi.dim(); ++i) {
    if (next < positions.size() && positions[next] == i) {
      ++next;
      continue;
    }
    const Rank v = pi.rank(i);
    ranks.push_back(v - static_cast<Rank>(std::lower_bound(batch.begin(), batch.end(), v) - batch.begin()));
  }
  return Permutation(std::move(ranks));
}

}  // namespace dynsketch
