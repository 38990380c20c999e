#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynsketch/core.hpp"
#include "dynsketch/permgen.hpp"

namespace dynsketch {

// Minimum lifted rank over the inserted features whose bit is 1; nullopt when
// every inserted bit is 0.
using PartialMinResult = std::optional<Rank>;

HashValue min_hash(const SparseBinaryVector& x, const Permutation& pi);

Sketch build_sketch(const SparseBinaryVector& x, std::span<const Permutation> perms);

// Single insertion. a_m is pi(m) for the insertion position m.
constexpr HashValue lift_hash(HashValue h_old, Rank a_m, bool bit) noexcept {
  if (h_old.is_empty()) return bit ? HashValue(a_m) : h_old;
  if (h_old.value() < a_m) return h_old;
  return bit ? HashValue(a_m) : HashValue(h_old.value() + 1);
}

// pi(m) for every position of a batch, in batch order and sorted. Shared by
// all points updated under the same permutation.
class BatchRanks {
public:
  BatchRanks(const Permutation& pi, std::span<const Index> positions);

  std::span<const Rank> in_order() const noexcept { return in_order_; }
  std::span<const Rank> sorted() const noexcept { return sorted_; }

  std::size_t count_below(Rank v) const noexcept {
    return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
  }
  std::size_t count_at_most(Rank v) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
  }
  bool contains(Rank v) const noexcept { return std::binary_search(sorted_.begin(), sorted_.end(), v); }
  Rank min() const noexcept { return sorted_.front(); }

private:
  std::vector<Rank> in_order_;
  std::vector<Rank> sorted_;
};

PartialMinResult partial_min_hash(const Permutation& pi, const InsertionBatch& batch);
PartialMinResult partial_min_hash(const BatchRanks& ranks, std::span<const std::uint8_t> bits);
// Same, with the batch slots (0-based) whose bit is 1 given explicitly.
PartialMinResult partial_min_hash_of_ones(const BatchRanks& ranks, std::span<const std::uint32_t> one_slots);

// min(h_old shifted past the inserted ranks below it, partial).
HashValue combine_lift(HashValue h_old, const BatchRanks& ranks, PartialMinResult partial) noexcept;

HashValue multiple_lift_hash(HashValue h_old, const Permutation& pi, const InsertionBatch& batch);

// Single deletion, rule only. `next_one_above()` must return the smallest rank
// above a_m that holds a 1 in the pre-deletion frame, or EMPTY; it is only
// called when the deleted feature held the minimum.
template <typename NextOne>
HashValue drop_hash_rule(HashValue h_old, Rank a_m, NextOne&& next_one_above) {
  if (h_old.is_empty() || h_old.value() < a_m) return h_old;
  if (h_old.value() > a_m) return HashValue(h_old.value() - 1);
  const HashValue next = next_one_above();
  return next.is_empty() ? next : HashValue(next.value() - 1);
}

// Single deletion of feature m from x. The recompute branch walks ranks upward
// through the inverse permutation.
HashValue drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi, Index m);

HashValue multiple_drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi,
                             const DeletionBatch& batch);
HashValue multiple_drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi,
                             std::span<const Index> positions, const BatchRanks& ranks);

namespace detail {

// The kHead smallest batch ranks under one permutation, ascending, with the
// batch slot each came from. Unused entries hold rank ~0.
inline constexpr std::size_t kHead = 4;
struct RankHead {
  Rank rank[kHead];
  std::uint32_t slot[kHead];
};

// Reads the batch ranks position-major from family and returns them
// slot-major ([j * n + i]) together with each slot's head.
void collect_batch_ranks(const PermutationFamily& family, std::span<const Index> positions,
                         std::vector<Rank>& by_slot, std::vector<RankHead>& heads);

}  // namespace detail

// multiple_lift_hash for many points sharing one batch of positions and one
// permutation family. Per-point cost does not grow with the batch unless
// kHead or more batch ranks sit at or below a slot's h_old.
class BatchLiftPlan {
public:
  BatchLiftPlan(const PermutationFamily& family, std::span<const Index> positions);

  std::size_t num_perms() const noexcept { return k_; }
  std::size_t batch_size() const noexcept { return n_; }

  // Updates one point's sketch in place; one_slots lists (ascending or not)
  // the 0-based batch slots whose inserted bit is 1.
  void apply(std::span<HashValue> values, std::span<const std::uint32_t> one_slots) const;

private:
  std::size_t k_ = 0;
  std::size_t n_ = 0;
  HashValue full_update(std::size_t j, HashValue h, std::span<const std::uint32_t> one_slots) const;

  std::vector<Rank> by_slot_;  // [j * n + i] = rank of batch position i under permutation j
  std::vector<detail::RankHead> head_;
};

// multiple_drop_hash for many points sharing one batch of deleted positions.
// family must hold the same permutations as perms. Keeps a view of perms,
// which must outlive the plan.
class BatchDropPlan {
public:
  BatchDropPlan(const PermutationFamily& family, std::span<const Permutation> perms,
                std::span<const Index> positions);

  void apply(std::span<HashValue> values, const SparseBinaryVector& x) const;

private:
  HashValue recompute(std::size_t j, const SparseBinaryVector& x) const;

  std::span<const Permutation> perms_;
  std::vector<Index> positions_;
  std::size_t n_ = 0;
  std::vector<Rank> by_slot_;
  std::vector<detail::RankHead> head_;
};

Sketch update_sketch_insert(const Sketch& sk, std::span<const Permutation> perms, const InsertionBatch& batch);
Sketch update_sketch_delete(const Sketch& sk, std::span<const Permutation> perms, const SparseBinaryVector& x,
                            const DeletionBatch& batch);

}  // namespace dynsketch
