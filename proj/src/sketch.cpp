#include "dynsketch/sketch.hpp"

namespace dynsketch {
namespace {

void check_dims(const SparseBinaryVector& x, const Permutation& pi, const char* what) {
  if (x.dim() != pi.dim()) {
    throw ValidationError(std::string(what) + ": vector dim " + std::to_string(x.dim()) +
                          " != permutation dim " + std::to_string(pi.dim()));
  }
}

void check_slot_count(const Sketch& sk, std::span<const Permutation> perms, const char* what) {
  if (sk.num_perms() != perms.size()) {
    throw ValidationError(std::string(what) + ": sketch has " + std::to_string(sk.num_perms()) +
                          " slots but " + std::to_string(perms.size()) + " permutations given");
  }
}

}  // namespace

HashValue min_hash(const SparseBinaryVector& x, const Permutation& pi) {
  check_dims(x, pi, "min_hash");
  Rank best = 0;
  for (Index i : x.support()) {
    const Rank r = pi.rank(i);
    if (best == 0 || r < best) best = r;
  }
  return HashValue(best);
}

Sketch build_sketch(const SparseBinaryVector& x, std::span<const Permutation> perms) {
  Sketch sk;
  sk.values.reserve(perms.size());
  for (const auto& pi : perms) sk.values.push_back(min_hash(x, pi));
  return sk;
}

BatchRanks::BatchRanks(const Permutation& pi, std::span<const Index> positions) {
  validate_positions(positions, pi.dim(), "BatchRanks");
  in_order_.reserve(positions.size());
  for (Index m : positions) in_order_.push_back(pi.rank(m));
  sorted_ = in_order_;
  std::sort(sorted_.begin(), sorted_.end());
}

// The inserted feature built from original rank s ends up at s plus the number
// of batch ranks below s, which is increasing in s. So the smallest base rank
// among the ones decides.
PartialMinResult partial_min_hash(const BatchRanks& ranks, std::span<const std::uint8_t> bits) {
  const auto base = ranks.in_order();
  Rank best = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] && (best == 0 || base[i] < best)) best = base[i];
  }
  if (best == 0) return std::nullopt;
  return best + static_cast<Rank>(ranks.count_below(best));
}

PartialMinResult partial_min_hash_of_ones(const BatchRanks& ranks, std::span<const std::uint32_t> one_slots) {
  if (one_slots.empty()) return std::nullopt;
  const auto base = ranks.in_order();
  Rank best = base[one_slots.front()];
  for (auto slot : one_slots.subspan(1)) best = std::min(best, base[slot]);
  return best + static_cast<Rank>(ranks.count_below(best));
}

PartialMinResult partial_min_hash(const Permutation& pi, const InsertionBatch& batch) {
  batch.validate_against(pi.dim());
  return partial_min_hash(BatchRanks(pi, batch.positions()), batch.bits());
}

HashValue combine_lift(HashValue h_old, const BatchRanks& ranks, PartialMinResult partial) noexcept {
  if (h_old.is_empty()) return partial ? HashValue(*partial) : h_old;
  const Rank shifted = h_old.value() + static_cast<Rank>(ranks.count_at_most(h_old.value()));
  if (!partial) return HashValue(shifted);
  return HashValue(std::min(shifted, *partial));
}

HashValue multiple_lift_hash(HashValue h_old, const Permutation& pi, const InsertionBatch& batch) {
  batch.validate_against(pi.dim());
  const BatchRanks ranks(pi, batch.positions());
  return combine_lift(h_old, ranks, partial_min_hash(ranks, batch.bits()));
}

HashValue drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi, Index m) {
  check_dims(x, pi, "drop_hash");
  if (m < 1 || m > pi.dim()) {
    throw ValidationError("drop_hash: position " + std::to_string(m) + " outside [1, " +
                          std::to_string(pi.dim()) + "]");
  }
  const Rank a_m = pi.rank(m);
  return drop_hash_rule(h_old, a_m, [&] {
    for (Rank r = a_m + 1; r <= pi.dim(); ++r) {
      if (x.test(pi.feature_at_rank(r))) return HashValue(r);
    }
    return HashValue::empty();
  });
}

HashValue multiple_drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi,
                             std::span<const Index> positions, const BatchRanks& ranks) {
  if (h_old.is_empty() || positions.empty() || h_old.value() < ranks.min()) return h_old;
  if (!ranks.contains(h_old.value())) {
    return HashValue(h_old.value() - static_cast<Rank>(ranks.count_at_most(h_old.value())));
  }
  // The minimum itself was deleted: rescan the surviving support.
  Rank best = 0;
  std::size_t next = 0;
  for (Index i : x.support()) {
    while (next < positions.size() && positions[next] < i) ++next;
    if (next < positions.size() && positions[next] == i) continue;
    const Rank r = pi.rank(i);
    if (best == 0 || r < best) best = r;
  }
  if (best == 0) return HashValue::empty();
  return HashValue(best - static_cast<Rank>(ranks.count_below(best)));
}

HashValue multiple_drop_hash(HashValue h_old, const SparseBinaryVector& x, const Permutation& pi,
                             const DeletionBatch& batch) {
  check_dims(x, pi, "multiple_drop_hash");
  batch.validate_against(pi.dim());
  if (batch.size() == 0) return h_old;
  return multiple_drop_hash(h_old, x, pi, batch.positions(), BatchRanks(pi, batch.positions()));
}

void detail::collect_batch_ranks(const PermutationFamily& family, std::span<const Index> positions,
                                 std::vector<Rank>& by_slot, std::vector<RankHead>& heads) {
  const std::size_t k = family.size();
  const std::size_t n = positions.size();
  by_slot.assign(k * n, 0);
  RankHead blank{};
  std::fill(std::begin(blank.rank), std::end(blank.rank), ~Rank{0});
  heads.assign(k, blank);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = family.row(positions[i]);
    for (std::size_t j = 0; j < k; ++j) {
      Rank v = row[j];
      by_slot[j * n + i] = v;
      RankHead& head = heads[j];
      auto slot = static_cast<std::uint32_t>(i);
      for (std::size_t t = 0; t < kHead && v < head.rank[kHead - 1]; ++t) {
        if (v < head.rank[t]) {
          std::swap(v, head.rank[t]);
          std::swap(slot, head.slot[t]);
        }
      }
    }
  }
}

BatchLiftPlan::BatchLiftPlan(const PermutationFamily& family, std::span<const Index> positions)
    : k_(family.size()), n_(positions.size()) {
  validate_positions(positions, family.dim(), "BatchLiftPlan");
  detail::collect_batch_ranks(family, positions, by_slot_, head_);
}

namespace {

Rank count_at_most_scan(const Rank* p, std::size_t n, Rank v) {
  Rank c = 0;
  for (std::size_t i = 0; i < n; ++i) c += p[i] <= v;
  return c;
}

Rank count_below_scan(const Rank* p, std::size_t n, Rank v) {
  Rank c = 0;
  for (std::size_t i = 0; i < n; ++i) c += p[i] < v;
  return c;
}

}  // namespace

HashValue BatchLiftPlan::full_update(std::size_t j, HashValue h, std::span<const std::uint32_t> one_slots) const {
  constexpr Rank kNone = ~Rank{0};
  const Rank* ranks = by_slot_.data() + j * n_;
  Rank s = kNone;
  for (auto slot : one_slots) s = std::min(s, ranks[slot]);
  Rank best = h.is_empty() ? kNone : h.value() + count_at_most_scan(ranks, n_, h.value());
  if (s < best) best = std::min(best, s + count_below_scan(ranks, n_, s));
  return best == kNone ? HashValue::empty() : HashValue(best);
}

// With c batch ranks at or below h_old, the old minimum moves to h_old + c.
// An inserted one can only undercut that if its base rank is <= h_old, i.e. it
// is one of those c smallest; the t-th smallest lands at rank + t. So unless
// c reaches kHead, the head alone decides the slot.
void BatchLiftPlan::apply(std::span<HashValue> values, std::span<const std::uint32_t> one_slots) const {
  if (values.size() != k_) throw ValidationError("BatchLiftPlan: sketch size does not match the plan");
  thread_local std::vector<std::uint64_t> is_one_words;
  is_one_words.assign((n_ + 63) / 64, 0);
  std::uint64_t* is_one = is_one_words.data();
  for (auto slot : one_slots) is_one[slot >> 6] |= std::uint64_t{1} << (slot & 63);
  constexpr std::size_t kHead = detail::kHead;
  const bool full_head = n_ > kHead;

  for (std::size_t j = 0; j < k_; ++j) {
    const HashValue h = values[j];
    if (h.is_empty()) {
      values[j] = full_update(j, h, one_slots);
      continue;
    }
    const detail::RankHead& head = head_[j];
    const Rank v = h.value();
    Rank c = 0;
    for (std::size_t t = 0; t < kHead; ++t) c += head.rank[t] <= v;
    if (full_head && c == kHead) {
      values[j] = full_update(j, h, one_slots);
      continue;
    }
    Rank best = v + c;
    for (std::size_t t = 0; t < kHead; ++t) {
      const std::uint32_t slot = head.slot[t];
      // Bitwise, not short-circuit: this branch would be unpredictable.
      const auto one = static_cast<Rank>(is_one[slot >> 6] >> (slot & 63)) & 1;
      const Rank wins = static_cast<Rank>(head.rank[t] <= v) & one;
      best = std::min(best, (head.rank[t] + static_cast<Rank>(t)) | (wins - 1));
    }
    values[j] = HashValue(best);
  }
}

BatchDropPlan::BatchDropPlan(const PermutationFamily& family, std::span<const Permutation> perms,
                             std::span<const Index> positions)
    : perms_(perms), positions_(positions.begin(), positions.end()), n_(positions.size()) {
  if (family.size() != perms.size() || (!perms.empty() && family.dim() != perms.front().dim())) {
    throw ValidationError("BatchDropPlan: family and permutations disagree");
  }
  validate_positions(positions, family.dim(), "BatchDropPlan");
  detail::collect_batch_ranks(family, positions, by_slot_, head_);
}

// The deleted features held the minimum: rescan the surviving support.
HashValue BatchDropPlan::recompute(std::size_t j, const SparseBinaryVector& x) const {
  const Permutation& pi = perms_[j];
  Rank best = 0;
  std::size_t next = 0;
  for (Index i : x.support()) {
    while (next < n_ && positions_[next] < i) ++next;
    if (next < n_ && positions_[next] == i) continue;
    const Rank r = pi.rank(i);
    if (best == 0 || r < best) best = r;
  }
  if (best == 0) return HashValue::empty();
  return HashValue(best - count_below_scan(by_slot_.data() + j * n_, n_, best));
}

// Same head argument as the lift plan: with fewer than kHead deleted ranks at
// or below h_old, the head holds all of them.
void BatchDropPlan::apply(std::span<HashValue> values, const SparseBinaryVector& x) const {
  if (values.size() != perms_.size()) throw ValidationError("BatchDropPlan: sketch size does not match the plan");
  if (!perms_.empty()) check_dims(x, perms_.front(), "BatchDropPlan");
  if (n_ == 0) return;
  constexpr std::size_t kHead = detail::kHead;
  const bool full_head = n_ > kHead;

  for (std::size_t j = 0; j < values.size(); ++j) {
    const HashValue h = values[j];
    if (h.is_empty()) continue;
    const detail::RankHead& head = head_[j];
    const Rank v = h.value();
    Rank c = 0;
    Rank hit = 0;
    for (std::size_t t = 0; t < kHead; ++t) {
      c += head.rank[t] <= v;
      hit |= head.rank[t] == v;
    }
    if (full_head && c == kHead) {
      const Rank* ranks = by_slot_.data() + j * n_;
      hit = 0;
      for (std::size_t i = 0; i < n_; ++i) hit |= ranks[i] == v;
      c = count_at_most_scan(ranks, n_, v);
    }
    values[j] = hit ? recompute(j, x) : HashValue(v - c);
  }
}

Sketch update_sketch_insert(const Sketch& sk, std::span<const Permutation> perms, const InsertionBatch& batch) {
  check_slot_count(sk, perms, "update_sketch_insert");
  Sketch out;
  out.values.reserve(sk.num_perms());
  for (std::size_t j = 0; j < perms.size(); ++j) {
    out.values.push_back(multiple_lift_hash(sk.values[j], perms[j], batch));
  }
  return out;
}

Sketch update_sketch_delete(const Sketch& sk, std::span<const Permutation> perms, const SparseBinaryVector& x,
                            const DeletionBatch& batch) {
  check_slot_count(sk, perms, "update_sketch_delete");
  Sketch out;
  out.values.reserve(sk.num_perms());
  for (std::size_t j = 0; j < perms.size(); ++j) {
    out.values.push_back(multiple_drop_hash(sk.values[j], x, perms[j], batch));
  }
  return out;
}

}  // namespace dynsketch
