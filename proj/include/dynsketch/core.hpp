#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynsketch {

// Feature indices and ranks are 1-based everywhere in the public API.
using Index = std::uint32_t;
using Rank = std::uint32_t;

class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// A point in {0,1}^dim stored as its sorted support.
class SparseBinaryVector {
public:
  SparseBinaryVector() = default;

  // Throws ValidationError unless support is strictly increasing within [1, dim].
  SparseBinaryVector(Index dim, std::vector<Index> support);

  // Builds from a dense 0/1 listing, e.g. {1,0,0,1}.
  static SparseBinaryVector from_dense(std::span<const int> bits);

  Index dim() const noexcept { return dim_; }
  std::span<const Index> support() const noexcept { return support_; }
  std::size_t count() const noexcept { return support_.size(); }
  bool empty() const noexcept { return support_.empty(); }

  // O(log k) membership test.
  bool test(Index i) const noexcept;

  std::vector<int> to_dense() const;

  friend bool operator==(const SparseBinaryVector&, const SparseBinaryVector&) = default;

private:
  Index dim_ = 0;
  std::vector<Index> support_;
};

// Positions M (pre-insertion frame) and the bits B written there.
class InsertionBatch {
public:
  InsertionBatch(std::vector<Index> positions, std::vector<std::uint8_t> bits);

  std::span<const Index> positions() const noexcept { return positions_; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return positions_.size(); }

  // Throws ValidationError if any position exceeds dim.
  void validate_against(Index dim) const;

  // Index of insertion i (0-based) in the post-insertion frame: m_i + i.
  std::vector<Index> post_insertion_positions() const;

private:
  std::vector<Index> positions_;
  std::vector<std::uint8_t> bits_;
};

class DeletionBatch {
public:
  explicit DeletionBatch(std::vector<Index> positions);

  std::span<const Index> positions() const noexcept { return positions_; }
  std::size_t size() const noexcept { return positions_.size(); }

  void validate_against(Index dim) const;

private:
  std::vector<Index> positions_;
};

// Requires positions strictly increasing and within [1, dim]; `what` names the caller.
void validate_positions(std::span<const Index> positions, Index dim, const char* what);

SparseBinaryVector insert_features(const SparseBinaryVector& x, const InsertionBatch& batch);
SparseBinaryVector delete_features(const SparseBinaryVector& x, const DeletionBatch& batch);

std::string to_string(const SparseBinaryVector& x);

// A bijection on {1..dim}; rank(i) is the rank assigned to feature i.
// The inverse table is built once so rank -> feature lookups are O(1).
class Permutation {
public:
  Permutation() = default;

  // Throws ValidationError unless ranks is a permutation of 1..ranks.size().
  explicit Permutation(std::vector<Rank> ranks);

  Index dim() const noexcept { return static_cast<Index>(rank_.size()); }
  Rank rank(Index i) const noexcept { return rank_[i - 1]; }
  Index feature_at_rank(Rank r) const noexcept { return inverse_[r - 1]; }
  std::span<const Rank> ranks() const noexcept { return rank_; }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.rank_ == b.rank_; }

private:
  std::vector<Rank> rank_;
  std::vector<Index> inverse_;
};

std::string to_string(const Permutation& pi);

// A minHash value: a rank, or EMPTY for a vector with empty support.
class HashValue {
public:
  constexpr HashValue() noexcept = default;
  constexpr explicit HashValue(Rank r) noexcept : v_(r) {}

  static constexpr HashValue empty() noexcept { return HashValue(); }

  constexpr bool is_empty() const noexcept { return v_ == 0; }
  constexpr Rank value() const noexcept { return v_; }

  friend constexpr bool operator==(HashValue, HashValue) noexcept = default;

private:
  Rank v_ = 0;  // 0 encodes EMPTY; ranks start at 1
};

// "EMPTY" or the decimal rank.
std::string to_string(HashValue h);
// Inverse of to_string; throws ValidationError on anything else.
HashValue parse_hash_value(const std::string& token);

struct Sketch {
  std::vector<HashValue> values;

  std::size_t num_perms() const noexcept { return values.size(); }
  friend bool operator==(const Sketch&, const Sketch&) = default;
};

}  // namespace dynsketch
