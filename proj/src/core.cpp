#include "dynsketch/core.hpp"

#include <algorithm>
#include <sstream>

namespace dynsketch {

void validate_positions(std::span<const Index> positions, Index dim, const char* what) {
  Index prev = 0;
  for (Index p : positions) {
    if (p < 1 || p > dim) {
      throw ValidationError(std::string(what) + ": position " + std::to_string(p) +
                            " outside [1, " + std::to_string(dim) + "]");
    }
    if (p <= prev) {
      throw ValidationError(std::string(what) + ": positions must be strictly increasing (" +
                            std::to_string(prev) + " then " + std::to_string(p) + ")");
    }
    prev = p;
  }
}

SparseBinaryVector::SparseBinaryVector(Index dim, std::vector<Index> support)
    : dim_(dim), support_(std::move(support)) {
  validate_positions(support_, dim_, "SparseBinaryVector");
}

SparseBinaryVector SparseBinaryVector::from_dense(std::span<const int> bits) {
  std::vector<Index> support;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != 0 && bits[i] != 1) {
      throw ValidationError("from_dense: entries must be 0 or 1");
    }
    if (bits[i] == 1) support.push_back(static_cast<Index>(i + 1));
  }
  return SparseBinaryVector(static_cast<Index>(bits.size()), std::move(support));
}

bool SparseBinaryVector::test(Index i) const noexcept {
  return std::binary_search(support_.begin(), support_.end(), i);
}

std::vector<int> SparseBinaryVector::to_dense() const {
  std::vector<int> out(dim_, 0);
  for (Index i : support_) out[i - 1] = 1;
  return out;
}

std::string to_string(const SparseBinaryVector& x) {
  std::ostringstream os;
  os << '[';
  const auto dense = x.to_dense();
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (i) os << ',';
    os << dense[i];
  }
  os << ']';
  return os.str();
}

Permutation::Permutation(std::vector<Rank> ranks) : rank_(std::move(ranks)), inverse_(rank_.size(), 0) {
  const auto d = rank_.size();
  for (std::size_t i = 0; i < d; ++i) {
    const Rank r = rank_[i];
    if (r < 1 || r > d || inverse_[r - 1] != 0) {
      throw ValidationError("Permutation: not a bijection on 1.." + std::to_string(d));
    }
    inverse_[r - 1] = static_cast<Index>(i + 1);
  }
}

std::string to_string(const Permutation& pi) {
  std::ostringstream os;
  os << '[';
  for (Index i = 1; i <= pi.dim(); ++i) {
    if (i > 1) os << ',';
    os << pi.rank(i);
  }
  os << ']';
  return os.str();
}

std::string to_string(HashValue h) {
  return h.is_empty() ? std::string("EMPTY") : std::to_string(h.value());
}

HashValue parse_hash_value(const std::string& token) {
  if (token == "EMPTY") return HashValue::empty();
  if (token.empty() || token.size() > 10 ||
      !std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ValidationError("bad hash value token '" + token + "'");
  }
  const auto v = std::stoull(token);
  if (v == 0 || v > 0xffffffffull) throw ValidationError("hash value out of range: " + token);
  return HashValue(static_cast<Rank>(v));
}

InsertionBatch::InsertionBatch(std::vector<Index> positions, std::vector<std::uint8_t> bits)
    : positions_(std::move(positions)), bits_(std::move(bits)) {
  if (positions_.empty()) throw ValidationError("InsertionBatch: empty batch");
  if (positions_.size() != bits_.size()) {
    throw ValidationError("InsertionBatch: |positions| != |bits|");
  }
  for (auto b : bits_) {
    if (b > 1) throw ValidationError("InsertionBatch: bits must be 0 or 1");
  }
  validate_positions(positions_, positions_.back(), "InsertionBatch");
}

void InsertionBatch::validate_against(Index dim) const {
  validate_positions(positions_, dim, "InsertionBatch");
}

std::vector<Index> InsertionBatch::post_insertion_positions() const {
  std::vector<Index> out(positions_.size());
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    out[i] = positions_[i] + static_cast<Index>(i);
  }
  return out;
}

DeletionBatch::DeletionBatch(std::vector<Index> positions) : positions_(std::move(positions)) {
  if (!positions_.empty()) validate_positions(positions_, positions_.back(), "DeletionBatch");
}

void DeletionBatch::validate_against(Index dim) const {
  validate_positions(positions_, dim, "DeletionBatch");
}

SparseBinaryVector insert_features(const SparseBinaryVector& x, const InsertionBatch& batch) {
  batch.validate_against(x.dim());
  const auto pos = batch.positions();
  const auto bits = batch.bits();
  const auto n = static_cast<Index>(pos.size());

  std::vector<Index> support;
  support.reserve(x.count() + n);
  // Merge old ones (shifted by the number of insertions at or before them) with
  // inserted ones (landing at m_i + i). Both streams are increasing.
  std::size_t i = 0;
  for (Index j : x.support()) {
    while (i < pos.size() && pos[i] <= j) {
      if (bits[i]) support.push_back(pos[i] + static_cast<Index>(i));
      ++i;
    }
    support.push_back(j + static_cast<Index>(i));
  }
  for (; i < pos.size(); ++i) {
    if (bits[i]) support.push_back(pos[i] + static_cast<Index>(i));
  }
  return SparseBinaryVector(x.dim() + n, std::move(support));
}

SparseBinaryVector delete_features(const SparseBinaryVector& x, const DeletionBatch& batch) {
  batch.validate_against(x.dim());
  const auto pos = batch.positions();
  std::vector<Index> support;
  support.reserve(x.count());
  std::size_t below = 0;
  for (Index j : x.support()) {
    while (below < pos.size() && pos[below] < j) ++below;
    if (below < pos.size() && pos[below] == j) continue;
    support.push_back(j - static_cast<Index>(below));
  }
  return SparseBinaryVector(x.dim() - static_cast<Index>(pos.size()), std::move(support));
}

}  // namespace dynsketch
