#include "dynsketch/estimate.hpp"

#include <algorithm>
#include <cmath>

namespace dynsketch {

double jaccard_true(const SparseBinaryVector& x, const SparseBinaryVector& y) {
  if (x.dim() != y.dim()) {
    throw ValidationError("jaccard_true: dimension mismatch " + std::to_string(x.dim()) + " vs " +
                          std::to_string(y.dim()));
  }
  const auto a = x.support();
  const auto b = y.support();
  std::size_t common = 0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++common, ++i, ++j;
    }
  }
  const std::size_t uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

PairEstimate jaccard_estimate(const Sketch& a, const Sketch& b) {
  if (a.num_perms() != b.num_perms()) {
    throw ValidationError("jaccard_estimate: sketch sizes differ (" + std::to_string(a.num_perms()) + " vs " +
                          std::to_string(b.num_perms()) + ")");
  }
  PairEstimate est;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    const HashValue u = a.values[j];
    const HashValue v = b.values[j];
    if (u.is_empty() && v.is_empty()) continue;
    ++est.comparable_slots;
    if (u == v) ++est.collisions;
  }
  if (est.comparable_slots > 0) {
    est.estimated_jaccard = static_cast<double>(est.collisions) / static_cast<double>(est.comparable_slots);
  }
  return est;
}

double rmse(std::span<const PairEstimate> pairs) {
  if (pairs.empty()) throw ValidationError("rmse: no pairs");
  double sum = 0.0;
  for (const auto& p : pairs) {
    const double e = p.estimated_jaccard - p.true_jaccard;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

UniformityResult minwise_uniformity_test(const PermutationSource& source, std::span<const Index> set,
                                         std::size_t trials) {
  if (set.size() <= 1) throw ValidationError("minwise_uniformity_test: set needs at least two elements");
  validate_positions(set, set.back(), "minwise_uniformity_test");
  if (trials < 10 * set.size() * set.size()) {
    throw ValidationError("minwise_uniformity_test: need at least 10|U|^2 = " +
                          std::to_string(10 * set.size() * set.size()) + " trials");
  }
  std::vector<std::size_t> hits(set.size(), 0);
  for (std::size_t t = 0; t < trials; ++t) {
    const Permutation pi = source(t);
    if (set.back() > pi.dim()) {
      throw ValidationError("minwise_uniformity_test: set element " + std::to_string(set.back()) +
                            " exceeds permutation dim " + std::to_string(pi.dim()));
    }
    std::size_t arg = 0;
    for (std::size_t u = 1; u < set.size(); ++u) {
      if (pi.rank(set[u]) < pi.rank(set[arg])) arg = u;
    }
    ++hits[arg];
  }
  UniformityResult res;
  res.trials = trials;
  const double target = 1.0 / static_cast<double>(set.size());
  for (auto h : hits) {
    const double f = static_cast<double>(h) / static_cast<double>(trials);
    res.frequency.push_back(f);
    res.max_deviation = std::max(res.max_deviation, std::abs(f - target));
  }
  return res;
}

}  // namespace dynsketch
