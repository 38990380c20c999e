// Acceptance suite: one line per criterion, "[PASS]" or "[FAIL]", then the
// measured numbers. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>

#include "dynsketch/estimate.hpp"
#include "dynsketch/experiment.hpp"
#include "oracle.hpp"

namespace {

using namespace dynsketch;
using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Index draw_dim(std::mt19937_64& eng, Index lo, Index hi) { return lo + static_cast<Index>(eng() % (hi - lo + 1)); }

SparseBinaryVector draw_vector(std::mt19937_64& eng, Index d) {
  const double density = std::uniform_real_distribution<double>(0.0, 0.6)(eng);
  return testing::random_vector(eng, d, density);
}

constexpr int kTrials = 10000;

void insertion_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(101);
  int bad = 0;
  for (int t = 0; t < kTrials; ++t) {
    const Index d = draw_dim(eng, 4, 128);
    const auto x = draw_vector(eng, d);
    const auto pi = random_permutation(d, {eng(), 0});
    const Index m = draw_dim(eng, 1, d);
    const bool b = eng() & 1;
    const auto got = lift_hash(min_hash(x, pi), pi.rank(m), b);
    bad += got != min_hash(insert_features(x, InsertionBatch({m}, {b})), lift_perm(pi, m));
  }
  const double s = seconds_since(t0);
  report(1, "insertion oracle", bad == 0 && s < 10, fmt("%d mismatches / %d trials, %.2f s", bad, kTrials, s));
}

void batch_insertion_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(202);
  int bad = 0, all_zero = 0, empty_h = 0;
  for (int t = 0; t < kTrials; ++t) {
    const Index d = draw_dim(eng, 16, 128);
    // Every tenth vector is empty so EMPTY h_old is well covered.
    const auto x = t % 10 == 0 ? SparseBinaryVector(d, {}) : draw_vector(eng, d);
    const auto pi = random_permutation(d, {eng(), 0});
    const auto pos = testing::random_positions(eng, d, 1 + eng() % 16);
    const double p_one = t % 4 == 0 ? 0.0 : 0.3;
    const InsertionBatch batch(pos, testing::random_bits(eng, pos.size(), p_one));
    const HashValue h = min_hash(x, pi);
    all_zero += std::all_of(batch.bits().begin(), batch.bits().end(), [](auto v) { return v == 0; });
    empty_h += h.is_empty();
    bad += multiple_lift_hash(h, pi, batch) != min_hash(insert_features(x, batch), multiple_lift_perm(pi, pos));
  }
  const double s = seconds_since(t0);
  report(2, "batch insertion oracle", bad == 0 && all_zero > 0 && empty_h > 0,
         fmt("%d mismatches / %d trials (all-zero B %d, EMPTY h_old %d), %.2f s", bad, kTrials, all_zero, empty_h, s));
}

void deletion_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(303);
  int bad_single = 0, bad_batch = 0, recompute = 0, to_empty = 0;
  for (int t = 0; t < kTrials; ++t) {
    const Index d = draw_dim(eng, 4, 128);
    // A third of the trials use one or two ones so the last one gets deleted.
    auto x = t % 3 == 0 ? SparseBinaryVector(d, testing::random_positions(eng, d, 1 + eng() % 2)) : draw_vector(eng, d);
    const auto pi = random_permutation(d, {eng(), 0});
    const HashValue h = min_hash(x, pi);

    // Half the single deletions hit the minimizing feature.
    Index m = draw_dim(eng, 1, d);
    if (!h.is_empty() && (eng() & 1)) m = pi.feature_at_rank(h.value());
    const auto want1 = min_hash(delete_features(x, DeletionBatch({m})), drop_perm(pi, m));
    bad_single += drop_hash(h, x, pi, m) != want1;

    auto pos = testing::random_positions(eng, d, 1 + eng() % std::min<Index>(d, 16));
    if (!h.is_empty() && (eng() & 1)) {
      const Index arg = pi.feature_at_rank(h.value());
      if (!std::binary_search(pos.begin(), pos.end(), arg)) {
        pos.back() = arg;
        std::sort(pos.begin(), pos.end());
        pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
      }
    }
    const DeletionBatch batch(pos);
    const auto want = min_hash(delete_features(x, batch), multiple_drop_perm(pi, pos));
    bad_batch += multiple_drop_hash(h, x, pi, batch) != want;
    if (!h.is_empty() && std::binary_search(pos.begin(), pos.end(), pi.feature_at_rank(h.value()))) {
      ++recompute;
      to_empty += want.is_empty();
    }
  }
  const double s = seconds_since(t0);
  report(3, "deletion oracle", bad_single == 0 && bad_batch == 0 && recompute > 0 && to_empty > 0,
         fmt("single %d + batch %d mismatches / %d trials each (recompute %d, last-one EMPTY %d), %.2f s",
             bad_single, bad_batch, kTrials, recompute, to_empty, s));
}

void inverse_property() {
  const auto t0 = Clock::now();
  long checked = 0, bad = 0;
  for (Index d = 1; d <= 6; ++d) {
    std::vector<Rank> ranks(d);
    std::iota(ranks.begin(), ranks.end(), 1u);
    do {
      const Permutation pi(ranks);
      for (Index r = 1; r <= d; ++r, ++checked) bad += drop_perm(lift_perm(pi, r), r) != pi;
    } while (std::next_permutation(ranks.begin(), ranks.end()));
  }
  std::mt19937_64 eng(404);
  for (int t = 0; t < kTrials; ++t, ++checked) {
    const Index d = draw_dim(eng, 1, 128);
    const auto pi = random_permutation(d, {eng(), 0});
    const Index r = draw_dim(eng, 1, d);
    bad += drop_perm(lift_perm(pi, r), r) != pi;
  }
  report(4, "lift/drop inverse", bad == 0,
         fmt("%ld mismatches / %ld cases (exhaustive d<=6 + %d random), %.2f s", bad, checked, kTrials,
             seconds_since(t0)));
}

void uniformity() {
  const std::vector<Index> set{1, 2, 3, 4, 5};
  constexpr std::size_t kUniTrials = 200000;

  auto t0 = Clock::now();
  constexpr Index kFixedR = 7;
  const auto drop = minwise_uniformity_test(
      [](std::size_t t) { return drop_perm(random_permutation(32, {505, t}), kFixedR); }, set, kUniTrials);
  const double s_drop = seconds_since(t0);

  t0 = Clock::now();
  const auto lift = minwise_uniformity_test(
      [](std::size_t t) {
        auto eng = make_engine({606, t});
        const auto r = static_cast<Index>(uniform_below(eng, 256)) + 1;
        return lift_perm(random_permutation(256, {505, t}), r);
      },
      set, kUniTrials);
  const double s_lift = seconds_since(t0);

  const bool pass = drop.max_deviation <= 0.01 && lift.max_deviation <= 0.02 && s_drop < 60 && s_lift < 60;
  report(5, "min-wise uniformity", pass,
         fmt("drop d=32 r=%u: max dev %.4f (<= 0.01, %.1f s); lift d=256 random r: max dev %.4f (<= 0.02, %.1f s)",
             kFixedR, drop.max_deviation, s_drop, lift.max_deviation, s_lift));
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto corpus = prepare_corpus(cfg);
  return cfg.mode == Mode::insert ? run_insertion_experiment(cfg, corpus) : run_deletion_experiment(cfg, corpus);
}

void sketch_identity() {
  const auto t0 = Clock::now();
  std::string detail;
  bool pass = true;
  for (Mode mode : {Mode::insert, Mode::remove}) {
    ExperimentConfig cfg;
    cfg.synthetic = SyntheticSpec{5000, 50, 500, 25};
    cfg.num_perms = 128;
    cfg.n_values = {64};
    cfg.mode = mode;
    cfg.paths = {UpdatePath::batch, UpdatePath::oracle};
    cfg.repetitions = 1;
    const auto rep = run_experiment(cfg);
    const auto* batch = rep.find(UpdatePath::batch, 64);
    const auto* oracle = rep.find(UpdatePath::oracle, 64);
    std::size_t diff = 0;
    for (std::size_t p = 0; p < batch->sketches.size(); ++p) {
      for (std::size_t j = 0; j < 128; ++j) diff += batch->sketches[p].values[j] != oracle->sketches[p].values[j];
    }
    const bool ok = diff == 0 && batch->rmse == oracle->rmse && batch->workload_checksum == oracle->workload_checksum;
    pass = pass && ok;
    detail += fmt("%s: %zu differing slots, rmse %.10f vs %.10f; ", mode == Mode::insert ? "insert" : "delete", diff,
                  batch->rmse, oracle->rmse);
  }
  report(6, "end-to-end sketch identity", pass, detail + fmt("%.1f s", seconds_since(t0)));
}

void rmse_parity() {
  const auto t0 = Clock::now();
  ExperimentConfig cfg;
  // KOS shape: 6906 words, about 100 distinct words per entry.
  cfg.synthetic = SyntheticSpec{6906, 100, 500, 25};
  cfg.num_perms = 400;
  cfg.n_values = {50};
  cfg.insert_one_prob = 0.1;
  cfg.paths = {UpdatePath::batch, UpdatePath::scratch};
  cfg.repetitions = 1;
  const auto rep = run_experiment(cfg);
  const double upd = rep.find(UpdatePath::batch, 50)->rmse;
  const double fresh = rep.find(UpdatePath::scratch, 50)->rmse;
  const double rel = std::abs(upd - fresh) / fresh;
  const double s = seconds_since(t0);
  report(7, "RMSE parity", rel <= 0.15 && s < 300,
         fmt("updated %.5f vs fresh permutations %.5f, relative gap %.3f (<= 0.15), %zu pairs, %.1f s", upd, fresh,
             rel, rep.pairs, s));
}

ExperimentReport timing_sweep(Mode mode) {
  ExperimentConfig cfg;
  cfg.synthetic = SyntheticSpec{100000, 200, 500, 20};
  cfg.num_perms = 128;
  cfg.n_values = {8, 64};
  cfg.mode = mode;
  cfg.paths = {UpdatePath::sequential, UpdatePath::batch, UpdatePath::scratch};
  cfg.repetitions = 5;
  return run_experiment(cfg);
}

void speedup_and_scaling() {
  auto t0 = Clock::now();
  const auto ins = timing_sweep(Mode::insert);
  const auto del = timing_sweep(Mode::remove);
  const double s = seconds_since(t0);

  const double sp_ins = ins.find(UpdatePath::batch, 64)->speedup;
  const double sp_del = del.find(UpdatePath::batch, 64)->speedup;
  report(8, "batch speedup vs scratch", sp_ins >= 5 && sp_del >= 5 && s < 120,
         fmt("insert %.1fx, delete %.1fx (>= 5x each; d=100000 K=128 500 points n=64), %.1f s", sp_ins, sp_del, s));

  auto growth = [](const ExperimentReport& r, UpdatePath p) {
    return r.find(p, 64)->seconds / r.find(p, 8)->seconds;
  };
  const double seq_i = growth(ins, UpdatePath::sequential), bat_i = growth(ins, UpdatePath::batch);
  const double seq_d = growth(del, UpdatePath::sequential), bat_d = growth(del, UpdatePath::batch);
  report(9, "scaling n=8 -> n=64", seq_i >= 4 && bat_i <= 2 && seq_d >= 4 && bat_d <= 2,
         fmt("sequential >= 4x, batch <= 2x; insert: %.2fx, %.2fx; delete: %.2fx, %.2fx", seq_i, bat_i, seq_d,
             bat_d));
}

void concentration() {
  constexpr std::size_t kPairs = 200;
  constexpr std::size_t kK = 400;
  // Few clusters, so a random pair often shares a center and J spans (0, 1).
  const auto corpus = synthetic_corpus(5000, 100, 400, 808, 3);
  const auto perms = random_permutations(5000, 909, kK);
  std::mt19937_64 eng(1001);
  std::size_t within = 0;
  double mean_j = 0;
  std::size_t overlapping = 0;
  for (std::size_t p = 0; p < kPairs; ++p) {
    std::size_t a = eng() % corpus.vectors.size(), b = eng() % corpus.vectors.size();
    while (b == a) b = eng() % corpus.vectors.size();
    const auto& x = corpus.vectors[a];
    const auto& y = corpus.vectors[b];
    const double j = jaccard_true(x, y);
    const double est = jaccard_estimate(build_sketch(x, perms), build_sketch(y, perms)).estimated_jaccard;
    within += std::abs(est - j) <= 3 * std::sqrt(j * (1 - j) / kK) + 1e-12;
    mean_j += j / kPairs;
    overlapping += j >= 0.1;
  }
  const double frac = static_cast<double>(within) / kPairs;
  report(10, "estimator concentration", frac >= 0.95,
         fmt("%zu / %zu pairs within 3 sigma (%.3f >= 0.95); mean true J %.3f, %zu pairs with J >= 0.1", within,
             kPairs, frac, mean_j, overlapping));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{insertion_oracle, batch_insertion_oracle, deletion_oracle,
                                                    inverse_property, uniformity,            sketch_identity,
                                                    rmse_parity,      speedup_and_scaling,   concentration};
  for (const auto& c : criteria) c();
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
