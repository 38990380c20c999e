#include "dynsketch/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

#include "dynsketch/estimate.hpp"
#include "dynsketch/permgen.hpp"
#include "dynsketch/sketch.hpp"
#include "parallel.hpp"

namespace dynsketch {
namespace {

constexpr std::uint64_t kWorkloadStream = 0x574f524b4c4f4144ull;
constexpr std::uint64_t kBitsStream = 0x42495453ull;

struct Workload {
  std::vector<Index> positions;
  // Insertion only: per point, the 0-based batch slots whose inserted bit is 1.
  std::vector<std::vector<std::uint32_t>> ones;
  std::uint64_t checksum = 0;
};

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) {
    h ^= (v >> (8 * b)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t workload_checksum(const Workload& w) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (Index m : w.positions) h = fnv1a(h, m);
  for (std::size_t p = 0; p < w.ones.size(); ++p) {
    h = fnv1a(h, 0xffffffff00000000ull | p);
    for (auto s : w.ones[p]) h = fnv1a(h, s);
  }
  return h;
}

std::vector<Index> draw_positions(Index d, std::size_t n, std::uint64_t seed) {
  std::vector<Index> all(d);
  std::iota(all.begin(), all.end(), Index{1});
  auto eng = make_engine({seed, kWorkloadStream ^ n});
  for (std::size_t i = 0; i < n; ++i) std::swap(all[i], all[i + uniform_below(eng, d - i)]);
  all.resize(n);
  std::sort(all.begin(), all.end());
  return all;
}

Workload draw_insertion_workload(Index d, std::size_t n, std::size_t points, double one_prob, std::uint64_t seed) {
  Workload w;
  w.positions = draw_positions(d, n, seed);
  auto eng = make_engine({seed, kBitsStream ^ n});
  w.ones.resize(points);
  for (auto& ones : w.ones) {
    for (std::uint32_t s = 0; s < n; ++s) {
      if (static_cast<double>(eng() >> 11) * 0x1.0p-53 < one_prob) ones.push_back(s);
    }
  }
  w.checksum = workload_checksum(w);
  return w;
}

Workload draw_deletion_workload(Index d, std::size_t n, std::uint64_t seed) {
  Workload w;
  w.positions = draw_positions(d, n, seed);
  w.checksum = workload_checksum(w);
  return w;
}

std::uint64_t fresh_seed(std::uint64_t master, std::size_t n, std::size_t rep) {
  return master ^ (0x9e3779b97f4a7c15ull * (n + 1)) ^ (0xd1b54a32d192ed03ull * (rep + 1));
}

struct PairTable {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<double> truth;
};

// All pairs i < j except those whose original supports are both empty.
PairTable make_pairs(const std::vector<SparseBinaryVector>& xs, std::size_t threads) {
  PairTable t;
  for (std::uint32_t i = 0; i < xs.size(); ++i) {
    for (std::uint32_t j = i + 1; j < xs.size(); ++j) {
      if (xs[i].empty() && xs[j].empty()) continue;
      t.pairs.emplace_back(i, j);
    }
  }
  t.truth.resize(t.pairs.size());
  detail::parallel_for(t.pairs.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) t.truth[k] = jaccard_true(xs[t.pairs[k].first], xs[t.pairs[k].second]);
  });
  return t;
}

std::vector<double> pair_truth(const PairTable& t, const std::vector<SparseBinaryVector>& xs, std::size_t threads) {
  std::vector<double> out(t.pairs.size());
  detail::parallel_for(t.pairs.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) out[k] = jaccard_true(xs[t.pairs[k].first], xs[t.pairs[k].second]);
  });
  return out;
}

// RMSE of the sketch estimates against two truth columns.
std::pair<double, double> evaluate_rmse(const PairTable& t, const std::vector<double>& updated_truth,
                                        const std::vector<Sketch>& sketches, std::size_t threads) {
  if (t.pairs.empty()) return {0.0, 0.0};
  std::vector<PairEstimate> original(t.pairs.size());
  std::vector<PairEstimate> updated(t.pairs.size());
  detail::parallel_for(t.pairs.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto est = jaccard_estimate(sketches[t.pairs[k].first], sketches[t.pairs[k].second]);
      original[k] = est;
      original[k].true_jaccard = t.truth[k];
      updated[k] = est;
      updated[k].true_jaccard = updated_truth[k];
    }
  });
  return {rmse(original), rmse(updated)};
}

// setup(rep) runs untimed before each fn(rep); rep 0 is a discarded warm-up.
template <typename Setup, typename Fn>
std::vector<double> time_repeated(std::size_t reps, Setup&& setup, Fn&& fn) {
  using clock = std::chrono::steady_clock;
  setup(0);
  fn(0);
  std::vector<double> out;
  out.reserve(reps);
  for (std::size_t r = 1; r <= reps; ++r) {
    setup(r);
    const auto t0 = clock::now();
    fn(r);
    out.push_back(std::chrono::duration<double>(clock::now() - t0).count());
  }
  return out;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<Sketch> sketch_all(const std::vector<SparseBinaryVector>& xs, const std::vector<Permutation>& perms,
                               std::size_t threads) {
  std::vector<Sketch> out(xs.size());
  detail::parallel_for(xs.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) out[p] = build_sketch(xs[p], perms);
  });
  return out;
}

// Per-path update routines. They rewrite the baseline sketches in place; the
// caller times them.

void batch_insert(std::vector<Sketch>& out, const PermutationFamily& family, const Workload& w, std::size_t threads) {
  const BatchLiftPlan plan(family, w.positions);
  detail::parallel_for(out.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) plan.apply(out[p].values, w.ones[p]);
  });
}

// current_rank[i * K + j]: rank, under permutation j after the first i lifts,
// of the feature the i-th insertion lands in front of.
std::vector<Rank> sequential_insert_ranks(const PermutationFamily& family, const std::vector<Index>& positions) {
  const std::size_t n = positions.size();
  const std::size_t k = family.size();
  std::vector<Rank> out(n * k);
  std::vector<Rank> inserted;
  for (std::size_t j = 0; j < k; ++j) {
    inserted.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Rank base = family.rank(j, positions[i]);
      const auto it = std::lower_bound(inserted.begin(), inserted.end(), base);
      out[i * k + j] = base + static_cast<Rank>(it - inserted.begin());
      inserted.insert(it, base);
    }
  }
  return out;
}

void sequential_insert(std::vector<Sketch>& out, const PermutationFamily& family, const Workload& w,
                       std::size_t threads) {
  const std::size_t n = w.positions.size();
  const std::size_t k = family.size();
  const auto a = sequential_insert_ranks(family, w.positions);
  detail::parallel_for(out.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      auto& vals = out[p].values;
      const auto& ones = w.ones[p];
      std::size_t next_one = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const bool bit = next_one < ones.size() && ones[next_one] == i;
        next_one += bit;
        const Rank* row = a.data() + i * k;
        for (std::size_t j = 0; j < k; ++j) vals[j] = lift_hash(vals[j], row[j], bit);
      }
    }
  });
}

void batch_delete(std::vector<Sketch>& out, const std::vector<Permutation>& perms,
                  const PermutationFamily& family, const std::vector<SparseBinaryVector>& xs, const Workload& w, std::size_t threads) {
  const BatchDropPlan plan(family, perms, w.positions);
  detail::parallel_for(out.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) plan.apply(out[p].values, xs[p]);
  });
}

void sequential_delete(std::vector<Sketch>& out, const std::vector<Permutation>& perms,
                       const PermutationFamily& family, const std::vector<SparseBinaryVector>& xs, const Workload& w,
                       std::size_t threads) {
  const auto& pos = w.positions;
  const std::size_t n = pos.size();
  const std::size_t k = perms.size();
  // Rank of the i-th deleted feature once the first i deletions have closed their gaps.
  std::vector<Rank> a(n * k);
  std::vector<Rank> removed;
  for (std::size_t j = 0; j < k; ++j) {
    removed.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Rank base_rank = family.rank(j, pos[i]);
      const auto it = std::lower_bound(removed.begin(), removed.end(), base_rank);
      a[i * k + j] = base_rank - static_cast<Rank>(it - removed.begin());
      removed.insert(it, base_rank);
    }
  }
  detail::parallel_for(out.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      auto& vals = out[p].values;
      const auto support = xs[p].support();
      for (std::size_t i = 0; i < n; ++i) {
        const Rank* row = a.data() + i * k;
        for (std::size_t j = 0; j < k; ++j) {
          vals[j] = drop_hash_rule(vals[j], row[j], [&] {
            // Smallest surviving original rank, mapped into the frame after i deletions.
            const auto& pi = perms[j];
            Rank best = 0;
            for (Index x : support) {
              const auto at = std::lower_bound(pos.begin(), pos.end(), x);
              if (at != pos.end() && *at == x && static_cast<std::size_t>(at - pos.begin()) <= i) continue;
              const Rank r = pi.rank(x);
              if (best == 0 || r < best) best = r;
            }
            if (best == 0) return HashValue::empty();
            Rank below = 0;
            for (std::size_t l = 0; l < i; ++l) below += pi.rank(pos[l]) < best;
            return HashValue(best - below);
          });
        }
      }
    }
  });
}

std::vector<Permutation> lifted_perms(const std::vector<Permutation>& perms, const std::vector<Index>& positions,
                                      Mode mode) {
  std::vector<Permutation> out;
  out.reserve(perms.size());
  for (const auto& pi : perms) {
    out.push_back(mode == Mode::insert ? multiple_lift_perm(pi, positions) : multiple_drop_perm(pi, positions));
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Corpus& corpus, Mode mode) {
  cfg.validate();
  if (cfg.mode != mode) throw ValidationError("experiment mode does not match the configuration");
  if (corpus.vectors.size() < 2) throw ValidationError("experiment needs at least two points");
  const Index d = corpus.vocab_size;
  const std::size_t k = cfg.num_perms;
  const auto& xs = corpus.vectors;
  for (std::size_t n : cfg.n_values) {
    if (mode == Mode::insert && n > d) {
      throw ValidationError("cannot insert " + std::to_string(n) + " features at distinct positions of a " +
                            std::to_string(d) + "-dim space");
    }
    if (mode == Mode::remove && n >= d) {
      throw ValidationError("deleting " + std::to_string(n) + " of " + std::to_string(d) +
                            " features leaves no dimension");
    }
  }

  ExperimentReport report;
  report.config = cfg;
  report.dim = d;
  report.points = xs.size();

  const auto perms = random_permutations(d, cfg.master_seed, k);
  const PermutationFamily family(perms);
  const auto base = sketch_all(xs, perms, cfg.threads);
  const PairTable pairs = make_pairs(xs, cfg.threads);
  report.pairs = pairs.pairs.size();

  for (std::size_t n : cfg.n_values) {
    const Workload w = mode == Mode::insert
                           ? draw_insertion_workload(d, n, xs.size(), cfg.insert_one_prob, cfg.master_seed)
                           : draw_deletion_workload(d, n, cfg.master_seed);

    std::vector<SparseBinaryVector> updated(xs.size());
    for (std::size_t p = 0; p < xs.size(); ++p) {
      if (mode == Mode::insert) {
        std::vector<std::uint8_t> bits(n, 0);
        for (auto s : w.ones[p]) bits[s] = 1;
        updated[p] = insert_features(xs[p], InsertionBatch(w.positions, std::move(bits)));
      } else {
        updated[p] = delete_features(xs[p], DeletionBatch(w.positions));
      }
    }
    const auto updated_truth = pair_truth(pairs, updated, cfg.threads);
    const Index new_dim = updated.front().dim();

    std::vector<PathResult> rows;
    for (UpdatePath path : cfg.paths) {
      PathResult row;
      row.path = path;
      row.n = n;
      row.num_perms = k;
      row.workload_checksum = workload_checksum(w);
      std::vector<Sketch> result;
      const bool in_place = path == UpdatePath::batch || path == UpdatePath::sequential;
      auto setup = [&](std::size_t) {
        if (in_place) result = base;
      };
      auto run = [&](std::size_t rep) {
        switch (path) {
          case UpdatePath::batch:
            if (mode == Mode::insert) {
              batch_insert(result, family, w, cfg.threads);
            } else {
              batch_delete(result, perms, family, xs, w, cfg.threads);
            }
            break;
          case UpdatePath::sequential:
            if (mode == Mode::insert) {
              sequential_insert(result, family, w, cfg.threads);
            } else {
              sequential_delete(result, perms, family, xs, w, cfg.threads);
            }
            break;
          case UpdatePath::scratch:
            result = sketch_all(updated, random_permutations(new_dim, fresh_seed(cfg.master_seed, n, rep), k),
                                cfg.threads);
            break;
          case UpdatePath::oracle:
            result = sketch_all(updated, lifted_perms(perms, w.positions, mode), cfg.threads);
            break;
        }
      };
      row.rep_seconds = time_repeated(cfg.repetitions, setup, run);
      row.seconds = median(row.rep_seconds);
      std::tie(row.rmse, row.rmse_updated_truth) = evaluate_rmse(pairs, updated_truth, result, cfg.threads);
      row.sketches = std::move(result);
      rows.push_back(std::move(row));
    }

    const PathResult* scratch = nullptr;
    const PathResult* oracle = nullptr;
    for (const auto& r : rows) {
      if (r.path == UpdatePath::scratch) scratch = &r;
      if (r.path == UpdatePath::oracle) oracle = &r;
    }
    for (auto& r : rows) {
      if (oracle && r.path != UpdatePath::scratch) r.matches_oracle = r.sketches == oracle->sketches;
      if (!scratch) {
        r.speedup = r.speedup_max = r.speedup_mean = std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      r.speedup = scratch->seconds / r.seconds;
      double sum = 0.0;
      r.speedup_max = 0.0;
      for (std::size_t i = 0; i < r.rep_seconds.size(); ++i) {
        const double s = scratch->rep_seconds[i] / r.rep_seconds[i];
        sum += s;
        r.speedup_max = std::max(r.speedup_max, s);
      }
      r.speedup_mean = sum / static_cast<double>(r.rep_seconds.size());
    }
    for (auto& r : rows) report.rows.push_back(std::move(r));
  }
  return report;
}

std::string format_double(double v, int precision) {
  if (std::isnan(v)) return "na";
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

}  // namespace

const char* to_string(UpdatePath p) {
  switch (p) {
    case UpdatePath::sequential: return "sequential";
    case UpdatePath::batch: return "batch";
    case UpdatePath::scratch: return "scratch";
    case UpdatePath::oracle: return "oracle";
  }
  return "?";
}

UpdatePath parse_update_path(const std::string& s) {
  for (auto p : {UpdatePath::sequential, UpdatePath::batch, UpdatePath::scratch, UpdatePath::oracle}) {
    if (s == to_string(p)) return p;
  }
  throw ValidationError("unknown path '" + s + "' (expected sequential, batch, scratch or oracle)");
}

SyntheticSpec parse_synthetic_spec(const std::string& s) {
  std::vector<std::uint64_t> parts;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ValidationError("--synthetic expects d,k,points[,clusters], got '" + s + "'");
    }
    parts.push_back(std::stoull(tok));
  }
  if (parts.size() != 3 && parts.size() != 4) {
    throw ValidationError("--synthetic expects d,k,points[,clusters], got '" + s + "'");
  }
  if (parts[0] == 0 || parts[0] > 0xffffffffull) throw ValidationError("--synthetic: bad dimension");
  if (parts[1] > parts[0]) throw ValidationError("--synthetic: sparsity exceeds dimension");
  return {static_cast<Index>(parts[0]), static_cast<Index>(parts[1]), parts[2], parts.size() == 4 ? parts[3] : 0};
}

void ExperimentConfig::validate() const {
  if (data.has_value() == synthetic.has_value()) {
    throw ValidationError("exactly one of a dataset path or a synthetic spec is required");
  }
  if (num_perms == 0) throw ValidationError("number of permutations must be positive");
  if (n_values.empty()) throw ValidationError("at least one n is required");
  for (auto n : n_values) {
    if (n == 0) throw ValidationError("n must be positive");
  }
  if (!(insert_one_prob >= 0.0 && insert_one_prob <= 1.0)) {
    throw ValidationError("insertion one-probability must lie in [0, 1]");
  }
  if (paths.empty()) throw ValidationError("no update paths selected");
  if (repetitions == 0) throw ValidationError("repetitions must be positive");
  if (threads == 0) throw ValidationError("threads must be positive");
}

const PathResult* ExperimentReport::find(UpdatePath p, std::size_t n) const {
  for (const auto& r : rows) {
    if (r.path == p && r.n == n) return &r;
  }
  return nullptr;
}

Corpus prepare_corpus(const ExperimentConfig& cfg) {
  cfg.validate();
  Corpus c = cfg.data ? load_docword(*cfg.data)
                      : synthetic_corpus(cfg.synthetic->dim, cfg.synthetic->sparsity, cfg.synthetic->points,
                                         cfg.master_seed, cfg.synthetic->clusters);
  if (cfg.sample_size != 0 && cfg.sample_size != c.vectors.size()) {
    c = sample_corpus(c, cfg.sample_size, cfg.master_seed);
  }
  return c;
}

ExperimentReport run_insertion_experiment(const ExperimentConfig& cfg, const Corpus& corpus) {
  return run_experiment(cfg, corpus, Mode::insert);
}

ExperimentReport run_deletion_experiment(const ExperimentConfig& cfg, const Corpus& corpus) {
  return run_experiment(cfg, corpus, Mode::remove);
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  std::ostringstream os;
  auto oracle_cell = [](const PathResult& r) {
    return r.matches_oracle ? (*r.matches_oracle ? "yes" : "no") : "na";
  };
  if (format == ReportFormat::csv) {
    os << "path,n,K,rmse,seconds,speedup,speedup_max,speedup_mean,rmse_updated_truth,matches_oracle,"
          "workload_checksum\n";
    for (const auto& r : report.rows) {
      os << to_string(r.path) << ',' << r.n << ',' << r.num_perms << ',' << format_double(r.rmse, 10) << ','
         << format_double(r.seconds, 6) << ',' << format_double(r.speedup, 6) << ','
         << format_double(r.speedup_max, 6) << ',' << format_double(r.speedup_mean, 6) << ','
         << format_double(r.rmse_updated_truth, 10) << ',' << oracle_cell(r) << ',' << std::hex
         << std::setw(16) << std::setfill('0') << r.workload_checksum << std::dec << std::setfill(' ') << '\n';
    }
    return os.str();
  }
  const auto& c = report.config;
  os << "mode " << (c.mode == Mode::insert ? "insert" : "delete") << ", d=" << report.dim
     << ", points=" << report.points << ", pairs=" << report.pairs << ", K=" << c.num_perms
     << ", one-prob=" << c.insert_one_prob << ", seed=" << c.master_seed << ", reps=" << c.repetitions << '\n';
  os << std::left << std::setw(12) << "path" << std::right << std::setw(6) << "n" << std::setw(6) << "K"
     << std::setw(14) << "rmse" << std::setw(12) << "seconds" << std::setw(10) << "speedup" << std::setw(10)
     << "max" << std::setw(10) << "mean" << std::setw(14) << "rmse(upd)" << std::setw(8) << "oracle" << '\n';
  for (const auto& r : report.rows) {
    os << std::left << std::setw(12) << to_string(r.path) << std::right << std::setw(6) << r.n << std::setw(6)
       << r.num_perms << std::setw(14) << format_double(r.rmse, 10) << std::setw(12) << format_double(r.seconds, 6)
       << std::setw(10) << format_double(r.speedup, 6) << std::setw(10) << format_double(r.speedup_max, 6)
       << std::setw(10) << format_double(r.speedup_mean, 6) << std::setw(14)
       << format_double(r.rmse_updated_truth, 10) << std::setw(8) << oracle_cell(r) << '\n';
  }
  return os.str();
}

}  // namespace dynsketch
