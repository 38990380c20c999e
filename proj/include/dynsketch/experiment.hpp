#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dynsketch/core.hpp"
#include "dynsketch/ingest.hpp"

namespace dynsketch {

enum class Mode { insert, remove };

// How each path brings the sketches to the updated dimension.
//  sequential  one lift_hash / drop_hash per feature, n rounds
//  batch       one multiple_lift_hash / multiple_drop_hash
//  scratch     fresh permutations at the new dimension, re-sketch every point
//  oracle      materialize the lifted/dropped permutations, re-sketch every point
enum class UpdatePath { sequential, batch, scratch, oracle };

const char* to_string(UpdatePath p);
UpdatePath parse_update_path(const std::string& s);

struct SyntheticSpec {
  Index dim = 0;
  Index sparsity = 0;
  std::size_t points = 0;
  std::size_t clusters = 0;
};

// Parses "d,k,points" or "d,k,points,clusters".
SyntheticSpec parse_synthetic_spec(const std::string& s);

struct ExperimentConfig {
  std::optional<std::filesystem::path> data;
  std::optional<SyntheticSpec> synthetic;
  std::size_t sample_size = 0;  // 0 keeps every point
  std::size_t num_perms = 500;
  std::vector<std::size_t> n_values{50};
  double insert_one_prob = 0.1;
  std::uint64_t master_seed = 1;
  Mode mode = Mode::insert;
  std::vector<UpdatePath> paths{UpdatePath::sequential, UpdatePath::batch, UpdatePath::scratch,
                                UpdatePath::oracle};
  std::size_t repetitions = 5;  // timed runs; one extra warm-up run is discarded
  std::size_t threads = 1;

  // Throws ValidationError on an inconsistent configuration.
  void validate() const;
};

struct PathResult {
  UpdatePath path = UpdatePath::batch;
  std::size_t n = 0;
  std::size_t num_perms = 0;
  double rmse = 0.0;               // against the original data's Jaccard
  double rmse_updated_truth = 0.0; // against the updated data's Jaccard
  double seconds = 0.0;            // median over repetitions
  std::vector<double> rep_seconds;
  // scratch time / path time; NaN when the scratch path was not run.
  double speedup = 0.0;
  double speedup_max = 0.0;
  double speedup_mean = 0.0;
  std::optional<bool> matches_oracle;
  std::uint64_t workload_checksum = 0;
  std::vector<Sketch> sketches;  // final sketches, one per point
};

struct ExperimentReport {
  ExperimentConfig config;
  Index dim = 0;
  std::size_t points = 0;
  std::size_t pairs = 0;
  std::vector<PathResult> rows;

  const PathResult* find(UpdatePath p, std::size_t n) const;
};

// Loads or generates the configured corpus and applies sample_size.
Corpus prepare_corpus(const ExperimentConfig& cfg);

ExperimentReport run_insertion_experiment(const ExperimentConfig& cfg, const Corpus& corpus);
ExperimentReport run_deletion_experiment(const ExperimentConfig& cfg, const Corpus& corpus);

enum class ReportFormat { csv, human };

// CSV columns (fixed order): path,n,K,rmse,seconds,speedup,speedup_max,
// speedup_mean,rmse_updated_truth,matches_oracle,workload_checksum
std::string emit_report(const ExperimentReport& report, ReportFormat format);

}  // namespace dynsketch
