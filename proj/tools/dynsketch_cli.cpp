// dynsketch: benchmark harness for minHash sketches under feature insertion
// and deletion.
//
//   dynsketch insert --synthetic 100000,200,500 --num-perms 128 --n 8,64
//   dynsketch delete --data docword.kos.txt.gz --sample 2000 --n 50
//   dynsketch uniformity --source drop --d 32 --set 1,2,3,4,5
//   dynsketch parse-check --data docword.kos.txt
//
// Exit codes: 0 success, 1 invalid input or arguments, 2 I/O failure.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dynsketch/estimate.hpp"
#include "dynsketch/experiment.hpp"
#include "dynsketch/ingest.hpp"
#include "dynsketch/permgen.hpp"

namespace {

using namespace dynsketch;

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

std::size_t default_threads() {
  if (const char* env = std::getenv("DYNSKETCH_THREADS")) {
    try {
      const auto v = std::stoul(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
    std::cerr << "warning: ignoring DYNSKETCH_THREADS='" << env << "'\n";
  }
  return 1;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(tok);
  return out;
}

struct ExperimentArgs {
  std::string data;
  std::string synthetic;
  std::size_t sample = 0;
  std::size_t num_perms = 500;
  std::vector<std::size_t> n{50};
  double one_prob = 0.1;
  std::uint64_t seed = 1;
  std::string paths = "sequential,batch,scratch,oracle";
  std::string format = "csv";
  std::string out;
  std::size_t threads = 1;
  std::size_t reps = 5;
};

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& a) {
  cmd->add_option("--data", a.data, "UCI docword file (plain or gzip)");
  cmd->add_option("--synthetic", a.synthetic, "Synthetic corpus d,k,points[,clusters]");
  cmd->add_option("--sample", a.sample, "Number of points to sample (0 = all)");
  cmd->add_option("--num-perms", a.num_perms, "Sketch size K")->check(CLI::PositiveNumber);
  cmd->add_option("--n", a.n, "Features inserted/deleted; comma list sweeps")->delimiter(',');
  cmd->add_option("--one-prob", a.one_prob, "Probability an inserted bit is 1")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--paths", a.paths, "Comma list of sequential,batch,scratch,oracle");
  cmd->add_option("--format", a.format, "csv or human")->check(CLI::IsMember({"csv", "human"}));
  cmd->add_option("--out", a.out, "Write the report here instead of stdout");
  cmd->add_option("--threads", a.threads, "Worker threads (default $DYNSKETCH_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--reps", a.reps, "Timed repetitions after one warm-up")->check(CLI::PositiveNumber);
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f || !(f << text)) throw IoError("cannot write " + path);
}

void run_experiment_command(const ExperimentArgs& a, Mode mode) {
  ExperimentConfig cfg;
  if (!a.data.empty()) cfg.data = a.data;
  if (!a.synthetic.empty()) cfg.synthetic = parse_synthetic_spec(a.synthetic);
  cfg.sample_size = a.sample;
  cfg.num_perms = a.num_perms;
  cfg.n_values = a.n;
  cfg.insert_one_prob = a.one_prob;
  cfg.master_seed = a.seed;
  cfg.mode = mode;
  cfg.paths.clear();
  for (const auto& p : split_commas(a.paths)) cfg.paths.push_back(parse_update_path(p));
  cfg.repetitions = a.reps;
  cfg.threads = a.threads;
  cfg.validate();

  const Corpus corpus = prepare_corpus(cfg);
  const auto report = mode == Mode::insert ? run_insertion_experiment(cfg, corpus)
                                           : run_deletion_experiment(cfg, corpus);
  write_output(emit_report(report, a.format == "csv" ? ReportFormat::csv : ReportFormat::human), a.out);
}

struct UniformityArgs {
  std::string source = "random";
  Index d = 32;
  std::string set = "1,2,3,4,5";
  std::size_t trials = 200000;
  std::uint64_t seed = 1;
  Index r = 0;
};

void run_uniformity_command(const UniformityArgs& a) {
  std::vector<Index> set;
  for (const auto& tok : split_commas(a.set)) {
    try {
      set.push_back(static_cast<Index>(std::stoul(tok)));
    } catch (const std::exception&) {
      throw ValidationError("--set expects comma-separated indices, got '" + a.set + "'");
    }
  }
  if (a.d < 2 && a.source == "drop") throw ValidationError("--d must be at least 2 for drop");
  if (a.r > a.d) throw ValidationError("--r exceeds --d");

  // Trial t uses its own (seed, t) stream; r is uniform unless fixed with --r.
  PermutationSource source;
  if (a.source == "random") {
    source = [&](std::size_t t) { return random_permutation(a.d, {a.seed, t}); };
  } else if (a.source == "lift" || a.source == "drop") {
    const bool lift = a.source == "lift";
    source = [&, lift](std::size_t t) {
      const auto pi = random_permutation(a.d, {a.seed, t});
      Index r = a.r;
      if (r == 0) {
        auto eng = make_engine({a.seed ^ 0x52ull, t});
        r = static_cast<Index>(uniform_below(eng, a.d)) + 1;
      }
      return lift ? lift_perm(pi, r) : drop_perm(pi, r);
    };
  } else {
    throw ValidationError("--source must be random, lift or drop");
  }
  const auto res = minwise_uniformity_test(source, set, a.trials);
  std::cout << "element,frequency\n";
  for (std::size_t i = 0; i < set.size(); ++i) std::cout << set[i] << ',' << res.frequency[i] << '\n';
  std::cout << "max_deviation," << res.max_deviation << '\n';
}

void run_parse_check(const std::string& path) {
  const Corpus c = load_docword(path);
  std::size_t nnz = 0, empty = 0;
  for (const auto& v : c.vectors) {
    nnz += v.count();
    empty += v.empty();
  }
  std::cout << "docs " << c.num_docs << "\nvocab " << c.vocab_size << "\nbinary_nnz " << nnz << "\nempty_docs "
            << empty << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic-feature minHash sketch benchmark harness"};
  app.require_subcommand(1);

  ExperimentArgs insert_args, delete_args;
  insert_args.threads = delete_args.threads = default_threads();
  auto* insert_cmd = app.add_subcommand("insert", "Feature insertion experiment");
  add_experiment_flags(insert_cmd, insert_args);
  auto* delete_cmd = app.add_subcommand("delete", "Feature deletion experiment");
  add_experiment_flags(delete_cmd, delete_args);

  UniformityArgs uni;
  auto* uni_cmd = app.add_subcommand("uniformity", "Min-wise uniformity check of permutation sources");
  uni_cmd->add_option("--source", uni.source, "random, lift or drop")->check(CLI::IsMember({"random", "lift", "drop"}));
  uni_cmd->add_option("--d", uni.d, "Dimension of the base permutation")->check(CLI::PositiveNumber);
  uni_cmd->add_option("--set", uni.set, "Comma list of the fixed set U");
  uni_cmd->add_option("--trials", uni.trials, "Number of generated permutations");
  uni_cmd->add_option("--seed", uni.seed, "Seed");
  uni_cmd->add_option("--r", uni.r, "Fixed lift/drop position (0 = uniform random)");

  std::string parse_path;
  auto* parse_cmd = app.add_subcommand("parse-check", "Parse a docword file and print its statistics");
  parse_cmd->add_option("--data", parse_path, "UCI docword file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*insert_cmd) run_experiment_command(insert_args, Mode::insert);
    if (*delete_cmd) run_experiment_command(delete_args, Mode::remove);
    if (*uni_cmd) run_uniformity_command(uni);
    if (*parse_cmd) run_parse_check(parse_path);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
