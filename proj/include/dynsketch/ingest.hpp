#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynsketch/core.hpp"

namespace dynsketch {

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Binarized bag-of-words corpus. Every vector has dim == vocab_size.
struct Corpus {
  std::size_t num_docs = 0;
  Index vocab_size = 0;
  std::vector<SparseBinaryVector> vectors;
};

// UCI docword text: lines D, W, NNZ, then NNZ lines "docID wordID count"
// (1-based, count >= 1). Repeated (doc, word) pairs collapse; documents with
// no triples become empty vectors.
Corpus parse_docword(std::istream& in);

// Reads a docword file, inflating it first if it starts with the gzip magic.
Corpus load_docword(const std::filesystem::path& path);

// Writes one "doc word 1" triple per set bit.
void write_docword(std::ostream& out, const Corpus& c);

// n documents drawn uniformly without replacement, kept in corpus order.
Corpus sample_corpus(const Corpus& c, std::size_t n, std::uint64_t seed);

// `points` vectors of dimension d with k ones each. With clusters == 0 each
// support is k uniform distinct indices. With clusters > 0 each point picks
// one of `clusters` random k-index centers, keeps every center index with a
// per-point probability drawn from [0.3, 1], and tops up to k with uniform
// indices.
Corpus synthetic_corpus(Index d, Index k, std::size_t points, std::uint64_t seed, std::size_t clusters = 0);

}  // namespace dynsketch
