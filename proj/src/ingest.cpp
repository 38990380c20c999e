#include "dynsketch/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "dynsketch/permgen.hpp"

namespace dynsketch {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

// Splits on blanks and parses each field as an unsigned integer.
std::vector<std::uint64_t> parse_fields(std::string_view line, std::size_t lineno) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + line.size(), v);
    if (ec != std::errc() || (ptr != line.data() + line.size() && *ptr != ' ' && *ptr != '\t')) {
      throw ParseError(lineno, "expected unsigned integers, got '" + std::string(line) + "'");
    }
    out.push_back(v);
    pos = static_cast<std::size_t>(ptr - line.data());
  }
  return out;
}

std::uint64_t read_header_value(std::istream& in, std::size_t& lineno, const char* name) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto fields = parse_fields(t, lineno);
    if (fields.size() != 1) throw ParseError(lineno, std::string("header ") + name + " must be a single integer");
    return fields[0];
  }
  throw ParseError(lineno + 1, std::string("missing header value ") + name);
}

std::string inflate_gzip(const std::string& bytes) {
  z_stream zs{};
  if (inflateInit2(&zs, 15 + 32) != Z_OK) throw IoError("zlib init failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(bytes.data()));
  zs.avail_in = static_cast<uInt>(bytes.size());
  std::string out;
  char buf[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw IoError("corrupt gzip stream");
    }
    out.append(buf, sizeof(buf) - zs.avail_out);
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw IoError("truncated gzip stream");
    }
  }
  inflateEnd(&zs);
  return out;
}

std::vector<Index> sample_distinct(std::mt19937_64& eng, Index d, Index k, std::unordered_set<Index> chosen = {}) {
  // Rejection sampling over [1, d]; k <= d is checked by the caller.
  while (chosen.size() < k) chosen.insert(static_cast<Index>(uniform_below(eng, d)) + 1);
  std::vector<Index> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Corpus parse_docword(std::istream& in) {
  std::size_t lineno = 0;
  const auto docs = read_header_value(in, lineno, "D");
  const auto words = read_header_value(in, lineno, "W");
  const auto nnz = read_header_value(in, lineno, "NNZ");
  if (words == 0 || words > 0xffffffffull) throw ParseError(lineno, "vocabulary size out of range");

  std::vector<std::vector<Index>> supports(docs);
  std::uint64_t seen = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto f = parse_fields(t, lineno);
    if (f.size() != 3) throw ParseError(lineno, "expected 'docID wordID count'");
    if (f[0] < 1 || f[0] > docs) throw ParseError(lineno, "docID " + std::to_string(f[0]) + " out of range");
    if (f[1] < 1 || f[1] > words) throw ParseError(lineno, "wordID " + std::to_string(f[1]) + " out of range");
    if (f[2] == 0) throw ParseError(lineno, "zero count in a nonzero triple");
    if (++seen > nnz) throw ParseError(lineno, "more triples than the declared NNZ " + std::to_string(nnz));
    supports[f[0] - 1].push_back(static_cast<Index>(f[1]));
  }
  if (seen != nnz) {
    throw ParseError(lineno, "declared NNZ " + std::to_string(nnz) + " but read " + std::to_string(seen));
  }

  Corpus c;
  c.num_docs = docs;
  c.vocab_size = static_cast<Index>(words);
  c.vectors.reserve(docs);
  for (auto& s : supports) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    c.vectors.emplace_back(c.vocab_size, std::move(s));
  }
  return c;
}

Corpus load_docword(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed: " + path.string());
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1f &&
      static_cast<unsigned char>(bytes[1]) == 0x8b) {
    bytes = inflate_gzip(bytes);
  }
  std::istringstream in(std::move(bytes));
  return parse_docword(in);
}

void write_docword(std::ostream& out, const Corpus& c) {
  std::size_t nnz = 0;
  for (const auto& v : c.vectors) nnz += v.count();
  out << c.num_docs << '\n' << c.vocab_size << '\n' << nnz << '\n';
  for (std::size_t d = 0; d < c.vectors.size(); ++d) {
    for (Index w : c.vectors[d].support()) out << d + 1 << ' ' << w << " 1\n";
  }
}

Corpus sample_corpus(const Corpus& c, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("sample_corpus: sample size must be positive");
  if (n > c.vectors.size()) {
    throw ValidationError("sample_corpus: sample size " + std::to_string(n) + " exceeds corpus size " +
                          std::to_string(c.vectors.size()));
  }
  std::vector<std::size_t> idx(c.vectors.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto eng = make_engine({seed, 0x5a4d504cull});
  for (std::size_t i = 0; i < n; ++i) {
    std::swap(idx[i], idx[i + uniform_below(eng, idx.size() - i)]);
  }
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  Corpus out;
  out.num_docs = n;
  out.vocab_size = c.vocab_size;
  out.vectors.reserve(n);
  for (auto i : idx) out.vectors.push_back(c.vectors[i]);
  return out;
}

Corpus synthetic_corpus(Index d, Index k, std::size_t points, std::uint64_t seed, std::size_t clusters) {
  if (d == 0) throw ValidationError("synthetic_corpus: dimension must be positive");
  if (k > d) throw ValidationError("synthetic_corpus: sparsity exceeds dimension");
  if (points == 0) throw ValidationError("synthetic_corpus: need at least one point");
  auto eng = make_engine({seed, 0x53594e54ull});
  std::vector<std::vector<Index>> centers;
  for (std::size_t c = 0; c < clusters; ++c) centers.push_back(sample_distinct(eng, d, k));

  Corpus out;
  out.num_docs = points;
  out.vocab_size = d;
  out.vectors.reserve(points);
  for (std::size_t p = 0; p < points; ++p) {
    std::unordered_set<Index> kept;
    if (!centers.empty()) {
      const auto& center = centers[uniform_below(eng, centers.size())];
      const double keep = 0.3 + 0.7 * static_cast<double>(eng() >> 11) * 0x1.0p-53;
      for (Index i : center) {
        if (static_cast<double>(eng() >> 11) * 0x1.0p-53 < keep) kept.insert(i);
      }
    }
    out.vectors.emplace_back(d, sample_distinct(eng, d, k, std::move(kept)));
  }
  return out;
}

}  // namespace dynsketch
