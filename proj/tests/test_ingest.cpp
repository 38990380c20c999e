#include <gtest/gtest.h>
#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dynsketch/ingest.hpp"

namespace dynsketch {
namespace {

Corpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_docword(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(ParseDocword, Basic) {
  const auto c = parse("2\n3\n2\n1 1 4\n2 3 1\n");
  EXPECT_EQ(c.num_docs, 2u);
  EXPECT_EQ(c.vocab_size, 3u);
  ASSERT_EQ(c.vectors.size(), 2u);
  EXPECT_EQ(c.vectors[0], SparseBinaryVector(3, {1}));
  EXPECT_EQ(c.vectors[1], SparseBinaryVector(3, {3}));
}

TEST(ParseDocword, AbsentDocsAndDuplicates) {
  const auto c = parse("3\n4\n3\n3 2 1\n1 4 2\n3 2 5\n");
  EXPECT_EQ(c.vectors[0], SparseBinaryVector(4, {4}));
  EXPECT_TRUE(c.vectors[1].empty());
  EXPECT_EQ(c.vectors[2], SparseBinaryVector(4, {2}));
}

TEST(ParseDocword, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("2\n3\n1\n1 1 0\n"), 4u);      // zero count
  EXPECT_EQ(error_line("2\n3\n1\n3 1 1\n"), 4u);      // doc out of range
  EXPECT_EQ(error_line("2\n3\n1\n1 4 1\n"), 4u);      // word out of range
  EXPECT_EQ(error_line("2\n3\n2\n1 1 1\nx y z\n"), 5u);
  EXPECT_EQ(error_line("2\nthree\n1\n"), 2u);
  EXPECT_NE(error_line("2\n3\n2\n1 1 1\n"), 0u);      // fewer triples than NNZ
  EXPECT_NE(error_line("2\n3\n1\n1 1 1\n2 2 2\n"), 0u);  // more triples than NNZ
  EXPECT_NE(error_line(""), 0u);
}

class TempDir : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("dynsketch_ingest_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

using LoadDocword = TempDir;

TEST_F(LoadDocword, PlainAndGzip) {
  const std::string text = "2\n3\n3\n1 1 4\n2 3 1\n2 2 7\n";
  const auto plain = dir_ / "docword.txt";
  std::ofstream(plain) << text;
  const auto gz = dir_ / "docword.txt.gz";
  gzFile f = gzopen(gz.c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);

  const auto a = load_docword(plain);
  const auto b = load_docword(gz);
  EXPECT_EQ(a.vectors, b.vectors);
  EXPECT_EQ(b.vectors[1], SparseBinaryVector(3, {2, 3}));
  EXPECT_THROW(load_docword(dir_ / "missing.txt"), IoError);
}

TEST(WriteDocword, RoundTrip) {
  const auto c = synthetic_corpus(50, 6, 20, 3);
  std::ostringstream out;
  write_docword(out, c);
  const auto back = parse(out.str());
  EXPECT_EQ(back.num_docs, c.num_docs);
  EXPECT_EQ(back.vocab_size, c.vocab_size);
  EXPECT_EQ(back.vectors, c.vectors);
}

TEST(SampleCorpus, Rules) {
  const auto c = synthetic_corpus(100, 5, 40, 9);
  EXPECT_THROW(sample_corpus(c, 0, 1), ValidationError);
  EXPECT_THROW(sample_corpus(c, 41, 1), ValidationError);
  const auto all = sample_corpus(c, 40, 1);
  EXPECT_EQ(all.vectors, c.vectors);
  const auto s1 = sample_corpus(c, 10, 5);
  const auto s2 = sample_corpus(c, 10, 5);
  EXPECT_EQ(s1.vectors, s2.vectors);
  EXPECT_EQ(s1.num_docs, 10u);
  for (const auto& v : s1.vectors) EXPECT_EQ(v.dim(), 100u);
}

TEST(SyntheticCorpus, Shape) {
  for (std::size_t clusters : {0u, 4u}) {
    const auto c = synthetic_corpus(1000, 30, 50, 2, clusters);
    EXPECT_EQ(c.num_docs, 50u);
    for (const auto& v : c.vectors) {
      EXPECT_EQ(v.dim(), 1000u);
      EXPECT_EQ(v.count(), 30u);
    }
    EXPECT_EQ(c.vectors, synthetic_corpus(1000, 30, 50, 2, clusters).vectors);
  }
}

}  // namespace
}  // namespace dynsketch
