#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "amnl/text.hpp"
#include "doctest.h"

using namespace amnl;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("amnl_text_" + name);
}

}  // namespace

TEST_SUITE("text") {

TEST_CASE("reserved ids come first") {
  Vocabulary v;
  CHECK(v.size() == 3);
  CHECK(v.token(kPadId) == "<pad>");
  CHECK(v.token(kUnkId) == "<unk>");
  CHECK(v.token(kEosId) == "<eos>");
  CHECK(v.id_of("never-seen") == kUnkId);
}

TEST_CASE("tokenize lowercases, drops non-ascii and splits on whitespace") {
  CHECK(tokenize("Hello  WORLD") == std::vector<std::string>{"hello", "world"});
  CHECK(tokenize("  a\tb\nc ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("nice pic! \xF0\x9F\x91\x8D") == std::vector<std::string>{"nice", "pic!"});
  CHECK(tokenize("\xF0\x9F\x91\x8D").empty());
  CHECK(tokenize("").empty());
  CHECK(tokenize("a,b").size() == 1);  // punctuation is kept, not split on
}

TEST_CASE("build keeps the most frequent tokens with lexical tie-breaks") {
  std::vector<std::string> corpus = {"b b b", "a a", "c c", "d"};
  Vocabulary v = Vocabulary::build(corpus, 6);
  // Capacity 6 leaves room for three corpus tokens after the reserved ids.
  CHECK(v.size() == 6);
  CHECK(v.id_of("b") == 3);
  // a and c both appear twice; lexical order puts a first.
  CHECK(v.id_of("a") == 4);
  CHECK(v.id_of("c") == 5);
  CHECK(v.id_of("d") == kUnkId);
  CHECK_THROWS_AS(Vocabulary::build(corpus, 3), std::invalid_argument);
}

TEST_CASE("save and load round-trip, load rejects malformed files") {
  Vocabulary v = Vocabulary::build({"x y z"}, 10);
  auto path = temp_file("vocab.txt");
  v.save(path.string());
  Vocabulary r = Vocabulary::load(path.string());
  REQUIRE(r.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(r.token(i) == v.token(i));

  auto bad = temp_file("vocab_bad.txt");
  {
    std::ofstream out(bad);
    out << "<pad>\n<eos>\n<unk>\n";  // wrong order
  }
  CHECK_THROWS_AS(Vocabulary::load(bad.string()), std::runtime_error);
  {
    std::ofstream out(bad);
    out << "<pad>\n<unk>\n<eos>\ndup\ndup\n";
  }
  CHECK_THROWS_AS(Vocabulary::load(bad.string()), std::runtime_error);
  std::filesystem::remove(path);
  std::filesystem::remove(bad);
}

TEST_CASE("preprocess pads, terminates and duplicates the last comment") {
  Vocabulary v;
  std::size_t hi = v.add("hi");
  TokenMatrix m = preprocess({"hi"}, v, 4, 12);
  REQUIRE(m.size() == 4);
  std::vector<std::size_t> want = {hi, kEosId};
  want.resize(12, kPadId);
  for (const auto& row : m) CHECK(row == want);
}

TEST_CASE("preprocess truncates to leave room for the terminator") {
  Vocabulary v;
  std::string comment;
  for (int i = 0; i < 13; ++i) {
    v.add("w" + std::to_string(i));
    comment += "w" + std::to_string(i) + " ";
  }
  TokenMatrix m = preprocess({comment}, v, 1, 12);
  REQUIRE(m[0].size() == 12);
  for (int i = 0; i < 11; ++i) CHECK(m[0][i] == v.id_of("w" + std::to_string(i)));
  CHECK(m[0][11] == kEosId);  // truncated rows still end with <eos>
}

TEST_CASE("preprocess maps unknown tokens to <unk> and degenerate rows to <eos>") {
  Vocabulary v;
  v.add("known");
  TokenMatrix m = preprocess({"known mystery", "\xF0\x9F\x91\x8D"}, v, 2, 5);
  CHECK(m[0] == std::vector<std::size_t>{v.id_of("known"), kUnkId, kEosId, kPadId, kPadId});
  CHECK(m[1] == std::vector<std::size_t>{kEosId, kPadId, kPadId, kPadId, kPadId});
  CHECK_THROWS_AS(preprocess({}, v, 2, 5), std::invalid_argument);
}

TEST_CASE("distinct comments fill the leading rows in order") {
  Vocabulary v;
  std::size_t a = v.add("a"), b = v.add("b"), c = v.add("c");
  TokenMatrix m = preprocess({"a", "b", "c"}, v, 5, 3);
  CHECK(m[0][0] == a);
  CHECK(m[1][0] == b);
  CHECK(m[2][0] == c);
  CHECK(m[3][0] == c);
  CHECK(m[4][0] == c);
}

}  // TEST_SUITE
