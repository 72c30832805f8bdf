#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace amnl {

constexpr std::size_t kPadId = 0;
constexpr std::size_t kUnkId = 1;
constexpr std::size_t kEosId = 2;

constexpr std::size_t kDefaultVocabSize = 12500;
constexpr std::size_t kDefaultSentences = 4;
constexpr std::size_t kDefaultSentenceLen = 12;

class Vocabulary {
 public:
  Vocabulary();  // reserved tokens only

  // Keeps the (max_size - 3) most frequent tokens of the corpus; frequency
  // ties break lexicographically so builds are deterministic.
  static Vocabulary build(const std::vector<std::string>& corpus, std::size_t max_size);
  static Vocabulary load(const std::string& path);
  void save(const std::string& path) const;

  std::size_t add(const std::string& token);  // appends, returns id
  std::size_t size() const { return tokens_.size(); }
  std::size_t id_of(const std::string& token) const;  // <unk> when absent
  const std::string& token(std::size_t id) const { return tokens_.at(id); }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

// S rows of L token ids each; every row ends with <eos> at or before L.
using TokenMatrix = std::vector<std::vector<std::size_t>>;

// Lowercases, strips characters outside ASCII letters/digits/punctuation
// (drops emoji and other non-ASCII), splits on whitespace.
std::vector<std::string> tokenize(const std::string& raw);

// Builds the S x L id matrix for one tweet: truncate each comment to L-1
// tokens plus <eos>, fill with <pad>, duplicate the last comment to reach S
// rows. Degenerate comments become a lone <eos> row.
TokenMatrix preprocess(const std::vector<std::string>& comments, const Vocabulary& vocab,
                       std::size_t sentences = kDefaultSentences,
                       std::size_t sentence_len = kDefaultSentenceLen);

}  // namespace amnl
