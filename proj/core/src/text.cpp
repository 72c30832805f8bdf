#include "amnl/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <stdexcept>

namespace amnl {

Vocabulary::Vocabulary() {
  add("<pad>");
  add("<unk>");
  add("<eos>");
}

std::size_t Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  std::size_t id = tokens_.size();
  tokens_.push_back(token);
  index_.emplace(token, id);
  return id;
}

std::size_t Vocabulary::id_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnkId : it->second;
}

Vocabulary Vocabulary::build(const std::vector<std::string>& corpus, std::size_t max_size) {
  if (max_size < 4) throw std::invalid_argument("vocabulary size must exceed the reserved ids");
  // std::map keeps tokens sorted, which settles frequency ties lexically.
  std::map<std::string, std::size_t> freq;
  for (const std::string& s : corpus) {
    for (const std::string& tok : tokenize(s)) ++freq[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> by_count(freq.begin(), freq.end());
  std::stable_sort(by_count.begin(), by_count.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocabulary v;
  for (const auto& entry : by_count) {
    if (v.size() >= max_size) break;
    v.add(entry.first);
  }
  return v;
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  Vocabulary v;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno < 3) {
      static const char* expected[3] = {"<pad>", "<unk>", "<eos>"};
      if (line != expected[lineno]) {
        throw std::runtime_error(path + ": line " + std::to_string(lineno + 1) + " must be " +
                                 expected[lineno]);
      }
    } else {
      if (line.empty()) throw std::runtime_error(path + ": empty token line");
      if (v.index_.count(line)) throw std::runtime_error(path + ": duplicate token " + line);
      v.add(line);
    }
    ++lineno;
  }
  if (lineno < 3) throw std::runtime_error(path + ": missing reserved token lines");
  return v;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);  // binary keeps \n on every host
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (const std::string& tok : tokens_) out << tok << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> tokenize(const std::string& raw) {
  std::string cleaned;
  cleaned.reserve(raw.size());
  for (unsigned char c : raw) {
    if (std::isalnum(c) || std::ispunct(c)) {
      cleaned.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c)) {
      cleaned.push_back(' ');
    }
    // anything else (emoji bytes, control characters) is dropped
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    if (i > start) tokens.push_back(cleaned.substr(start, i - start));
  }
  return tokens;
}

TokenMatrix preprocess(const std::vector<std::string>& comments, const Vocabulary& vocab,
                       std::size_t sentences, std::size_t sentence_len) {
  if (comments.empty()) throw std::invalid_argument("preprocess needs at least one comment");
  if (sentence_len < 1) throw std::invalid_argument("sentence length must be >= 1");
  TokenMatrix m;
  for (std::size_t s = 0; s < sentences; ++s) {
    const std::string& comment = s < comments.size() ? comments[s] : comments.back();
    std::vector<std::string> toks = tokenize(comment);
    std::vector<std::size_t> row;
    row.reserve(sentence_len);
    for (std::size_t t = 0; t < toks.size() && row.size() + 1 < sentence_len; ++t) {
      row.push_back(vocab.id_of(toks[t]));
    }
    row.push_back(kEosId);
    row.resize(sentence_len, kPadId);
    m.push_back(std::move(row));
  }
  return m;
}

}  // namespace amnl
