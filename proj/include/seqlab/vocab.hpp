#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlab/conll.hpp"

namespace seqlab {

// Bidirectional token<->index map with fixed reserved slots.
class Vocab {
 public:
  static constexpr std::size_t kPad = 0;
  static constexpr std::size_t kUnk = 1;
  static constexpr std::size_t kNumber = 2;
  static constexpr std::size_t kStart = 3;
  static constexpr std::size_t kReservedCount = 4;

  Vocab() {
    add(kPadToken);
    add(kUnkToken);
    add(kNumberToken);
    add(kStartToken);
  }

  std::size_t add(const std::string& token) {
    auto it = map_.find(token);
    if (it != map_.end()) return it->second;
    std::size_t idx = list_.size();
    map_.emplace(token, idx);
    list_.push_back(token);
    return idx;
  }

  // Unseen tokens map to <unk>, never an error.
  std::size_t lookup(const std::string& token) const {
    auto it = map_.find(token);
    return it == map_.end() ? kUnk : it->second;
  }

  bool contains(const std::string& token) const { return map_.count(token) != 0; }
  std::size_t size() const { return list_.size(); }
  const std::string& token(std::size_t idx) const { return list_[idx]; }

 private:
  std::unordered_map<std::string, std::size_t> map_;
  std::vector<std::string> list_;
};

// Frequency-thresholded vocabulary. Index assignment is deterministic:
// tokens sorted by (frequency desc, token asc) after the reserved slots.
inline Vocab build_vocab(const std::vector<LabeledSentence>& sentences,
                         std::size_t min_count = 1) {
  require(min_count >= 1, "build_vocab: min_count must be >= 1");
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences)
    for (const auto& tok : s.tokens) ++freq[tok];
  std::vector<std::pair<std::string, std::size_t>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  for (const auto& [tok, count] : entries)
    if (count >= min_count) vocab.add(tok);
  return vocab;
}

// Character vocabulary over UTF-8 code points of all tokens. The reserved
// <start> slot doubles as the word-boundary character in the flattened
// character stream.
inline Vocab build_char_vocab(const std::vector<LabeledSentence>& sentences) {
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences)
    for (const auto& tok : s.tokens)
      for (const auto& ch : utf8_chars(tok)) ++freq[ch];
  std::vector<std::pair<std::string, std::size_t>> entries(freq.begin(), freq.end());
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab vocab;
  for (const auto& [ch, count] : entries) vocab.add(ch);
  return vocab;
}

// Tag inventory; index order is lexicographic for reproducibility.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(const std::vector<LabeledSentence>& sentences) {
    std::map<std::string, std::size_t> seen;
    for (const auto& s : sentences)
      for (const auto& t : s.tags) seen[t] = 0;
    for (const auto& [tag, _] : seen) {
      map_.emplace(tag, list_.size());
      list_.push_back(tag);
    }
  }

  std::size_t index(const std::string& tag) const {
    auto it = map_.find(tag);
    require(it != map_.end(), "unknown tag '", tag, "'");
    return it->second;
  }
  bool contains(const std::string& tag) const { return map_.count(tag) != 0; }
  std::size_t size() const { return list_.size(); }
  const std::string& tag(std::size_t idx) const { return list_[idx]; }

  std::vector<std::size_t> encode(const std::vector<std::string>& tags) const {
    std::vector<std::size_t> out;
    out.reserve(tags.size());
    for (const auto& t : tags) out.push_back(index(t));
    return out;
  }
  std::vector<std::string> decode(const std::vector<std::size_t>& ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (std::size_t i : ids) out.push_back(tag(i));
    return out;
  }

 private:
  std::unordered_map<std::string, std::size_t> map_;
  std::vector<std::string> list_;
};

}  // namespace seqlab
