#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "seqlab/conll.hpp"

namespace seqlab {

inline constexpr std::size_t kSuffixCount = 10;
using SuffixVector = std::array<std::uint8_t, kSuffixCount>;

inline bool ends_with_suffix(const std::string& word, const std::string& suffix) {
  // A word is never its own suffix; the suffix must attach to a stem.
  return word.size() > suffix.size() &&
         word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// One suffix per line, '#' comments and blank lines skipped.
inline std::vector<std::string> read_suffix_list(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open suffix list: ", path);
  std::vector<std::string> suffixes;
  std::string line;
  while (std::getline(is, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    suffixes.push_back(line.substr(b, e - b + 1));
  }
  require(!suffixes.empty(), "suffix list is empty: ", path);
  return suffixes;
}

// The ten most corpus-frequent suffixes from a candidate list, plus the set
// of words admitted for each (word occurrence count >= threshold).
class SuffixInventory {
 public:
  std::size_t size() const { return suffixes_.size(); }
  const std::vector<std::string>& suffixes() const { return suffixes_; }
  std::size_t threshold() const { return threshold_; }

  bool admitted(const std::string& word, std::size_t k) const {
    return admitted_[k].count(word) != 0;
  }

  // One-hot over the selected suffixes; when a word is admitted under
  // several, the longest match wins. All-zero when nothing is admitted.
  SuffixVector vector_for(const std::string& word) const {
    SuffixVector v{};
    std::size_t best = kSuffixCount;
    std::size_t best_len = 0;
    for (std::size_t k = 0; k < suffixes_.size(); ++k) {
      if (suffixes_[k].size() > best_len && admitted(word, k)) {
        best = k;
        best_len = suffixes_[k].size();
      }
    }
    if (best < kSuffixCount) v[best] = 1;
    return v;
  }

  friend SuffixInventory build_suffix_inventory(
      const std::vector<LabeledSentence>&, const std::vector<std::string>&,
      std::size_t);

 private:
  std::vector<std::string> suffixes_;
  std::vector<std::unordered_set<std::string>> admitted_;
  std::size_t threshold_ = 0;
};

inline SuffixInventory build_suffix_inventory(
    const std::vector<LabeledSentence>& train_sentences,
    const std::vector<std::string>& suffix_list, std::size_t threshold) {
  require(threshold >= 1, "suffix inventory: threshold must be >= 1");
  require(suffix_list.size() >= kSuffixCount, "suffix inventory: candidate list has ",
          suffix_list.size(), " entries, need at least ", kSuffixCount);

  std::map<std::string, std::size_t> word_freq;
  for (const auto& s : train_sentences)
    for (const auto& tok : s.tokens) ++word_freq[tok];

  // Occurrence count per candidate suffix; a word matching several
  // candidates counts under all of them.
  std::vector<std::size_t> counts(suffix_list.size(), 0);
  for (const auto& [word, freq] : word_freq)
    for (std::size_t k = 0; k < suffix_list.size(); ++k)
      if (ends_with_suffix(word, suffix_list[k])) counts[k] += freq;

  std::vector<std::size_t> order(suffix_list.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (counts[a] != counts[b]) return counts[a] > counts[b];
    if (suffix_list[a].size() != suffix_list[b].size())
      return suffix_list[a].size() > suffix_list[b].size();
    return suffix_list[a] < suffix_list[b];
  });

  SuffixInventory inv;
  inv.threshold_ = threshold;
  for (std::size_t k = 0; k < kSuffixCount; ++k)
    inv.suffixes_.push_back(suffix_list[order[k]]);
  inv.admitted_.resize(kSuffixCount);
  for (const auto& [word, freq] : word_freq) {
    if (freq < threshold) continue;
    for (std::size_t k = 0; k < kSuffixCount; ++k)
      if (ends_with_suffix(word, inv.suffixes_[k])) inv.admitted_[k].insert(word);
  }
  return inv;
}

inline SuffixInventory build_suffix_inventory(
    const std::vector<LabeledSentence>& train_sentences,
    const std::string& suffix_list_path, std::size_t threshold) {
  return build_suffix_inventory(train_sentences, read_suffix_list(suffix_list_path),
                                threshold);
}

}  // namespace seqlab
