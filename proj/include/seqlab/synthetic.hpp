#pragma once

#include <string>
#include <vector>

#include "seqlab/conll.hpp"
#include "seqlab/rng.hpp"

namespace seqlab::synthetic {

// Desk-scale corpora with known generating rules, used as training oracles:
// content-word tags are a pure function of the derivational suffix, function
// words carry their own tag, and an ambiguous token's tag follows its
// context family.

struct SuffixRule {
  std::string suffix;
  std::string tag;
};

inline const std::vector<SuffixRule>& suffix_rules() {
  static const std::vector<SuffixRule> rules = {
      {"ing", "TA"}, {"ness", "TB"}, {"tion", "TC"}, {"able", "TD"}};
  return rules;
}

inline const std::vector<std::string>& function_words() {
  static const std::vector<std::string> words = {"the", "a",  "of", "to",
                                                 "in",  "we", "he"};
  return words;
}
inline constexpr const char* kFunctionTag = "TE";

inline const std::vector<std::string>& finance_context() {
  static const std::vector<std::string> words = {"money", "loan", "credit",
                                                 "fund",  "pay",  "rate"};
  return words;
}
inline const std::vector<std::string>& river_context() {
  static const std::vector<std::string> words = {"water", "shore", "flow",
                                                 "fish",  "mud",   "reed"};
  return words;
}
inline constexpr const char* kAmbiguousWord = "bank";
inline constexpr const char* kFinanceTag = "TA";
inline constexpr const char* kRiverTag = "TB";

// Pronounceable deterministic stems: two consonant-vowel syllables, distinct
// for every index below 4900 (mixed-radix digits of i).
inline std::string stem(std::size_t i) {
  static const char consonants[] = "bdfgklmnprstvz";
  static const char vowels[] = "aeiou";
  const std::size_t nc = sizeof(consonants) - 1;
  const std::size_t nv = sizeof(vowels) - 1;
  std::string s;
  s += consonants[(i / nv) % nc];
  s += vowels[i % nv];
  s += consonants[(i / (nv * nc)) % nc];
  s += vowels[(i / (nv * nc * nc)) % nv];
  return s;
}

// Sentences whose content-word tags follow suffix_rules(); stems drawn from
// [stem_lo, stem_hi), so disjoint ranges give out-of-vocabulary evaluation
// words whose tag is still recoverable from the suffix.
inline std::vector<LabeledSentence> suffix_rule_corpus(std::size_t n_sentences,
                                                       std::uint64_t seed,
                                                       std::size_t stem_lo = 0,
                                                       std::size_t stem_hi = 10) {
  Rng rng(seed);
  std::vector<LabeledSentence> out;
  for (std::size_t s = 0; s < n_sentences; ++s) {
    std::size_t len = 5 + rng.below(5);
    LabeledSentence sent;
    for (std::size_t i = 0; i < len; ++i) {
      if (rng.uniform() < 0.35) {
        std::size_t f = rng.below(function_words().size());
        sent.tokens.push_back(function_words()[f]);
        sent.tags.push_back(kFunctionTag);
      } else {
        const auto& rule = suffix_rules()[rng.below(suffix_rules().size())];
        std::size_t id = stem_lo + rng.below(stem_hi - stem_lo);
        sent.tokens.push_back(stem(id) + rule.suffix);
        sent.tags.push_back(rule.tag);
      }
    }
    out.push_back(std::move(sent));
  }
  return out;
}

// [ctx ctx bank ctx ctx] sentences, alternating finance and river context
// families; the ambiguous token's tag depends on the family.
inline std::vector<LabeledSentence> polysemy_corpus(std::size_t n_per_family,
                                                    std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSentence> out;
  for (std::size_t s = 0; s < 2 * n_per_family; ++s) {
    bool finance = s % 2 == 0;
    const auto& ctx = finance ? finance_context() : river_context();
    LabeledSentence sent;
    for (int before = 0; before < 2; ++before) {
      sent.tokens.push_back(ctx[rng.below(ctx.size())]);
      sent.tags.push_back(kFunctionTag);
    }
    sent.tokens.push_back(kAmbiguousWord);
    sent.tags.push_back(finance ? kFinanceTag : kRiverTag);
    for (int after = 0; after < 2; ++after) {
      sent.tokens.push_back(ctx[rng.below(ctx.size())]);
      sent.tags.push_back(kFunctionTag);
    }
    out.push_back(std::move(sent));
  }
  return out;
}

// Suffix-rule and polysemy sentences interleaved; the ablation corpus.
inline std::vector<LabeledSentence> mixed_corpus(std::size_t n_suffix,
                                                 std::size_t n_polysemy_pairs,
                                                 std::uint64_t seed,
                                                 std::size_t stem_lo = 0,
                                                 std::size_t stem_hi = 10) {
  std::vector<LabeledSentence> a =
      suffix_rule_corpus(n_suffix, seed, stem_lo, stem_hi);
  std::vector<LabeledSentence> b = polysemy_corpus(n_polysemy_pairs, seed + 1);
  std::vector<LabeledSentence> out;
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (i < a.size()) out.push_back(std::move(a[i++]));
    if (j < b.size()) out.push_back(std::move(b[j++]));
  }
  return out;
}

}  // namespace seqlab::synthetic
