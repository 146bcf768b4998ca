#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "seqlab/common.hpp"
#include "seqlab/conll.hpp"

namespace seqlab {

inline constexpr std::size_t kSpellingFeatureCount = 14;
using SpellingVector = std::array<std::uint8_t, kSpellingFeatureCount>;

namespace ascii {
inline bool alpha(const std::string& cp) {
  return cp.size() == 1 && std::isalpha(static_cast<unsigned char>(cp[0]));
}
inline bool digit(const std::string& cp) {
  return cp.size() == 1 && std::isdigit(static_cast<unsigned char>(cp[0]));
}
inline bool upper(const std::string& cp) {
  return cp.size() == 1 && std::isupper(static_cast<unsigned char>(cp[0]));
}
inline bool lower(const std::string& cp) {
  return cp.size() == 1 && std::islower(static_cast<unsigned char>(cp[0]));
}
inline bool punct(const std::string& cp) {
  return cp.size() == 1 && std::ispunct(static_cast<unsigned char>(cp[0]));
}
}  // namespace ascii

// The 14 binary spelling predicates, in fixed order:
//   1 all alphabetic            8 first word of the sentence
//   2 has a char that is not    9 last word (and not also first)
//     a letter, digit, or '.'  10 middle of the sentence
//   3 starts with a capital    11 ends with 's
//   4 all uppercase letters    12 has punctuation
//   5 all lowercase letters    13 first word and capitalized
//   6 all digits               14 mostly (strict majority) digits
//   7 mix of letters and digits only
// Items 8/9/10 partition positions; a single-token sentence counts as first.
inline SpellingVector spelling_vector(const std::string& word,
                                      std::size_t position_index,
                                      std::size_t sentence_length) {
  require(!word.empty(), "spelling_vector: empty word");
  require(position_index < sentence_length,
          "spelling_vector: position ", position_index, " out of range ",
          sentence_length);

  const std::vector<std::string> chars = utf8_chars(word);
  std::size_t n_alpha = 0, n_digit = 0, n_upper = 0, n_lower = 0, n_punct = 0,
              n_other = 0;
  for (const auto& cp : chars) {
    if (ascii::alpha(cp)) {
      ++n_alpha;
      if (ascii::upper(cp)) ++n_upper;
      if (ascii::lower(cp)) ++n_lower;
    } else if (ascii::digit(cp)) {
      ++n_digit;
    } else {
      if (cp != ".") ++n_other;
    }
    if (ascii::punct(cp)) ++n_punct;
  }
  const std::size_t n = chars.size();

  SpellingVector v{};
  v[0] = n_alpha == n;
  v[1] = n_other > 0;
  v[2] = ascii::upper(chars.front());
  v[3] = n_upper == n;
  v[4] = n_lower == n;
  v[5] = n_digit == n;
  v[6] = n_alpha > 0 && n_digit > 0 && n_alpha + n_digit == n;
  bool first = position_index == 0;
  bool last = !first && position_index + 1 == sentence_length;
  v[7] = first;
  v[8] = last;
  v[9] = !first && !last;
  v[10] = word.size() >= 2 && word.compare(word.size() - 2, 2, "'s") == 0;
  v[11] = n_punct > 0;
  v[12] = first && ascii::upper(chars.front());
  v[13] = 2 * n_digit > n;
  return v;
}

}  // namespace seqlab
