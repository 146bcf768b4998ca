#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "seqlab/common.hpp"

namespace seqlab {

inline constexpr const char* kPadToken = "<pad>";
inline constexpr const char* kUnkToken = "<unk>";
inline constexpr const char* kNumberToken = "<number>";
inline constexpr const char* kStartToken = "<start>";

struct LabeledSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;
  // Filled by sense retagging; empty until then.
  std::vector<std::string> sense_tokens;

  std::size_t size() const { return tokens.size(); }
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> cols;
  std::istringstream is(line);
  std::string col;
  while (is >> col) cols.push_back(col);
  return cols;
}

inline bool blank_line(const std::string& line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Reads whitespace-separated column format: one token per line, blank line
// between sentences, "-DOCSTART-" document markers skipped. When tag_column
// is absent every tag is "O" (untagged input for the tagger).
inline std::vector<LabeledSentence> read_conll(
    const std::string& path, std::size_t token_column = 0,
    std::optional<std::size_t> tag_column = 1) {
  std::ifstream is(path);
  require(is.good(), "cannot open corpus file: ", path);
  std::vector<LabeledSentence> sentences;
  LabeledSentence current;
  std::string line;
  std::size_t line_no = 0;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      sentences.push_back(std::move(current));
      current = LabeledSentence{};
    }
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::blank_line(line)) {
      flush();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) continue;
    std::vector<std::string> cols = detail::split_ws(line);
    std::size_t needed = token_column;
    if (tag_column) needed = std::max(needed, *tag_column);
    require(cols.size() > needed, path, ":", line_no, ": expected at least ",
            needed + 1, " columns, found ", cols.size());
    current.tokens.push_back(cols[token_column]);
    current.tags.push_back(tag_column ? cols[*tag_column] : std::string("O"));
  }
  flush();
  return sentences;
}

inline void write_conll(std::ostream& os,
                        const std::vector<LabeledSentence>& sentences) {
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i)
      os << s.tokens[i] << '\t' << s.tags[i] << '\n';
    os << '\n';
  }
}

inline void write_conll(const std::string& path,
                        const std::vector<LabeledSentence>& sentences) {
  std::ofstream os(path);
  require(os.good(), "cannot open for writing: ", path);
  write_conll(os, sentences);
}

// IOB1 -> BIO2: every span's first token gets B-. Idempotent on BIO2 input.
inline std::vector<std::string> to_bio2(const std::vector<std::string>& tags) {
  std::vector<std::string> out = tags;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::string& t = out[i];
    if (t == "O") continue;
    require(t.size() >= 3 && (t[0] == 'B' || t[0] == 'I') && t[1] == '-',
            "to_bio2: malformed tag '", t, "' at position ", i);
    if (t[0] == 'I') {
      std::string type = t.substr(2);
      bool continues = false;
      if (i > 0) {
        const std::string& prev = out[i - 1];
        continues = prev != "O" && prev.substr(2) == type;
      }
      if (!continues) out[i] = "B-" + type;
    }
  }
  return out;
}

// Digit runs with single . , / - separators map to the <number> token;
// anything else (including alphanumeric mixes) is left alone.
inline std::string normalize_numbers(const std::string& token) {
  if (token.empty() || !std::isdigit(static_cast<unsigned char>(token[0])))
    return token;
  bool prev_digit = false;
  for (char c : token) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      prev_digit = true;
    } else if (c == '.' || c == ',' || c == '/' || c == '-') {
      if (!prev_digit) return token;  // adjacent separators
      prev_digit = false;
    } else {
      return token;
    }
  }
  return prev_digit ? kNumberToken : token;
}

// Prepends the start token; used on the bigram branch input so the 2-wide
// valid convolution yields one output row per word.
inline std::vector<std::string> pad_start(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size() + 1);
  out.push_back(kStartToken);
  out.insert(out.end(), tokens.begin(), tokens.end());
  return out;
}

// Splits a token into UTF-8 code points (byte fallback on malformed input).
inline std::vector<std::string> utf8_chars(const std::string& token) {
  std::vector<std::string> chars;
  std::size_t i = 0;
  while (i < token.size()) {
    unsigned char c = static_cast<unsigned char>(token[i]);
    std::size_t len = 1;
    if ((c & 0x80) == 0x00) len = 1;
    else if ((c & 0xE0) == 0xC0) len = 2;
    else if ((c & 0xF0) == 0xE0) len = 3;
    else if ((c & 0xF8) == 0xF0) len = 4;
    if (i + len > token.size()) len = 1;
    chars.push_back(token.substr(i, len));
    i += len;
  }
  return chars;
}

}  // namespace seqlab
