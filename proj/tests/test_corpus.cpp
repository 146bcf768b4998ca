#include <catch2/catch_amalgamated.hpp>

#include "seqlab/batching.hpp"
#include "seqlab/conll.hpp"
#include "seqlab/embeddings.hpp"
#include "seqlab/vocab.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace seqlab;
using Catch::Approx;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("seqlab_test_" + name);
  std::ofstream os(path);
  os << content;
  return path.string();
}

}  // namespace

TEST_CASE("read_conll splits blocks into sentences") {
  std::string path = write_temp("basic.conll",
                                "The\tDT\n"
                                "cat\tNN\n"
                                "sat\tVB\n"
                                "\n"
                                "It\tPRP\n"
                                "slept\tVB\n"
                                "\n");
  auto sentences = read_conll(path, 0, 1);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].size() == 3);
  CHECK(sentences[1].size() == 2);
  CHECK(sentences[0].tokens[1] == "cat");
  CHECK(sentences[1].tags[1] == "VB");
}

TEST_CASE("read_conll on an empty file yields no sentences") {
  std::string path = write_temp("empty.conll", "");
  CHECK(read_conll(path, 0, 1).empty());
}

TEST_CASE("read_conll skips document markers") {
  std::string path = write_temp("docstart.conll",
                                "-DOCSTART- -X- O\n"
                                "\n"
                                "EU\tB-ORG\n"
                                "rejects\tO\n"
                                "\n");
  auto sentences = read_conll(path, 0, 1);
  REQUIRE(sentences.size() == 1);
  CHECK(sentences[0].tokens[0] == "EU");
  for (const auto& s : sentences)
    for (const auto& t : s.tokens) CHECK(t != "-DOCSTART-");
}

TEST_CASE("read_conll reports ragged rows with the line number") {
  std::string path = write_temp("ragged.conll",
                                "good\tA\n"
                                "bad\n"
                                "\n");
  try {
    read_conll(path, 0, 1);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("read_conll round-trips through write_conll") {
  std::string path = write_temp("round.conll",
                                "a\tX\nb\tY\n\nc\tZ\n\n");
  auto sentences = read_conll(path, 0, 1);
  std::string out = write_temp("round_out.conll", "");
  write_conll(out, sentences);
  auto again = read_conll(out, 0, 1);
  REQUIRE(again.size() == sentences.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].tokens == sentences[i].tokens);
    CHECK(again[i].tags == sentences[i].tags);
  }
}

TEST_CASE("to_bio2 promotes IOB1 span openers") {
  CHECK(to_bio2({"I-PER", "I-PER", "O"}) ==
        std::vector<std::string>{"B-PER", "I-PER", "O"});
  CHECK(to_bio2({"O", "O"}) == std::vector<std::string>{"O", "O"});
  CHECK(to_bio2({"I-LOC", "I-ORG"}) ==
        std::vector<std::string>{"B-LOC", "B-ORG"});
}

TEST_CASE("to_bio2 is idempotent") {
  std::vector<std::string> bio2 = {"B-PER", "I-PER", "O", "B-LOC", "B-LOC", "I-LOC"};
  CHECK(to_bio2(bio2) == bio2);
  // property: applying twice equals applying once on IOB1 input
  std::vector<std::string> iob1 = {"I-PER", "O", "I-LOC", "I-LOC", "I-ORG"};
  CHECK(to_bio2(to_bio2(iob1)) == to_bio2(iob1));
}

TEST_CASE("to_bio2 rejects malformed tags") {
  CHECK_THROWS_AS(to_bio2({"X-PER"}), Error);
  CHECK_THROWS_AS(to_bio2({"B"}), Error);
}

TEST_CASE("number normalization") {
  CHECK(normalize_numbers("1234") == kNumberToken);
  CHECK(normalize_numbers("3.5") == kNumberToken);
  CHECK(normalize_numbers("1,234") == kNumberToken);
  CHECK(normalize_numbers("3/4") == kNumberToken);
  CHECK(normalize_numbers("1987-88") == kNumberToken);
  CHECK(normalize_numbers("U2") == "U2");
  CHECK(normalize_numbers("4th") == "4th");
  CHECK(normalize_numbers("12.") == "12.");
  CHECK(normalize_numbers("1--2") == "1--2");
  CHECK(normalize_numbers("word") == "word");
}

TEST_CASE("pad_start prepends the start token") {
  auto padded = pad_start({"a", "b"});
  REQUIRE(padded.size() == 3);
  CHECK(padded[0] == kStartToken);
  CHECK(padded[1] == "a");
  // 5-token sentence: padded has 6 rows; the 2-wide valid conv yields 5
  auto five = pad_start({"a", "b", "c", "d", "e"});
  CHECK(five.size() - 2 + 1 == 5);
}

TEST_CASE("vocab reserves fixed indices and maps unseen to unk") {
  Vocab v;
  CHECK(v.lookup(kPadToken) == Vocab::kPad);
  CHECK(v.lookup(kUnkToken) == Vocab::kUnk);
  CHECK(v.lookup(kNumberToken) == Vocab::kNumber);
  CHECK(v.lookup(kStartToken) == Vocab::kStart);
  CHECK(v.lookup("never-seen") == Vocab::kUnk);
}

TEST_CASE("build_vocab applies the frequency threshold") {
  std::vector<LabeledSentence> corpus;
  LabeledSentence s;
  s.tokens = {"a", "a", "a", "b"};
  s.tags = {"O", "O", "O", "O"};
  corpus.push_back(s);
  Vocab v = build_vocab(corpus, 2);
  CHECK(v.contains("a"));
  CHECK_FALSE(v.contains("b"));
  CHECK(v.lookup("b") == Vocab::kUnk);

  Vocab empty = build_vocab({}, 1);
  CHECK(empty.size() == Vocab::kReservedCount);
}

TEST_CASE("build_vocab is deterministic with freq-then-token ordering") {
  std::vector<LabeledSentence> corpus;
  LabeledSentence s;
  s.tokens = {"zz", "zz", "aa", "aa", "mm"};
  s.tags = {"O", "O", "O", "O", "O"};
  corpus.push_back(s);
  Vocab v1 = build_vocab(corpus, 1);
  Vocab v2 = build_vocab(corpus, 1);
  for (std::size_t i = 0; i < v1.size(); ++i) CHECK(v1.token(i) == v2.token(i));
  // aa and zz tie at 2, aa wins alphabetically; mm trails on frequency
  CHECK(v1.token(Vocab::kReservedCount) == "aa");
  CHECK(v1.token(Vocab::kReservedCount + 1) == "zz");
  CHECK(v1.token(Vocab::kReservedCount + 2) == "mm");
}

TEST_CASE("pretrained embeddings load rows and report coverage") {
  std::vector<LabeledSentence> corpus;
  LabeledSentence s;
  s.tokens = {"alpha", "beta", "gamma", "delta"};
  s.tags = {"O", "O", "O", "O"};
  corpus.push_back(s);
  Vocab v = build_vocab(corpus, 1);

  std::string path = write_temp("emb.txt",
                                "alpha 1.0 2.0\n"
                                "beta -0.5 0.25\n"
                                "stray 9.0 9.0\n");
  auto loaded = load_pretrained_embeddings<double>(path, v, 2, 7);
  CHECK(loaded.coverage == Approx(0.5));
  std::size_t ai = v.lookup("alpha");
  CHECK(loaded.matrix.at(ai, 0) == 1.0);
  CHECK(loaded.matrix.at(ai, 1) == 2.0);
  // uncovered rows live inside the init range
  std::size_t gi = v.lookup("gamma");
  CHECK(std::abs(loaded.matrix.at(gi, 0)) <= 0.25);

  std::string bad = write_temp("emb_bad.txt", "alpha 1.0\n");
  try {
    load_pretrained_embeddings<double>(bad, v, 2, 7);
    FAIL("expected dimension error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("batches partition the dataset and are seed-reproducible") {
  auto batches = make_batches(25, 10, 42);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].size() == 10);
  CHECK(batches[1].size() == 10);
  CHECK(batches[2].size() == 5);

  auto again = make_batches(25, 10, 42);
  CHECK(batches == again);

  std::set<std::size_t> seen;
  for (const auto& b : batches) seen.insert(b.begin(), b.end());
  CHECK(seen.size() == 25);  // multiset equality: 25 slots, 25 distinct ids
}

TEST_CASE("utf8 split falls back gracefully") {
  auto ascii = utf8_chars("cat");
  REQUIRE(ascii.size() == 3);
  auto accented = utf8_chars("caf\xC3\xA9");
  REQUIRE(accented.size() == 4);
  CHECK(accented[3] == "\xC3\xA9");
}
