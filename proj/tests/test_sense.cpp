#include <catch2/catch_amalgamated.hpp>

#include "seqlab/sense.hpp"
#include "seqlab/synthetic.hpp"

#include <algorithm>
#include <filesystem>

using namespace seqlab;
using Catch::Approx;

namespace {

SenseTrainConfig desk_config() {
  SenseTrainConfig cfg;
  cfg.max_senses = 5;
  cfg.dim = 12;
  cfg.window = 2;
  cfg.epochs = 15;
  cfg.alpha = 0.1;
  cfg.learning_rate = 0.1;
  cfg.seed = 9;
  return cfg;
}

std::vector<std::string> context_of(const LabeledSentence& s, std::size_t pos,
                                    std::size_t window) {
  std::vector<std::string> ctx;
  std::size_t lo = pos >= window ? pos - window : 0;
  std::size_t hi = std::min(s.tokens.size(), pos + window + 1);
  for (std::size_t j = lo; j < hi; ++j)
    if (j != pos) ctx.push_back(s.tokens[j]);
  return ctx;
}

}  // namespace

TEST_CASE("stick-breaking prior") {
  SECTION("first stick takes nearly everything") {
    std::vector<double> betas = {1 - 1e-9, 0.5, 0.5};
    CHECK(stick_breaking_prior(betas, 1) == Approx(1.0).margin(1e-8));
  }
  SECTION("second stick of (0.5, 0.5) is a quarter") {
    std::vector<double> betas = {0.5, 0.5};
    CHECK(stick_breaking_prior(betas, 2) == Approx(0.25).margin(1e-15));
  }
  SECTION("out-of-range sense index") {
    std::vector<double> betas = {0.5, 0.5};
    CHECK_THROWS_AS(stick_breaking_prior(betas, 0), Error);
    CHECK_THROWS_AS(stick_breaking_prior(betas, 3), Error);
  }
  SECTION("telescoping identity over random draws") {
    Rng rng(71);
    for (int trial = 0; trial < 10000; ++trial) {
      std::size_t k_max = 1 + rng.below(6);
      std::vector<double> betas(k_max);
      double residual = 1;
      for (auto& b : betas) b = rng.uniform(1e-6, 1 - 1e-6);
      double total = 0;
      for (std::size_t k = 1; k <= k_max; ++k)
        total += stick_breaking_prior(betas, k);
      for (double b : betas) residual *= 1 - b;
      REQUIRE(total + residual == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("sense token rendering round-trips") {
  SenseTaggedToken t{"apple", 2};
  CHECK(t.rendered() == "apple_2");
  SenseTaggedToken back = parse_sense_token("apple_2");
  CHECK(back.surface == "apple");
  CHECK(back.sense == 2);

  // surfaces containing underscores split on the last one
  SenseTaggedToken nyc = parse_sense_token("New_York_3");
  CHECK(nyc.surface == "New_York");
  CHECK(nyc.sense == 3);

  CHECK_THROWS_AS(parse_sense_token("plain"), Error);
  CHECK_THROWS_AS(parse_sense_token("word_"), Error);
  CHECK_THROWS_AS(parse_sense_token("word_0"), Error);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    SenseTaggedToken original{synthetic::stem(rng.below(500)),
                              1 + std::size_t(rng.below(5))};
    SenseTaggedToken parsed = parse_sense_token(original.rendered());
    CHECK(parsed.surface == original.surface);
    CHECK(parsed.sense == original.sense);
  }
}

TEST_CASE("polysemous token splits into at least two well-used senses") {
  auto corpus = synthetic::polysemy_corpus(40, 31);
  auto inventory = train_senses<double>(corpus, desk_config());
  const auto& entry = inventory.entry(synthetic::kAmbiguousWord);
  std::size_t total = 0;
  for (std::size_t n : entry.counts) total += n;
  REQUIRE(total == 80);
  std::size_t well_used = 0;
  for (std::size_t n : entry.counts)
    if (5 * n >= total) ++well_used;  // >= 20% of occurrences
  CHECK(well_used >= 2);
}

TEST_CASE("single context distribution keeps sense one dominant") {
  // same generator, mixture collapsed to one family
  Rng gen(41);
  std::vector<LabeledSentence> corpus;
  const auto& ctx = synthetic::finance_context();
  for (int s = 0; s < 60; ++s) {
    LabeledSentence sent;
    for (int i = 0; i < 2; ++i) {
      sent.tokens.push_back(ctx[gen.below(ctx.size())]);
      sent.tags.push_back("TE");
    }
    sent.tokens.push_back(synthetic::kAmbiguousWord);
    sent.tags.push_back("TA");
    for (int i = 0; i < 2; ++i) {
      sent.tokens.push_back(ctx[gen.below(ctx.size())]);
      sent.tags.push_back("TE");
    }
    corpus.push_back(std::move(sent));
  }
  auto inventory = train_senses<double>(corpus, desk_config());
  for (const auto& word : inventory.words()) {
    const auto& entry = inventory.entry(word);
    std::size_t total = 0;
    for (std::size_t n : entry.counts) total += n;
    REQUIRE(total > 0);
    INFO("word " << word);
    CHECK(double(entry.counts[0]) / double(total) >= 0.95);
  }
}

TEST_CASE("vanishing alpha concentrates prior mass on sense one") {
  // monosemous corpus: every count lands on sense 1, and with alpha -> 0 the
  // smoothed beta_1 = (n+1)/(n+1+alpha) telescopes the prior to 1
  Rng gen(51);
  std::vector<LabeledSentence> corpus;
  const auto& ctx = synthetic::finance_context();
  for (int s = 0; s < 20; ++s) {
    LabeledSentence sent;
    for (int i = 0; i < 4; ++i) {
      sent.tokens.push_back(ctx[gen.below(ctx.size())]);
      sent.tags.push_back("TE");
    }
    corpus.push_back(std::move(sent));
  }
  SenseTrainConfig cfg = desk_config();
  cfg.alpha = 1e-9;
  auto inventory = train_senses<double>(corpus, cfg);
  std::size_t checked = 0;
  for (const auto& word : inventory.words()) {
    const auto& entry = inventory.entry(word);
    std::size_t later = 0;
    for (std::size_t k = 1; k < entry.counts.size(); ++k) later += entry.counts[k];
    if (entry.counts[0] == 0 || later > 0) continue;
    INFO("word " << word);
    CHECK(stick_breaking_prior(entry.betas, 1) >= 0.99);
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("disambiguation conventions") {
  auto corpus = synthetic::polysemy_corpus(10, 61);
  SenseTrainConfig cfg = desk_config();
  cfg.max_senses = 1;
  auto inventory = train_senses<double>(corpus, cfg);

  SECTION("k is 1 when only one sense exists") {
    CHECK(inventory.disambiguate(synthetic::kAmbiguousWord, {"money", "loan"}) == 1);
  }
  SECTION("unknown words default to sense one") {
    CHECK(inventory.disambiguate("nonexistent-token", {"money"}) == 1);
  }
}

TEST_CASE("disambiguation recovers the generating mixture") {
  auto corpus = synthetic::polysemy_corpus(40, 31);
  auto inventory = train_senses<double>(corpus, desk_config());

  // label senses post hoc by the majority assignment within each family
  std::map<std::size_t, std::size_t> finance_votes, river_votes;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& sent = corpus[s];
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      if (sent.tokens[i] != synthetic::kAmbiguousWord) continue;
      std::size_t k =
          inventory.disambiguate(sent.tokens[i], context_of(sent, i, 2));
      (s % 2 == 0 ? finance_votes[k] : river_votes[k])++;
    }
  }
  auto majority = [](const std::map<std::size_t, std::size_t>& votes) {
    std::size_t best = 0, best_n = 0, total = 0;
    for (auto [k, n] : votes) {
      total += n;
      if (n > best_n) best = k, best_n = n;
    }
    return std::tuple{best, best_n, total};
  };
  auto [fin_sense, fin_n, fin_total] = majority(finance_votes);
  auto [riv_sense, riv_n, riv_total] = majority(river_votes);
  CHECK(fin_sense != riv_sense);
  CHECK(double(fin_n) / double(fin_total) >= 0.8);
  CHECK(double(riv_n) / double(riv_total) >= 0.8);

  // a fresh finance context resolves to the finance-dominant sense
  CHECK(inventory.disambiguate(synthetic::kAmbiguousWord,
                               {"money", "loan", "credit", "pay"}) == fin_sense);
}

TEST_CASE("disambiguation ignores context order") {
  auto corpus = synthetic::polysemy_corpus(20, 81);
  auto inventory = train_senses<double>(corpus, desk_config());
  std::vector<std::string> ctx = {"money", "loan", "pay", "fund"};
  std::size_t base = inventory.disambiguate(synthetic::kAmbiguousWord, ctx);
  std::sort(ctx.begin(), ctx.end());
  do {
    CHECK(inventory.disambiguate(synthetic::kAmbiguousWord, ctx) == base);
  } while (std::next_permutation(ctx.begin(), ctx.end()));
}

TEST_CASE("retagging is deterministic and marks monosemous tokens _1") {
  Rng gen(91);
  std::vector<LabeledSentence> corpus;
  for (int s = 0; s < 20; ++s) {
    LabeledSentence sent;
    const auto& ctx = synthetic::river_context();
    for (int i = 0; i < 5; ++i) {
      sent.tokens.push_back(ctx[gen.below(ctx.size())]);
      sent.tags.push_back("TE");
    }
    corpus.push_back(std::move(sent));
  }
  auto inventory = train_senses<double>(corpus, desk_config());
  auto tagged1 = retag_corpus(corpus, inventory, 2);
  auto tagged2 = retag_corpus(corpus, inventory, 2);
  for (std::size_t s = 0; s < tagged1.size(); ++s) {
    CHECK(tagged1[s].sense_tokens == tagged2[s].sense_tokens);
    for (std::size_t i = 0; i < tagged1[s].sense_tokens.size(); ++i) {
      const std::string& rendered = tagged1[s].sense_tokens[i];
      CHECK(rendered == tagged1[s].tokens[i] + "_1");
    }
  }
}

TEST_CASE("ambiguous token retags differently across context families") {
  auto corpus = synthetic::polysemy_corpus(40, 31);
  auto inventory = train_senses<double>(corpus, desk_config());
  auto tagged = retag_corpus(corpus, inventory, 2);
  std::set<std::string> renders;
  for (const auto& sent : tagged)
    for (std::size_t i = 0; i < sent.tokens.size(); ++i)
      if (sent.tokens[i] == synthetic::kAmbiguousWord)
        renders.insert(sent.sense_tokens[i]);
  CHECK(renders.size() >= 2);
}

TEST_CASE("inventory save/load preserves disambiguation") {
  auto corpus = synthetic::polysemy_corpus(20, 71);
  auto inventory = train_senses<double>(corpus, desk_config());
  auto path = (std::filesystem::temp_directory_path() / "seqlab_senses.bin").string();
  inventory.save(path);
  auto loaded = SenseInventory<double>::load(path);
  CHECK(loaded.word_count() == inventory.word_count());
  CHECK(loaded.max_senses() == inventory.max_senses());
  CHECK(loaded.dim() == inventory.dim());
  for (const auto& sent : corpus) {
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      auto ctx = context_of(sent, i, 2);
      CHECK(loaded.disambiguate(sent.tokens[i], ctx) ==
            inventory.disambiguate(sent.tokens[i], ctx));
    }
  }
}
