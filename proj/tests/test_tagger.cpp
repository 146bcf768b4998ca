#include <catch2/catch_amalgamated.hpp>

#include "seqlab/grad_check.hpp"
#include "seqlab/suffix.hpp"
#include "seqlab/synthetic.hpp"
#include "seqlab/tagger.hpp"

#include <memory>

using namespace seqlab;
using Catch::Approx;

namespace {

ModelConfig tiny_config() {
  ModelConfig cfg;
  cfg.word_dim = 8;
  cfg.char_dim = 4;
  cfg.char_hidden = 4;
  cfg.sp_hidden = 4;  // 2*4 == word_dim, no projection needed
  cfg.head_hidden = 6;
  cfg.tag_embed_dim = 4;
  return cfg;
}

struct Fixture {
  std::vector<LabeledSentence> corpus;
  std::unique_ptr<TaggerModel<double>> model;
};

Fixture make_fixture(ModelConfig cfg, std::uint64_t seed = 5) {
  Fixture fx;
  fx.corpus = synthetic::mixed_corpus(12, 6, 33);
  Vocab vocab = build_vocab(fx.corpus, 1);
  Vocab chars = build_char_vocab(fx.corpus);
  TagSet tags(fx.corpus);

  SuffixInventory suffixes;
  if (cfg.use_suffix) {
    std::vector<std::string> list = {"ing", "ness", "tion", "able", "ly",
                                     "ment", "ous", "ward", "ish", "hood"};
    suffixes = build_suffix_inventory(fx.corpus, list, 2);
  }
  SenseInventory<double> senses;
  if (cfg.use_sense) {
    SenseTrainConfig sense_cfg;
    sense_cfg.max_senses = 2;
    sense_cfg.dim = cfg.word_dim;
    sense_cfg.window = 2;
    sense_cfg.epochs = 2;
    sense_cfg.seed = 3;
    senses = train_senses<double>(fx.corpus, sense_cfg);
  }
  fx.model = std::make_unique<TaggerModel<double>>(
      cfg, std::move(vocab), std::move(chars), std::move(tags),
      std::move(suffixes), std::move(senses), seed);
  return fx;
}

LabeledSentence sentence_of_length(std::size_t m, std::uint64_t seed) {
  auto pool = synthetic::suffix_rule_corpus(30, seed);
  LabeledSentence out;
  std::size_t i = 0;
  while (out.tokens.size() < m) {
    const auto& s = pool[i % pool.size()];
    for (std::size_t j = 0; j < s.size() && out.tokens.size() < m; ++j) {
      out.tokens.push_back(s.tokens[j]);
      out.tags.push_back(s.tags[j]);
    }
    ++i;
  }
  return out;
}

}  // namespace

TEST_CASE("default configuration is the final-model layout") {
  ModelConfig cfg;
  CHECK(cfg.use_word_emb);
  CHECK(cfg.use_sp_clstm);
  CHECK(cfg.use_sense);
  CHECK_FALSE(cfg.use_bigram);  // dropped from the final configuration
  CHECK(cfg.use_char_emb);
  CHECK(cfg.use_suffix);
  CHECK(cfg.use_spelling);
  CHECK(cfg.use_prev_tag);
  CHECK(cfg.suffix_placement == Placement::kConcatWord);
  CHECK(cfg.spelling_placement == Placement::kConcatOutput);
  CHECK(cfg.char_placement == Placement::kConcatWord);
}

TEST_CASE("emission shape chain holds across sentence lengths") {
  Fixture fx = make_fixture(tiny_config());
  std::vector<std::size_t> lengths = {1, 2, 7, 20, 50};
  Rng rng(55);
  for (int extra = 0; extra < 3; ++extra) lengths.push_back(1 + rng.below(200));
  for (std::size_t m : lengths) {
    LabeledSentence s = sentence_of_length(m, 100 + m);
    PreparedSentence p = fx.model->prepare(s);
    Graph<double> g;
    std::vector<std::size_t> prev(m, TaggerModel<double>::kNoTag);
    auto em = fx.model->emissions(g, p, prev, 0.0);
    REQUIRE(em.size() == m);
    for (const auto& row : em) {
      CHECK(g.value(row).numel() == fx.model->tag_count());
      CHECK(g.value(row).finite());
    }
  }
}

TEST_CASE("eval-mode forward is deterministic") {
  Fixture fx = make_fixture(tiny_config());
  LabeledSentence s = fx.corpus[0];
  PreparedSentence p = fx.model->prepare(s);
  std::vector<std::size_t> prev(p.size(), TaggerModel<double>::kNoTag);
  Graph<double> g1, g2;
  auto em1 = fx.model->emissions(g1, p, prev, 0.0);
  auto em2 = fx.model->emissions(g2, p, prev, 0.0);
  for (std::size_t t = 0; t < em1.size(); ++t)
    CHECK(g1.value(em1[t]).data == g2.value(em2[t]).data);

  TagSequence first = fx.model->predict(p);
  TagSequence second = fx.model->predict(p);
  CHECK(first == second);
}

TEST_CASE("emissions ignore gold tags when the prev-tag feature is off") {
  ModelConfig cfg = tiny_config();
  cfg.use_prev_tag = false;
  Fixture fx = make_fixture(cfg);
  LabeledSentence s = fx.corpus[1];
  PreparedSentence p1 = fx.model->prepare(s);
  LabeledSentence flipped = s;
  std::reverse(flipped.tags.begin(), flipped.tags.end());
  PreparedSentence p2 = fx.model->prepare(flipped);

  std::vector<std::size_t> prev(p1.size(), TaggerModel<double>::kNoTag);
  Graph<double> g1, g2;
  auto em1 = fx.model->emissions(g1, p1, prev, 0.0);
  auto em2 = fx.model->emissions(g2, p2, prev, 0.0);
  for (std::size_t t = 0; t < em1.size(); ++t)
    CHECK(g1.value(em1[t]).data == g2.value(em2[t]).data);
}

TEST_CASE("fusion weighting is linear in the scalar weights") {
  Rng rng(61);
  Tensor<double> v = Tensor<double>::uniform({6}, -2, 2, rng);
  double a = 0.7, b = -1.3;
  Graph<double> g;
  Var vec = g.constant(v);
  Var sum_w = g.constant(Tensor<double>::scalar(a + b));
  Var combined = g.scale_by(vec, sum_w);
  Var split = g.add(g.scale_by(vec, g.constant(Tensor<double>::scalar(a))),
                    g.scale_by(vec, g.constant(Tensor<double>::scalar(b))));
  for (std::size_t j = 0; j < 6; ++j)
    CHECK(g.value(combined).at(j) == Approx(g.value(split).at(j)).margin(1e-12));
}

TEST_CASE("single enabled branch with unit weight is the identity fusion") {
  ModelConfig cfg = word_only_config(tiny_config());
  Fixture fx = make_fixture(cfg);
  CHECK(fx.model->params().get("fusion.w1").value.value() == 1.0);
  CHECK_FALSE(fx.model->params().has("fusion.w2"));
  CHECK_FALSE(fx.model->params().has("fusion.w3"));
  CHECK_FALSE(fx.model->params().has("fusion.w4"));
}

TEST_CASE("word-only ablation configuration runs end to end") {
  Fixture fx = make_fixture(word_only_config(tiny_config()));
  PreparedSentence p = fx.model->prepare(fx.corpus[0]);
  TagSequence tags = fx.model->predict(p);
  CHECK(tags.size() == p.size());
}

TEST_CASE("bigram branch changes emissions when enabled") {
  ModelConfig with = tiny_config();
  with.use_bigram = true;
  Fixture fx1 = make_fixture(with);
  ModelConfig without = tiny_config();
  Fixture fx2 = make_fixture(without);

  LabeledSentence s = fx1.corpus[2];
  PreparedSentence p1 = fx1.model->prepare(s);
  PreparedSentence p2 = fx2.model->prepare(s);
  std::vector<std::size_t> prev(p1.size(), TaggerModel<double>::kNoTag);
  Graph<double> g1, g2;
  auto em1 = fx1.model->emissions(g1, p1, prev, 0.0);
  auto em2 = fx2.model->emissions(g2, p2, prev, 0.0);
  bool differs = false;
  for (std::size_t t = 0; t < em1.size(); ++t)
    differs |= g1.value(em1[t]).data != g2.value(em2[t]).data;
  CHECK(differs);
}

TEST_CASE("spelling placement changes parameter shapes but not output shape") {
  ModelConfig co = tiny_config();
  co.spelling_placement = Placement::kConcatOutput;
  ModelConfig cw = tiny_config();
  cw.spelling_placement = Placement::kConcatWord;
  ModelConfig residual = tiny_config();
  residual.spelling_placement = Placement::kResidual;

  Fixture f_co = make_fixture(co);
  Fixture f_cw = make_fixture(cw);
  Fixture f_r = make_fixture(residual);

  // CO widens the decode-head FC input; CW widens the word-branch LSTM input
  std::size_t fc_co = f_co.model->params().get("head.fc.W").value.shape[1];
  std::size_t fc_cw = f_cw.model->params().get("head.fc.W").value.shape[1];
  CHECK(fc_co == fc_cw + kSpellingFeatureCount);
  std::size_t wx_co = f_co.model->params().get("word.blstm.l0.fwd.Wxi").value.shape[1];
  std::size_t wx_cw = f_cw.model->params().get("word.blstm.l0.fwd.Wxi").value.shape[1];
  CHECK(wx_cw == wx_co + kSpellingFeatureCount);
  CHECK(f_r.model->params().has("spell.residual.W"));

  for (Fixture* fx : {&f_co, &f_cw, &f_r}) {
    PreparedSentence p = (*fx).model->prepare((*fx).corpus[0]);
    Graph<double> g;
    std::vector<std::size_t> prev(p.size(), TaggerModel<double>::kNoTag);
    auto em = (*fx).model->emissions(g, p, prev, 0.0);
    CHECK(em.size() == p.size());
    CHECK(g.value(em[0]).numel() == (*fx).model->tag_count());
  }
}

TEST_CASE("sense rows fall back for unknown senses and surfaces") {
  Fixture fx = make_fixture(tiny_config());
  const auto& inv = fx.model->sense_inventory();
  REQUIRE(inv.word_count() > 0);
  std::string known = inv.words()[0];
  std::size_t row1 = fx.model->sense_row(known, 1);
  CHECK(fx.model->sense_row(known, 99) == row1);  // out-of-range sense -> sense 1
  CHECK(fx.model->sense_row("unseen-surface", 1) == 0);  // unknown row
}

TEST_CASE("unknown-sense fallback covers held-out tokens end to end") {
  Fixture fx = make_fixture(tiny_config());
  LabeledSentence held_out;
  held_out.tokens = {"glimmering", "waters"};
  held_out.tags = {"TA", "TE"};
  PreparedSentence p = fx.model->prepare(held_out);
  TagSequence tags = fx.model->predict(p);
  CHECK(tags.size() == 2);
}

TEST_CASE("degenerate single-tag set still decodes") {
  ModelConfig cfg = word_only_config(tiny_config());
  std::vector<LabeledSentence> corpus;
  LabeledSentence s;
  s.tokens = {"one", "two", "three"};
  s.tags = {"T", "T", "T"};
  corpus.push_back(s);
  TaggerModel<double> model(cfg, build_vocab(corpus, 1), build_char_vocab(corpus),
                            TagSet(corpus), SuffixInventory{},
                            SenseInventory<double>{}, 5);
  PreparedSentence p = model.prepare(s);
  CHECK(model.predict(p) == TagSequence{0, 0, 0});
}

TEST_CASE("branch errors carry the branch name") {
  Fixture fx = make_fixture(tiny_config());
  PreparedSentence p = fx.model->prepare(fx.corpus[0]);
  p.stream_ends[0] = 10000;  // corrupt the pickup positions
  Graph<double> g;
  std::vector<std::size_t> prev(p.size(), TaggerModel<double>::kNoTag);
  try {
    fx.model->emissions(g, p, prev, 0.0);
    FAIL("expected branch error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("sp_clstm") != std::string::npos);
  }
}

TEST_CASE("full model nll gradient passes finite differences") {
  ModelConfig cfg;
  cfg.use_word_emb = cfg.use_sp_clstm = cfg.use_sense = cfg.use_bigram = true;
  cfg.use_char_emb = cfg.use_suffix = cfg.use_spelling = cfg.use_prev_tag = true;
  cfg.word_dim = 6;
  cfg.char_dim = 3;
  cfg.char_hidden = 3;
  cfg.sp_hidden = 3;
  cfg.head_hidden = 4;
  cfg.tag_embed_dim = 3;

  std::vector<LabeledSentence> corpus;
  LabeledSentence s;
  s.tokens = {"running", "the", "kindness"};
  s.tags = {"TA", "TE", "TB"};
  corpus.push_back(s);
  LabeledSentence s2;
  s2.tokens = {"petable", "motion", "we"};
  s2.tags = {"TB", "TA", "TE"};  // three distinct tags total
  corpus.push_back(s2);

  std::vector<std::string> list = {"ing", "ness", "tion", "able", "ly",
                                   "ment", "ous", "ward", "ish", "hood"};
  SuffixInventory suffixes = build_suffix_inventory(corpus, list, 1);
  SenseTrainConfig sense_cfg;
  sense_cfg.max_senses = 2;
  sense_cfg.dim = 6;
  sense_cfg.window = 2;
  sense_cfg.epochs = 2;
  SenseInventory<double> senses = train_senses<double>(corpus, sense_cfg);

  TaggerModel<double> model(cfg, build_vocab(corpus, 1), build_char_vocab(corpus),
                            TagSet(corpus), std::move(suffixes), std::move(senses),
                            7);
  PreparedSentence p = model.prepare(s);
  REQUIRE(p.gold.size() == 3);
  auto make_loss = [&](Graph<double>& g) { return model.nll(g, p, 0.0); };
  double err = finite_diff_check_all(model.params(), make_loss, 1e-5);
  CHECK(err < 1e-4);
}
