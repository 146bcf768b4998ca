#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seqlab/conv.hpp"
#include "seqlab/crf.hpp"
#include "seqlab/embeddings.hpp"
#include "seqlab/lstm.hpp"
#include "seqlab/sense.hpp"
#include "seqlab/spelling.hpp"
#include "seqlab/suffix.hpp"
#include "seqlab/vocab.hpp"

namespace seqlab {

// Where a feature vector enters the network: concatenated to the word-branch
// embedding, concatenated to the decode head's pre-FC activation, or (for
// spelling) added to the fused trunk through a learned projection.
enum class Placement { kConcatWord, kConcatOutput, kResidual };

inline Placement placement_from_string(const std::string& s) {
  if (s == "cw") return Placement::kConcatWord;
  if (s == "co") return Placement::kConcatOutput;
  if (s == "residual") return Placement::kResidual;
  require(false, "unknown placement '", s, "' (expected cw, co, or residual)");
  return Placement::kConcatWord;
}

struct ModelConfig {
  // Encoder branches (fused by scalar weights).
  bool use_word_emb = true;
  bool use_sp_clstm = true;
  bool use_sense = true;
  bool use_bigram = false;  // dropped from the final configuration

  // Feature switches and placements.
  bool use_char_emb = true;
  bool use_suffix = true;
  bool use_spelling = true;
  bool use_prev_tag = true;
  Placement suffix_placement = Placement::kConcatWord;
  Placement spelling_placement = Placement::kConcatOutput;
  Placement char_placement = Placement::kConcatWord;
  bool share_char_table = false;  // SP-CLSTM reuses the module-2 char table
  bool lowercase_lookup = false;  // word-embedding lookup only
  bool forbid_invalid_transitions = false;  // -inf BIO2 masks at decode time

  // Dimensions.
  std::size_t word_dim = 16;     // d; unified branch output width
  std::size_t char_dim = 8;      // n; char embedding width
  std::size_t char_hidden = 8;   // module-2 char LSTM hidden size
  std::size_t sp_hidden = 8;     // SP-CLSTM per-direction hidden size
  std::size_t head_hidden = 16;  // decode-head LSTM hidden size
  std::size_t tag_embed_dim = 8;
  std::size_t lstm_layers = 1;   // stacked BLSTM depth in every branch

  std::size_t enabled_branches() const {
    return std::size_t(use_word_emb) + std::size_t(use_sp_clstm) +
           std::size_t(use_sense) + std::size_t(use_bigram);
  }

  void validate() const {
    require(enabled_branches() >= 1, "model: at least one branch must be enabled");
    require(word_dim >= 2 && word_dim % 2 == 0,
            "model: word_dim must be even (branch BLSTMs use word_dim/2 per direction)");
    require(lstm_layers >= 1 && lstm_layers <= 3, "model: lstm_layers must be 1..3");
    require(suffix_placement != Placement::kResidual,
            "model: suffix placement must be cw or co");
    require(char_placement != Placement::kResidual,
            "model: char placement must be cw or co");
    bool needs_word = (use_suffix && suffix_placement == Placement::kConcatWord) ||
                      (use_spelling && spelling_placement == Placement::kConcatWord) ||
                      (use_char_emb && char_placement == Placement::kConcatWord);
    require(!needs_word || use_word_emb,
            "model: concat-with-word placements require the word branch");
  }
};

// Word-only baseline used by the ablation comparisons.
inline ModelConfig word_only_config(const ModelConfig& base) {
  ModelConfig cfg = base;
  cfg.use_sp_clstm = cfg.use_sense = cfg.use_bigram = false;
  cfg.use_char_emb = cfg.use_suffix = cfg.use_spelling = cfg.use_prev_tag = false;
  cfg.use_word_emb = true;
  return cfg;
}

// Feature-complete view of one sentence, ready for graph construction.
struct PreparedSentence {
  std::vector<std::size_t> word_ids;               // m, normalized lookup
  std::vector<std::size_t> padded_word_ids;        // m+1, <start> + word_ids
  std::vector<std::vector<std::size_t>> char_ids;  // per word, original surface
  std::vector<std::size_t> stream_ids;             // SP-CLSTM character stream
  std::vector<std::size_t> stream_starts, stream_ends;
  std::vector<std::size_t> sense_ids;              // rows of the sense table
  std::vector<SpellingVector> spelling;
  std::vector<SuffixVector> suffix;
  TagSequence gold;  // empty when untagged
  std::size_t size() const { return word_ids.size(); }
};

template <class Real>
class TaggerModel {
 public:
  TaggerModel(ModelConfig cfg, Vocab word_vocab, Vocab char_vocab, TagSet tags,
              SuffixInventory suffix_inventory, SenseInventory<Real> sense_inventory,
              std::uint64_t seed,
              const Tensor<Real>* pretrained_word = nullptr)
      : cfg_(cfg),
        vocab_(std::move(word_vocab)),
        chars_(std::move(char_vocab)),
        tags_(std::move(tags)),
        suffixes_(std::move(suffix_inventory)),
        senses_(std::move(sense_inventory)) {
    cfg_.validate();
    require(tags_.size() >= 1, "model: empty tag set");
    Rng rng(seed);
    register_params(rng, pretrained_word);
  }

  const ModelConfig& config() const { return cfg_; }
  ParamStore<Real>& params() { return store_; }
  const ParamStore<Real>& params() const { return store_; }
  const Vocab& vocab() const { return vocab_; }
  const Vocab& char_vocab() const { return chars_; }
  const TagSet& tags() const { return tags_; }
  const SuffixInventory& suffix_inventory() const { return suffixes_; }
  const SenseInventory<Real>& sense_inventory() const { return senses_; }
  std::size_t tag_count() const { return tags_.size(); }

  // -- feature extraction -----------------------------------------------------

  PreparedSentence prepare(const LabeledSentence& s) const {
    require(!s.tokens.empty(), "prepare: empty sentence");
    const std::size_t m = s.tokens.size();
    PreparedSentence p;
    p.word_ids.reserve(m);
    for (const auto& tok : s.tokens) {
      std::string norm = normalize_numbers(tok);
      if (cfg_.lowercase_lookup)
        for (char& ch : norm) ch = char(std::tolower(static_cast<unsigned char>(ch)));
      p.word_ids.push_back(vocab_.lookup(norm));
    }
    p.padded_word_ids.reserve(m + 1);
    p.padded_word_ids.push_back(Vocab::kStart);
    p.padded_word_ids.insert(p.padded_word_ids.end(), p.word_ids.begin(),
                             p.word_ids.end());

    // Character features come from the original surface forms.
    p.char_ids.resize(m);
    for (std::size_t i = 0; i < m; ++i)
      for (const auto& cp : utf8_chars(s.tokens[i]))
        p.char_ids[i].push_back(chars_.lookup(cp));

    if (cfg_.use_sp_clstm) {
      for (std::size_t i = 0; i < m; ++i) {
        if (i > 0) p.stream_ids.push_back(Vocab::kStart);  // word boundary
        p.stream_starts.push_back(p.stream_ids.size());
        for (std::size_t id : p.char_ids[i]) p.stream_ids.push_back(id);
        p.stream_ends.push_back(p.stream_ids.size() - 1);
      }
    }

    if (cfg_.use_sense) {
      p.sense_ids.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        SenseTaggedToken tagged;
        if (i < s.sense_tokens.size() && !s.sense_tokens[i].empty()) {
          tagged = parse_sense_token(s.sense_tokens[i]);
        } else {
          std::size_t lo = i >= senses_.window() ? i - senses_.window() : 0;
          std::size_t hi = std::min(m, i + senses_.window() + 1);
          std::vector<std::string> context;
          for (std::size_t j = lo; j < hi; ++j)
            if (j != i) context.push_back(normalize_numbers(s.tokens[j]));
          std::string norm = normalize_numbers(s.tokens[i]);
          tagged = SenseTaggedToken{norm, senses_.disambiguate(norm, context)};
        }
        p.sense_ids[i] = sense_row(normalize_numbers(tagged.surface), tagged.sense);
      }
    }

    if (cfg_.use_spelling) {
      p.spelling.resize(m);
      for (std::size_t i = 0; i < m; ++i)
        p.spelling[i] = spelling_vector(s.tokens[i], i, m);
    }
    if (cfg_.use_suffix) {
      p.suffix.resize(m);
      for (std::size_t i = 0; i < m; ++i)
        p.suffix[i] = suffixes_.vector_for(s.tokens[i]);
    }

    if (!s.tags.empty() && s.tags.size() == m) {
      bool known = true;
      for (const auto& t : s.tags) known = known && tags_.contains(t);
      if (known) p.gold = tags_.encode(s.tags);
    }
    return p;
  }

  // -- forward ------------------------------------------------------------------

  // Emission scores, one Var row (length c) per token. prev_tag_ids must hold
  // one id per token when the previous-tag feature is on (kNoTag for step 0 /
  // the neutral pass).
  std::vector<Var> emissions(Graph<Real>& g, const PreparedSentence& p,
                             const std::vector<std::size_t>& prev_tag_ids,
                             Real dropout_rate) {
    const std::size_t m = p.size();
    std::vector<std::vector<Var>> branch_rows;
    std::vector<Var> weights;

    auto run_branch = [&](const char* name, bool enabled, const char* weight_name,
                          auto&& fn) {
      if (!enabled) return;
      try {
        branch_rows.push_back(fn());
        weights.push_back(g.param(store_, weight_name));
      } catch (const Error& e) {
        detail::fail(detail::message("branch ", name, ": ", e.what()));
      }
    };

    run_branch("word", cfg_.use_word_emb, "fusion.w1",
               [&] { return branch_word(g, p, dropout_rate); });
    run_branch("sp_clstm", cfg_.use_sp_clstm, "fusion.w2",
               [&] { return branch_sp_clstm(g, p); });
    run_branch("sense", cfg_.use_sense, "fusion.w3",
               [&] { return branch_sense(g, p); });
    run_branch("bigram", cfg_.use_bigram, "fusion.w4",
               [&] { return branch_bigram(g, p); });

    std::vector<Var> fused = fuse(g, branch_rows, weights, m);

    if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kResidual) {
      Var w = g.param(store_, "spell.residual.W");
      Var b = g.param(store_, "spell.residual.b");
      for (std::size_t i = 0; i < m; ++i)
        fused[i] = g.add(fused[i], g.affine(w, spelling_row(g, p, i), b));
    }

    return decode_head(g, p, fused, prev_tag_ids, dropout_rate);
  }

  static constexpr std::size_t kNoTag = std::size_t(-1);

  // Training-time loss: teacher-forced previous tags, batch scaling applied
  // by the caller.
  Var nll(Graph<Real>& g, const PreparedSentence& p, Real dropout_rate) {
    require(p.gold.size() == p.size(), "nll: sentence has no usable gold tags");
    std::vector<std::size_t> prev = teacher_forced_prev(p.gold);
    std::vector<Var> em = emissions(g, p, prev, dropout_rate);
    Var trans = g.param(store_, "crf.trans");
    Var start = g.param(store_, "crf.start");
    Var end = g.param(store_, "crf.end");
    return crf_nll_loss(g, em, trans, start, end, p.gold);
  }

  // Viterbi prediction. With the previous-tag feature on this is the two-pass
  // scheme: a neutral first decode supplies the previous-tag inputs of the
  // second.
  TagSequence predict(const PreparedSentence& p) {
    std::vector<std::size_t> prev(p.size(), kNoTag);
    TagSequence result = decode_once(p, prev);
    if (cfg_.use_prev_tag) {
      std::vector<std::size_t> prev2(p.size(), kNoTag);
      for (std::size_t t = 1; t < p.size(); ++t) prev2[t] = result[t - 1];
      result = decode_once(p, prev2);
    }
    return result;
  }

  CrfParams<Real> crf_values() const {
    CrfParams<Real> crf(tag_count());
    crf.transition = store_.get("crf.trans").value;
    crf.start = store_.get("crf.start").value;
    crf.end = store_.get("crf.end").value;
    if (cfg_.forbid_invalid_transitions) {
      std::vector<std::string> names;
      for (std::size_t i = 0; i < tags_.size(); ++i) names.push_back(tags_.tag(i));
      mask_invalid_bio2_transitions(crf, names);
    }
    return crf;
  }

  std::vector<std::size_t> teacher_forced_prev(const TagSequence& gold) const {
    std::vector<std::size_t> prev(gold.size(), kNoTag);
    for (std::size_t t = 1; t < gold.size(); ++t) prev[t] = gold[t - 1];
    return prev;
  }

  // Sense-table row for a rendered sense token; unseen surfaces use the
  // shared unknown row, out-of-range senses fall back to the word's sense 1.
  std::size_t sense_row(const std::string& surface, std::size_t sense) const {
    auto it = sense_word_index_.find(surface);
    if (it == sense_word_index_.end()) return 0;
    std::size_t k = sense;
    if (k < 1 || k > senses_.max_senses()) k = 1;
    return 1 + it->second * senses_.max_senses() + (k - 1);
  }

 private:
  // -- branches -----------------------------------------------------------------

  std::vector<Var> branch_word(Graph<Real>& g, const PreparedSentence& p,
                               Real dropout_rate) {
    Var table = g.param(store_, "word.table");
    Var char_table;
    BoundLstm char_lstm;
    if (use_char_cw()) {
      char_table = g.param(store_, "char.table");
      char_lstm = bind_lstm(g, store_, char_lstm_);
    }
    const std::size_t m = p.size();
    std::vector<Var> rows(m);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Var> parts{g.row(table, p.word_ids[i])};
      if (use_char_cw())
        parts.push_back(char_word_encoding(g, p.char_ids[i], char_table, char_lstm));
      if (cfg_.use_suffix && cfg_.suffix_placement == Placement::kConcatWord)
        parts.push_back(suffix_row(g, p, i));
      if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kConcatWord)
        parts.push_back(spelling_row(g, p, i));
      Var row = parts.size() == 1 ? parts[0] : g.concat(parts);
      rows[i] = g.dropout(row, dropout_rate);
    }
    return run_branch_stack(g, word_layers_, rows);
  }

  std::vector<Var> branch_sp_clstm(Graph<Real>& g, const PreparedSentence& p) {
    Var table = g.param(store_, cfg_.share_char_table ? "char.table" : "sp.table");
    BoundLstm fwd = bind_lstm(g, store_, sp_fwd_);
    BoundLstm bwd = bind_lstm(g, store_, sp_bwd_);
    std::vector<Var> rows = selective_pickup(g, p.stream_ids, p.stream_starts,
                                             p.stream_ends, fwd, bwd, table);
    if (2 * cfg_.sp_hidden != cfg_.word_dim) {
      Var w = g.param(store_, "sp.proj.W");
      Var b = g.param(store_, "sp.proj.b");
      for (Var& r : rows) r = g.affine(w, r, b);
    }
    return rows;
  }

  std::vector<Var> branch_sense(Graph<Real>& g, const PreparedSentence& p) {
    Var table = g.param(store_, "sense.table");
    std::vector<Var> rows(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) rows[i] = g.row(table, p.sense_ids[i]);
    return run_branch_stack(g, sense_layers_, rows);
  }

  std::vector<Var> branch_bigram(Graph<Real>& g, const PreparedSentence& p) {
    Var table = g.param(store_, "bigram.table");
    Var kernel = g.param(store_, "bigram.kernel");
    std::vector<Var> padded(p.padded_word_ids.size());
    for (std::size_t i = 0; i < padded.size(); ++i)
      padded[i] = g.row(table, p.padded_word_ids[i]);
    std::vector<Var> rows = bigram_conv(g, padded, kernel);
    return run_branch_stack(g, bigram_layers_, rows);
  }

  // O = sum_i w_i * O^i over the enabled branches.
  std::vector<Var> fuse(Graph<Real>& g, const std::vector<std::vector<Var>>& branches,
                        const std::vector<Var>& weights, std::size_t m) {
    require(!branches.empty(), "fuse: no branch outputs");
    for (const auto& rows : branches)
      require(rows.size() == m, "fuse: branch row count mismatch");
    std::vector<Var> out(m);
    for (std::size_t i = 0; i < m; ++i) {
      Var acc = g.scale_by(branches[0][i], weights[0]);
      for (std::size_t bidx = 1; bidx < branches.size(); ++bidx)
        acc = g.add(acc, g.scale_by(branches[bidx][i], weights[bidx]));
      out[i] = acc;
    }
    return out;
  }

  // Unidirectional LSTM over the fused trunk, tanh squash, then an FC from
  // [T || CO-placed features || previous-tag embedding] to tag scores.
  std::vector<Var> decode_head(Graph<Real>& g, const PreparedSentence& p,
                               const std::vector<Var>& fused,
                               const std::vector<std::size_t>& prev_tag_ids,
                               Real dropout_rate) {
    const std::size_t m = fused.size();
    BoundLstm lstm = bind_lstm(g, store_, head_lstm_);
    Var fc_w = g.param(store_, "head.fc.W");
    Var fc_b = g.param(store_, "head.fc.b");
    Var tag_table;
    if (cfg_.use_prev_tag) {
      require(prev_tag_ids.size() == m, "decode head: previous-tag inputs missing");
      tag_table = g.param(store_, "head.tag_table");
    }
    Var char_table;
    BoundLstm char_lstm;
    if (use_char_co()) {
      char_table = g.param(store_, "char.table");
      char_lstm = bind_lstm(g, store_, char_lstm_);
    }

    std::vector<Var> out(m);
    LstmState state = lstm_initial_state(g, lstm);
    for (std::size_t t = 0; t < m; ++t) {
      state = lstm_step(g, lstm, fused[t], state);
      Var squashed = g.dropout(g.tanh_(state.h), dropout_rate);
      std::vector<Var> parts{squashed};
      if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kConcatOutput)
        parts.push_back(spelling_row(g, p, t));
      if (cfg_.use_suffix && cfg_.suffix_placement == Placement::kConcatOutput)
        parts.push_back(suffix_row(g, p, t));
      if (use_char_co())
        parts.push_back(char_word_encoding(g, p.char_ids[t], char_table, char_lstm));
      if (cfg_.use_prev_tag) {
        std::size_t id = prev_tag_ids[t] == kNoTag ? tag_count() : prev_tag_ids[t];
        parts.push_back(g.row(tag_table, id));
      }
      Var fc_in = parts.size() == 1 ? parts[0] : g.concat(parts);
      out[t] = g.affine(fc_w, fc_in, fc_b);
    }
    return out;
  }

  TagSequence decode_once(const PreparedSentence& p,
                          const std::vector<std::size_t>& prev_tag_ids) {
    Graph<Real> g(Mode::kEval);
    std::vector<Var> em = emissions(g, p, prev_tag_ids, Real(0));
    Tensor<Real> values(Shape{p.size(), tag_count()});
    for (std::size_t t = 0; t < p.size(); ++t) {
      const auto& row = g.value(em[t]);
      for (std::size_t j = 0; j < tag_count(); ++j) values.at(t, j) = row.at(j);
    }
    return viterbi_decode(values, crf_values()).first;
  }

  // -- helpers ------------------------------------------------------------------

  bool use_char_cw() const {
    return cfg_.use_char_emb && cfg_.char_placement == Placement::kConcatWord;
  }
  bool use_char_co() const {
    return cfg_.use_char_emb && cfg_.char_placement == Placement::kConcatOutput;
  }

  Var spelling_row(Graph<Real>& g, const PreparedSentence& p, std::size_t i) {
    Tensor<Real> t(Shape{kSpellingFeatureCount});
    for (std::size_t j = 0; j < kSpellingFeatureCount; ++j)
      t.at(j) = Real(p.spelling[i][j]);
    return g.constant(std::move(t));
  }

  Var suffix_row(Graph<Real>& g, const PreparedSentence& p, std::size_t i) {
    Tensor<Real> t(Shape{kSuffixCount});
    for (std::size_t j = 0; j < kSuffixCount; ++j) t.at(j) = Real(p.suffix[i][j]);
    return g.constant(std::move(t));
  }

  std::vector<Var> run_branch_stack(Graph<Real>& g,
                                    const std::vector<std::pair<LstmSpec, LstmSpec>>& layers,
                                    std::vector<Var> rows) {
    for (const auto& [fwd_spec, bwd_spec] : layers) {
      BoundLstm fwd = bind_lstm(g, store_, fwd_spec);
      BoundLstm bwd = bind_lstm(g, store_, bwd_spec);
      rows = run_blstm(g, fwd, bwd, rows);
    }
    return rows;
  }

  void register_branch_stack(std::vector<std::pair<LstmSpec, LstmSpec>>& layers,
                             const std::string& prefix, std::size_t input_size,
                             Rng& rng) {
    const std::size_t hidden = cfg_.word_dim / 2;
    std::size_t in = input_size;
    for (std::size_t l = 0; l < cfg_.lstm_layers; ++l) {
      std::string base = prefix + ".l" + std::to_string(l);
      layers.emplace_back(register_lstm(store_, base + ".fwd", in, hidden, rng),
                          register_lstm(store_, base + ".bwd", in, hidden, rng));
      in = cfg_.word_dim;
    }
  }

  void register_params(Rng& rng, const Tensor<Real>* pretrained_word) {
    const std::size_t d = cfg_.word_dim;
    auto table_init = [&](std::size_t rows, std::size_t dim) {
      Real bound = Real(0.5) / static_cast<Real>(dim);
      Tensor<Real> t = Tensor<Real>::uniform(Shape{rows, dim}, -bound, bound, rng);
      for (std::size_t j = 0; j < dim; ++j) t.at(Vocab::kPad, j) = 0;
      return t;
    };

    if (cfg_.use_word_emb) {
      if (pretrained_word) {
        require(pretrained_word->shape == Shape{vocab_.size(), d},
                "model: pretrained matrix is ", shape_str(pretrained_word->shape),
                ", expected ", shape_str(Shape{vocab_.size(), d}));
        store_.add("word.table", *pretrained_word);
      } else {
        store_.add("word.table", table_init(vocab_.size(), d));
      }
      std::size_t in = d;
      if (use_char_cw()) in += cfg_.char_hidden;
      if (cfg_.use_suffix && cfg_.suffix_placement == Placement::kConcatWord)
        in += kSuffixCount;
      if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kConcatWord)
        in += kSpellingFeatureCount;
      register_branch_stack(word_layers_, "word.blstm", in, rng);
    }

    if (cfg_.use_char_emb) {
      store_.add("char.table", table_init(chars_.size(), cfg_.char_dim));
      char_lstm_ = register_lstm(store_, "char.lstm", cfg_.char_dim,
                                 cfg_.char_hidden, rng);
    }

    if (cfg_.use_sp_clstm) {
      if (cfg_.share_char_table) {
        require(cfg_.use_char_emb, "model: shared char table needs use_char_emb");
      } else {
        store_.add("sp.table", table_init(chars_.size(), cfg_.char_dim));
      }
      sp_fwd_ = register_lstm(store_, "sp.blstm.fwd", cfg_.char_dim, cfg_.sp_hidden, rng);
      sp_bwd_ = register_lstm(store_, "sp.blstm.bwd", cfg_.char_dim, cfg_.sp_hidden, rng);
      if (2 * cfg_.sp_hidden != d) {
        Real bound = static_cast<Real>(std::sqrt(1.0 / double(2 * cfg_.sp_hidden)));
        store_.add("sp.proj.W", Tensor<Real>::uniform(Shape{d, 2 * cfg_.sp_hidden},
                                                      -bound, bound, rng));
        store_.add("sp.proj.b", Tensor<Real>::zeros(Shape{d}));
      }
    }

    if (cfg_.use_sense) {
      // Row 0 is the unknown-word row; word i sense k sits at 1 + i*K + (k-1).
      const std::size_t K = senses_.max_senses();
      const std::size_t ds = senses_.dim();
      require(K >= 1 && ds >= 1, "model: sense branch enabled with empty inventory");
      for (std::size_t i = 0; i < senses_.words().size(); ++i)
        sense_word_index_[senses_.words()[i]] = i;
      Tensor<Real> table(Shape{1 + senses_.word_count() * K, ds});
      Real bound = Real(0.5) / static_cast<Real>(ds);
      for (std::size_t j = 0; j < ds; ++j)
        table.at(0, j) = static_cast<Real>(rng.uniform(-bound, bound));
      for (std::size_t i = 0; i < senses_.word_count(); ++i) {
        const auto& e = senses_.entry(senses_.words()[i]);
        for (std::size_t k = 0; k < K; ++k)
          for (std::size_t j = 0; j < ds; ++j)
            table.at(1 + i * K + k, j) = e.senses.at(k, j);
      }
      store_.add("sense.table", std::move(table));
      register_branch_stack(sense_layers_, "sense.blstm", ds, rng);
    }

    if (cfg_.use_bigram) {
      store_.add("bigram.table", table_init(vocab_.size(), d));
      register_bigram_kernel(store_, "bigram.kernel", d, rng);
      register_branch_stack(bigram_layers_, "bigram.blstm", d, rng);
    }

    if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kResidual) {
      Real bound = static_cast<Real>(std::sqrt(1.0 / double(kSpellingFeatureCount)));
      store_.add("spell.residual.W",
                 Tensor<Real>::uniform(Shape{d, kSpellingFeatureCount}, -bound, bound, rng));
      store_.add("spell.residual.b", Tensor<Real>::zeros(Shape{d}));
    }

    head_lstm_ = register_lstm(store_, "head.lstm", d, cfg_.head_hidden, rng);
    std::size_t fc_in = cfg_.head_hidden;
    if (cfg_.use_spelling && cfg_.spelling_placement == Placement::kConcatOutput)
      fc_in += kSpellingFeatureCount;
    if (cfg_.use_suffix && cfg_.suffix_placement == Placement::kConcatOutput)
      fc_in += kSuffixCount;
    if (use_char_co()) fc_in += cfg_.char_hidden;
    if (cfg_.use_prev_tag) {
      fc_in += cfg_.tag_embed_dim;
      Real bound = Real(0.5) / static_cast<Real>(cfg_.tag_embed_dim);
      store_.add("head.tag_table",
                 Tensor<Real>::uniform(Shape{tag_count() + 1, cfg_.tag_embed_dim},
                                       -bound, bound, rng));
    }
    {
      Real bound = static_cast<Real>(std::sqrt(1.0 / double(fc_in)));
      store_.add("head.fc.W",
                 Tensor<Real>::uniform(Shape{tag_count(), fc_in}, -bound, bound, rng));
      store_.add("head.fc.b", Tensor<Real>::zeros(Shape{tag_count()}));
    }

    // Fusion scalars, one per enabled branch, initialized at 1.
    if (cfg_.use_word_emb) store_.add("fusion.w1", Tensor<Real>::scalar(1));
    if (cfg_.use_sp_clstm) store_.add("fusion.w2", Tensor<Real>::scalar(1));
    if (cfg_.use_sense) store_.add("fusion.w3", Tensor<Real>::scalar(1));
    if (cfg_.use_bigram) store_.add("fusion.w4", Tensor<Real>::scalar(1));

    store_.add("crf.trans", Tensor<Real>::zeros(Shape{tag_count(), tag_count()}));
    store_.add("crf.start", Tensor<Real>::zeros(Shape{tag_count()}));
    store_.add("crf.end", Tensor<Real>::zeros(Shape{tag_count()}));
  }

  ModelConfig cfg_;
  Vocab vocab_;
  Vocab chars_;
  TagSet tags_;
  SuffixInventory suffixes_;
  SenseInventory<Real> senses_;
  std::unordered_map<std::string, std::size_t> sense_word_index_;
  ParamStore<Real> store_;

  std::vector<std::pair<LstmSpec, LstmSpec>> word_layers_, sense_layers_,
      bigram_layers_;
  LstmSpec char_lstm_, sp_fwd_, sp_bwd_, head_lstm_;
};

}  // namespace seqlab
