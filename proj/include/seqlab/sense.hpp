#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "seqlab/conll.hpp"
#include "seqlab/param_store.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/tensor.hpp"

namespace seqlab {

// Stick-breaking construction: the prior of sense k is the k-th piece of the
// unit stick, beta_k * prod_{r<k} (1 - beta_r). k is 1-based.
template <class Real>
Real stick_breaking_prior(const std::vector<Real>& betas, std::size_t k) {
  require(k >= 1 && k <= betas.size(), "stick breaking: sense ", k,
          " out of range 1..", betas.size());
  Real p = 1;
  for (std::size_t r = 0; r + 1 < k; ++r) p *= Real(1) - betas[r];
  return betas[k - 1] * p;
}

struct SenseTaggedToken {
  std::string surface;
  std::size_t sense = 1;  // 1-based

  std::string rendered() const { return surface + "_" + std::to_string(sense); }
};

// Split on the last underscore; "apple_2" -> ("apple", 2).
inline SenseTaggedToken parse_sense_token(const std::string& rendered) {
  auto pos = rendered.rfind('_');
  require(pos != std::string::npos && pos + 1 < rendered.size(),
          "not a sense-tagged token: '", rendered, "'");
  std::size_t k = 0;
  for (std::size_t i = pos + 1; i < rendered.size(); ++i) {
    char c = rendered[i];
    require(c >= '0' && c <= '9', "not a sense-tagged token: '", rendered, "'");
    k = k * 10 + std::size_t(c - '0');
  }
  require(k >= 1, "sense index must be >= 1 in '", rendered, "'");
  return {rendered.substr(0, pos), k};
}

struct SenseTrainConfig {
  std::size_t max_senses = 5;  // truncation K
  std::size_t dim = 32;        // d_s
  std::size_t window = 5;
  std::size_t epochs = 10;
  double alpha = 0.1;              // sense-growth control
  double new_sense_prior = 0.1;    // prior assigned to a not-yet-used slot
  double new_sense_cosine = 0.3;   // trigger threshold
  std::size_t negatives = 5;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  // Compatibility knob from the reference hyper-parameter sheet; -1 means no
  // manual boost of the first sense, the only behaviour implemented.
  double first_sense_weight = -1;

  void validate() const {
    require(first_sense_weight == -1,
            "sense training: only first_sense_weight = -1 (no boost) is supported");
    require(window >= 1, "sense training: window must be >= 1");
    require(max_senses >= 1, "sense training: K must be >= 1");
    require(dim >= 1, "sense training: dim must be >= 1");
    require(alpha > 0, "sense training: alpha must be > 0");
  }
};

// Per-word sense vectors under a truncated stick-breaking prior, the word's
// context (output) vector, and assignment counts from the last hard-EM pass.
template <class Real>
class SenseInventory {
 public:
  struct Entry {
    Tensor<Real> senses;             // K x d
    Tensor<Real> context;            // d
    std::vector<Real> betas;         // K, each in (0,1)
    std::vector<std::size_t> counts; // K, last-epoch assignments
  };

  SenseInventory() = default;
  SenseInventory(std::size_t max_senses, std::size_t dim, double alpha,
                 std::size_t window)
      : max_senses_(max_senses), dim_(dim), alpha_(alpha), window_(window) {}

  std::size_t max_senses() const { return max_senses_; }
  std::size_t dim() const { return dim_; }
  double alpha() const { return alpha_; }
  std::size_t window() const { return window_; }
  std::size_t word_count() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  bool contains(const std::string& word) const { return index_.count(word) != 0; }

  Entry& entry(const std::string& word) {
    auto it = index_.find(word);
    require(it != index_.end(), "sense inventory: unknown word '", word, "'");
    return entries_[it->second];
  }
  const Entry& entry(const std::string& word) const {
    return const_cast<SenseInventory*>(this)->entry(word);
  }

  Entry& add_word(const std::string& word, Rng& rng) {
    require(!contains(word), "sense inventory: word '", word, "' added twice");
    Entry e;
    Real bound = Real(0.5) / static_cast<Real>(dim_);
    e.senses = Tensor<Real>::uniform(Shape{max_senses_, dim_}, -bound, bound, rng);
    e.context = Tensor<Real>::uniform(Shape{dim_}, -bound, bound, rng);
    e.betas.assign(max_senses_, Real(0.5));
    e.counts.assign(max_senses_, 0);
    index_[word] = entries_.size();
    entries_.push_back(std::move(e));
    words_.push_back(word);
    return entries_.back();
  }

  // Senses assigned at least once; sense 1 is always live.
  std::size_t active_senses(const Entry& e) const {
    std::size_t n = 1;
    for (std::size_t k = 1; k < max_senses_; ++k)
      if (e.counts[k] > 0) n = k + 1;
    return n;
  }

  // argmax_k prior(k) * prod_c sigma(s_k . ctx_c); unknown words and ties
  // resolve to the smallest index.
  std::size_t disambiguate(const std::string& word,
                           const std::vector<std::string>& context) const {
    auto it = index_.find(word);
    if (it == index_.end()) return 1;
    const Entry& e = entries_[it->second];
    std::size_t live = active_senses(e);
    std::size_t best_k = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k <= live; ++k) {
      double score = std::log(double(stick_breaking_prior(e.betas, k)));
      for (const auto& c : context) {
        auto cit = index_.find(c);
        if (cit == index_.end()) continue;
        double dot = dot_with_sense(e, k - 1, entries_[cit->second].context);
        score += log_sigmoid(dot);
      }
      if (score > best) {
        best = score;
        best_k = k;
      }
    }
    return best_k;
  }

  // -- serialization --------------------------------------------------------
  // Same layout rules as checkpoints: little-endian, length-prefixed names.

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    require(os.good(), "cannot open sense inventory for writing: ", path);
    os.write("SLSI", 4);
    io::put_u32(os, 1);  // format version
    io::put_u8(os, sizeof(Real));
    io::put_u64(os, words_.size());
    io::put_u32(os, static_cast<std::uint32_t>(max_senses_));
    io::put_u64(os, dim_);
    io::put_real(os, Real(alpha_));
    io::put_u64(os, window_);
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const Entry& e = entries_[i];
      io::put_string(os, words_[i]);
      for (Real b : e.betas) io::put_real(os, b);
      io::put_tensor(os, e.senses);
      io::put_tensor(os, e.context);
      for (std::size_t c : e.counts) io::put_u64(os, c);
    }
    require(os.good(), "sense inventory write failed: ", path);
  }

  static SenseInventory load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    require(is.good(), "cannot open sense inventory: ", path);
    char magic[4];
    is.read(magic, 4);
    require(is.gcount() == 4 && std::string(magic, 4) == "SLSI",
            "sense inventory: bad magic in ", path);
    std::uint32_t version = io::get_u32(is);
    require(version == 1, "sense inventory: unsupported version ", version);
    std::uint8_t width = io::get_u8(is);
    require(width == sizeof(Real), "sense inventory: precision mismatch (file ",
            int(width) * 8, "-bit)");
    std::uint64_t n_words = io::get_u64(is);
    std::uint32_t k = io::get_u32(is);
    std::uint64_t dim = io::get_u64(is);
    Real alpha;
    io::get_real(is, alpha);
    std::uint64_t window = io::get_u64(is);
    SenseInventory inv(k, dim, double(alpha), window);
    for (std::uint64_t i = 0; i < n_words; ++i) {
      std::string word = io::get_string(is);
      Entry e;
      e.betas.resize(k);
      for (Real& b : e.betas) io::get_real(is, b);
      e.senses = io::get_tensor<Real>(is);
      e.context = io::get_tensor<Real>(is);
      require(e.senses.shape == Shape{k, dim} && e.context.shape == Shape{dim},
              "sense inventory: bad vector shapes for '", word, "'");
      e.counts.resize(k);
      for (std::size_t& c : e.counts) c = io::get_u64(is);
      inv.index_[word] = inv.entries_.size();
      inv.entries_.push_back(std::move(e));
      inv.words_.push_back(word);
    }
    return inv;
  }

  static double log_sigmoid(double x) {
    // log(1/(1+e^-x)) without overflow on either tail
    return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
  }

  double dot_with_sense(const Entry& e, std::size_t row,
                        const Tensor<Real>& ctx) const {
    double s = 0;
    for (std::size_t j = 0; j < dim_; ++j)
      s += double(e.senses.at(row, j)) * double(ctx.at(j));
    return s;
  }

 private:
  std::size_t max_senses_ = 0;
  std::size_t dim_ = 0;
  double alpha_ = 0.1;
  std::size_t window_ = 5;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Entry> entries_;
  std::vector<std::string> words_;
};

namespace detail {

inline double sigmoid_double(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// One positive/negative skip-gram-with-negative-sampling update in place.
template <class Real>
void sgns_update(Real* sense, Real* context, std::size_t d, Real lr, bool positive) {
  double dot = 0;
  for (std::size_t j = 0; j < d; ++j) dot += double(sense[j]) * double(context[j]);
  double g = sigmoid_double(dot) - (positive ? 1.0 : 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    Real ds = static_cast<Real>(g) * context[j];
    Real dc = static_cast<Real>(g) * sense[j];
    sense[j] -= lr * ds;
    context[j] -= lr * dc;
  }
}

template <class Real>
double sense_cosine(const typename SenseInventory<Real>::Entry& e, std::size_t row,
                    const std::vector<Real>& v) {
  double num = 0, ns = 0, nv = 0;
  std::size_t d = v.size();
  for (std::size_t j = 0; j < d; ++j) {
    double a = double(e.senses.data[row * d + j]);
    double b = double(v[j]);
    num += a * b;
    ns += a * a;
    nv += b * b;
  }
  if (ns == 0 || nv == 0) return 1.0;  // undefined: treat as aligned, no trigger
  return num / (std::sqrt(ns) * std::sqrt(nv));
}

// Frequency-proportional sampler over word ids.
class UnigramSampler {
 public:
  explicit UnigramSampler(const std::vector<std::size_t>& freqs) {
    cumulative_.resize(freqs.size());
    std::size_t run = 0;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      run += freqs[i];
      cumulative_[i] = run;
    }
    total_ = run;
  }
  std::size_t draw(Rng& rng) const {
    std::size_t x = static_cast<std::size_t>(rng.below(total_)) + 1;
    return std::size_t(std::lower_bound(cumulative_.begin(), cumulative_.end(), x) -
                       cumulative_.begin());
  }

 private:
  std::vector<std::size_t> cumulative_;
  std::size_t total_ = 0;
};

}  // namespace detail

// Truncated hard-EM multi-sense skip-gram. E-step assigns each occurrence the
// sense maximizing prior * context likelihood (negative-sampling form); a
// fresh slot joins the comparison at prior new_sense_prior once the context
// signature drifts below the cosine threshold against all live senses.
// M-step runs SGD on the assigned sense and context vectors; stick weights
// are refreshed from assignment counts with Beta(1, alpha) smoothing.
template <class Real>
SenseInventory<Real> train_senses(const std::vector<LabeledSentence>& corpus,
                                  const SenseTrainConfig& cfg) {
  cfg.validate();
  using Inventory = SenseInventory<Real>;
  using Entry = typename Inventory::Entry;

  // Deterministic word order: frequency desc, then token asc.
  std::map<std::string, std::size_t> freq;
  for (const auto& s : corpus)
    for (const auto& tok : s.tokens) ++freq[tok];
  std::vector<std::pair<std::string, std::size_t>> order(freq.begin(), freq.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Inventory inv(cfg.max_senses, cfg.dim, cfg.alpha, cfg.window);
  Rng rng(cfg.seed);
  std::vector<std::size_t> freqs;
  std::unordered_map<std::string, std::size_t> word_id;
  for (const auto& [word, count] : order) {
    inv.add_word(word, rng);
    word_id[word] = freqs.size();
    freqs.push_back(count);
  }
  if (inv.word_count() == 0) return inv;

  detail::UnigramSampler sampler(freqs);
  const std::size_t K = cfg.max_senses;
  const std::size_t d = cfg.dim;
  const Real lr = static_cast<Real>(cfg.learning_rate);
  const double log_new_prior = std::log(cfg.new_sense_prior);

  // id -> entry lookups flattened once
  std::vector<Entry*> entry_of(inv.word_count());
  std::vector<std::string> word_of(inv.word_count());
  for (const auto& [word, id] : word_id) {
    entry_of[id] = &inv.entry(word);
    word_of[id] = word;
  }

  // Corpus as id sequences.
  std::vector<std::vector<std::size_t>> ids;
  ids.reserve(corpus.size());
  for (const auto& s : corpus) {
    std::vector<std::size_t> row;
    row.reserve(s.tokens.size());
    for (const auto& tok : s.tokens) row.push_back(word_id.at(tok));
    ids.push_back(std::move(row));
  }

  std::vector<std::vector<std::size_t>> epoch_counts(
      inv.word_count(), std::vector<std::size_t>(K, 0));
  std::vector<double> sense_score(K);
  std::vector<Real> signature(d);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (auto& row : epoch_counts) std::fill(row.begin(), row.end(), 0);
    Rng shuffle_rng(cfg.seed * 7919 + epoch);
    std::vector<std::size_t> sent_order = shuffle_rng.permutation(ids.size());

    for (std::size_t si : sent_order) {
      const auto& sent = ids[si];
      for (std::size_t pos = 0; pos < sent.size(); ++pos) {
        std::size_t wid = sent[pos];
        Entry& e = *entry_of[wid];

        std::size_t lo = pos >= cfg.window ? pos - cfg.window : 0;
        std::size_t hi = std::min(sent.size(), pos + cfg.window + 1);
        std::vector<std::size_t> context;
        for (std::size_t j = lo; j < hi; ++j)
          if (j != pos) context.push_back(sent[j]);

        // E-step: score live senses.
        std::size_t live = inv.active_senses(e);
        for (std::size_t k = 0; k < live; ++k) {
          double s = std::log(double(stick_breaking_prior(e.betas, k + 1)));
          for (std::size_t cid : context)
            s += Inventory::log_sigmoid(
                inv.dot_with_sense(e, k, entry_of[cid]->context));
          sense_score[k] = s;
        }
        std::size_t candidates = live;

        // New-sense trigger: context signature far from every live sense.
        if (live < K && !context.empty()) {
          std::fill(signature.begin(), signature.end(), Real(0));
          for (std::size_t cid : context)
            for (std::size_t j = 0; j < d; ++j)
              signature[j] += entry_of[cid]->context.at(j);
          double max_cos = -1;
          for (std::size_t k = 0; k < live; ++k)
            max_cos = std::max(max_cos, detail::sense_cosine<Real>(e, k, signature));
          if (max_cos < cfg.new_sense_cosine) {
            double s = log_new_prior;
            for (std::size_t cid : context)
              s += Inventory::log_sigmoid(
                  inv.dot_with_sense(e, live, entry_of[cid]->context));
            sense_score[live] = s;
            candidates = live + 1;
          }
        }

        std::size_t assigned = 0;
        for (std::size_t k = 1; k < candidates; ++k)
          if (sense_score[k] > sense_score[assigned]) assigned = k;
        ++epoch_counts[wid][assigned];

        // M-step: skip-gram negative sampling on the assigned sense.
        Real* sense_row = e.senses.data.data() + assigned * d;
        for (std::size_t cid : context) {
          detail::sgns_update(sense_row, entry_of[cid]->context.data.data(), d, lr,
                              true);
          for (std::size_t neg = 0; neg < cfg.negatives; ++neg) {
            std::size_t nid = sampler.draw(rng);
            if (nid == cid) continue;
            detail::sgns_update(sense_row, entry_of[nid]->context.data.data(), d, lr,
                                false);
          }
        }
      }
    }

    // Stick weights from counts, Beta(1, alpha) smoothing.
    for (std::size_t wid = 0; wid < inv.word_count(); ++wid) {
      Entry& e = *entry_of[wid];
      e.counts = epoch_counts[wid];
      std::size_t tail = 0;
      for (std::size_t k = K; k-- > 0;) {
        std::size_t n_k = e.counts[k];
        e.betas[k] = static_cast<Real>((double(n_k) + 1.0) /
                                       (double(n_k) + double(tail) + 1.0 + cfg.alpha));
        tail += n_k;
      }
    }
  }
  return inv;
}

// Replaces every token with its "surface_k" rendering using window-limited
// context disambiguation; deterministic for a fixed inventory.
template <class Real>
std::vector<LabeledSentence> retag_corpus(const std::vector<LabeledSentence>& sentences,
                                          const SenseInventory<Real>& inventory,
                                          std::size_t window) {
  std::vector<LabeledSentence> out = sentences;
  for (auto& s : out) {
    s.sense_tokens.resize(s.tokens.size());
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      std::size_t lo = i >= window ? i - window : 0;
      std::size_t hi = std::min(s.tokens.size(), i + window + 1);
      std::vector<std::string> context;
      for (std::size_t j = lo; j < hi; ++j)
        if (j != i) context.push_back(s.tokens[j]);
      SenseTaggedToken tagged{s.tokens[i],
                              inventory.disambiguate(s.tokens[i], context)};
      s.sense_tokens[i] = tagged.rendered();
    }
  }
  return out;
}

}  // namespace seqlab
