#pragma once

#include <array>
#include <string>
#include <vector>

#include "seqlab/graph.hpp"
#include "seqlab/param_store.hpp"
#include "seqlab/rng.hpp"

namespace seqlab {

// One direction of an LSTM: input/forget/output/candidate gates, each with
// input weights, recurrent weights, and a bias.
struct LstmSpec {
  std::string prefix;
  std::size_t input_size = 0;
  std::size_t hidden_size = 0;
};

inline constexpr std::array<const char*, 4> kLstmGates = {"i", "f", "o", "g"};

// Weights U(-sqrt(1/h), sqrt(1/h)); biases zero except the forget gate at 1.
template <class Real>
LstmSpec register_lstm(ParamStore<Real>& store, const std::string& prefix,
                       std::size_t input_size, std::size_t hidden_size, Rng& rng) {
  require(input_size >= 1 && hidden_size >= 1, "lstm '", prefix,
          "': sizes must be >= 1");
  const Real bound = static_cast<Real>(std::sqrt(1.0 / double(hidden_size)));
  for (const char* gate : kLstmGates) {
    store.add(prefix + ".Wx" + gate,
              Tensor<Real>::uniform(Shape{hidden_size, input_size}, -bound, bound, rng));
    store.add(prefix + ".Wh" + gate,
              Tensor<Real>::uniform(Shape{hidden_size, hidden_size}, -bound, bound, rng));
    Real bias = gate[0] == 'f' ? Real(1) : Real(0);
    store.add(prefix + ".b" + gate, Tensor<Real>::full(Shape{hidden_size}, bias));
  }
  return LstmSpec{prefix, input_size, hidden_size};
}

// Param leaves fetched once per graph so repeated steps share nodes.
struct BoundLstm {
  std::array<Var, 4> wx, wh, b;
  std::size_t hidden_size = 0;
};

template <class Real>
BoundLstm bind_lstm(Graph<Real>& g, ParamStore<Real>& store, const LstmSpec& spec) {
  BoundLstm bound;
  bound.hidden_size = spec.hidden_size;
  for (std::size_t k = 0; k < kLstmGates.size(); ++k) {
    const char* gate = kLstmGates[k];
    bound.wx[k] = g.param(store, spec.prefix + ".Wx" + gate);
    bound.wh[k] = g.param(store, spec.prefix + ".Wh" + gate);
    bound.b[k] = g.param(store, spec.prefix + ".b" + gate);
  }
  return bound;
}

struct LstmState {
  Var h, c;
};

template <class Real>
LstmState lstm_initial_state(Graph<Real>& g, const BoundLstm& lstm) {
  return {g.zeros(Shape{lstm.hidden_size}), g.zeros(Shape{lstm.hidden_size})};
}

// Standard gate equations: sigmoid gates, tanh candidate and cell output.
template <class Real>
LstmState lstm_step(Graph<Real>& g, const BoundLstm& p, Var x, LstmState s) {
  auto gate = [&](std::size_t k) {
    return g.add(g.add(g.matvec(p.wx[k], x), g.matvec(p.wh[k], s.h)), p.b[k]);
  };
  Var in = g.sigmoid_(gate(0));
  Var forget = g.sigmoid_(gate(1));
  Var out = g.sigmoid_(gate(2));
  Var cand = g.tanh_(gate(3));
  Var c_next = g.add(g.mul(forget, s.c), g.mul(in, cand));
  Var h_next = g.mul(out, g.tanh_(c_next));
  return {h_next, c_next};
}

// Hidden states for every step, scanning left-to-right or right-to-left from
// a zero initial state. Output index t always refers to input row t.
template <class Real>
std::vector<Var> run_lstm(Graph<Real>& g, const BoundLstm& p,
                          const std::vector<Var>& rows, bool reverse = false) {
  require(!rows.empty(), "lstm: empty sequence");
  std::vector<Var> states(rows.size());
  LstmState s = lstm_initial_state(g, p);
  if (!reverse) {
    for (std::size_t t = 0; t < rows.size(); ++t) {
      s = lstm_step(g, p, rows[t], s);
      states[t] = s.h;
    }
  } else {
    for (std::size_t t = rows.size(); t-- > 0;) {
      s = lstm_step(g, p, rows[t], s);
      states[t] = s.h;
    }
  }
  return states;
}

// Row t of the output is [forward state at t || backward state at t].
template <class Real>
std::vector<Var> run_blstm(Graph<Real>& g, const BoundLstm& fwd,
                           const BoundLstm& bwd, const std::vector<Var>& rows) {
  require(!rows.empty(), "blstm: empty sequence");
  std::vector<Var> f = run_lstm(g, fwd, rows, false);
  std::vector<Var> b = run_lstm(g, bwd, rows, true);
  std::vector<Var> out(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) out[t] = g.concat({f[t], b[t]});
  return out;
}

// Character-level word encoding: unidirectional LSTM over the word's
// character embeddings, final hidden state kept.
template <class Real>
Var char_word_encoding(Graph<Real>& g, const std::vector<std::size_t>& char_ids,
                       Var char_table, const BoundLstm& p) {
  require(!char_ids.empty(), "char encoding: empty word");
  LstmState s = lstm_initial_state(g, p);
  for (std::size_t id : char_ids) s = lstm_step(g, p, g.row(char_table, id), s);
  return s.h;
}

// Selective pickup over a flattened character stream: BLSTM over all
// characters of the sentence, then per word the forward state at its last
// character concatenated with the backward state at its first character.
// The forward half therefore only sees characters of words up to and
// including word i, the backward half the rest of the sentence.
template <class Real>
std::vector<Var> selective_pickup(Graph<Real>& g,
                                  const std::vector<std::size_t>& stream_char_ids,
                                  const std::vector<std::size_t>& word_start_positions,
                                  const std::vector<std::size_t>& word_end_positions,
                                  const BoundLstm& fwd, const BoundLstm& bwd,
                                  Var char_table) {
  require(!stream_char_ids.empty(), "selective pickup: empty stream");
  require(word_start_positions.size() == word_end_positions.size(),
          "selective pickup: start/end position count mismatch");
  const std::size_t n = stream_char_ids.size();
  for (std::size_t i = 0; i < word_start_positions.size(); ++i) {
    require(word_start_positions[i] <= word_end_positions[i] &&
                word_end_positions[i] < n,
            "selective pickup: position out of range at word ", i);
    if (i > 0)
      require(word_start_positions[i] > word_end_positions[i - 1],
              "selective pickup: positions not strictly increasing");
  }

  std::vector<Var> rows(n);
  for (std::size_t t = 0; t < n; ++t) rows[t] = g.row(char_table, stream_char_ids[t]);
  std::vector<Var> f = run_lstm(g, fwd, rows, false);
  std::vector<Var> b = run_lstm(g, bwd, rows, true);

  std::vector<Var> out(word_start_positions.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = g.concat({f[word_end_positions[i]], b[word_start_positions[i]]});
  return out;
}

}  // namespace seqlab
