#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "seqlab/graph.hpp"
#include "seqlab/tensor.hpp"

namespace seqlab {

// Linear-chain CRF potentials: transition[i][j] scores tag j following tag i;
// explicit start/end scores handle sequence boundaries.
template <class Real>
struct CrfParams {
  Tensor<Real> transition;  // c x c
  Tensor<Real> start;       // c
  Tensor<Real> end;         // c

  explicit CrfParams(std::size_t c = 0)
      : transition(Shape{c, c}), start(Shape{c}), end(Shape{c}) {}

  std::size_t tag_count() const { return start.numel(); }

  void validate() const {
    std::size_t c = tag_count();
    require(c >= 1, "crf: needs at least one tag");
    require(transition.rank() == 2 && transition.shape[0] == c &&
                transition.shape[1] == c && end.numel() == c,
            "crf: inconsistent parameter shapes");
    require(transition.finite() && start.finite() && end.finite(),
            "crf: non-finite parameters");
  }
};

using TagSequence = std::vector<std::size_t>;

namespace detail {

template <class Real>
void check_emissions(const Tensor<Real>& emissions, std::size_t c) {
  require(emissions.rank() == 2 && emissions.shape[1] == c,
          "crf: emissions must be m x ", c, ", got ", shape_str(emissions.shape));
  require(emissions.shape[0] >= 1, "crf: empty sequence");
}

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = xs[0];
  for (double x : xs) mx = std::max(mx, x);
  double s = 0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

}  // namespace detail

// start[y0] + sum_t emissions[t][y_t] + sum_{t>=1} A[y_{t-1}][y_t] + end[y_last]
template <class Real>
Real score_sequence(const Tensor<Real>& emissions, const CrfParams<Real>& crf,
                    const TagSequence& tags) {
  const std::size_t c = crf.tag_count();
  detail::check_emissions(emissions, c);
  const std::size_t m = emissions.shape[0];
  require(tags.size() == m, "crf: tag sequence length ", tags.size(),
          " does not match emissions length ", m);
  for (std::size_t t : tags) require(t < c, "crf: tag index ", t, " out of ", c);

  Real score = crf.start.at(tags[0]) + emissions.at(0, tags[0]);
  for (std::size_t t = 1; t < m; ++t)
    score += crf.transition.at(tags[t - 1], tags[t]) + emissions.at(t, tags[t]);
  score += crf.end.at(tags[m - 1]);
  return score;
}

// log sum over all c^m sequences of exp(score), by the forward recursion in
// log space.
template <class Real>
Real log_partition(const Tensor<Real>& emissions, const CrfParams<Real>& crf) {
  const std::size_t c = crf.tag_count();
  detail::check_emissions(emissions, c);
  const std::size_t m = emissions.shape[0];

  std::vector<double> alpha(c), next(c), terms(c);
  for (std::size_t j = 0; j < c; ++j)
    alpha[j] = double(crf.start.at(j)) + double(emissions.at(0, j));
  for (std::size_t t = 1; t < m; ++t) {
    for (std::size_t j = 0; j < c; ++j) {
      for (std::size_t i = 0; i < c; ++i)
        terms[i] = alpha[i] + double(crf.transition.at(i, j));
      next[j] = detail::log_sum_exp(terms) + double(emissions.at(t, j));
    }
    alpha.swap(next);
  }
  for (std::size_t j = 0; j < c; ++j) alpha[j] += double(crf.end.at(j));
  return static_cast<Real>(detail::log_sum_exp(alpha));
}

template <class Real>
Real nll_loss(const Tensor<Real>& emissions, const CrfParams<Real>& crf,
              const TagSequence& gold) {
  return log_partition(emissions, crf) - score_sequence(emissions, crf, gold);
}

// Maximum-score tag sequence. Ties break to the smallest tag index at the
// earliest differing position, which a backward-pointer decode does not
// guarantee; instead a suffix-max table feeds a greedy left-to-right
// reconstruction.
template <class Real>
std::pair<TagSequence, Real> viterbi_decode(const Tensor<Real>& emissions,
                                            const CrfParams<Real>& crf) {
  const std::size_t c = crf.tag_count();
  detail::check_emissions(emissions, c);
  const std::size_t m = emissions.shape[0];

  // suffix[t][j]: best score of the path continuation after emitting at t
  // with tag j (transitions, later emissions, end score).
  std::vector<std::vector<Real>> suffix(m, std::vector<Real>(c));
  for (std::size_t j = 0; j < c; ++j) suffix[m - 1][j] = crf.end.at(j);
  for (std::size_t t = m - 1; t-- > 0;) {
    for (std::size_t j = 0; j < c; ++j) {
      Real best = crf.transition.at(j, 0) + emissions.at(t + 1, 0) + suffix[t + 1][0];
      for (std::size_t k = 1; k < c; ++k) {
        Real v = crf.transition.at(j, k) + emissions.at(t + 1, k) + suffix[t + 1][k];
        if (v > best) best = v;
      }
      suffix[t][j] = best;
    }
  }

  TagSequence tags(m);
  std::size_t prev = 0;
  for (std::size_t t = 0; t < m; ++t) {
    std::size_t best_j = 0;
    Real best = 0;
    for (std::size_t j = 0; j < c; ++j) {
      Real base = t == 0 ? crf.start.at(j) : crf.transition.at(prev, j);
      Real v = base + emissions.at(t, j) + suffix[t][j];
      if (j == 0 || v > best) {
        best = v;
        best_j = j;
      }
    }
    tags[t] = best_j;
    prev = best_j;
  }
  return {tags, score_sequence(emissions, crf, tags)};
}

// Exhaustive distribution over all c^m sequences, in lexicographic order.
// Test oracle; refuses instances past 10^6 sequences.
template <class Real>
std::vector<std::pair<TagSequence, double>> brute_force_distribution(
    const Tensor<Real>& emissions, const CrfParams<Real>& crf) {
  const std::size_t c = crf.tag_count();
  detail::check_emissions(emissions, c);
  const std::size_t m = emissions.shape[0];

  double total = std::pow(double(c), double(m));
  require(total <= 1e6, "brute force: instance too large (", c, "^", m, " sequences)");
  const std::size_t count = static_cast<std::size_t>(total + 0.5);

  std::vector<TagSequence> seqs;
  seqs.reserve(count);
  std::vector<double> scores;
  scores.reserve(count);
  TagSequence seq(m, 0);
  for (std::size_t n = 0; n < count; ++n) {
    seqs.push_back(seq);
    scores.push_back(double(score_sequence(emissions, crf, seq)));
    for (std::size_t t = m; t-- > 0;) {  // lexicographic odometer
      if (++seq[t] < c) break;
      seq[t] = 0;
    }
  }
  double log_z = detail::log_sum_exp(scores);
  std::vector<std::pair<TagSequence, double>> dist;
  dist.reserve(count);
  for (std::size_t n = 0; n < count; ++n)
    dist.emplace_back(std::move(seqs[n]), std::exp(scores[n] - log_z));
  return dist;
}

template <class Real>
TagSequence brute_force_argmax(const Tensor<Real>& emissions,
                               const CrfParams<Real>& crf) {
  auto dist = brute_force_distribution(emissions, crf);
  std::size_t best = 0;
  for (std::size_t n = 1; n < dist.size(); ++n)
    if (dist[n].second > dist[best].second) best = n;
  return dist[best].first;
}

// Optional decode-time hard constraint: I-X may only follow B-X or I-X, and
// no sequence may open with I-X. Applied to a copy of the decode potentials,
// never to the training loss.
template <class Real>
void mask_invalid_bio2_transitions(CrfParams<Real>& crf,
                                   const std::vector<std::string>& tag_names) {
  const Real kForbidden = Real(-1e30);
  require(tag_names.size() == crf.tag_count(), "bio2 mask: tag name count mismatch");
  auto inside_type = [](const std::string& t) -> std::string {
    return t.size() >= 3 && t[0] == 'I' && t[1] == '-' ? t.substr(2) : "";
  };
  auto opens_or_continues = [](const std::string& t, const std::string& type) {
    return t.size() >= 3 && (t[0] == 'B' || t[0] == 'I') && t[1] == '-' &&
           t.substr(2) == type;
  };
  for (std::size_t j = 0; j < tag_names.size(); ++j) {
    std::string type = inside_type(tag_names[j]);
    if (type.empty()) continue;
    crf.start.at(j) = kForbidden;
    for (std::size_t i = 0; i < tag_names.size(); ++i)
      if (!opens_or_continues(tag_names[i], type))
        crf.transition.at(i, j) = kForbidden;
  }
}

// ---------------------------------------------------------------------------
// Graph-recorded versions used by training; emissions arrive as one Var row
// per step and the CRF tensors as param leaves, so gradients flow to both.

template <class Real>
Var crf_score_sequence(Graph<Real>& g, const std::vector<Var>& emission_rows,
                       Var transition, Var start, Var end,
                       const TagSequence& tags) {
  require(!emission_rows.empty(), "crf: empty sequence");
  require(tags.size() == emission_rows.size(), "crf: tag/emission length mismatch");
  const std::size_t m = tags.size();
  Var score = g.add(g.pick(start, tags[0]), g.pick(emission_rows[0], tags[0]));
  for (std::size_t t = 1; t < m; ++t) {
    Var trans = g.pick(g.row(transition, tags[t - 1]), tags[t]);
    score = g.add(score, g.add(trans, g.pick(emission_rows[t], tags[t])));
  }
  return g.add(score, g.pick(end, tags[m - 1]));
}

template <class Real>
Var crf_log_partition(Graph<Real>& g, const std::vector<Var>& emission_rows,
                      Var transition, Var start, Var end) {
  require(!emission_rows.empty(), "crf: empty sequence");
  const std::size_t c = g.value(start).numel();
  Var alpha = g.add(start, emission_rows[0]);
  for (std::size_t t = 1; t < emission_rows.size(); ++t) {
    std::vector<Var> next(c);
    for (std::size_t j = 0; j < c; ++j)
      next[j] = g.logsumexp(g.add(alpha, g.col(transition, j)));
    alpha = g.add(g.concat(next), emission_rows[t]);
  }
  return g.logsumexp(g.add(alpha, end));
}

// log_partition - score(gold); non-negative, minimized by MLE training.
template <class Real>
Var crf_nll_loss(Graph<Real>& g, const std::vector<Var>& emission_rows,
                 Var transition, Var start, Var end, const TagSequence& gold) {
  return g.sub(crf_log_partition(g, emission_rows, transition, start, end),
               crf_score_sequence(g, emission_rows, transition, start, end, gold));
}

}  // namespace seqlab
