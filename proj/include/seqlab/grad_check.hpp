#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "seqlab/graph.hpp"
#include "seqlab/param_store.hpp"

namespace seqlab {

// Central-difference gradient oracle. make_loss builds a fresh scalar loss
// over the store's current values each call (Graph<Real>& -> Var) and must be
// deterministic; dropout stays off or seed-pinned.
//
// Returns max over coordinates of |analytic - numeric| / max(1, |analytic|).
template <class Real, class LossFn>
double finite_diff_check(ParamStore<Real>& store, const std::string& name,
                         LossFn make_loss, double epsilon) {
  require(epsilon > 0, "finite_diff_check: epsilon must be > 0");
  auto eval_loss = [&]() -> double {
    Graph<Real> g(Mode::kEval);
    Var loss = make_loss(g);
    return static_cast<double>(g.value(loss).value());
  };
  double probe1 = eval_loss();
  double probe2 = eval_loss();
  require(probe1 == probe2,
          "finite_diff_check: loss function non-deterministic between probes");

  store.zero_grads();
  {
    Graph<Real> g(Mode::kEval);
    Var loss = make_loss(g);
    g.backward(loss);
  }
  auto& p = store.get(name);
  Tensor<Real> analytic = p.grad;

  double max_err = 0;
  for (std::size_t j = 0; j < p.value.numel(); ++j) {
    Real saved = p.value.data[j];
    p.value.data[j] = saved + static_cast<Real>(epsilon);
    double f_plus = eval_loss();
    p.value.data[j] = saved - static_cast<Real>(epsilon);
    double f_minus = eval_loss();
    p.value.data[j] = saved;
    double numeric = (f_plus - f_minus) / (2.0 * epsilon);
    double a = static_cast<double>(analytic.data[j]);
    double err = std::abs(a - numeric) / std::max(1.0, std::abs(a));
    max_err = std::max(max_err, err);
  }
  return max_err;
}

// Same check over every registered parameter; 0 when the store is empty.
template <class Real, class LossFn>
double finite_diff_check_all(ParamStore<Real>& store, LossFn make_loss,
                             double epsilon) {
  double max_err = 0;
  for (std::size_t i = 0; i < store.size(); ++i)
    max_err = std::max(max_err, finite_diff_check(store, store.at(i).name,
                                                  make_loss, epsilon));
  return max_err;
}

}  // namespace seqlab
