#pragma once

#include <cmath>
#include <string>

#include "seqlab/param_store.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/tensor.hpp"

namespace seqlab {

enum class OptimizerKind { kSgd, kAdam };

inline OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "sgd") return OptimizerKind::kSgd;
  if (s == "adam") return OptimizerKind::kAdam;
  require(false, "unknown optimizer '", s, "' (expected sgd or adam)");
  return OptimizerKind::kSgd;
}

struct OptimConfig {
  OptimizerKind kind = OptimizerKind::kSgd;
  double learning_rate = 0.015;
  double momentum = 0.9;
  double weight_decay = 1e-5;
  double lr_decay = 0.05;
  double clip_norm = 5.0;
  double dropout = 0.5;
  // Adam moment constants, conventional defaults.
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    require(learning_rate > 0, "optim: learning rate must be > 0");
    require(momentum >= 0 && momentum < 1, "optim: momentum must be in [0,1)");
    require(dropout >= 0 && dropout < 1, "optim: dropout must be in [0,1)");
    require(clip_norm > 0, "optim: clip norm must be > 0");
    require(lr_decay >= 0, "optim: lr decay must be >= 0");
    require(weight_decay >= 0, "optim: weight decay must be >= 0");
  }
};

// lr_t = lr0 / (1 + decay * epoch); decay applies to SGD only.
inline double decayed_learning_rate(double lr0, double decay, std::size_t epoch) {
  return lr0 / (1.0 + decay * static_cast<double>(epoch));
}

template <class Real>
void sgd_step(ParamStore<Real>& store, const OptimConfig& cfg, std::size_t epoch) {
  const Real lr = static_cast<Real>(
      decayed_learning_rate(cfg.learning_rate, cfg.lr_decay, epoch));
  const Real mu = static_cast<Real>(cfg.momentum);
  const Real wd = static_cast<Real>(cfg.weight_decay);
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& p = store.at(i);
    if (p.velocity.numel() != p.value.numel())
      p.velocity = Tensor<Real>::zeros(p.value.shape);
    for (std::size_t j = 0; j < p.value.numel(); ++j) {
      Real g = p.grad.data[j] + wd * p.value.data[j];
      p.velocity.data[j] = mu * p.velocity.data[j] - lr * g;
      p.value.data[j] += p.velocity.data[j];
    }
  }
}

template <class Real>
void adam_step(ParamStore<Real>& store, const OptimConfig& cfg, std::size_t step_count) {
  require(step_count >= 1, "adam: step count must be >= 1");
  const Real lr = static_cast<Real>(cfg.learning_rate);
  const Real b1 = static_cast<Real>(cfg.adam_beta1);
  const Real b2 = static_cast<Real>(cfg.adam_beta2);
  const Real eps = static_cast<Real>(cfg.adam_eps);
  const Real wd = static_cast<Real>(cfg.weight_decay);
  const Real corr1 =
      Real(1) - static_cast<Real>(std::pow(cfg.adam_beta1, double(step_count)));
  const Real corr2 =
      Real(1) - static_cast<Real>(std::pow(cfg.adam_beta2, double(step_count)));
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& p = store.at(i);
    if (p.moment1.numel() != p.value.numel()) {
      p.moment1 = Tensor<Real>::zeros(p.value.shape);
      p.moment2 = Tensor<Real>::zeros(p.value.shape);
    }
    for (std::size_t j = 0; j < p.value.numel(); ++j) {
      Real g = p.grad.data[j] + wd * p.value.data[j];
      p.moment1.data[j] = b1 * p.moment1.data[j] + (Real(1) - b1) * g;
      p.moment2.data[j] = b2 * p.moment2.data[j] + (Real(1) - b2) * g * g;
      Real mhat = p.moment1.data[j] / corr1;
      Real vhat = p.moment2.data[j] / corr2;
      p.value.data[j] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
  }
}

// Scales all gradients by max_norm / ||g|| when the global L2 norm exceeds
// max_norm; returns the scale applied (1.0 when untouched).
template <class Real>
Real clip_global_norm(ParamStore<Real>& store, Real max_norm) {
  Real sq = 0;
  for (std::size_t i = 0; i < store.size(); ++i)
    sq += l2_norm_squared(store.at(i).grad);
  Real norm = std::sqrt(sq);
  if (norm <= max_norm || norm == Real(0)) return Real(1);
  Real scale = max_norm / norm;
  for (std::size_t i = 0; i < store.size(); ++i)
    for (Real& g : store.at(i).grad.data) g *= scale;
  return scale;
}

// Standalone inverted dropout on a tensor. Train mode masks and rescales by
// 1/(1-rate) so E[output] = input; eval mode is the identity.
template <class Real>
Tensor<Real> dropout_apply(const Tensor<Real>& t, Real rate, Mode mode,
                           std::uint64_t rng_seed) {
  require(rate >= Real(0) && rate < Real(1), "dropout: rate must be in [0,1)");
  if (mode == Mode::kEval || rate == Real(0)) return t;
  Tensor<Real> out = t;
  Rng rng(rng_seed);
  Real keep_scale = Real(1) / (Real(1) - rate);
  for (Real& x : out.data)
    x = rng.uniform() < rate ? Real(0) : x * keep_scale;
  return out;
}

}  // namespace seqlab
