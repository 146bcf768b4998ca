#pragma once

#include <chrono>
#include <mutex>
#include <thread>
#include <vector>

#include "seqlab/batching.hpp"
#include "seqlab/metrics.hpp"
#include "seqlab/optim.hpp"
#include "seqlab/run_config.hpp"
#include "seqlab/tagger.hpp"

namespace seqlab {

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0;  // mean nll per sentence
  double learning_rate = 0;
  EvalReport eval;
  double metric = 0;
  double seconds = 0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  std::string best_checkpoint;  // serialized bytes of the best-metric epoch
  double best_metric = 0;
  std::size_t best_epoch = 0;
};

// Deterministic split for corpora that ship without a dev set: seeded
// shuffle, last `fraction` of train becomes validation.
inline std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>>
carve_validation(const std::vector<LabeledSentence>& train, double fraction,
                 std::uint64_t seed) {
  require(fraction > 0 && fraction < 1, "carve_validation: fraction in (0,1)");
  Rng rng(seed);
  std::vector<std::size_t> order = rng.permutation(train.size());
  std::size_t n_valid = std::max<std::size_t>(1, std::size_t(double(train.size()) * fraction));
  require(n_valid < train.size(), "carve_validation: corpus too small to split");
  std::pair<std::vector<LabeledSentence>, std::vector<LabeledSentence>> out;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i + n_valid < order.size())
      out.first.push_back(train[order[i]]);
    else
      out.second.push_back(train[order[i]]);
  }
  return out;
}

template <class Real>
EvalReport evaluate_model(TaggerModel<Real>& model,
                          const std::vector<PreparedSentence>& prepared,
                          const std::vector<std::vector<std::string>>& gold,
                          bool span_task) {
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::vector<std::string>> pred;
  pred.reserve(prepared.size());
  for (const auto& p : prepared)
    pred.push_back(model.tags().decode(model.predict(p)));

  EvalReport report;
  if (span_task) {
    report = evaluate_span_f1(pred, gold);
  } else {
    std::size_t hits = 0, total = 0;
    for (std::size_t s = 0; s < pred.size(); ++s) {
      require(pred[s].size() == gold[s].size(), "evaluate: length mismatch");
      total += pred[s].size();
      for (std::size_t i = 0; i < pred[s].size(); ++i)
        if (pred[s][i] == gold[s][i]) ++hits;
    }
    report.token_count = total;
    report.correct_tokens = hits;
    report.token_accuracy = total == 0 ? 0.0 : double(hits) / double(total);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c,
                              std::uint64_t d) {
  std::uint64_t x = a * 0x9E3779B97F4A7C15ull ^ b * 0xC2B2AE3D27D4EB4Full ^
                    c * 0x165667B19E3779F9ull ^ d;
  x ^= x >> 29;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 32;
  return x;
}

}  // namespace detail

// Epoch loop: shuffle, batch, forward, CRF nll averaged per batch, backward,
// global-norm clip, optimizer step, validation eval; keeps the best-metric
// checkpoint and stops after `patience` epochs without improvement.
// Single-threaded runs are bitwise deterministic given the seed; threads > 1
// merges per-sentence gradients by summation in completion order.
template <class Real>
TrainResult train_model(TaggerModel<Real>& model,
                        const std::vector<LabeledSentence>& train,
                        const std::vector<LabeledSentence>& valid,
                        const RunConfig& run) {
  run.optim.validate();
  require(!train.empty(), "train: empty training set");

  std::vector<PreparedSentence> prepared;
  prepared.reserve(train.size());
  for (const auto& s : train) {
    PreparedSentence p = model.prepare(s);
    require(p.gold.size() == p.size(), "train: sentence with unknown gold tags");
    prepared.push_back(std::move(p));
  }
  std::vector<PreparedSentence> prepared_valid;
  std::vector<std::vector<std::string>> gold_valid;
  for (const auto& s : valid) {
    prepared_valid.push_back(model.prepare(s));
    gold_valid.push_back(run.span_task() ? to_bio2(s.tags) : s.tags);
  }

  auto& store = model.params();
  const Real dropout = static_cast<Real>(run.optim.dropout);
  const Real clip = static_cast<Real>(run.optim.clip_norm);
  std::size_t adam_steps = 0;

  TrainResult result;
  result.best_checkpoint = checkpoint_bytes(store);
  result.best_metric = -1;
  std::size_t since_best = 0;

  for (std::size_t epoch = 0; epoch < run.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    auto batches = make_batches(prepared.size(), run.batch_size,
                                detail::mix_seed(run.seed, 1, epoch, 0));
    double loss_sum = 0;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto& batch = batches[b];
      store.zero_grads();
      const Real batch_scale = Real(1) / static_cast<Real>(batch.size());

      auto run_sentence = [&](std::size_t idx, double& local_loss,
                              std::mutex* merge_lock) {
        Graph<Real> g(Mode::kTrain, detail::mix_seed(run.seed, 2, epoch, idx));
        Var loss = model.nll(g, prepared[idx], dropout);
        local_loss += double(g.value(loss).value());
        Var scaled = g.scale(loss, batch_scale);
        g.backward_deferred(scaled);
        if (merge_lock) {
          std::lock_guard<std::mutex> lock(*merge_lock);
          g.flush_param_grads();
        } else {
          g.flush_param_grads();
        }
      };

      try {
        if (run.threads <= 1) {
          for (std::size_t idx : batch) run_sentence(idx, loss_sum, nullptr);
        } else {
          std::mutex merge_lock;
          std::vector<double> losses(run.threads, 0);
          std::vector<std::thread> workers;
          std::exception_ptr failure;
          std::mutex failure_lock;
          for (std::size_t w = 0; w < run.threads; ++w) {
            workers.emplace_back([&, w]() {
              try {
                for (std::size_t i = w; i < batch.size(); i += run.threads)
                  run_sentence(batch[i], losses[w], &merge_lock);
              } catch (...) {
                std::lock_guard<std::mutex> lock(failure_lock);
                if (!failure) failure = std::current_exception();
              }
            });
          }
          for (auto& t : workers) t.join();
          if (failure) std::rethrow_exception(failure);
          for (double l : losses) loss_sum += l;
        }
      } catch (const Error& e) {
        detail::fail(detail::message("train: epoch ", epoch, ", batch ", b, ": ",
                                     e.what()));
      }

      clip_global_norm(store, clip);
      if (run.optim.kind == OptimizerKind::kSgd)
        sgd_step(store, run.optim, epoch);
      else
        adam_step(store, run.optim, ++adam_steps);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / double(prepared.size());
    log.learning_rate =
        run.optim.kind == OptimizerKind::kSgd
            ? decayed_learning_rate(run.optim.learning_rate, run.optim.lr_decay, epoch)
            : run.optim.learning_rate;
    if (!prepared_valid.empty()) {
      log.eval = evaluate_model(model, prepared_valid, gold_valid, run.span_task());
      log.metric = run.span_task() ? log.eval.f1 : log.eval.token_accuracy;
    } else {
      log.metric = -log.train_loss;  // fall back to loss when no dev set exists
    }
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(log);

    if (log.metric > result.best_metric) {
      result.best_metric = log.metric;
      result.best_epoch = epoch;
      result.best_checkpoint = checkpoint_bytes(store);
      since_best = 0;
    } else if (++since_best > run.patience) {
      break;
    }
  }
  return result;
}

}  // namespace seqlab
