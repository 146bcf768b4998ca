// Command-line surface: train / tag / eval / senses / suffixes.
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "seqlab/seqlab.hpp"
#include "seqlab/synthetic.hpp"

namespace {

using namespace seqlab;

struct TrainArgs {
  std::string config_path;
  std::string checkpoint_override;
};

template <class Real>
int run_train(const RunConfig& run_cfg) {
  BuiltRun<Real> built = build_run<Real>(run_cfg);
  const RunConfig& run = built.run;
  std::printf("train: %zu sentences, valid: %zu, vocab: %zu, tags: %zu\n",
              built.train.size(), built.valid.size(), built.model->vocab().size(),
              built.model->tags().size());

  TrainResult result = train_model(*built.model, built.train, built.valid, run);
  for (const auto& log : result.log) {
    if (run.span_task())
      std::printf("epoch %3zu  loss %.4f  lr %.5f  valid P %.4f R %.4f F1 %.4f  (%.1fs)\n",
                  log.epoch, log.train_loss, log.learning_rate, log.eval.precision,
                  log.eval.recall, log.eval.f1, log.seconds);
    else
      std::printf("epoch %3zu  loss %.4f  lr %.5f  valid acc %.4f  (%.1fs)\n",
                  log.epoch, log.train_loss, log.learning_rate,
                  log.eval.token_accuracy, log.seconds);
  }
  std::printf("best epoch %zu, metric %.4f\n", result.best_epoch, result.best_metric);

  {
    std::ofstream os(run.checkpoint_path, std::ios::binary);
    require(os.good(), "cannot write checkpoint: ", run.checkpoint_path);
    os.write(result.best_checkpoint.data(),
             std::streamsize(result.best_checkpoint.size()));
  }
  std::printf("checkpoint written: %s\n", run.checkpoint_path.c_str());

  if (!built.test.empty()) {
    load_checkpoint(run.checkpoint_path, built.model->params());
    std::vector<PreparedSentence> prepared;
    std::vector<std::vector<std::string>> gold;
    for (const auto& s : built.test) {
      prepared.push_back(built.model->prepare(s));
      gold.push_back(run.span_task() ? to_bio2(s.tags) : s.tags);
    }
    EvalReport report =
        evaluate_model(*built.model, prepared, gold, run.span_task());
    if (run.span_task())
      std::printf("test: acc %.4f  P %.4f  R %.4f  F1 %.4f\n", report.token_accuracy,
                  report.precision, report.recall, report.f1);
    else
      std::printf("test: acc %.4f\n", report.token_accuracy);
  }
  return 0;
}

template <class Real>
int run_tag(const RunConfig& run_cfg, const std::string& checkpoint,
            const std::string& input, const std::string& output) {
  BuiltRun<Real> built = build_run<Real>(run_cfg);
  load_checkpoint(checkpoint, built.model->params());
  tag_file(*built.model, input, output, built.run.token_column);
  std::printf("tagged %s -> %s\n", input.c_str(), output.c_str());
  return 0;
}

// Tag column per file; SIZE_MAX means the last column of each line.
std::vector<std::vector<std::string>> read_tag_column(const std::string& path,
                                                      std::size_t column) {
  std::ifstream is(path);
  require(is.good(), "cannot open: ", path);
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (detail::blank_line(line)) {
      if (!current.empty()) out.push_back(std::move(current)), current = {};
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) continue;
    auto cols = detail::split_ws(line);
    std::size_t c = column == SIZE_MAX ? cols.size() - 1 : column;
    require(cols.size() > c, path, ":", line_no, ": expected at least ", c + 1,
            " columns");
    current.push_back(cols[c]);
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

int run_eval(const std::string& pred_path, const std::string& gold_path,
             const std::string& task, std::size_t pred_column,
             std::size_t gold_column) {
  auto pred = read_tag_column(pred_path, pred_column);
  auto gold = read_tag_column(gold_path, gold_column);
  require(pred.size() == gold.size(), "eval: ", pred.size(),
          " predicted sentences vs ", gold.size(), " gold sentences");

  std::size_t hits = 0, total = 0;
  for (std::size_t s = 0; s < pred.size(); ++s) {
    require(pred[s].size() == gold[s].size(), "eval: sentence ", s,
            " length mismatch");
    total += pred[s].size();
    for (std::size_t i = 0; i < pred[s].size(); ++i)
      if (pred[s][i] == gold[s][i]) ++hits;
  }
  std::printf("accuracy %.4f (%zu/%zu tokens)\n",
              total ? double(hits) / double(total) : 0.0, hits, total);

  if (task == "ner" || task == "chunk") {
    EvalReport report = evaluate_span_f1(pred, gold);
    std::printf("spans: TP %zu FP %zu FN %zu\n", report.tp, report.fp, report.fn);
    std::printf("precision %.4f recall %.4f F1 %.4f\n", report.precision,
                report.recall, report.f1);
    for (const auto& [label, counts] : report.per_label)
      std::printf("  %-10s TP %zu FP %zu FN %zu\n", label.c_str(), counts.tp,
                  counts.fp, counts.fn);
  }
  return 0;
}

int run_senses(const std::string& input, const std::string& output,
               std::size_t token_column, const SenseTrainConfig& cfg,
               const std::string& retag_path) {
  auto sentences = read_conll(input, token_column, std::nullopt);
  for (auto& s : sentences)
    for (auto& tok : s.tokens) tok = normalize_numbers(tok);
  SenseInventory<double> inventory = train_senses<double>(sentences, cfg);
  inventory.save(output);
  std::printf("sense inventory: %zu words, K=%zu, dim=%zu -> %s\n",
              inventory.word_count(), inventory.max_senses(), inventory.dim(),
              output.c_str());
  if (!retag_path.empty()) {
    auto retagged = retag_corpus(sentences, inventory, cfg.window);
    std::ofstream os(retag_path);
    require(os.good(), "cannot open for writing: ", retag_path);
    for (const auto& s : retagged) {
      for (std::size_t i = 0; i < s.size(); ++i)
        os << s.sense_tokens[i] << '\t' << s.tags[i] << '\n';
      os << '\n';
    }
    std::printf("retagged corpus -> %s\n", retag_path.c_str());
  }
  return 0;
}

int run_suffixes(const std::string& input, const std::string& list_path,
                 std::size_t threshold, std::size_t token_column) {
  auto sentences = read_conll(input, token_column, std::nullopt);
  SuffixInventory inv = build_suffix_inventory(sentences, list_path, threshold);
  std::map<std::string, std::size_t> word_freq;
  for (const auto& s : sentences)
    for (const auto& tok : s.tokens) ++word_freq[tok];
  std::printf("top %zu suffixes (threshold %zu):\n", inv.size(), inv.threshold());
  for (std::size_t k = 0; k < inv.size(); ++k) {
    std::size_t occurrences = 0, admitted = 0;
    for (const auto& [word, freq] : word_freq) {
      if (!ends_with_suffix(word, inv.suffixes()[k])) continue;
      occurrences += freq;
      if (inv.admitted(word, k)) ++admitted;
    }
    std::printf("  %2zu. -%-8s %6zu occurrences, %zu admitted words\n", k + 1,
                inv.suffixes()[k].c_str(), occurrences, admitted);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"seqlab: BLSTM-CRF sequence labelling toolkit"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a tagger from a run config");
  std::string config_path, checkpoint_path, input_path, output_path;
  train_cmd->add_option("--config", config_path, "run config file")->required();
  train_cmd->add_option("--checkpoint", checkpoint_path,
                        "override [train] checkpoint path");

  // tag
  auto* tag_cmd = app.add_subcommand("tag", "tag a CoNLL token file");
  std::string tag_config, tag_checkpoint;
  tag_cmd->add_option("--config", tag_config, "run config file")->required();
  tag_cmd->add_option("--checkpoint", tag_checkpoint, "trained checkpoint")->required();
  tag_cmd->add_option("--input", input_path, "input CoNLL file")->required();
  tag_cmd->add_option("--output", output_path, "output file")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "score predictions against gold");
  std::string pred_path, gold_path, eval_task = "pos";
  std::size_t pred_column = SIZE_MAX, gold_column = SIZE_MAX;
  eval_cmd->add_option("--pred", pred_path, "predicted CoNLL file")->required();
  eval_cmd->add_option("--gold", gold_path, "gold CoNLL file")->required();
  eval_cmd->add_option("--task", eval_task, "pos | ner | chunk (adds span F1)");
  eval_cmd->add_option("--pred-column", pred_column, "tag column in --pred (default: last)");
  eval_cmd->add_option("--gold-column", gold_column, "tag column in --gold (default: last)");

  // senses
  auto* senses_cmd = app.add_subcommand("senses", "train the multi-sense embedding model");
  std::string senses_input, senses_output, retag_path;
  std::size_t senses_token_column = 0;
  SenseTrainConfig sense_cfg;
  sense_cfg.dim = 50;
  senses_cmd->add_option("--input", senses_input, "token corpus (CoNLL)")->required();
  senses_cmd->add_option("--output", senses_output, "inventory file to write")->required();
  senses_cmd->add_option("--token-column", senses_token_column, "token column");
  senses_cmd->add_option("--dim", sense_cfg.dim, "sense vector dimension");
  senses_cmd->add_option("--window", sense_cfg.window, "context window");
  senses_cmd->add_option("--epochs", sense_cfg.epochs, "training epochs");
  senses_cmd->add_option("--max-senses", sense_cfg.max_senses, "prototype cap K");
  senses_cmd->add_option("--alpha", sense_cfg.alpha, "sense-growth control");
  senses_cmd->add_option("--negatives", sense_cfg.negatives, "negative samples");
  senses_cmd->add_option("--learning-rate", sense_cfg.learning_rate, "SGD step size");
  senses_cmd->add_option("--new-sense-prior", sense_cfg.new_sense_prior,
                         "prior probability of an unused slot");
  senses_cmd->add_option("--new-sense-cosine", sense_cfg.new_sense_cosine,
                         "cosine threshold that opens a new slot");
  senses_cmd->add_option("--seed", sense_cfg.seed, "rng seed");
  senses_cmd->add_option("--retag", retag_path, "also write a sense-tagged corpus");

  // suffixes
  auto* suffix_cmd = app.add_subcommand("suffixes", "build and print the suffix inventory");
  std::string suffix_input, suffix_list;
  std::size_t suffix_threshold = 5, suffix_token_column = 0;
  suffix_cmd->add_option("--input", suffix_input, "training corpus (CoNLL)")->required();
  suffix_cmd->add_option("--list", suffix_list, "candidate suffix list file")->required();
  suffix_cmd->add_option("--threshold", suffix_threshold, "admission frequency threshold");
  suffix_cmd->add_option("--token-column", suffix_token_column, "token column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*train_cmd) {
      RunConfig run = parse_run_config(config_path);
      if (!checkpoint_path.empty()) run.checkpoint_path = checkpoint_path;
      return run.precision == "f32" ? run_train<float>(run) : run_train<double>(run);
    }
    if (*tag_cmd) {
      RunConfig run = parse_run_config(tag_config);
      return run.precision == "f32"
                 ? run_tag<float>(run, tag_checkpoint, input_path, output_path)
                 : run_tag<double>(run, tag_checkpoint, input_path, output_path);
    }
    if (*eval_cmd)
      return run_eval(pred_path, gold_path, eval_task, pred_column, gold_column);
    if (*senses_cmd)
      return run_senses(senses_input, senses_output, senses_token_column, sense_cfg,
                        retag_path);
    if (*suffix_cmd)
      return run_suffixes(suffix_input, suffix_list, suffix_threshold,
                          suffix_token_column);
  } catch (const seqlab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
