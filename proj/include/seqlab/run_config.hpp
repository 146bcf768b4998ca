#pragma once

#include <fstream>
#include <string>

#include "seqlab/optim.hpp"
#include "seqlab/tagger.hpp"

namespace seqlab {

// One training/tagging run: dataset paths, task, model and optimizer
// settings, feature resources, and the loop controls. Parsed from a
// line-based "key = value" file with [section] headers.
struct RunConfig {
  // [data]
  std::string train_path, valid_path, test_path;
  std::string task = "pos";  // pos | ner | chunk
  std::size_t token_column = 0;
  std::size_t tag_column = 1;

  // [model]
  ModelConfig model;

  // [optim]
  OptimConfig optim;

  // [features]
  std::string suffix_list_path;
  std::size_t suffix_threshold = 5;
  std::size_t min_count = 1;
  std::string pretrained_path;

  // [sense]
  std::string sense_inventory_path;  // trained in-process when empty
  SenseTrainConfig sense;

  // [train]
  std::size_t epochs = 50;
  std::size_t patience = 10;
  std::uint64_t seed = 1;
  std::size_t batch_size = 10;
  std::size_t threads = 1;
  std::string checkpoint_path = "model.ckpt";
  std::string precision = "f64";

  bool span_task() const { return task == "ner" || task == "chunk"; }

  void validate() const {
    require(!train_path.empty(), "run config: [data] train is required");
    require(task == "pos" || task == "ner" || task == "chunk",
            "run config: task must be pos, ner, or chunk");
    require(precision == "f64" || precision == "f32",
            "run config: precision must be f64 or f32");
    require(batch_size >= 1, "run config: batch_size must be >= 1");
    require(threads >= 1, "run config: threads must be >= 1");
    require(model.use_suffix == false || !suffix_list_path.empty(),
            "run config: [features] suffix_list required when use_suffix = true");
    model.validate();
    optim.validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  require(false, "run config: bad boolean '", v, "' for ", key);
  return false;
}

inline std::size_t parse_size(const std::string& v, const std::string& key) {
  try {
    return std::stoull(v);
  } catch (...) {
    detail::fail(detail::message("run config: bad integer '", v, "' for ", key));
  }
  return 0;
}

inline double parse_double(const std::string& v, const std::string& key) {
  try {
    return std::stod(v);
  } catch (...) {
    detail::fail(detail::message("run config: bad number '", v, "' for ", key));
  }
  return 0;
}

}  // namespace detail

inline void apply_run_config_entry(RunConfig& run, const std::string& section,
                                   const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_double;
  using detail::parse_size;
  auto is = [&](const char* s, const char* k) { return section == s && key == k; };

  if (is("data", "train")) run.train_path = value;
  else if (is("data", "valid")) run.valid_path = value;
  else if (is("data", "test")) run.test_path = value;
  else if (is("data", "task")) run.task = value;
  else if (is("data", "token_column")) run.token_column = parse_size(value, key);
  else if (is("data", "tag_column")) run.tag_column = parse_size(value, key);

  else if (is("model", "use_word_emb")) run.model.use_word_emb = parse_bool(value, key);
  else if (is("model", "use_sp_clstm")) run.model.use_sp_clstm = parse_bool(value, key);
  else if (is("model", "use_sense")) run.model.use_sense = parse_bool(value, key);
  else if (is("model", "use_bigram")) run.model.use_bigram = parse_bool(value, key);
  else if (is("model", "use_char_emb")) run.model.use_char_emb = parse_bool(value, key);
  else if (is("model", "use_suffix")) run.model.use_suffix = parse_bool(value, key);
  else if (is("model", "use_spelling")) run.model.use_spelling = parse_bool(value, key);
  else if (is("model", "use_prev_tag")) run.model.use_prev_tag = parse_bool(value, key);
  else if (is("model", "suffix_placement"))
    run.model.suffix_placement = placement_from_string(value);
  else if (is("model", "spelling_placement"))
    run.model.spelling_placement = placement_from_string(value);
  else if (is("model", "char_placement"))
    run.model.char_placement = placement_from_string(value);
  else if (is("model", "share_char_table"))
    run.model.share_char_table = parse_bool(value, key);
  else if (is("model", "lowercase_lookup"))
    run.model.lowercase_lookup = parse_bool(value, key);
  else if (is("model", "forbid_invalid_transitions"))
    run.model.forbid_invalid_transitions = parse_bool(value, key);
  else if (is("model", "word_dim")) run.model.word_dim = parse_size(value, key);
  else if (is("model", "char_dim")) run.model.char_dim = parse_size(value, key);
  else if (is("model", "char_hidden")) run.model.char_hidden = parse_size(value, key);
  else if (is("model", "sp_hidden")) run.model.sp_hidden = parse_size(value, key);
  else if (is("model", "head_hidden")) run.model.head_hidden = parse_size(value, key);
  else if (is("model", "tag_embed_dim"))
    run.model.tag_embed_dim = parse_size(value, key);
  else if (is("model", "lstm_layers")) run.model.lstm_layers = parse_size(value, key);

  else if (is("optim", "optimizer")) run.optim.kind = optimizer_from_string(value);
  else if (is("optim", "learning_rate"))
    run.optim.learning_rate = parse_double(value, key);
  else if (is("optim", "momentum")) run.optim.momentum = parse_double(value, key);
  else if (is("optim", "weight_decay"))
    run.optim.weight_decay = parse_double(value, key);
  else if (is("optim", "lr_decay")) run.optim.lr_decay = parse_double(value, key);
  else if (is("optim", "clip_norm")) run.optim.clip_norm = parse_double(value, key);
  else if (is("optim", "dropout")) run.optim.dropout = parse_double(value, key);

  else if (is("features", "suffix_list")) run.suffix_list_path = value;
  else if (is("features", "suffix_threshold"))
    run.suffix_threshold = parse_size(value, key);
  else if (is("features", "min_count")) run.min_count = parse_size(value, key);
  else if (is("features", "pretrained_embeddings")) run.pretrained_path = value;

  else if (is("sense", "inventory")) run.sense_inventory_path = value;
  else if (is("sense", "max_senses")) run.sense.max_senses = parse_size(value, key);
  else if (is("sense", "dim")) run.sense.dim = parse_size(value, key);
  else if (is("sense", "window")) run.sense.window = parse_size(value, key);
  else if (is("sense", "epochs")) run.sense.epochs = parse_size(value, key);
  else if (is("sense", "alpha")) run.sense.alpha = parse_double(value, key);
  else if (is("sense", "new_sense_prior"))
    run.sense.new_sense_prior = parse_double(value, key);
  else if (is("sense", "new_sense_cosine"))
    run.sense.new_sense_cosine = parse_double(value, key);
  else if (is("sense", "negatives")) run.sense.negatives = parse_size(value, key);
  else if (is("sense", "learning_rate"))
    run.sense.learning_rate = parse_double(value, key);
  else if (is("sense", "seed")) run.sense.seed = parse_size(value, key);
  else if (is("sense", "first_sense_weight"))
    run.sense.first_sense_weight = parse_double(value, key);

  else if (is("train", "epochs")) run.epochs = parse_size(value, key);
  else if (is("train", "patience")) run.patience = parse_size(value, key);
  else if (is("train", "seed")) run.seed = parse_size(value, key);
  else if (is("train", "batch_size")) run.batch_size = parse_size(value, key);
  else if (is("train", "threads")) run.threads = parse_size(value, key);
  else if (is("train", "checkpoint")) run.checkpoint_path = value;
  else if (is("train", "precision")) run.precision = value;

  else
    detail::fail(detail::message("run config: unknown key '", key, "' in section [",
                                 section, "]"));
}

inline RunConfig parse_run_config(std::istream& is, const std::string& origin) {
  RunConfig run;
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      require(t.back() == ']', origin, ":", line_no, ": unterminated section header");
      section = t.substr(1, t.size() - 2);
      continue;
    }
    auto eq = t.find('=');
    require(eq != std::string::npos, origin, ":", line_no,
            ": expected 'key = value'");
    std::string key = detail::trim(t.substr(0, eq));
    std::string value = detail::trim(t.substr(eq + 1));
    require(!key.empty(), origin, ":", line_no, ": empty key");
    apply_run_config_entry(run, section, key, value);
  }
  return run;
}

inline RunConfig parse_run_config(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), "cannot open run config: ", path);
  return parse_run_config(is, path);
}

}  // namespace seqlab
