#pragma once

#include <memory>
#include <string>
#include <vector>

#include "seqlab/embeddings.hpp"
#include "seqlab/train.hpp"

namespace seqlab {

// Everything a run needs, assembled from a RunConfig: corpora (BIO2-repaired
// for span tasks), vocabularies, feature inventories, and the model itself.
// Construction is deterministic, so `tag` and `eval` rebuild the exact
// training-time model before loading a checkpoint; any drift surfaces as a
// shape mismatch when the checkpoint is read.
template <class Real>
struct BuiltRun {
  RunConfig run;
  std::vector<LabeledSentence> train, valid, test;
  std::unique_ptr<TaggerModel<Real>> model;
};

namespace detail {

inline LabeledSentence normalized_copy(const LabeledSentence& s, bool lowercase) {
  LabeledSentence out = s;
  for (auto& tok : out.tokens) {
    tok = normalize_numbers(tok);
    if (lowercase)
      for (char& c : tok) c = char(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

}  // namespace detail

template <class Real>
BuiltRun<Real> build_run(const RunConfig& run_in) {
  RunConfig run = run_in;
  run.validate();

  BuiltRun<Real> built;
  built.train = read_conll(run.train_path, run.token_column, run.tag_column);
  require(!built.train.empty(), "training corpus is empty: ", run.train_path);
  if (!run.valid_path.empty())
    built.valid = read_conll(run.valid_path, run.token_column, run.tag_column);
  if (!run.test_path.empty())
    built.test = read_conll(run.test_path, run.token_column, run.tag_column);

  if (run.span_task()) {
    for (auto* split : {&built.train, &built.valid, &built.test})
      for (auto& s : *split) s.tags = to_bio2(s.tags);
  }
  if (built.valid.empty() && run.epochs > 0 && built.train.size() >= 2) {
    auto carved = carve_validation(built.train, 0.1, run.seed);
    built.train = std::move(carved.first);
    built.valid = std::move(carved.second);
  }

  // Lookup-side vocabulary over normalized (and optionally lowercased) forms.
  std::vector<LabeledSentence> lookup_corpus;
  lookup_corpus.reserve(built.train.size());
  for (const auto& s : built.train)
    lookup_corpus.push_back(detail::normalized_copy(s, run.model.lowercase_lookup));
  Vocab vocab = build_vocab(lookup_corpus, run.min_count);
  Vocab chars = build_char_vocab(built.train);
  TagSet tags(built.train);

  SuffixInventory suffixes;
  if (run.model.use_suffix)
    suffixes = build_suffix_inventory(built.train, run.suffix_list_path,
                                      run.suffix_threshold);

  SenseInventory<Real> senses;
  if (run.model.use_sense) {
    if (!run.sense_inventory_path.empty()) {
      senses = SenseInventory<Real>::load(run.sense_inventory_path);
    } else {
      SenseTrainConfig cfg = run.sense;
      if (cfg.dim == 0) cfg.dim = run.model.word_dim;
      std::vector<LabeledSentence> sense_corpus;
      sense_corpus.reserve(built.train.size());
      for (const auto& s : built.train)
        sense_corpus.push_back(detail::normalized_copy(s, false));
      senses = train_senses<Real>(sense_corpus, cfg);
    }
  }

  const Tensor<Real>* pretrained = nullptr;
  PretrainedEmbeddings<Real> loaded;
  if (!run.pretrained_path.empty()) {
    loaded = load_pretrained_embeddings<Real>(run.pretrained_path, vocab,
                                              run.model.word_dim, run.seed);
    pretrained = &loaded.matrix;
  }

  built.model = std::make_unique<TaggerModel<Real>>(
      run.model, std::move(vocab), std::move(chars), std::move(tags),
      std::move(suffixes), std::move(senses), run.seed, pretrained);
  built.run = std::move(run);
  return built;
}

// Mirrors the input file with a predicted-tag column appended: token lines
// gain a tag, blank and -DOCSTART- lines pass through, so line counts match.
template <class Real>
void tag_file(TaggerModel<Real>& model, const std::string& input_path,
              const std::string& output_path, std::size_t token_column) {
  std::ifstream is(input_path);
  require(is.good(), "cannot open input: ", input_path);
  std::ofstream os(output_path);
  require(os.good(), "cannot open output: ", output_path);

  std::vector<std::string> pending_lines;
  std::vector<std::string> pending_tokens;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (pending_tokens.empty()) {
      for (const auto& l : pending_lines) os << l << '\n';
      pending_lines.clear();
      return;
    }
    LabeledSentence sentence;
    sentence.tokens = pending_tokens;
    sentence.tags.assign(pending_tokens.size(), "O");
    TagSequence decoded = model.predict(model.prepare(sentence));
    std::size_t next = 0;
    for (const auto& l : pending_lines) {
      if (detail::blank_line(l) || l.rfind("-DOCSTART-", 0) == 0) {
        os << l << '\n';
      } else {
        os << l << '\t' << model.tags().tag(decoded[next]) << '\n';
        ++next;
      }
    }
    pending_lines.clear();
    pending_tokens.clear();
  };

  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    pending_lines.push_back(line);
    if (detail::blank_line(line)) {
      flush();
      continue;
    }
    if (line.rfind("-DOCSTART-", 0) == 0) continue;
    std::vector<std::string> cols = detail::split_ws(line);
    require(cols.size() > token_column, input_path, ":", line_no,
            ": expected at least ", token_column + 1, " columns");
    pending_tokens.push_back(cols[token_column]);
  }
  flush();
}

}  // namespace seqlab
